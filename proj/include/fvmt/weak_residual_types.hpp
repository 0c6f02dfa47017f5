#pragma once

#include <functional>
#include <optional>
#include <string>

namespace fvmt {

// Admissible test function on [0, T] x [0, 1] with evaluable derivatives and
// eta(T, .) = 0.
struct TestFunction {
    std::function<double(double, double)> eval;
    std::function<double(double, double)> dt_eval;
    std::function<double(double, double)> dx_eval;
    std::string label;

    // Optional product structure eval = tf(t) * sx(x); the evaluators hoist
    // per-cell spatial moments out of the frame loop when it is present.
    struct Product {
        std::function<double(double)> tf, dtf;
        std::function<double(double)> sx, dsx;
    };
    std::optional<Product> product;
};

} // namespace fvmt
