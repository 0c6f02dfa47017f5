#include "fvmt/csv.hpp"

#include <charconv>
#include <cstdio>

namespace fvmt {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    }
    return std::string(buf, ptr);
}

CsvRow& CsvRow::cell(const std::string& s) {
    if (!first_) os_ << ',';
    first_ = false;
    os_ << s;
    return *this;
}

CsvRow::~CsvRow() { os_ << '\n'; }

} // namespace fvmt
