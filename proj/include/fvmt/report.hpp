#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fvmt {

// One named inequality instance: lhs <= rhs up to a numerical slack.
struct EstimateReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    double slack = 0.0;  // tolerance used for the pass decision
    bool passed = false; // margin >= -slack

    static EstimateReport make(std::string name, double lhs, double rhs, double slack);
};

bool all_passed(const std::vector<EstimateReport>& reports);

// CSV schema: name,lhs,rhs,margin,slack,passed
void write_reports_csv(const std::vector<EstimateReport>& reports, std::ostream& os);

// JSON array with the same keys.
std::string reports_to_json(const std::vector<EstimateReport>& reports);

} // namespace fvmt
