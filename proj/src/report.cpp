#include "fvmt/report.hpp"

#include "fvmt/csv.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace fvmt {

EstimateReport EstimateReport::make(std::string name, double lhs, double rhs, double slack) {
    if (!std::isfinite(lhs) || !std::isfinite(rhs) || !std::isfinite(slack))
        throw std::runtime_error("estimate report '" + name + "' has non-finite entries");
    EstimateReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.slack = slack;
    r.passed = r.margin >= -slack;
    return r;
}

bool all_passed(const std::vector<EstimateReport>& reports) {
    for (const auto& r : reports)
        if (!r.passed) return false;
    return true;
}

void write_reports_csv(const std::vector<EstimateReport>& reports, std::ostream& os) {
    os << "name,lhs,rhs,margin,slack,passed\n";
    for (const auto& r : reports) {
        CsvRow(os)
            .cell(r.name)
            .cell(r.lhs)
            .cell(r.rhs)
            .cell(r.margin)
            .cell(r.slack)
            .cell(std::string(r.passed ? "true" : "false"));
    }
}

std::string reports_to_json(const std::vector<EstimateReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"name", r.name},
                       {"lhs", r.lhs},
                       {"rhs", r.rhs},
                       {"margin", r.margin},
                       {"slack", r.slack},
                       {"passed", r.passed}});
    }
    return arr.dump(2);
}

} // namespace fvmt
