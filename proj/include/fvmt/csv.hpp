#pragma once

#include <ostream>
#include <string>

namespace fvmt {

// Shortest round-trip representation of a double. Identical input bits give
// identical output bytes, which is what makes rerun CSVs byte-comparable.
std::string format_double(double v);

// Minimal row-oriented CSV emitter. Cells are pre-formatted strings; numeric
// cells should go through format_double.
class CsvRow {
public:
    explicit CsvRow(std::ostream& os) : os_(os) {}
    CsvRow& cell(const std::string& s);
    CsvRow& cell(double v) { return cell(format_double(v)); }
    CsvRow& cell(long long v) { return cell(std::to_string(v)); }
    CsvRow& cell(int v) { return cell(std::to_string(v)); }
    ~CsvRow();

private:
    std::ostream& os_;
    bool first_ = true;
};

} // namespace fvmt
