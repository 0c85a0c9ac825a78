#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace agcore {

struct Series {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
};

// Single-series line chart with labeled axes; tick labels carry 12
// significant digits. The series must be non-empty.
void emit_svg(const Series& s, std::ostream& os);

} // namespace agcore
