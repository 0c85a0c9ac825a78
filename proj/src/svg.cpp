#include "agcore/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "agcore/errors.hpp"

namespace agcore {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

void emit_svg(const Series& s, std::ostream& os) {
    if (s.points.empty()) throw DataError("refusing to plot an empty series");

    const double width = 880, height = 560;
    const double left = 90, right = 30, top = 50, bottom = 70;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_lo = s.points.front().first, x_hi = x_lo;
    double y_lo = s.points.front().second, y_hi = y_lo;
    for (auto [x, y] : s.points) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }
    // degenerate ranges still need a visible axis span
    if (x_hi == x_lo) {
        double pad = x_lo == 0.0 ? 1.0 : std::abs(x_lo) * 0.5;
        x_lo -= pad;
        x_hi += pad;
    }
    if (y_hi == y_lo) {
        double pad = y_lo == 0.0 ? 1.0 : std::abs(y_lo) * 0.5;
        y_lo -= pad;
        y_hi += pad;
    }

    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
       << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!s.title.empty()) {
        os << "<text x=\"" << num(width / 2) << "\" y=\"28\" text-anchor=\"middle\" "
              "font-family=\"sans-serif\" font-size=\"18\">"
           << escape(s.title) << "</text>\n";
    }

    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
       << num(left + plot_w) << "\" y2=\"" << num(top + plot_h)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
       << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    const int ticks = 5;
    for (int i = 0; i < ticks; ++i) {
        double fx = x_lo + (x_hi - x_lo) * i / (ticks - 1);
        double fy = y_lo + (y_hi - y_lo) * i / (ticks - 1);
        double px = sx(fx), py = sy(fy);
        os << "<line x1=\"" << num(px) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(px)
           << "\" y2=\"" << num(top + plot_h + 6) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(px) << "\" y=\"" << num(top + plot_h + 22)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << num(fx)
           << "</text>\n";
        os << "<line x1=\"" << num(left - 6) << "\" y1=\"" << num(py) << "\" x2=\"" << num(left)
           << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(left - 10) << "\" y=\"" << num(py + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << num(fy)
           << "</text>\n";
    }

    os << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 16)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << escape(s.x_label) << "</text>\n";
    os << "<text x=\"20\" y=\"" << num(top + plot_h / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 "
       << num(top + plot_h / 2) << ")\">" << escape(s.y_label) << "</text>\n";

    if (s.points.size() > 1) {
        os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            os << (i ? " " : "") << num(sx(s.points[i].first)) << "," << num(sy(s.points[i].second));
        }
        os << "\"/>\n";
    }
    for (auto [x, y] : s.points) {
        os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y))
           << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace agcore
