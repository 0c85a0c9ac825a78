#include "agcore/table.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "agcore/errors.hpp"

namespace agcore {

std::string format_cell(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
        if (ec != std::errc()) throw InternalError("failed to format a double");
        return std::string(buf, end);
    }
    return std::get<std::string>(c);
}

namespace {

void check_text(const std::string& s) {
    if (s.find_first_of(",\"\n\r") != std::string::npos) {
        throw InternalError("table cell contains a separator character: '" + s + "'");
    }
}

} // namespace

void emit_csv(const Table& t, std::ostream& os) {
    if (t.header.empty() || t.rows.empty()) throw DataError("refusing to emit an empty table");
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        check_text(t.header[i]);
        os << (i ? "," : "") << t.header[i];
    }
    os << "\n";
    for (const std::vector<Cell>& row : t.rows) {
        if (row.size() != t.header.size()) {
            throw InternalError("table row width does not match the header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::string text = format_cell(row[i]);
            check_text(text);
            os << (i ? "," : "") << text;
        }
        os << "\n";
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

Cell parse_cell(const std::string& s) {
    if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' ||
                       s[0] == '+' || s[0] == '.')) {
        {
            std::int64_t value = 0;
            auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (ec == std::errc() && end == s.data() + s.size()) return value;
        }
        const char* c = s.c_str();
        char* end = nullptr;
        errno = 0;
        double d = std::strtod(c, &end);
        if (end == c + s.size() && errno == 0 && std::isfinite(d)) return d;
    }
    return s;
}

} // namespace

Table parse_csv(std::istream& is) {
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> parts = split_line(line);
        if (first) {
            t.header = parts;
            first = false;
            continue;
        }
        if (parts.size() != t.header.size()) {
            throw DataError("csv row width does not match the header");
        }
        std::vector<Cell> row;
        row.reserve(parts.size());
        for (const std::string& p : parts) row.push_back(parse_cell(p));
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw DataError("empty csv input");
    return t;
}

bool table_equal(const Table& a, const Table& b) {
    if (a.header != b.header || a.rows.size() != b.rows.size()) return false;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        if (a.rows[r].size() != b.rows[r].size()) return false;
        for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
            if (format_cell(a.rows[r][c]) != format_cell(b.rows[r][c])) return false;
        }
    }
    return true;
}

} // namespace agcore
