#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace agcore {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

// Integers in plain decimal, doubles as the shortest decimal string that
// parses back to the same bits, strings verbatim.
std::string format_cell(const Cell& c);

// Header line plus one line per row, comma separated, LF endings. Cells must
// not contain separators; the table must be non-empty.
void emit_csv(const Table& t, std::ostream& os);

// Reads cells back, preferring int64, then double, then string. Re-emitting
// a parsed table reproduces the input bytes; variant alternatives themselves
// are not guaranteed to survive (an integral-valued double reads as int64).
Table parse_csv(std::istream& is);

// Equality on the rendered text, matching the round-trip contract above.
bool table_equal(const Table& a, const Table& b);

} // namespace agcore
