#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Minimal RFC 4180 reader/writer: fields containing a comma, quote or newline
// are quoted, quotes doubled.
namespace interact::csv {

using Row = std::vector<std::string>;

void write_row(std::ostream& out, const Row& row);
std::vector<Row> read(std::istream& in);  // throws ParseError on an unterminated quote
std::string format_double(double v);      // shortest round-trip form

}  // namespace interact::csv
