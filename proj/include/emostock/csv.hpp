#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace emostock::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: quoted fields, "" escapes, embedded commas and newlines,
// CRLF or LF endings, optional trailing newline.
struct Table {
  Row header;
  std::vector<Row> rows;

  // index of a header column, -1 if absent
  int column(const std::string& name) const;
};

std::vector<Row> parse(std::string_view text);
Table read_table(std::istream& in);
Table read_table(std::string_view text);

// Quotes a field only when it contains a comma, quote, or newline.
std::string escape(std::string_view field);
std::string format_row(std::span<const std::string> fields);
void write_row(std::ostream& out, std::span<const std::string> fields);

bool valid_utf8(std::string_view s);

}  // namespace emostock::csv
