#include "emostock/csv.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace emostock::csv {

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        row_started = true;
    }
  }
  if (row_started || !row.empty() || !field.empty()) end_row();
  return rows;
}

Table read_table(std::string_view text) {
  Table t;
  auto rows = parse(text);
  if (rows.empty()) return t;
  t.header = std::move(rows.front());
  t.rows.assign(std::make_move_iterator(rows.begin() + 1),
                std::make_move_iterator(rows.end()));
  return t;
}

Table read_table(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_table(std::string_view(buf.view()));
}

std::string escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  out << format_row(fields);
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  auto cont = [&](std::size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0u) == 0x80u;
  };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
    } else if ((c & 0xE0u) == 0xC0u) {
      if (c < 0xC2 || !cont(1)) return false;  // rejects overlong 2-byte forms
      i += 2;
    } else if ((c & 0xF0u) == 0xE0u) {
      if (!cont(1) || !cont(2)) return false;
      unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
      if (c == 0xE0 && c1 < 0xA0) return false;          // overlong
      if (c == 0xED && c1 >= 0xA0) return false;         // surrogates
      i += 3;
    } else if ((c & 0xF8u) == 0xF0u) {
      if (c > 0xF4 || !cont(1) || !cont(2) || !cont(3)) return false;
      unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
      if (c == 0xF0 && c1 < 0x90) return false;          // overlong
      if (c == 0xF4 && c1 >= 0x90) return false;         // > U+10FFFF
      i += 4;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace emostock::csv
