#pragma once

// Minimal comma-separated I/O. Numbers are written with 17 significant digits
// so that parsing a written value gives back the identical double.

#include <cerrno>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "armorsim/error.hpp"

namespace armorsim::csv {

inline std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(std::string_view text, const std::string& where = {}) {
  std::string s(text);
  // trim
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw InvalidInput("empty numeric field" + (where.empty() ? "" : " in " + where));
  s = s.substr(b, e - b + 1);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::abs(v) > 1.0))
    throw InvalidInput("not a number: '" + s + "'" + (where.empty() ? "" : " in " + where));
  return v;
}

/// Splits one line. Fields may be double-quoted, with "" for a literal quote.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  auto finish = [&] {
    if (!was_quoted) {
      while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
      std::size_t lead = 0;
      while (lead < field.size() && field[lead] == ' ') ++lead;
      field.erase(0, lead);
    }
    out.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch != '"')
        field += ch;
      else if (i + 1 < line.size() && line[i + 1] == '"')
        field += line[++i];
      else
        quoted = false;
    } else if (ch == '"') {
      quoted = was_quoted = true;
    } else if (ch == ',') {
      finish();
    } else if (!(was_quoted && ch == '\r')) {
      field += ch;
    }
  }
  finish();
  return out;
}

/// Header plus rows, all fields as strings.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table read(std::istream& in) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto fields = split(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read(in);
}

inline std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace armorsim::csv
