#include "wildqr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

namespace wildqr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell, std::size_t lineno, std::size_t col) {
  const std::string where =
      "line " + std::to_string(lineno) + ", column " + std::to_string(col + 1);
  if (cell.empty()) throw CsvError("missing value at " + where);
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range)
    throw CsvError("number out of range at " + where + ": '" + cell + "'");
  if (ec != std::errc{} || ptr != last)
    throw CsvError("non-numeric cell at " + where + ": '" + cell + "'");
  if (!std::isfinite(value)) throw CsvError("non-finite value at " + where + ": '" + cell + "'");
  return value;
}

}  // namespace

Dataset read_csv_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open input file: " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw CsvError("empty file: " + path);

  const std::vector<std::string> header = split_line(lines[0]);
  const std::size_t ncol = header.size();
  std::set<std::string> seen;
  for (std::size_t c = 0; c < ncol; ++c) {
    if (header[c].empty())
      throw CsvError("empty header name at line 1, column " + std::to_string(c + 1));
    if (!seen.insert(header[c]).second)
      throw CsvError("duplicate header name '" + header[c] + "'");
  }
  if (lines.size() < 2) throw CsvError("no data rows in " + path);

  const std::size_t n = lines.size() - 1;
  VectorXd y(static_cast<Index>(n));
  MatrixXd x(static_cast<Index>(n), static_cast<Index>(ncol));  // intercept + covariates
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t lineno = r + 2;
    if (lines[r + 1].empty()) throw CsvError("blank line " + std::to_string(lineno));
    const std::vector<std::string> cells = split_line(lines[r + 1]);
    if (cells.size() != ncol)
      throw CsvError("line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                     " cells, expected " + std::to_string(ncol));
    y[static_cast<Index>(r)] = parse_cell(cells[0], lineno, 0);
    x(static_cast<Index>(r), 0) = 1.0;
    for (std::size_t c = 1; c < ncol; ++c)
      x(static_cast<Index>(r), static_cast<Index>(c)) = parse_cell(cells[c], lineno, c);
  }

  std::vector<std::string> names;
  names.reserve(ncol);
  names.emplace_back("Intercept");
  for (std::size_t c = 1; c < ncol; ++c) names.push_back(header[c]);
  try {
    return Dataset(std::move(y), std::move(x), std::move(names));
  } catch (const std::invalid_argument& e) {
    throw CsvError(std::string("invalid dataset in ") + path + ": " + e.what());
  }
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json Json::object() { return Json(); }

Json Json::array() {
  Json j;
  j.kind_ = Kind::Array;
  return j;
}

Json Json::str(std::string v) {
  Json j;
  j.kind_ = Kind::String;
  j.string_ = std::move(v);
  return j;
}

Json Json::num(double v) {
  Json j;
  j.kind_ = Kind::Number;
  j.number_ = v;
  return j;
}

Json Json::integer(long long v) {
  Json j;
  j.kind_ = Kind::Integer;
  j.integer_ = v;
  return j;
}

Json Json::boolean(bool v) {
  Json j;
  j.kind_ = Kind::Bool;
  j.bool_ = v;
  return j;
}

Json& Json::set(const std::string& key, Json v) {
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  elements_.push_back(std::move(v));
  return *this;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
  out += '"';
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

}  // namespace

void Json::write(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (kind_) {
    case Kind::Object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      out += nl;
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += pad;
        escape_into(out, members_[i].first);
        out += indent > 0 ? ": " : ":";
        members_[i].second.write(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += nl;
      }
      out += close_pad;
      out += '}';
      return;
    }
    case Kind::Array: {
      if (elements_.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      out += nl;
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        out += pad;
        elements_[i].write(out, indent, depth + 1);
        if (i + 1 < elements_.size()) out += ',';
        out += nl;
      }
      out += close_pad;
      out += ']';
      return;
    }
    case Kind::String: escape_into(out, string_); return;
    case Kind::Number: out += format_double(number_); return;
    case Kind::Integer: out += std::to_string(integer_); return;
    case Kind::Bool: out += bool_ ? "true" : "false"; return;
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += '\n';
  return out;
}

}  // namespace wildqr
