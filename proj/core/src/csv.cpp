#include "frontier/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "frontier/error.hpp"

namespace frontier {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;
}

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open '" + path + "'");
  return read_stream(in, path);
}

CsvTable CsvTable::read_stream(std::istream& in, const std::string& name) {
  std::string line;
  std::vector<std::string> pending_comments;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      pending_comments.push_back(line);
      continue;
    }
    if (line.empty()) continue;
    break;
  }
  if (line.empty()) throw UserError("'" + name + "' has no header row");
  CsvTable t(split_line(line));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto row = split_line(line);
    if (row.size() != t.cols()) {
      throw UserError("'" + name + "' line " + std::to_string(lineno) + ": expected " +
                      std::to_string(t.cols()) + " fields, got " + std::to_string(row.size()));
    }
    t.cells_.push_back(std::move(row));
  }
  return t;
}

bool CsvTable::has_column(const std::string& name) const {
  return index_.count(name) > 0;
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UserError("missing required column '" + name + "'");
  return it->second;
}

void CsvTable::append_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw InternalError("CsvTable::append_row: field count mismatch");
  }
  cells_.push_back(std::move(row));
}

void CsvTable::write_stream(std::ostream& out) const {
  for (const auto& c : comments_) out << "# " << c << "\n";
  for (std::size_t i = 0; i < header_.size(); ++i) {
    out << header_[i] << (i + 1 < header_.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : cells_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

void CsvTable::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write '" + path + "'");
  write_stream(out);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace frontier
