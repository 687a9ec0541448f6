#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace frontier {

// Minimal delimited-text table. The dialect is deliberately strict: comma
// separated, first row is the header, no quoting (fields must not contain
// commas or newlines). Lines starting with '#' are metadata/comments and
// are skipped on read.
class CsvTable {
 public:
  static CsvTable read_file(const std::string& path);
  static CsvTable read_stream(std::istream& in, const std::string& name);

  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return cells_.size(); }
  std::size_t cols() const { return header_.size(); }

  bool has_column(const std::string& name) const;
  // Throws UserError if absent.
  std::size_t column(const std::string& name) const;

  const std::string& cell(std::size_t row, std::size_t col) const {
    return cells_[row][col];
  }

  void append_row(std::vector<std::string> row);

  // Leading comment lines emitted before the header, each prefixed "# ".
  void add_comment(const std::string& line) { comments_.push_back(line); }
  const std::vector<std::string>& comments() const { return comments_; }

  void write_file(const std::string& path) const;
  void write_stream(std::ostream& out) const;

 private:
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<std::string> comments_;
};

std::string format_double(double v);

}  // namespace frontier
