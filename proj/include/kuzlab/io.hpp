#ifndef KUZLAB_IO_HPP_
#define KUZLAB_IO_HPP_

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "kuzlab/error.hpp"

namespace kuzlab {

// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream &out, const std::vector<std::string> &header)
      : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double> &values) {
    detail::require(values.size() == columns_, "CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }

 private:
  std::ostream &out_;
  std::size_t columns_;
};

inline std::ofstream open_output(const std::string &path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot open output file: " + path);
  return f;
}

}  // namespace kuzlab

#endif  // KUZLAB_IO_HPP_
