#pragma once

// Plain-text artifacts: image-line data files, CSV tables, plot scripts and file checksums.

#include <openssl/evp.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ipip/core.hpp"

namespace ipip {

/// File-system failure (missing file, unwritable directory).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed content in an input data file.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest round-trip decimal form.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Column-oriented CSV table with a one-line header.
class CsvTable {
 public:
  void add(std::string name, std::vector<double> values) {
    if (!cols_.empty() && values.size() != cols_.front().size())
      throw std::invalid_argument("CsvTable: column " + name + " has a different length");
    names_.push_back(std::move(name));
    cols_.push_back(std::move(values));
  }

  void add_complex(const std::string& stem, std::span<const cplx> v) {
    std::vector<double> re(v.size()), im(v.size()), a2(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      re[i] = v[i].real();
      im[i] = v[i].imag();
      a2[i] = std::norm(v[i]);
    }
    add(stem + "_re", std::move(re));
    add(stem + "_im", std::move(im));
    add(stem + "_abs2", std::move(a2));
  }

  const std::vector<std::string>& names() const { return names_; }

  std::string str() const {
    std::string s;
    for (std::size_t c = 0; c < names_.size(); ++c) s += (c ? "," : "") + names_[c];
    s += '\n';
    const std::size_t rows = cols_.empty() ? 0 : cols_.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols_.size(); ++c) {
        if (c) s += ',';
        s += fmt(cols_[c][r]);
      }
      s += '\n';
    }
    return s;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> cols_;
};

// Image data format:
//   # ipip-image x_min=<v> x_max=<v> intervals=<n>
//   x,re,im
//   <x>,<re>,<im>      (one row per node, ascending x)
// The metadata line is optional; without it the grid is inferred from the rows.

inline void write_image_data(const std::filesystem::path& path, const ImageLine& line) {
  const XGrid& g = line.grid();
  std::string s = "# ipip-image x_min=" + fmt(g.x_min()) + " x_max=" + fmt(g.x_max()) +
                  " intervals=" + std::to_string(g.intervals()) + "\nx,re,im\n";
  for (std::size_t i = 0; i < line.size(); ++i)
    s += fmt(g.node(i)) + "," + fmt(line[i].real()) + "," + fmt(line[i].imag()) + "\n";
  write_text(path, s);
}

namespace detail {

inline double parse_number(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw DataError("not a number: '" + tok + "'", line);
  }
  while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
  if (used != tok.size()) throw DataError("trailing characters in '" + tok + "'", line);
  return v;
}

}  // namespace detail

inline ImageLine parse_image_data(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool have_meta = false, have_header = false;
  double meta_min = 0, meta_max = 0;
  std::size_t meta_n = 0;
  std::vector<double> xs;
  std::vector<cplx> vs;
  std::vector<std::size_t> row_line;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    if (raw[0] == '#') {
      std::istringstream ms(raw.substr(1));
      std::string tag, kv;
      ms >> tag;
      if (tag != "ipip-image") continue;
      int seen = 0;
      while (ms >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DataError("malformed metadata '" + kv + "'", line_no);
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "x_min") meta_min = detail::parse_number(val, line_no), seen |= 1;
        else if (key == "x_max") meta_max = detail::parse_number(val, line_no), seen |= 2;
        else if (key == "intervals") {
          const double n = detail::parse_number(val, line_no);
          if (n < 0 || n != std::floor(n)) throw DataError("intervals must be a non-negative integer", line_no);
          meta_n = static_cast<std::size_t>(n);
          seen |= 4;
        } else {
          throw DataError("unknown metadata key '" + key + "'", line_no);
        }
      }
      if (seen != 7) throw DataError("metadata needs x_min, x_max and intervals", line_no);
      have_meta = true;
      continue;
    }
    if (!have_header) {
      std::string h;
      for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) h += c;
      if (h != "x,re,im") throw DataError("expected header 'x,re,im'", line_no);
      have_header = true;
      continue;
    }
    std::vector<std::string> tok;
    std::stringstream ls(raw);
    for (std::string t; std::getline(ls, t, ',');) tok.push_back(t);
    if (tok.size() != 3) throw DataError("expected 3 columns, found " + std::to_string(tok.size()), line_no);
    const double x = detail::parse_number(tok[0], line_no);
    const double re = detail::parse_number(tok[1], line_no), im = detail::parse_number(tok[2], line_no);
    if (!std::isfinite(x) || !std::isfinite(re) || !std::isfinite(im)) throw DataError("non-finite value", line_no);
    if (!xs.empty() && !(x > xs.back())) throw DataError("x column is not strictly increasing", line_no);
    xs.push_back(x);
    vs.emplace_back(re, im);
    row_line.push_back(line_no);
  }
  if (!have_header) throw DataError("missing header 'x,re,im'", line_no);
  if (xs.size() < 3) throw DataError("at least 3 data rows required", line_no);
  const double x0 = have_meta ? meta_min : xs.front(), x1 = have_meta ? meta_max : xs.back();
  const std::size_t n = have_meta ? meta_n : xs.size() - 1;
  if (n + 1 != xs.size())
    throw DataError("metadata declares " + std::to_string(n + 1) + " rows, found " + std::to_string(xs.size()),
                    line_no);
  XGrid grid = [&] {
    try {
      return XGrid(x0, x1, n);
    } catch (const std::domain_error& e) {
      throw DataError(e.what(), 1);
    }
  }();
  const double tol = 1e-9 * std::max(1.0, std::abs(x1));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - grid.node(i)) > tol) throw DataError("x column is not a uniform grid", row_line[i]);
  return {grid, std::move(vs)};
}

inline ImageLine load_image_data(const std::filesystem::path& path) { return parse_image_data(read_text(path)); }

/// Lower-case hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = read_text(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace ipip
