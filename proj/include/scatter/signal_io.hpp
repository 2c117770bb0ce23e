#pragma once

// Signal files.
//
//  * CSV: one sample per line, either `re` or `re,im`. Blank lines and lines
//    starting with '#' are skipped. All lines must have the same arity.
//  * Raw: little-endian IEEE-754 doubles (interleaved re,im when complex)
//    with a sidecar `<file>.meta` holding `N=<count>;complex=<0|1>`.
//
// read_signal() picks the raw reader whenever the sidecar exists.

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "scatter/signal.hpp"

namespace scatter::io {

namespace fs = std::filesystem;

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Signal read_csv_signal(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open signal file " + path.string());
  std::vector<cplx> samples;
  int arity = 0;
  bool any_imag = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    const int a = static_cast<int>(fields.size());
    if (a != 1 && a != 2)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 1 or 2 columns");
    if (arity == 0) arity = a;
    if (a != arity) throw ParseError(path.string() + ":" + std::to_string(lineno) + ": inconsistent column count");
    samples.emplace_back(fields[0], a == 2 ? fields[1] : 0.0);
    any_imag = any_imag || a == 2;
  }
  try {
    if (!any_imag) {
      std::vector<double> re(samples.size());
      for (std::size_t k = 0; k < re.size(); ++k) re[k] = samples[k].real();
      return Signal::from_real(re);
    }
    return Signal(std::move(samples));
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct RawMeta {
  std::size_t n = 0;
  bool complex = false;
};

inline RawMeta parse_meta(const std::string& text) {
  RawMeta meta;
  bool have_n = false, have_c = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.pop_back();
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.erase(item.begin());
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("bad meta entry '" + item + "'");
    const auto key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      if (key == "N") {
        meta.n = std::stoull(value);
        have_n = true;
      } else if (key == "complex") {
        if (value != "0" && value != "1") throw ParseError("complex must be 0 or 1");
        meta.complex = value == "1";
        have_c = true;
      } else {
        throw ParseError("unknown meta key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ParseError("bad meta value '" + value + "'");
    }
  }
  if (!have_n || !have_c) throw ParseError("meta must define N and complex");
  return meta;
}

inline double load_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

inline void store_le_double(double v, unsigned char* p) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b, bits >>= 8) p[b] = static_cast<unsigned char>(bits & 0xff);
}

inline Signal read_raw_signal(const fs::path& path, const fs::path& meta_path) {
  std::ifstream mf(meta_path);
  if (!mf) throw ParseError("cannot open " + meta_path.string());
  std::string text((std::istreambuf_iterator<char>(mf)), std::istreambuf_iterator<char>());
  const RawMeta meta = parse_meta(text);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t values = meta.n * (meta.complex ? 2 : 1);
  if (bytes.size() != values * 8)
    throw ParseError(path.string() + ": expected " + std::to_string(values * 8) + " bytes, found " +
                     std::to_string(bytes.size()));
  try {
    if (!meta.complex) {
      std::vector<double> re(meta.n);
      for (std::size_t k = 0; k < meta.n; ++k) re[k] = load_le_double(&bytes[8 * k]);
      return Signal::from_real(re);
    }
    std::vector<cplx> s(meta.n);
    for (std::size_t k = 0; k < meta.n; ++k)
      s[k] = cplx(load_le_double(&bytes[16 * k]), load_le_double(&bytes[16 * k + 8]));
    return Signal(std::move(s));
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline fs::path meta_path_for(const fs::path& path) { return fs::path(path.string() + ".meta"); }

inline Signal read_signal(const fs::path& path) {
  const auto meta = meta_path_for(path);
  if (fs::exists(meta)) return read_raw_signal(path, meta);
  return read_csv_signal(path);
}

inline void write_csv_signal(const Signal& s, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& z : s.samples()) {
    out << format_double(z.real());
    if (!s.is_real()) out << ',' << format_double(z.imag());
    out << '\n';
  }
}

inline void write_raw_signal(const Signal& s, const fs::path& path) {
  std::vector<unsigned char> bytes;
  bytes.reserve(s.size() * (s.is_real() ? 8 : 16));
  unsigned char buf[8];
  for (const auto& z : s.samples()) {
    store_le_double(z.real(), buf);
    bytes.insert(bytes.end(), buf, buf + 8);
    if (!s.is_real()) {
      store_le_double(z.imag(), buf);
      bytes.insert(bytes.end(), buf, buf + 8);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream meta(meta_path_for(path));
  meta << "N=" << s.size() << ";complex=" << (s.is_real() ? 0 : 1) << '\n';
}

}  // namespace scatter::io
