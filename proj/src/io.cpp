#include "dro/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dro::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return {buf, res.ptr};
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << format_double(data.features(i, j)) << ',';
    out << format_double(data.labels(i)) << '\n';
  }
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream os;
  write_dataset(os, data);
  return os.str();
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset csv: missing header");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const auto header = split_csv_line(line);
  const auto s = static_cast<Index>(header.size()) - 1;
  for (Index j = 0; j < s; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1)) {
      throw std::invalid_argument("dataset csv: expected header x1..xs,y");
    }
  }
  if (header.back() != "y") throw std::invalid_argument("dataset csv: last column must be y");

  std::vector<double> values;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Index>(fields.size()) != s + 1) {
      throw std::invalid_argument("dataset csv: row " + std::to_string(rows + 1) + " has wrong field count");
    }
    for (auto f : fields) {
      const double v = parse_double(f);
      if (!std::isfinite(v)) throw std::invalid_argument("dataset csv: non-finite value");
      values.push_back(v);
    }
    ++rows;
  }
  MatrixX<double> features(rows, s);
  VectorX<double> labels(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < s; ++j) features(i, j) = values[static_cast<std::size_t>(i * (s + 1) + j)];
    labels(i) = values[static_cast<std::size_t>(i * (s + 1) + s)];
  }
  return {std::move(features), std::move(labels)};
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset(in);
}

void save_dataset(const std::string& path, const Dataset& data) { write_file(path, dataset_to_csv(data)); }

void write_trace(std::ostream& out, const RunMetrics& metrics) {
  out << "t,gamma,h_value,grad_theta_norm_sq,inner_steps\n";
  for (std::size_t t = 0; t < metrics.iterations.size(); ++t) {
    const auto& r = metrics.iterations[t];
    out << t << ',' << format_double(r.gamma) << ',' << format_double(r.h_value) << ','
        << format_double(r.grad_theta_norm_sq) << ',' << r.inner_steps << '\n';
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return out;
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace dro::io
