#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dro/core.hpp"

namespace dro::io {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);

/// Dataset CSV: header `x1,...,xs,y`, one sample per row, '.' decimals.
void write_dataset(std::ostream& out, const Dataset& data);
std::string dataset_to_csv(const Dataset& data);
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& data);

/// Training trace rows: t,gamma,h_value,grad_theta_norm_sq,inner_steps.
void write_trace(std::ostream& out, const RunMetrics& metrics);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

void write_file(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace dro::io
