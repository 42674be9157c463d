#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ladpm/sample_set.hpp"
#include "ladpm/samplers.hpp"

namespace ladpm {

/// Decimal with 17 significant digits, which round-trips every double.
std::string format_double(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Header x0,x1,...; one row per sample.
void write_samples_csv(const std::filesystem::path& path, const SampleSet& set);
SampleSet read_samples_csv(const std::filesystem::path& path);

/// "LADPMSS1", uint64 n, uint64 d, then n*d little-endian doubles in row-major order.
void write_samples_binary(const std::filesystem::path& path, const SampleSet& set);
SampleSet read_samples_binary(const std::filesystem::path& path);

/// Columns chain,step,t,z*,xhat*,xtilde*; trajectory k is written as chain k.
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<Trajectory>& trajs);

/// Header row then one row per entry of `rows`, every row as wide as the header.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Creates the directory (and parents); throws IoError if that fails.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace ladpm
