#include "ladpm/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ladpm/errors.hpp"

namespace ladpm {

namespace {

constexpr char kMagic[8] = {'L', 'A', 'D', 'P', 'M', 'S', 'S', '1'};

static_assert(std::endian::native == std::endian::little, "binary dumps assume little-endian");

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void append_vec(std::string& line, const Vec& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    line += ',';
    line += format_double(v[k]);
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& set) {
  set.validate();
  auto out = open_out(path);
  std::string line;
  for (Eigen::Index k = 0; k < set.dim(); ++k) {
    if (k) line += ',';
    line += "x" + std::to_string(k);
  }
  out << line << '\n';
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    line.clear();
    for (Eigen::Index k = 0; k < set.dim(); ++k) {
      if (k) line += ',';
      line += format_double(set.samples(r, k));
    }
    out << line << '\n';
  }
  finish(out, path);
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
  const auto dim = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index cols = 0;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      // Subnormals may report ERANGE; strtod yields their exact value and inf on overflow.
      if (ec == std::errc::result_out_of_range && ptr == end) {
        v = std::strtod(cell.c_str(), nullptr);
        if (std::isfinite(v)) ec = std::errc();
      }
      if (ptr != end || ec != std::errc() || cell.empty()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      values.push_back(v);
      ++cols;
    }
    if (cols != dim) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(dim) + " columns");
    }
  }
  SampleSet set;
  const auto n = static_cast<Eigen::Index>(values.size()) / dim;
  set.samples = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, dim);
  return set;
}

void write_samples_binary(const std::filesystem::path& path, const SampleSet& set) {
  set.validate();
  auto out = open_out(path, std::ios::out | std::ios::binary);
  const std::uint64_t header[2] = {static_cast<std::uint64_t>(set.size()),
                                   static_cast<std::uint64_t>(set.dim())};
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = set.samples;
  out.write(reinterpret_cast<const char*>(rows.data()),
            static_cast<std::streamsize>(rows.size() * sizeof(double)));
  finish(out, path);
}

SampleSet read_samples_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  char magic[8];
  std::uint64_t header[2];
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError("'" + path.string() + "' is not a sample dump");
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      static_cast<Eigen::Index>(header[0]), static_cast<Eigen::Index>(header[1]));
  in.read(reinterpret_cast<char*>(rows.data()), static_cast<std::streamsize>(rows.size() * sizeof(double)));
  if (!in) throw IoError("'" + path.string() + "' is truncated");
  SampleSet set;
  set.samples = rows;
  return set;
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<Trajectory>& trajs) {
  auto out = open_out(path);
  Eigen::Index dim = 0;
  for (const auto& tr : trajs) {
    if (!tr.records.empty()) {
      dim = tr.records.front().z.size();
      break;
    }
  }
  std::string line = "chain,step,t";
  for (const char* name : {"z", "xhat", "xtilde"}) {
    for (Eigen::Index k = 0; k < dim; ++k) line += "," + std::string(name) + std::to_string(k);
  }
  out << line << '\n';
  for (std::size_t c = 0; c < trajs.size(); ++c) {
    for (const auto& rec : trajs[c].records) {
      line = std::to_string(c) + "," + std::to_string(rec.step) + "," + format_double(rec.t);
      append_vec(line, rec.z);
      append_vec(line, rec.xhat);
      append_vec(line, rec.xtilde);
      out << line << '\n';
    }
  }
  finish(out, path);
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  std::string line;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) line += ',';
    line += header[k];
  }
  out << line << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw IoError("table row width does not match header");
    line.clear();
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) line += ',';
      line += format_double(row[k]);
    }
    out << line << '\n';
  }
  finish(out, path);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish(out, path);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

}  // namespace ladpm
