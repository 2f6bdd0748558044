#ifndef MSROM_IO_HPP
#define MSROM_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "msrom/diagnostics.hpp"

namespace msrom {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// MSRM container: magic "MSRM", u32 version = 1, u64 rows, u64 cols, then
// rows*cols float64 little-endian column-major payload. Round trips are
// bitwise exact.
inline void msrm_write(const std::filesystem::path& path, const Mat& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("msrm_write: cannot open " + path.string());
  const char magic[4] = {'M', 'S', 'R', 'M'};
  const std::uint32_t version = 1;
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) throw IoError("msrm_write: short write to " + path.string());
}

inline Mat msrm_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("msrm_read: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MSRM", 4) != 0)
    throw IoError("msrm_read: bad magic in " + path.string());
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || version != 1)
    throw IoError("msrm_read: unsupported format version in " + path.string());
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in) throw IoError("msrm_read: truncated header in " + path.string());
  Mat m(static_cast<Index>(rows), static_cast<Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in || in.gcount() != static_cast<std::streamsize>(sizeof(double) * m.size()))
    throw IoError("msrm_read: truncated payload in " + path.string());
  return m;
}

// CSV conventions: header row, '.' decimal separator, scientific notation
// with 8 significant digits.
inline std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

inline void write_energy_csv(const std::filesystem::path& path, const EnergyTrace& trace,
                             const EnergyTrace* second = nullptr) {
  std::ofstream out(path);
  if (!out) throw IoError("write_energy_csv: cannot open " + path.string());
  out << (second ? "step,t,energy,reduced_energy\n" : "step,t,energy\n");
  for (size_t k = 0; k < trace.values.size(); ++k) {
    out << k << ',' << csv_num(double(k) * trace.dt) << ',' << csv_num(trace.values[k]);
    if (second) out << ',' << csv_num(second->values[k]);
    out << '\n';
  }
}

inline void write_decay_csv(const std::filesystem::path& path, const Vec& sigma) {
  std::ofstream out(path);
  if (!out) throw IoError("write_decay_csv: cannot open " + path.string());
  out << "index,sigma,sigma_normalized\n";
  for (Index i = 0; i < sigma.size(); ++i)
    out << (i + 1) << ',' << csv_num(sigma(i)) << ',' << csv_num(sigma(i) / sigma(0)) << '\n';
}

inline void write_bound_csv(const std::filesystem::path& path, const Mat& bound) {
  std::ofstream out(path);
  if (!out) throw IoError("write_bound_csv: cannot open " + path.string());
  out << "step,defect,bound\n";
  for (Index k = 0; k < bound.rows(); ++k)
    out << (k + 1) << ',' << csv_num(bound(k, 0)) << ',' << csv_num(bound(k, 1)) << '\n';
}

inline void write_table_csv(const std::filesystem::path& path,
                            const std::vector<ErrorReport>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("write_table_csv: cannot open " + path.string());
  out << "model,variant,n,ntilde,e_sol,e_shape,e_energy,wall_clock_s,speedup\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.variant << ',' << r.n << ',' << r.n_tilde << ','
        << csv_num(r.e_sol) << ',' << csv_num(r.e_shape) << ',' << csv_num(r.e_energy) << ','
        << csv_num(r.wall_clock_s) << ',' << csv_num(r.speedup) << '\n';
  }
}

/// Final-state profile next to the exact one: x[,y],numeric...,exact...
inline void write_profile_csv(const std::filesystem::path& path, const ModelSpec& model,
                              const Vec& state, const Vec& exact_state) {
  std::ofstream out(path);
  if (!out) throw IoError("write_profile_csv: cannot open " + path.string());
  const Index n = model.n_nodes();
  out << (model.grid.dims == 2 ? "x,y" : "x");
  for (int c = 0; c < model.components; ++c)
    out << ",numeric_" << c << ",exact_" << c;
  out << '\n';
  for (Index j = 0; j < n; ++j) {
    out << csv_num(model.grid.x(j));
    if (model.grid.dims == 2) out << ',' << csv_num(model.grid.y(j));
    for (int c = 0; c < model.components; ++c)
      out << ',' << csv_num(state(c * n + j)) << ',' << csv_num(exact_state(c * n + j));
    out << '\n';
  }
}

inline std::vector<Index> indices_from_matrix(const Mat& m) {
  std::vector<Index> idx(static_cast<size_t>(m.size()));
  for (Index i = 0; i < m.size(); ++i) {
    double v = m(i);
    idx[static_cast<size_t>(i)] = static_cast<Index>(v);
    if (static_cast<double>(idx[static_cast<size_t>(i)]) != v)
      throw IoError("indices_from_matrix: non-integer index entry");
  }
  return idx;
}

inline Mat indices_to_matrix(const std::vector<Index>& idx) {
  Mat m(static_cast<Index>(idx.size()), 1);
  for (size_t i = 0; i < idx.size(); ++i) m(static_cast<Index>(i), 0) = double(idx[i]);
  return m;
}

}  // namespace msrom

#endif  // MSROM_IO_HPP
