#pragma once
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nps/sbm.hpp"
#include "nps/similarity.hpp"
#include "nps/types.hpp"

namespace nps {

struct ParseError : std::runtime_error {
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

// skip blank lines and '#' comments; returns false at EOF
inline bool next_data_line(std::istream& in, std::string& line, long& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

} // namespace detail

// Plain-text digraph: a header line "n_nodes n_edges", then one "i j" pair
// per edge with 0-based endpoints. Blank lines and '#' comments are ignored.
inline void write_edge_list(const std::string& path, const Digraph& g) {
  auto out = detail::open_out(path);
  out << g.n_nodes << ' ' << g.edges << '\n';
  for (int i = 0; i < g.adj.outerSize(); ++i)
    for (SparseMatd::InnerIterator it(g.adj, i); it; ++it)
      out << it.row() << ' ' << it.col() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline Digraph read_edge_list(const std::string& path) {
  auto in = detail::open_in(path);
  std::string line;
  long lineno = 0;
  if (!detail::next_data_line(in, line, lineno))
    throw ParseError(path, lineno, "missing header line");
  long n = 0, m = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> m)) throw ParseError(path, lineno, "header must be 'n_nodes n_edges'");
    std::string extra;
    if (ss >> extra) throw ParseError(path, lineno, "trailing tokens after header");
  }
  if (n <= 0) throw ParseError(path, lineno, "node count must be positive");
  if (m < 0) throw ParseError(path, lineno, "edge count must be nonnegative");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(m));
  long seen = 0;
  while (detail::next_data_line(in, line, lineno)) {
    std::istringstream ss(line);
    long i = 0, j = 0;
    if (!(ss >> i >> j)) throw ParseError(path, lineno, "edge line must be 'i j'");
    std::string extra;
    if (ss >> extra) throw ParseError(path, lineno, "trailing tokens after edge");
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw ParseError(path, lineno, "endpoint out of range [0, " + std::to_string(n) + ")");
    trips.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
    ++seen;
  }
  if (seen != m)
    throw ParseError(path, lineno,
                     "header promises " + std::to_string(m) + " edges, found " +
                         std::to_string(seen));
  Digraph g;
  g.n_nodes = n;
  g.edges = m;
  g.adj.resize(n, n);
  g.adj.setFromTriplets(trips.begin(), trips.end());
  g.adj.makeCompressed();
  if (g.adj.nonZeros() != static_cast<Eigen::Index>(trips.size()))
    throw std::runtime_error("duplicate edges in " + path);
  return g;
}

// Role assignment: one 1-based integer label per line, node order implicit.
inline void write_assignment(const std::string& path, const Assignment& a) {
  auto out = detail::open_out(path);
  for (int l : a.labels) out << l << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline Assignment read_assignment(const std::string& path) {
  auto in = detail::open_in(path);
  Assignment a;
  std::string line;
  long lineno = 0;
  int maxlab = 0;
  while (detail::next_data_line(in, line, lineno)) {
    std::istringstream ss(line);
    long lab = 0;
    if (!(ss >> lab)) throw ParseError(path, lineno, "label line must be one integer");
    std::string extra;
    if (ss >> extra) throw ParseError(path, lineno, "trailing tokens after label");
    if (lab < 1) throw ParseError(path, lineno, "labels are 1-based positive integers");
    a.labels.push_back(static_cast<int>(lab));
    maxlab = std::max<int>(maxlab, static_cast<int>(lab));
  }
  if (a.labels.empty()) throw ParseError(path, lineno, "no labels found");
  a.q = maxlab;
  a.validate();
  return a;
}

// Binary similarity dump: three little-endian 8-byte header fields
//   int64 N, int64 k (-1 marks the fixed-point limit), double beta²,
// followed by N·N doubles in row-major order.
inline void write_similarity(const std::string& path, const SimilarityState& st) {
  auto out = detail::open_out(path, std::ios::binary);
  std::int64_t n = st.matrix.rows();
  std::int64_t k = st.is_limit ? -1 : st.k;
  double b2 = st.beta2;
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&k), 8);
  out.write(reinterpret_cast<const char*>(&b2), 8);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat rm = st.matrix;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double)) * n * n);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline SimilarityState read_similarity(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::int64_t n = 0, k = 0;
  double b2 = 0.0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&k), 8);
  in.read(reinterpret_cast<char*>(&b2), 8);
  if (!in || n <= 0) throw std::runtime_error("bad similarity header: " + path);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat rm(n, n);
  in.read(reinterpret_cast<char*>(rm.data()),
          static_cast<std::streamsize>(sizeof(double)) * n * n);
  if (!in) throw std::runtime_error("similarity payload truncated: " + path);
  SimilarityState st;
  st.matrix = rm;
  st.k = static_cast<int>(k); // -1 marks the limit, matching the producers
  st.beta2 = b2;
  st.is_limit = k < 0;
  return st;
}

} // namespace nps
