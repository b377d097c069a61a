#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gmnl/bellgame.hpp"
#include "gmnl/bitstring.hpp"
#include "gmnl/certify.hpp"
#include "gmnl/density.hpp"
#include "gmnl/errors.hpp"
#include "gmnl/kv.hpp"
#include "gmnl/netgraph.hpp"

namespace gmnl {

/// Round-trip-exact double formatting (17 significant digits, '.' separator).
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Graphs: one "i j" edge per line, 0-indexed; '#' starts a comment.
// ---------------------------------------------------------------------------

inline NetworkGraph read_graph(std::istream& in) {
  std::vector<std::pair<int, int>> edges;
  int max_vertex = -1;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int i, j;
    if (!(ls >> i)) continue;
    if (!(ls >> j)) throw InputError("read_graph: edge line with a single endpoint: " + line);
    edges.emplace_back(i, j);
    max_vertex = std::max({max_vertex, i, j});
  }
  if (edges.empty()) throw InputError("read_graph: no edges found");
  return NetworkGraph(max_vertex + 1, edges);
}

inline void write_graph(std::ostream& out, const NetworkGraph& g) {
  for (auto [i, j] : g.edges()) out << i << " " << j << "\n";
}

/// Built-in graph names accepted anywhere a graph file path is expected:
/// "triangle", "star:M", "path:N", "complete:N".
inline NetworkGraph graph_from_spec_string(const std::string& name) {
  if (name == "triangle") return NetworkGraph::triangle();
  const auto colon = name.find(':');
  if (colon != std::string::npos) {
    const std::string kind = name.substr(0, colon);
    const int count = std::stoi(name.substr(colon + 1));
    if (kind == "star") return NetworkGraph::star(count);
    if (kind == "path") return NetworkGraph::path(count);
    if (kind == "complete") return NetworkGraph::complete(count);
  }
  std::ifstream file(name);
  if (!file) throw InputError("graph: cannot open '" + name + "'");
  return read_graph(file);
}

// ---------------------------------------------------------------------------
// States: binary container. Header: u32 subsystem count, then the dimensions
// as little-endian u32; payload: row-major complex doubles, real and
// imaginary parts interleaved, little-endian.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw InputError("state: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw InputError("state: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace detail

inline void write_state(std::ostream& out, const DensityOperator& rho) {
  detail::put_u32(out, static_cast<std::uint32_t>(rho.dims().size()));
  for (int d : rho.dims()) detail::put_u32(out, static_cast<std::uint32_t>(d));
  const auto& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      detail::put_f64(out, m(r, c).real());
      detail::put_f64(out, m(r, c).imag());
    }
}

inline DensityOperator read_state(std::istream& in) {
  const std::uint32_t count = detail::get_u32(in);
  if (count == 0 || count > 64) throw InputError("state: implausible subsystem count");
  std::vector<int> dims;
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t d = detail::get_u32(in);
    if (d < 2 || d > 4096) throw InputError("state: implausible subsystem dimension");
    dims.push_back(static_cast<int>(d));
    total *= d;
  }
  CMatrix m(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = detail::get_f64(in);
      const double im = detail::get_f64(in);
      m(r, c) = Complex(re, im);
    }
  return DensityOperator(dims, std::move(m));
}

inline void save_state(const std::string& path, const DensityOperator& rho) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("save_state: cannot open '" + path + "'");
  write_state(out, rho);
}

inline DensityOperator load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("load_state: cannot open '" + path + "'");
  return read_state(in);
}

// ---------------------------------------------------------------------------
// Orbit strategies: "representative -> choice" per line, ASCII words.
// ---------------------------------------------------------------------------

inline void write_strategy(std::ostream& out, const KVStrategy& s) {
  out << "# orbit-strategy n=" << s.code().n() << "\n";
  for (const auto& [rep, choice] : s.table())
    out << BitString(rep, s.code().n()).str() << " -> " << BitString(choice, s.code().n()).str()
        << "\n";
}

inline KVStrategy read_strategy(std::istream& in) {
  std::map<std::uint64_t, std::uint64_t> table;
  int n = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto arrow = line.find("->");
    if (arrow == std::string::npos)
      throw InputError("read_strategy: malformed line: " + line);
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    const BitString rep = BitString::parse(trim(line.substr(0, arrow)));
    const BitString choice = BitString::parse(trim(line.substr(arrow + 2)));
    if (n < 0) n = rep.length();
    if (rep.length() != n || choice.length() != n)
      throw InputError("read_strategy: inconsistent word lengths");
    table[rep.value()] = choice.value();
  }
  if (n < 0) throw InputError("read_strategy: no entries");
  int k = 0;
  while ((1 << k) < n) ++k;
  if ((1 << k) != n) throw InputError("read_strategy: word length must be a power of two");
  return KVStrategy::from_table(k, std::move(table));
}

// ---------------------------------------------------------------------------
// Score estimates: one CSV row.
// ---------------------------------------------------------------------------

inline std::string score_csv_header() { return "value,std_error,samples,method"; }

inline std::string score_csv_row(const ScoreEstimate& s) {
  return fmt_double(s.value) + "," + fmt_double(s.std_error) + "," + std::to_string(s.samples) +
         "," + (s.method == ScoreEstimate::Method::kExact ? "exact" : "monte-carlo");
}

// ---------------------------------------------------------------------------
// Behaviors: CSV with per-party alphabets in '#' metadata and one row per
// nonzero probability. Slot order within a party is ascending neighbor index.
// ---------------------------------------------------------------------------

inline void write_behavior(std::ostream& out, const Behavior& b) {
  out << "# behavior\n# parties=" << b.parties() << "\n# inputs=";
  for (int i = 0; i < b.parties(); ++i)
    out << (i ? "," : "") << b.inputs().sizes()[static_cast<std::size_t>(i)];
  out << "\n# outputs=";
  for (int i = 0; i < b.parties(); ++i)
    out << (i ? "," : "") << b.outputs().sizes()[static_cast<std::size_t>(i)];
  out << "\n";
  for (int i = 0; i < b.parties(); ++i) out << "x" << i << ",";
  for (int i = 0; i < b.parties(); ++i) out << "a" << i << ",";
  out << "p\n";
  for (std::size_t xf = 0; xf < b.inputs().total(); ++xf) {
    const auto xs = b.inputs().decode(xf);
    for (std::size_t af = 0; af < b.outputs().total(); ++af) {
      const double v = b.prob(xf, af);
      if (v == 0.0) continue;
      const auto as = b.outputs().decode(af);
      for (int x : xs) out << x << ",";
      for (int a : as) out << a << ",";
      out << fmt_double(v) << "\n";
    }
  }
}

namespace detail {

inline std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace detail

inline Behavior read_behavior(std::istream& in) {
  std::vector<int> inputs, outputs;
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(1, eq - 1);
        const std::string val = line.substr(eq + 1);
        if (key.find("inputs") != std::string::npos) inputs = detail::parse_int_list(val);
        if (key.find("outputs") != std::string::npos) outputs = detail::parse_int_list(val);
      }
      continue;
    }
    if (line[0] == 'x') continue;  // header row
    rows.push_back(line);
  }
  if (inputs.empty() || outputs.empty() || inputs.size() != outputs.size())
    throw InputError("read_behavior: missing or inconsistent alphabet metadata");
  MixedRadix in_radix(inputs), out_radix(outputs);
  std::vector<double> table(in_radix.total() * out_radix.total(), 0.0);
  const std::size_t parties = inputs.size();
  for (const std::string& row : rows) {
    std::istringstream ss(row);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (toks.size() != 2 * parties + 1)
      throw InputError("read_behavior: malformed row: " + row);
    std::vector<int> xs(parties), as(parties);
    for (std::size_t i = 0; i < parties; ++i) xs[i] = std::stoi(toks[i]);
    for (std::size_t i = 0; i < parties; ++i) as[i] = std::stoi(toks[parties + i]);
    table[in_radix.encode(xs) * out_radix.total() + out_radix.encode(as)] = std::stod(toks.back());
  }
  return Behavior(inputs, outputs, std::move(table));
}

// ---------------------------------------------------------------------------
// Bipartite games: CSV rows x,y,a,b,weight,p covering every entry.
// ---------------------------------------------------------------------------

inline void write_game(std::ostream& out, const BellGame& g) {
  out << "# bellgame\n# inputs=" << g.num_x() << "," << g.num_y() << "\n# outputs=" << g.num_a()
      << "," << g.num_b() << "\n";
  out << "x,y,a,b,weight,p\n";
  for (int x = 0; x < g.num_x(); ++x)
    for (int y = 0; y < g.num_y(); ++y)
      for (int a = 0; a < g.num_a(); ++a)
        for (int b = 0; b < g.num_b(); ++b)
          out << x << "," << y << "," << a << "," << b << "," << fmt_double(g.weight(a, b, x, y))
              << "," << fmt_double(g.p(x, y)) << "\n";
}

inline BellGame read_game(std::istream& in) {
  std::vector<int> inputs, outputs;
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(1, eq - 1);
        const std::string val = line.substr(eq + 1);
        if (key.find("inputs") != std::string::npos) inputs = detail::parse_int_list(val);
        if (key.find("outputs") != std::string::npos) outputs = detail::parse_int_list(val);
      }
      continue;
    }
    if (line[0] == 'x') continue;
    rows.push_back(line);
  }
  if (inputs.size() != 2 || outputs.size() != 2)
    throw InputError("read_game: missing alphabet metadata");
  const int nx = inputs[0], ny = inputs[1], na = outputs[0], nb = outputs[1];
  std::vector<double> w(static_cast<std::size_t>(nx) * ny * na * nb, 0.0);
  std::vector<double> p(static_cast<std::size_t>(nx) * ny, 0.0);
  for (const std::string& row : rows) {
    std::istringstream ss(row);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (toks.size() != 6) throw InputError("read_game: malformed row: " + row);
    const int x = std::stoi(toks[0]), y = std::stoi(toks[1]);
    const int a = std::stoi(toks[2]), b = std::stoi(toks[3]);
    if (x < 0 || x >= nx || y < 0 || y >= ny || a < 0 || a >= na || b < 0 || b >= nb)
      throw InputError("read_game: index out of range in row: " + row);
    w[static_cast<std::size_t>(((x * ny + y) * na + a) * nb + b)] = std::stod(toks[4]);
    p[static_cast<std::size_t>(x * ny + y)] = std::stod(toks[5]);
  }
  return BellGame(nx, ny, na, nb, std::move(w), std::move(p));
}

// ---------------------------------------------------------------------------
// Certificates: flat key=value records and a CSV row. Writers are fully
// deterministic so identical runs produce byte-identical files.
// ---------------------------------------------------------------------------

inline void write_certificate_records(std::ostream& out, const Certificate& cert,
                                      const std::vector<std::pair<std::string, std::string>>& prologue = {}) {
  out << "format=certificate\n";
  for (const auto& [k, v] : prologue) out << k << "=" << v << "\n";
  out << "parties=" << cert.parties << "\n";
  out << "edges=" << cert.edges << "\n";
  out << "d=" << cert.d << "\n";
  out << "c=" << cert.c << "\n";
  out << "f_gamma=" << fmt_double(cert.f_gamma) << "\n";
  out << "threshold=" << fmt_double(cert.threshold) << "\n";
  out << "margin=" << fmt_double(cert.margin) << "\n";
  out << "certified=" << (cert.certified ? "true" : "false") << "\n";
  out << "optimized=" << (cert.optimized ? "true" : "false") << "\n";
  if (!cert.note.empty()) out << "note=" << cert.note << "\n";
  out << "ref_lhs_povm=" << fmt_double(ReferenceThresholds::kLhsPovm) << "\n";
  out << "ref_projective_model=" << fmt_double(ReferenceThresholds::kProjectiveModel) << "\n";
  out << "ref_triangle_required=" << fmt_double(ReferenceThresholds::kTriangleRequired) << "\n";
  if (cert.diagnostic) {
    const auto& diag = *cert.diagnostic;
    out << "diag.note=" << diag.note << "\n";
    out << "diag.growth_diverges=" << (diag.growth_diverges ? "true" : "false") << "\n";
    for (const auto& row : diag.rows) {
      const std::string prefix = "diag.k" + std::to_string(row.k) + ".";
      out << prefix << "growth=" << fmt_double(row.growth) << "\n";
      if (row.comparable) {
        out << prefix << "n=" << row.n << "\n";
        out << prefix << "eta=" << fmt_double(row.eta) << "\n";
        out << prefix << "quantum_score=" << fmt_double(row.quantum_score) << "\n";
        out << prefix << "quantum_lhs=" << fmt_double(row.quantum_lhs) << "\n";
        out << prefix << "classical_bound=" << fmt_double(row.classical_bound_k) << "\n";
        out << prefix << "exceeds=" << (row.exceeds ? "true" : "false") << "\n";
        out << prefix << "method="
            << (row.method == ScoreEstimate::Method::kExact ? "exact" : "monte-carlo") << "\n";
      }
    }
  }
}

inline std::string certificate_csv_header() {
  return "parties,edges,d,c,f_gamma,threshold,margin,certified,optimized";
}

inline std::string certificate_csv_row(const Certificate& cert) {
  return std::to_string(cert.parties) + "," + std::to_string(cert.edges) + "," +
         std::to_string(cert.d) + "," + std::to_string(cert.c) + "," + fmt_double(cert.f_gamma) +
         "," + fmt_double(cert.threshold) + "," + fmt_double(cert.margin) + "," +
         (cert.certified ? "true" : "false") + "," + (cert.optimized ? "true" : "false");
}

}  // namespace gmnl
