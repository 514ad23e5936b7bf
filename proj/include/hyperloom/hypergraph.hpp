#pragma once

// Hypergraph data model and text formats.
//
// Edge-list file:
//   # nodes <N>
//   # max_size <K>
//   0 1
//   0 1 2
//
// Labeled-sample file (TSV):
//   # nodes <N>
//   # max_size <K>
//   <z>\t<mu>\t<i1>\t<i2>...

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperloom/errors.hpp"
#include "hyperloom/positions.hpp"
#include "hyperloom/rng.hpp"

namespace hyperloom {

using NodeId = std::uint32_t;

/// Sorted, duplicate-free set of node indices.
class Hyperedge {
 public:
  Hyperedge() = default;

  /// Sorts the input; throws DomainError on duplicates or fewer than 2 nodes.
  explicit Hyperedge(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    if (nodes_.size() < 2) throw DomainError("hyperedge needs at least 2 nodes");
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
      throw DomainError("hyperedge contains a duplicate node");
  }
  Hyperedge(std::initializer_list<NodeId> nodes) : Hyperedge(std::vector<NodeId>(nodes)) {}

  std::span<const NodeId> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeId operator[](std::size_t i) const noexcept { return nodes_[i]; }
  bool contains(NodeId v) const noexcept { return std::binary_search(nodes_.begin(), nodes_.end(), v); }

  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
  friend auto operator<=>(const Hyperedge& a, const Hyperedge& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.nodes_ <=> b.nodes_;
  }

 private:
  std::vector<NodeId> nodes_;
};

struct HyperedgeHash {
  std::size_t operator()(const Hyperedge& e) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (NodeId v : e.nodes()) h = mix64(h ^ v);
    return static_cast<std::size_t>(h);
  }
};

/// binomial(n, k) as a double (exact below 2^53).
inline double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

class Hypergraph {
 public:
  Hypergraph() = default;

  /// Canonicalizes: edges bucketed by size, sorted, duplicates collapsed.
  Hypergraph(std::size_t n_nodes, std::size_t k_max, std::vector<Hyperedge> edges)
      : n_nodes_(n_nodes), k_max_(k_max), strata_(k_max + 1) {
    if (n_nodes == 0) throw DomainError("hypergraph needs at least one node");
    if (k_max < 2) throw DomainError("max hyperedge size must be at least 2");
    for (auto& e : edges) {
      if (e.size() < 2 || e.size() > k_max) throw DomainError("hyperedge size outside [2, K]");
      if (e.nodes().back() >= n_nodes) throw DomainError("hyperedge node index out of range");
      strata_[e.size()].push_back(std::move(e));
    }
    for (auto& s : strata_) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
  }

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t k_max() const noexcept { return k_max_; }

  /// Realized edges of size k in canonical order; empty for k outside [2, K].
  std::span<const Hyperedge> stratum(std::size_t k) const noexcept {
    if (k < 2 || k > k_max_) return {};
    return strata_[k];
  }

  std::size_t edge_count() const noexcept {
    std::size_t c = 0;
    for (const auto& s : strata_) c += s.size();
    return c;
  }

  bool contains(const Hyperedge& e) const noexcept {
    const auto s = stratum(e.size());
    return std::binary_search(s.begin(), s.end(), e);
  }

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t k_max_ = 0;
  std::vector<std::vector<Hyperedge>> strata_;
};

struct SampleRecord {
  Hyperedge edge;
  int z = 0;
  double mu = 1.0;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Stratified (edge, z, mu) records; the estimator's input.
class LabeledSample {
 public:
  LabeledSample() = default;

  LabeledSample(std::size_t n_nodes, std::size_t k_max) : n_nodes_(n_nodes), k_max_(k_max), strata_(k_max + 1) {
    if (k_max < 2) throw DomainError("max hyperedge size must be at least 2");
  }

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t k_max() const noexcept { return k_max_; }

  void add(SampleRecord rec) {
    const std::size_t k = rec.edge.size();
    if (k < 2 || k > k_max_) throw DomainError("sample record size outside [2, K]");
    if (rec.edge.nodes().back() >= n_nodes_) throw DomainError("sample record node index out of range");
    if (rec.z != 0 && rec.z != 1) throw DomainError("sample record label must be 0 or 1");
    if (!(rec.mu > 0.0 && rec.mu <= 1.0)) throw DomainError("inclusion probability must lie in (0, 1]");
    strata_[k].push_back(std::move(rec));
  }

  std::span<const SampleRecord> stratum(std::size_t k) const noexcept {
    if (k < 2 || k > k_max_) return {};
    return strata_[k];
  }

  std::size_t record_count() const noexcept {
    std::size_t c = 0;
    for (const auto& s : strata_) c += s.size();
    return c;
  }

  /// Throws if an (edge, z) pair repeats inside a stratum.
  void check_unique() const {
    for (const auto& s : strata_) {
      std::vector<std::pair<Hyperedge, int>> keys;
      keys.reserve(s.size());
      for (const auto& r : s) keys.emplace_back(r.edge, r.z);
      std::sort(keys.begin(), keys.end());
      if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        throw DomainError("duplicate (edge, z) record in labeled sample");
    }
  }

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t k_max_ = 0;
  std::vector<std::vector<SampleRecord>> strata_;
};

namespace detail {

struct Header {
  std::size_t n_nodes = 0;
  std::size_t k_max = 0;
};

// Reads "# nodes <N>" and "# max_size <K>" (in that order) from leading
// comment lines; other comment lines (e.g. "# node <id> <label>") are skipped.
inline bool read_header_line(std::string_view sv, Header& h, int& state, std::size_t lineno) {
  if (sv.empty() || sv.front() != '#') return false;
  auto toks = split_whitespace(sv.substr(1));
  if (toks.size() == 2 && toks[0] == "nodes") {
    if (state != 0) throw ParseError(lineno, "duplicate '# nodes' header");
    h.n_nodes = parse_integer<std::size_t>(toks[1], lineno);
    if (h.n_nodes == 0) throw ParseError(lineno, "node count must be positive");
    state = 1;
  } else if (toks.size() == 2 && toks[0] == "max_size") {
    if (state != 1) throw ParseError(lineno, "'# max_size' must follow '# nodes'");
    h.k_max = parse_integer<std::size_t>(toks[1], lineno);
    if (h.k_max < 2) throw ParseError(lineno, "max_size must be at least 2");
    state = 2;
  }
  return true;
}

inline Hyperedge parse_edge(std::span<const std::string_view> toks, const Header& h, std::size_t lineno) {
  if (toks.size() < 2 || toks.size() > h.k_max)
    throw ParseError(lineno, "edge size " + std::to_string(toks.size()) + " outside [2, " + std::to_string(h.k_max) + "]");
  std::vector<NodeId> nodes;
  nodes.reserve(toks.size());
  for (auto t : toks) {
    const auto v = parse_integer<std::uint64_t>(t, lineno);
    if (v >= h.n_nodes) throw ParseError(lineno, "node index " + std::to_string(v) + " >= N");
    nodes.push_back(static_cast<NodeId>(v));
  }
  try {
    return Hyperedge(std::move(nodes));
  } catch (const DomainError& e) {
    throw ParseError(lineno, e.what());
  }
}

inline void write_header(std::ostream& out, std::size_t n, std::size_t k) {
  out << "# nodes " << n << '\n' << "# max_size " << k << '\n';
}

}  // namespace detail

inline Hypergraph parse_hypergraph(std::istream& in) {
  detail::Header h;
  int state = 0;
  std::vector<Hyperedge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    if (detail::read_header_line(sv, h, state, lineno)) continue;
    auto toks = split_whitespace(sv);
    if (toks.empty()) continue;
    if (state != 2) throw ParseError(lineno, "missing '# nodes' / '# max_size' header");
    edges.push_back(detail::parse_edge(toks, h, lineno));
  }
  if (state != 2) throw ParseError(lineno, "missing '# nodes' / '# max_size' header");
  return Hypergraph(h.n_nodes, h.k_max, std::move(edges));
}

inline void write_hypergraph(const Hypergraph& h, std::ostream& out) {
  detail::write_header(out, h.n_nodes(), h.k_max());
  for (std::size_t k = 2; k <= h.k_max(); ++k) {
    for (const auto& e : h.stratum(k)) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) out << ' ';
        out << e[i];
      }
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorClass::data, "write_hypergraph: write failed");
}

inline LabeledSample parse_labeled_sample(std::istream& in) {
  detail::Header h;
  int state = 0;
  LabeledSample sample;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    if (detail::read_header_line(sv, h, state, lineno)) {
      if (state == 2 && sample.k_max() == 0) sample = LabeledSample(h.n_nodes, h.k_max);
      continue;
    }
    auto toks = split_whitespace(sv);
    if (toks.empty()) continue;
    if (state != 2) throw ParseError(lineno, "missing '# nodes' / '# max_size' header");
    if (toks.size() < 4) throw ParseError(lineno, "expected z, mu and at least two node indices");
    SampleRecord rec;
    rec.z = parse_integer<int>(toks[0], lineno);
    if (rec.z != 0 && rec.z != 1) throw ParseError(lineno, "z must be 0 or 1");
    rec.mu = parse_double(toks[1], lineno);
    if (!(rec.mu > 0.0 && rec.mu <= 1.0)) throw ParseError(lineno, "mu must lie in (0, 1]");
    rec.edge = detail::parse_edge(std::span(toks).subspan(2), h, lineno);
    sample.add(std::move(rec));
  }
  if (state != 2) throw ParseError(lineno, "missing '# nodes' / '# max_size' header");
  try {
    sample.check_unique();
  } catch (const DomainError& e) {
    throw ParseError(lineno, e.what());
  }
  return sample;
}

inline void write_labeled_sample(const LabeledSample& s, std::ostream& out) {
  detail::write_header(out, s.n_nodes(), s.k_max());
  for (std::size_t k = 2; k <= s.k_max(); ++k) {
    for (const auto& r : s.stratum(k)) {
      out << r.z << '\t' << format_shortest(r.mu);
      for (NodeId v : r.edge.nodes()) out << '\t' << v;
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorClass::data, "write_labeled_sample: write failed");
}

inline constexpr double kDefaultEnumerationCap = 1e7;

/// All size-k subsets of {0..n-1} in lexicographic order.
inline std::vector<Hyperedge> enumerate_hyperedges(std::size_t n, std::size_t k, double cap = kDefaultEnumerationCap) {
  if (k < 2 || k > n) throw DomainError("enumerate_hyperedges requires 2 <= k <= n");
  if (binomial(n, k) > cap) throw CapacityError("binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") exceeds enumeration cap");
  std::vector<Hyperedge> out;
  out.reserve(static_cast<std::size_t>(binomial(n, k)));
  std::vector<NodeId> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<NodeId>(i);
  while (true) {
    out.emplace_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// Uniform size-k subset of {0..n-1} (Floyd's algorithm), returned sorted.
template <class Rng>
Hyperedge random_hyperedge(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<NodeId> chosen;
  chosen.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const auto t = static_cast<NodeId>(rng.below(j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
      chosen.push_back(t);
    else
      chosen.push_back(static_cast<NodeId>(j));
  }
  return Hyperedge(std::move(chosen));
}

}  // namespace hyperloom
