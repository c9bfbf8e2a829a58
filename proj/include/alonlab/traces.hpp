#pragma once

// Exact combinatorial trace counters (irreducible, strongly irreducible,
// selective) and the polynomial identities tying them to the adjacency
// spectrum. All counters run integer DP over directed-edge states; floating
// point only enters on the eigenvalue side.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <alonlab/graph.hpp>
#include <alonlab/occurrences.hpp>

namespace alonlab {

// coefficients of q_k (index = power of x): q_1 = x, q_2 = x^2 - d,
// q_k = x q_{k-1} - (d-1) q_{k-2}
inline std::vector<long long> trace_polynomial(int k, int d) {
  if (k < 1) throw domain_error("trace_polynomial: k >= 1");
  std::vector<long long> q1{0, 1}, q2{static_cast<long long>(-d), 0, 1};
  if (k == 1) return q1;
  if (k == 2) return q2;
  std::vector<long long> prev = q1, cur = q2;
  for (int j = 3; j <= k; ++j) {
    std::vector<long long> next(j + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) {
      long long t;
      if (__builtin_mul_overflow(static_cast<long long>(d - 1), prev[i], &t) ||
          __builtin_sub_overflow(next[i], t, &next[i]))
        throw resource_error("trace_polynomial: coefficient overflow");
      (void)t;
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

inline double q_eval_one(int k, int d, double x) {
  if (k < 1) throw domain_error("q_eval: k >= 1");
  double q1 = x, q2 = x * x - d;
  if (k == 1) return q1;
  double prev = q1, cur = q2;
  for (int j = 3; j <= k; ++j) {
    double next = x * cur - (d - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double q_eval(int k, int d, const std::vector<double>& spectrum) {
  double s = 0;
  for (double x : spectrum) s += q_eval_one(k, d, x);
  return s;
}

// mu1^k + mu2^k + (1+(-1)^k)(d-2)/2 with mu the roots of m^2 - x m + (d-1)
inline double sit_tilde_one(int k, int d, double x) {
  std::complex<double> disc = std::sqrt(std::complex<double>(x * x - 4.0 * (d - 1), 0.0));
  std::complex<double> mu1 = (x + disc) / 2.0, mu2 = (x - disc) / 2.0;
  double even = k % 2 == 0 ? static_cast<double>(d - 2) : 0.0;
  return (std::pow(mu1, k) + std::pow(mu2, k)).real() + even;
}

inline double sit_hat_one(int k, int d, double x) {
  double v = sit_tilde_one(k, d, x);
  if (k >= 3 && k % 2 == 1) v -= x;
  return v;
}

inline double sit_eval(int k, int d, const std::vector<double>& spectrum,
                       int half_loops, bool whole_loops_present) {
  if (k < 1) throw domain_error("sit_eval: k >= 1");
  if (half_loops > 0 && whole_loops_present)
    throw domain_error("sit_eval: graphs mixing half- and whole-loops are unsupported");
  bool hat = half_loops > 0;
  double s = 0;
  for (double x : spectrum)
    s += hat ? sit_hat_one(k, d, x) : sit_tilde_one(k, d, x);
  return s;
}

// number of words of length k over a d-letter alphabet-with-inverses that
// reduce to one given irreducible word of length i: walk count to a fixed
// vertex at distance i in the d-regular tree
inline long long n_reduced(int k, int i, int d) {
  if (k < 0 || i < 0 || i > k) throw domain_error("n_reduced: need k >= i >= 0");
  if (d < 1) throw domain_error("n_reduced: d >= 1");
  if ((k - i) % 2 != 0) return 0;
  std::vector<long long> g(k + 2, 0), h(k + 2, 0);
  g[0] = 1;
  for (int t = 0; t < k; ++t) {
    std::fill(h.begin(), h.end(), 0);
    for (int j = 0; j <= t + 1 && j <= k; ++j) {
      long long away = j == 0 ? 0 : g[j - 1];
      long long back;
      if (__builtin_mul_overflow(static_cast<long long>(j == 0 ? d : d - 1),
                                 g[j + 1], &back) ||
          __builtin_add_overflow(away, back, &h[j]))
        throw resource_error("n_reduced: count overflow");
    }
    std::swap(g, h);
  }
  return g[i];
}

inline std::vector<double> adjacency_spectrum(const LabeledGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency(g),
                                                    Eigen::EigenvaluesOnly);
  std::vector<double> s(es.eigenvalues().data(),
                        es.eigenvalues().data() + g.n);
  std::sort(s.rbegin(), s.rend());
  return s;
}

namespace detail {

inline int max_degree(const LabeledGraph& g) {
  auto deg = degrees(g);
  int m = 0;
  for (int x : deg) m = std::max(m, x);
  return m;
}

inline void guard_trace_budget(const LabeledGraph& g, int kmax, double ops,
                               double ops_budget) {
  if (ops > ops_budget) throw resource_error("trace DP budget exceeded");
  int delta = max_degree(g);
  if (delta > 1 &&
      static_cast<double>(g.n) * delta * std::pow(delta - 1.0, kmax - 1) > 4.4e18)
    throw resource_error("trace counts would overflow 64 bits");
}

}  // namespace detail

struct TraceCounts {
  std::vector<long long> ird, sit;  // index k in 1..kmax; [0] unused
};

// one pass of per-start-edge DP yields both trace families for all k <= kmax:
// closing the walk freely gives the irreducible count, excluding a final
// opposite-of-first step gives the strongly irreducible one
inline TraceCounts count_traces(const LabeledGraph& g, int kmax,
                                double ops_budget = 4e9) {
  if (kmax < 1) throw domain_error("count_traces: kmax >= 1");
  auto nb = nonbacktracking(g);
  long long arcs = 0;
  for (const auto& s : nb.succ) arcs += static_cast<long long>(s.size());
  detail::guard_trace_budget(
      g, kmax,
      static_cast<double>(nb.num_nodes) * kmax * (nb.num_nodes + arcs + 1),
      ops_budget);
  TraceCounts tc;
  tc.ird.assign(kmax + 1, 0);
  tc.sit.assign(kmax + 1, 0);
  std::vector<std::vector<int>> in_nodes(g.n);
  for (int i = 0; i < nb.num_nodes; ++i)
    in_nodes[g.head(nb.node_to_edge[i])].push_back(i);
  std::vector<long long> x(nb.num_nodes), y(nb.num_nodes);
  for (int s = 0; s < nb.num_nodes; ++s) {
    int e1 = nb.node_to_edge[s];
    int v0 = g.tail(e1);
    int opp_node = nb.edge_to_node[g.opp(e1)];
    std::fill(x.begin(), x.end(), 0);
    x[s] = 1;
    for (int j = 1; j <= kmax; ++j) {
      if (j > 1) {
        std::fill(y.begin(), y.end(), 0);
        for (int i2 = 0; i2 < nb.num_nodes; ++i2) {
          if (!x[i2]) continue;
          for (int w : nb.succ[i2]) y[w] += x[i2];
        }
        std::swap(x, y);
      }
      long long close = 0;
      for (int f : in_nodes[v0]) close += x[f];
      tc.ird[j] += close;
      tc.sit[j] += close - x[opp_node];
    }
  }
  // convention: each half-loop is one strongly irreducible closed walk
  tc.sit[1] += g.num_half_loops();
  return tc;
}

// closed walks of length k with no step immediately reversed, anchored at
// their start vertex; one directed-edge DP per start vertex
inline long long irred_trace(const LabeledGraph& g, int k,
                             double ops_budget = 4e9) {
  if (k < 1) throw domain_error("irred_trace: k >= 1");
  auto nb = nonbacktracking(g);
  long long arcs = 0;
  for (const auto& s : nb.succ) arcs += static_cast<long long>(s.size());
  detail::guard_trace_budget(
      g, k, static_cast<double>(g.n) * k * (nb.num_nodes + arcs + 1),
      ops_budget);
  std::vector<std::vector<int>> in_nodes(g.n), out_nodes(g.n);
  for (int i = 0; i < nb.num_nodes; ++i) {
    in_nodes[g.head(nb.node_to_edge[i])].push_back(i);
    out_nodes[g.tail(nb.node_to_edge[i])].push_back(i);
  }
  long long total = 0;
  std::vector<long long> x(nb.num_nodes), y(nb.num_nodes);
  for (int v = 0; v < g.n; ++v) {
    std::fill(x.begin(), x.end(), 0);
    for (int i : out_nodes[v]) x[i] = 1;
    for (int j = 2; j <= k; ++j) {
      std::fill(y.begin(), y.end(), 0);
      for (int i2 = 0; i2 < nb.num_nodes; ++i2) {
        if (!x[i2]) continue;
        for (int w : nb.succ[i2]) y[w] += x[i2];
      }
      std::swap(x, y);
    }
    for (int f : in_nodes[v]) total += x[f];
  }
  return total;
}

inline long long strongly_irred_trace(const LabeledGraph& g, int k,
                                      double ops_budget = 4e9) {
  return count_traces(g, k, ops_budget).sit[k];
}

// exact Tr(A^k) by integer walk DP per start vertex
inline long long adjacency_power_trace(const LabeledGraph& g, int k,
                                       double ops_budget = 4e9) {
  if (k < 1) throw domain_error("adjacency_power_trace: k >= 1");
  int delta = detail::max_degree(g);
  if (delta > 0 && static_cast<double>(g.n) * std::pow(delta, k) > 4.4e18)
    throw resource_error("walk counts would overflow 64 bits");
  if (static_cast<double>(g.n) * k * (2 * g.num_pairs() + g.n + 1) > ops_budget)
    throw resource_error("walk DP budget exceeded");
  long long total = 0;
  std::vector<long long> x(g.n), y(g.n);
  for (int v = 0; v < g.n; ++v) {
    std::fill(x.begin(), x.end(), 0);
    x[v] = 1;
    for (int j = 1; j <= k; ++j) {
      std::fill(y.begin(), y.end(), 0);
      for (int e = 0; e < 2 * g.num_pairs(); ++e)
        if (g.edge_valid(e)) y[g.head(e)] += x[g.tail(e)];
      std::swap(x, y);
    }
    total += x[v];
  }
  return total;
}

// irreducible closed walks of length k such that no contiguous subpath of
// length <= s traces out a subgraph containing a copy of a listed tangle;
// depth-first enumeration with per-occurrence counters over the trailing
// window of edge pairs
inline long long selective_trace(const LabeledGraph& g, int k, int s,
                                 const std::vector<LabeledGraph>& tangles,
                                 long long expansion_budget = 200000000) {
  if (k < 1 || s < 1) throw domain_error("selective_trace: k, s >= 1");
  std::vector<std::vector<int>> occ;
  for (const auto& t : tangles)
    for (auto& o : find_occurrences(g, t)) {
      if (o.pair_ids.empty()) return 0;  // edgeless tangle sits in every window
      occ.push_back(std::move(o.pair_ids));
    }
  std::sort(occ.begin(), occ.end());
  occ.erase(std::unique(occ.begin(), occ.end()), occ.end());
  if (occ.empty()) return irred_trace(g, k);

  auto nb = nonbacktracking(g);
  std::vector<std::vector<int>> pair_occs(g.num_pairs());
  std::vector<int> need(occ.size()), hit(occ.size(), 0);
  for (std::size_t o = 0; o < occ.size(); ++o) {
    need[o] = static_cast<int>(occ[o].size());
    for (int p : occ[o]) pair_occs[p].push_back(static_cast<int>(o));
  }
  std::vector<int> cnt(g.num_pairs(), 0);
  std::vector<int> walk_pairs(k + 1, -1);
  int bad = 0;
  long long budget = expansion_budget, total = 0;

  auto add_pair = [&](int p) {
    if (cnt[p]++ == 0)
      for (int o : pair_occs[p])
        if (++hit[o] == need[o]) ++bad;
  };
  auto remove_pair = [&](int p) {
    if (--cnt[p] == 0)
      for (int o : pair_occs[p])
        if (hit[o]-- == need[o]) --bad;
  };

  auto dfs = [&](auto&& self, int node, int t, int v0) -> void {
    if (--budget < 0) throw resource_error("selective_trace: budget exceeded");
    if (t == k) {
      if (g.head(nb.node_to_edge[node]) == v0) ++total;
      return;
    }
    for (int next : nb.succ[node]) {
      int p = nb.node_to_edge[next] >> 1;
      walk_pairs[t + 1] = p;
      add_pair(p);
      if (t + 1 > s) remove_pair(walk_pairs[t + 1 - s]);
      if (bad == 0) self(self, next, t + 1, v0);
      if (t + 1 > s) add_pair(walk_pairs[t + 1 - s]);
      remove_pair(p);
    }
  };

  for (int start = 0; start < nb.num_nodes; ++start) {
    int e1 = nb.node_to_edge[start];
    int p = e1 >> 1;
    walk_pairs[1] = p;
    add_pair(p);
    if (bad == 0) dfs(dfs, start, 1, g.tail(e1));
    remove_pair(p);
  }
  return total;
}

struct IdentityRow {
  std::string identity;
  int k = 0;
  double lhs = 0, rhs = 0, abs_err = 0;
  bool pass = false;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  bool all_pass = true;

  const IdentityRow* first_fail() const {
    for (const auto& r : rows)
      if (!r.pass) return &r;
    return nullptr;
  }
};

namespace detail {

inline void push_row(IdentityReport& rep, const std::string& id, int k,
                     double lhs, double rhs, bool exact) {
  IdentityRow r;
  r.identity = id;
  r.k = k;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_err = std::abs(lhs - rhs);
  r.pass = exact ? lhs == rhs
                 : r.abs_err <= 1e-6 * std::max(1.0, std::abs(lhs));
  rep.all_pass = rep.all_pass && r.pass;
  rep.rows.push_back(std::move(r));
}

}  // namespace detail

// four checks per k: the irreducible count against the spectral polynomial
// sum, exact walk-count reduction, the exact strong-trace decomposition, and
// the strong count against its spectral evaluator
inline IdentityReport verify_identities(const LabeledGraph& g, int kmax,
                                        double ops_budget = 4e9) {
  if (!g.d) throw domain_error("verify_identities: graph must declare d");
  if (g.n > 2000) throw domain_error("verify_identities: n too large");
  if (kmax < 1) throw domain_error("verify_identities: kmax >= 1");
  int d = *g.d;
  int h = g.num_half_loops(), w = g.num_whole_loops();
  bool pure = h == 0 || w == 0;
  auto tc = count_traces(g, kmax, ops_budget);
  auto spec = adjacency_spectrum(g);
  IdentityReport rep;

  for (int k = 1; k <= kmax; ++k)
    detail::push_row(rep, "irred_vs_spectrum", k,
                     static_cast<double>(tc.ird[k]), q_eval(k, d, spec), false);

  for (int k = 1; k <= kmax; ++k) {
    long long lhs = adjacency_power_trace(g, k, ops_budget);
    long long rhs = 0;
    for (int i = k % 2; i <= k; i += 2)
      rhs += n_reduced(k, i, d) * (i == 0 ? g.n : tc.ird[i]);
    detail::push_row(rep, "power_vs_reduced", k, static_cast<double>(lhs),
                     static_cast<double>(rhs), true);
  }

  detail::push_row(rep, "irred_vs_strong", 1, static_cast<double>(tc.ird[1]),
                   static_cast<double>(tc.sit[1]), true);
  if (pure) {
    for (int k = 2; k <= kmax; ++k) {
      long long rhs = tc.sit[k];
      long long pw = 1;
      for (int i = 1; i <= (k - 1) / 2; ++i) {
        rhs += (d - 2) * pw * tc.sit[k - 2 * i];
        pw *= d - 1;
      }
      if (k % 2 == 1 && k >= 3) {
        long long hp = 1;
        for (int i = 0; i < (k - 3) / 2; ++i) hp *= d - 1;
        rhs += hp * h;
      }
      detail::push_row(rep, "irred_vs_strong", k, static_cast<double>(tc.ird[k]),
                       static_cast<double>(rhs), true);
    }
    for (int k = 1; k <= kmax; ++k)
      detail::push_row(rep, "strong_vs_spectrum", k,
                       static_cast<double>(tc.sit[k]),
                       sit_eval(k, d, spec, h, w > 0), false);
  }
  return rep;
}

}  // namespace alonlab
