#pragma once

// Tangles: small labeled graphs measured against the spectral threshold
// sqrt(d-1). Covers per-model feasibility, criticality classification with
// exact integer shortcuts, the minimal supercritical order tau with explicit
// witnesses, a bounded exhaustive minimality search, label-preserving
// automorphisms and occurrence counts, a certified lower bound on lambda_2
// from a Dirichlet vector on an occurrence ball, and a Monte Carlo
// occurrence-frequency estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <alonlab/graph.hpp>
#include <alonlab/models.hpp>
#include <alonlab/occurrences.hpp>

namespace alonlab {

struct Tangle {
  LabeledGraph graph;
  char model = 'g';
  int d = 4;
};

namespace detail {

// number of generators for a model tag, validating the (tag, d) pair
inline int tangle_generators(char model, int d) {
  switch (model) {
    case 'g':
    case 'h':
      if (d < 4 || d % 2 != 0)
        throw domain_error("tangle: permutation models need even d >= 4");
      return d / 2;
    case 'i':
    case 'j':
      if (d < 3) throw domain_error("tangle: d must be at least 3");
      return d;
    default:
      throw domain_error("tangle: unknown model tag");
  }
}

}  // namespace detail

// A tangle is feasible when some instance of its model contains it: every
// generator's edges extend to a permutation (g), a single n-cycle (h, which
// additionally forbids loops and short generator cycles), a perfect matching
// (i) or a near-perfect matching with one half-loop (j).
inline void check_feasible(const Tangle& t) {
  int gens = detail::tangle_generators(t.model, t.d);
  const auto& g = t.graph;
  if (g.n < 1) throw domain_error("tangle: needs at least one vertex");
  int nc = 0;
  component_ids(g, &nc);
  if (nc != 1) throw domain_error("tangle: not connected");

  bool permfam = t.model == 'g' || t.model == 'h';
  std::vector<std::vector<char>> out, in, used;
  if (permfam) {
    out.assign(gens, std::vector<char>(g.n, 0));
    in = out;
  } else {
    used.assign(gens, std::vector<char>(g.n, 0));
  }
  std::vector<char> half_seen(gens, 0);
  std::vector<std::vector<std::pair<int, int>>> arcs(permfam ? gens : 0);

  for (const auto& p : g.pairs) {
    int j = p.label.j;
    if (j < 1 || j > gens)
      throw domain_error("tangle: generator index out of range for d");
    if (permfam) {
      if (p.label.kind != LabelKind::perm)
        throw domain_error("tangle: permutation models take perm labels");
      if (p.loop == LoopKind::half)
        throw domain_error("tangle: no half-loops in permutation models");
      if (p.loop == LoopKind::whole && t.model == 'h')
        throw domain_error("tangle: single-cycle permutations fix no vertex");
      if (out[j - 1][p.u] || in[j - 1][p.v])
        throw domain_error("tangle: permutation value determined twice");
      out[j - 1][p.u] = 1;
      in[j - 1][p.v] = 1;
      if (p.u != p.v) arcs[j - 1].push_back({p.u, p.v});
    } else {
      bool okmatch =
          p.label.kind == LabelKind::match && p.loop == LoopKind::normal;
      bool okhalf =
          p.label.kind == LabelKind::halfloop && p.loop == LoopKind::half;
      if (t.model == 'i' && !okmatch)
        throw domain_error("tangle: perfect matchings take loop-free match labels");
      if (t.model == 'j' && !okmatch && !okhalf)
        throw domain_error("tangle: near-perfect matchings take match edges or half-loops");
      if (okhalf) {
        if (half_seen[j - 1])
          throw domain_error("tangle: a matching has one half-loop");
        half_seen[j - 1] = 1;
      }
      auto& u = used[j - 1];
      if (u[p.u]) throw domain_error("tangle: matching covers a vertex twice");
      u[p.u] = 1;
      if (p.v != p.u) {
        if (u[p.v]) throw domain_error("tangle: matching covers a vertex twice");
        u[p.v] = 1;
      }
    }
  }

  if (t.model == 'h') {
    // a directed generator cycle of length c < n cannot embed in an n-cycle,
    // and tangles must embed for all large n
    for (int j = 0; j < gens; ++j) {
      std::vector<int> indeg(g.n, 0);
      std::vector<std::vector<int>> adj(g.n);
      for (auto [a, b] : arcs[j]) {
        adj[a].push_back(b);
        ++indeg[b];
      }
      std::vector<int> queue;
      for (int v = 0; v < g.n; ++v)
        if (indeg[v] == 0) queue.push_back(v);
      std::size_t done = 0;
      while (done < queue.size()) {
        int v = queue[done++];
        for (int w : adj[v])
          if (--indeg[w] == 0) queue.push_back(w);
      }
      if ((int)done < g.n)
        throw domain_error("tangle: generator arcs form a cycle");
    }
  }
}

inline bool is_feasible(const Tangle& t, std::string* why = nullptr) {
  try {
    check_feasible(t);
    return true;
  } catch (const domain_error& e) {
    if (why) *why = e.what();
    return false;
  }
}

inline Tangle make_tangle(int n, const std::vector<EdgeSpec>& edges, char model,
                          int d) {
  Tangle t{build_graph(n, edges), model, d};
  check_feasible(t);
  return t;
}

enum class CritClass { subcritical, critical, hypercritical };

struct Criticality {
  CritClass cls = CritClass::subcritical;
  double lambda = 0.0;
  double threshold = 0.0;
  bool exact = false;  // lambda certified as an integer, compared exactly
  bool supercritical() const { return cls != CritClass::subcritical; }
};

// Compare lambda_irred of the complete pruning against sqrt(d-1). Loop
// bouquets score 2w + h - 1 and parallel-edge pairs m - 1; those cases are
// decided by integer arithmetic so exact threshold hits classify as critical
// instead of falling to rounding. Everything else is numeric with a 1e-9
// window around the threshold.
inline Criticality classify(const Tangle& t, int d_ambient = 0) {
  check_feasible(t);
  int d = d_ambient > 0 ? d_ambient : t.d;
  if (d < 2) throw domain_error("classify: d must be at least 2");
  auto core = prune_completely(t.graph);

  Criticality c;
  c.threshold = std::sqrt((double)(d - 1));
  long long lam = -1;
  if (core.num_pairs() == 0) {
    lam = 0;
  } else if (core.n == 1) {
    lam = 2LL * core.num_whole_loops() + core.num_half_loops() - 1;
  } else if (core.n == 2) {
    bool parallel = true;
    for (const auto& p : core.pairs) parallel &= p.loop == LoopKind::normal;
    if (parallel) lam = core.num_pairs() - 1;
  }
  if (lam >= 0) {
    c.exact = true;
    c.lambda = (double)lam;
    long long rhs = d - 1;
    c.cls = lam * lam > rhs    ? CritClass::hypercritical
            : lam * lam == rhs ? CritClass::critical
                               : CritClass::subcritical;
  } else {
    c.lambda = lambda_irred(core);
    if (std::abs(c.lambda - c.threshold) <= 1e-9)
      c.cls = CritClass::critical;
    else
      c.cls = c.lambda > c.threshold ? CritClass::hypercritical
                                     : CritClass::subcritical;
  }
  return c;
}

struct TauFund {
  int tau = 0;
  Tangle witness;
};

// Minimal order of a supercritical tangle, with a verified witness of
// exactly that order. Permutation models with loops reach sqrt(d-1) with
// the fewest edges via loop bouquets (growth 2m-1); loop-free models use
// parallel edges (growth m-1); the loop-free single-cycle model at d = 4
// and d = 6 needs the three-vertex chains instead because parallel edges
// are capped at d/2.
inline TauFund tau_fund(char model, int d) {
  detail::tangle_generators(model, d);
  int tau = 0, n = 0;
  std::vector<EdgeSpec> es;
  if (model == 'g') {
    int m = 1;
    while ((2LL * m - 1) * (2LL * m - 1) < d - 1) ++m;
    tau = m - 1;
    n = 1;
    for (int j = 1; j <= m; ++j) es.push_back({1, 1, perm(j), LoopKind::whole});
  } else {
    int s = 1;
    while ((long long)s * s < d - 1) ++s;
    tau = s - 1;
    if (model == 'h' && d == 4) {
      n = 3;
      es = {{1, 2, perm(1), LoopKind::normal}, {1, 2, perm(2), LoopKind::normal},
            {2, 3, perm(1), LoopKind::normal}, {2, 3, perm(2), LoopKind::normal}};
    } else if (model == 'h' && d == 6) {
      n = 3;
      es = {{1, 2, perm(1), LoopKind::normal}, {1, 2, perm(2), LoopKind::normal},
            {1, 2, perm(3), LoopKind::normal}, {2, 3, perm(1), LoopKind::normal},
            {2, 3, perm(2), LoopKind::normal}};
    } else {
      n = 2;
      int m = tau + 2;
      for (int j = 1; j <= m; ++j)
        es.push_back(model == 'h'
                         ? EdgeSpec{1, 2, perm(j), LoopKind::normal}
                         : EdgeSpec{1, 2, match(j), LoopKind::normal});
    }
  }
  TauFund r{tau, Tangle{build_graph(n, es), model, d}};
  auto c = classify(r.witness);
  if (order(r.witness.graph) != tau || !c.supercritical())
    throw domain_error("tau_fund: witness verification failed");
  return r;
}

namespace detail {

inline std::vector<EdgeSpec> tangle_atoms(char model, int d, int n) {
  int gens = tangle_generators(model, d);
  std::vector<EdgeSpec> atoms;
  for (int j = 1; j <= gens; ++j) {
    if (model == 'g' || model == 'h') {
      for (int u = 1; u <= n; ++u)
        for (int v = 1; v <= n; ++v)
          if (u != v) atoms.push_back({u, v, perm(j), LoopKind::normal});
      if (model == 'g')
        for (int v = 1; v <= n; ++v)
          atoms.push_back({v, v, perm(j), LoopKind::whole});
    } else {
      for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
          atoms.push_back({u, v, match(j), LoopKind::normal});
      if (model == 'j')
        for (int v = 1; v <= n; ++v)
          atoms.push_back({v, v, halfloop(j), LoopKind::half});
    }
  }
  return atoms;
}

// minimal serialized edge list over all vertex relabelings
inline std::string canonical_tangle_key(int n, const std::vector<EdgeSpec>& es) {
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::string best;
  std::vector<std::uint64_t> keys(es.size());
  do {
    for (std::size_t i = 0; i < es.size(); ++i) {
      const auto& e = es[i];
      std::uint64_t u = sigma[e.u - 1] + 1, v = sigma[e.v - 1] + 1, tag = 0;
      if (e.label.kind != LabelKind::perm) {
        tag = e.label.kind == LabelKind::match ? 1 : 2;
        if (u > v) std::swap(u, v);
      }
      keys[i] = (tag << 40) | (u << 32) | (v << 24) |
                ((std::uint64_t)e.label.j << 8) | (std::uint64_t)e.loop;
    }
    std::sort(keys.begin(), keys.end());
    std::string s(1, (char)n);
    s.append((const char*)keys.data(), keys.size() * sizeof(std::uint64_t));
    if (best.empty() || s < best) best = std::move(s);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

}  // namespace detail

struct MinimalityReport {
  long long tangles_checked = 0;  // feasible pruned tangles, up to relabeling
  double max_lambda = 0.0;
  bool any_supercritical = false;
  Tangle worst;  // attains max_lambda
};

// Enumerate completely pruned feasible tangles with at most v_max vertices
// and order below tau, and report the largest growth rate seen. Heuristic
// evidence for minimality, not a proof.
inline MinimalityReport bounded_minimality_search(char model, int d, int tau,
                                                  int v_max) {
  detail::tangle_generators(model, d);
  if (v_max < 1 || v_max > 4)
    throw domain_error("search: v_max must be between 1 and 4");
  if (tau < 1 || tau > 8)
    throw domain_error("search: tau must be between 1 and 8");

  MinimalityReport rep;
  std::unordered_set<std::string> seen;
  long long attempts = 0, evals = 0;
  const long long attempt_budget = 50'000'000, eval_budget = 200'000;

  bool permfam = model == 'g' || model == 'h';
  int gens = detail::tangle_generators(model, d);

  for (int n = 1; n <= v_max; ++n) {
    auto atoms = detail::tangle_atoms(model, d, n);
    int max_pairs = n + tau - 1;
    std::vector<int> deg(n, 0);
    std::vector<EdgeSpec> chosen;
    // per-generator slot occupancy, so conflicting branches are never grown
    std::vector<std::vector<char>> out(gens, std::vector<char>(n, 0));
    auto in = out, used = out;
    std::vector<char> half_seen(gens, 0);

    auto consider = [&]() {
      if (!chosen.empty())
        for (int v = 0; v < n; ++v)
          if (deg[v] < 2) return;  // not completely pruned
      if (n > 1) {  // connectivity over the chosen pairs
        int uf[4];
        for (int v = 0; v < n; ++v) uf[v] = v;
        auto find = [&](int v) {
          while (uf[v] != v) v = uf[v] = uf[uf[v]];
          return v;
        };
        for (const auto& e : chosen) uf[find(e.u - 1)] = find(e.v - 1);
        for (int v = 1; v < n; ++v)
          if (find(v) != find(0)) return;
      }
      if (++evals > eval_budget)
        throw resource_error("search: enumeration budget exceeded");
      if (!seen.insert(detail::canonical_tangle_key(n, chosen)).second) return;
      Tangle t{build_graph(n, chosen), model, d};
      if (!is_feasible(t)) return;  // generator cycles in the h model
      auto c = classify(t);
      ++rep.tangles_checked;
      if (rep.tangles_checked == 1 || c.lambda > rep.max_lambda) {
        rep.max_lambda = c.lambda;
        rep.worst = t;
      }
      rep.any_supercritical |= c.supercritical();
    };

    auto rec = [&](auto&& self, int start) -> void {
      for (int a = start; a < (int)atoms.size(); ++a) {
        if (++attempts > attempt_budget)
          throw resource_error("search: enumeration budget exceeded");
        const auto& e = atoms[a];
        int u = e.u - 1, v = e.v - 1, j = e.label.j - 1;
        if (e.loop == LoopKind::normal) {
          if (deg[u] + 1 > d || deg[v] + 1 > d) continue;
          if (permfam ? (out[j][u] || in[j][v]) : (used[j][u] || used[j][v]))
            continue;
          ++deg[u], ++deg[v];
          if (permfam)
            out[j][u] = in[j][v] = 1;
          else
            used[j][u] = used[j][v] = 1;
        } else if (e.loop == LoopKind::whole) {
          if (deg[u] + 2 > d || out[j][u] || in[j][u]) continue;
          deg[u] += 2;
          out[j][u] = in[j][u] = 1;
        } else {
          if (deg[u] + 1 > d || used[j][u] || half_seen[j]) continue;
          deg[u] += 1;
          used[j][u] = half_seen[j] = 1;
        }
        chosen.push_back(e);
        consider();
        if ((int)chosen.size() < max_pairs) self(self, a + 1);
        chosen.pop_back();
        if (e.loop == LoopKind::normal) {
          --deg[u], --deg[v];
          if (permfam)
            out[j][u] = in[j][v] = 0;
          else
            used[j][u] = used[j][v] = 0;
        } else if (e.loop == LoopKind::whole) {
          deg[u] -= 2;
          out[j][u] = in[j][u] = 0;
        } else {
          deg[u] -= 1;
          used[j][u] = half_seen[j] = 0;
        }
      }
    };

    if (n == 1) consider();  // the edgeless one-vertex tangle
    rec(rec, 0);
  }
  return rep;
}

// label-preserving vertex bijections fixing the edge multiset; the edge
// bijection is determined because feasible tangles never repeat an
// identically labeled pair
inline long long automorphism_count(const Tangle& t) {
  const auto& g = t.graph;
  if (g.n > 8) throw resource_error("automorphisms: more than 8 vertices");
  if (g.n == 0) return 1;

  auto keys_under = [&](const std::vector<int>& sig) {
    std::vector<std::uint64_t> ks(g.pairs.size());
    for (std::size_t i = 0; i < g.pairs.size(); ++i) {
      const auto& p = g.pairs[i];
      std::uint64_t u = sig[p.u], v = sig[p.v], tag = 0;
      if (p.label.kind != LabelKind::perm) {
        tag = p.label.kind == LabelKind::match ? 1 : 2;
        if (u > v) std::swap(u, v);
      }
      ks[i] = (tag << 40) | (u << 32) | (v << 24) |
              ((std::uint64_t)p.label.j << 8) | (std::uint64_t)p.loop;
    }
    std::sort(ks.begin(), ks.end());
    return ks;
  };

  std::vector<int> sig(g.n);
  std::iota(sig.begin(), sig.end(), 0);
  auto base = keys_under(sig);
  long long count = 0;
  do {
    if (keys_under(sig) == base) ++count;
  } while (std::next_permutation(sig.begin(), sig.end()));
  return count;
}

inline long long count_occurrences(const LabeledGraph& g, const Tangle& t) {
  return (long long)find_occurrences(g, t.graph).size();
}

// Certified lower bound on lambda_2(g): take an occurrence of t, grow a ball
// around its image keeping the one-larger ball at most half the host, run
// 200 power-iteration steps of A+I with the boundary clamped to zero (the
// Dirichlet vector; the shift keeps bipartite balls from oscillating), and
// pair its Rayleigh quotient with that of the complement indicator. The two
// vectors have disjoint supports even after one application of A, so the
// span argument gives lambda_2 >= min of the two quotients.
inline double lambda2_certificate(const LabeledGraph& g, const Tangle& t,
                                  int radius) {
  if (radius < 0) throw domain_error("certificate: negative radius");
  check_feasible(t);
  auto occs = find_occurrences(g, t.graph);
  if (occs.empty())
    throw domain_error("certificate: tangle does not occur in the host");

  std::vector<std::vector<int>> nbr(g.n);
  for (const auto& p : g.pairs) {
    nbr[p.u].push_back(p.v);
    if (p.v != p.u) nbr[p.v].push_back(p.u);
  }

  // cumulative balls around the occurrence image
  std::vector<std::vector<int>> balls;
  {
    std::vector<char> in(g.n, 0);
    std::vector<int> cur;
    for (int v : occs[0].vertex_map)
      if (!in[v]) {
        in[v] = 1;
        cur.push_back(v);
      }
    balls.push_back(cur);
    for (int i = 1; i <= radius + 1; ++i) {
      auto nxt = balls.back();
      for (int v : balls.back())
        for (int w : nbr[v])
          if (!in[w]) {
            in[w] = 1;
            nxt.push_back(w);
          }
      if (nxt.size() == balls.back().size()) break;  // component exhausted
      balls.push_back(std::move(nxt));
    }
  }
  int last = (int)balls.size() - 1;
  int r = 0;
  for (int i = radius; i >= 1; --i) {
    if ((long long)balls[std::min(i + 1, last)].size() <= g.n / 2) {
      r = i;
      break;
    }
  }
  const auto& support = balls[std::min(r, last)];
  const auto& excluded = balls[std::min(r + 1, last)];
  if ((int)excluded.size() >= g.n)
    throw domain_error("certificate: ball covers the whole host");

  std::vector<char> in_s(g.n, 0), in_x(g.n, 0);
  for (int v : support) in_s[v] = 1;
  for (int v : excluded) in_x[v] = 1;

  std::vector<int> spairs;
  for (int p = 0; p < g.num_pairs(); ++p)
    if (in_s[g.pairs[p].u] && in_s[g.pairs[p].v]) spairs.push_back(p);

  std::vector<double> x(g.n, 0.0), y(g.n, 0.0);
  for (int v : support) x[v] = 1.0;
  for (int step = 0; step < 200; ++step) {
    for (int v : support) y[v] = x[v];  // the +I shift
    for (int pi : spairs) {
      const auto& p = g.pairs[pi];
      switch (p.loop) {
        case LoopKind::normal:
          y[p.u] += x[p.v];
          y[p.v] += x[p.u];
          break;
        case LoopKind::whole:
          y[p.u] += 2.0 * x[p.u];
          break;
        case LoopKind::half:
          y[p.u] += x[p.u];
          break;
      }
    }
    double norm = 0.0;
    for (int v : support) norm += y[v] * y[v];
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (int v : support) x[v] = y[v] / norm;
  }
  double num = 0.0, den = 0.0;
  for (int pi : spairs) {
    const auto& p = g.pairs[pi];
    if (p.loop == LoopKind::normal)
      num += 2.0 * x[p.u] * x[p.v];
    else if (p.loop == LoopKind::whole)
      num += 2.0 * x[p.u] * x[p.u];
    else
      num += x[p.u] * x[p.u];
  }
  for (int v : support) den += x[v] * x[v];
  double ray_u = den > 0.0 ? num / den : 0.0;

  long long cmass = 0;
  for (const auto& p : g.pairs) {
    if (in_x[p.u] || in_x[p.v]) continue;
    cmass += p.loop == LoopKind::half ? 1 : 2;
  }
  double ray_v = (double)cmass / (double)(g.n - (int)excluded.size());
  return std::min(ray_u, ray_v);
}

// G-model sample whose first m permutations are nudged to fix vertex 1,
// planting an m-loop bouquet there; draws match sample() so the rest of the
// instance is the usual ensemble
inline LabeledGraph planted_bouquet_sample(int n, int d, int m,
                                           std::uint64_t root,
                                           std::uint64_t index) {
  validate(ModelId{'g', d, n});
  if (m < 1 || m > d / 2)
    throw domain_error("planted bouquet: need 1 <= m <= d/2");
  std::mt19937_64 rng(stream_seed(root, index));
  std::vector<EdgeSpec> es;
  for (int j = 1; j <= d / 2; ++j) {
    auto p = random_permutation(n, rng);
    if (j <= m) {
      int i0 = (int)(std::find(p.begin(), p.end(), 0) - p.begin());
      std::swap(p[0], p[i0]);
    }
    for (int i = 0; i < n; ++i)
      es.push_back({i + 1, p[i] + 1, perm(j),
                    p[i] == i ? LoopKind::whole : LoopKind::normal});
  }
  return build_graph(n, es, d, 'g');
}

namespace detail {

inline int env_workers() {
  if (const char* s = std::getenv("ALONLAB_THREADS")) {
    int k = std::atoi(s);
    if (k >= 1 && k <= 1024) return k;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? (int)hc : 1;
}

}  // namespace detail

// mean occurrence count of t over samples root/0 .. root/samples-1; the
// per-index counts are pure functions of (root, index), so the result does
// not depend on how indices are dealt to workers
inline double tangle_frequency(const ModelId& m, const Tangle& t,
                               long long samples, std::uint64_t root) {
  validate(m);
  check_feasible(t);
  if (samples < 1)
    throw domain_error("tangle_frequency: need at least one sample");
  int workers = (int)std::min<long long>(detail::env_workers(), samples);
  std::vector<long long> part(workers, 0);
  auto run = [&](int w) {
    long long local = 0;
    for (long long i = w; i < samples; i += workers)
      local += count_occurrences(sample(m, root, (std::uint64_t)i), t);
    part[w] = local;
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  long long total = 0;
  for (long long v : part) total += v;
  return (double)total / (double)samples;
}

}  // namespace alonlab
