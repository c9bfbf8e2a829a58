#pragma once

// Variable-length graphs: Shannon's Perron-threshold algorithm for the walk
// growth rate, subdivision and realization, regular-tree norms for real
// degree, and the growing-edge limit check.
//
// Edge weights are either z^len or c*S_d(z) with
// S_d(z) = (1 - sqrt(1 - 4(d-1) z^2)) / 2 on 0 <= z <= 1/(2 sqrt(d-1)).
// An undirected non-loop edge feeds both matrix entries; an undirected loop
// adds twice its weight to the diagonal, a half or directed loop once.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <alonlab/graph.hpp>

namespace alonlab {

enum class WeightKind : std::uint8_t { monomial, tree_series };

struct VlgEdge {
  int u = 0;  // 0-based
  int v = 0;
  bool directed = false;
  bool half = false;  // loops only; single traversal direction
  WeightKind kind = WeightKind::monomial;
  long long len = 1;     // monomial
  double scale = 1.0;    // tree_series: scale * S_d(z)
  double tree_d = 3.0;
};

struct VLG {
  int n = 0;
  std::vector<VlgEdge> edges;
};

inline VlgEdge vedge(int u, int v, long long len, bool directed = false) {
  VlgEdge e;
  e.u = u;
  e.v = v;
  e.len = len;
  e.directed = directed;
  return e;
}

inline VlgEdge vloop(int v, long long len, bool directed = false,
                     bool half = false) {
  VlgEdge e;
  e.u = e.v = v;
  e.len = len;
  e.directed = directed;
  e.half = half;
  return e;
}

inline VlgEdge vtree(int v, double scale, double d) {
  VlgEdge e;
  e.u = e.v = v;
  e.directed = true;
  e.kind = WeightKind::tree_series;
  e.scale = scale;
  e.tree_d = d;
  return e;
}

inline void validate(const VLG& g) {
  if (g.n < 1) throw domain_error("vlg: needs at least one vertex");
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.u >= g.n || e.v < 0 || e.v >= g.n)
      throw domain_error("vlg: endpoint out of range");
    if (e.half && (e.u != e.v || e.directed))
      throw domain_error("vlg: half flag only on undirected loops");
    if (e.kind == WeightKind::monomial) {
      if (e.len < 1) throw domain_error("vlg: length must be >= 1");
      if (e.half && e.len != 1)
        throw domain_error("vlg: half-loop of length >= 2");
    } else {
      if (e.scale < 0) throw domain_error("vlg: negative series scale");
      if (!(e.tree_d > 2)) throw domain_error("vlg: series degree must be > 2");
    }
  }
}

inline double s_tree(double d, double z) {
  double rad = 1 - 4 * (d - 1) * z * z;
  // the branch point is in-domain; snap rounding residue so the value
  // there is exactly 1/2 (the square root would amplify ~1e-16 to ~1e-8)
  if (rad < 4e-15) rad = 0;
  return (1 - std::sqrt(rad)) / 2;
}

// smallest branch point over the series weights; +inf when all monomial
inline double vlg_z_sup(const VLG& g) {
  double zs = std::numeric_limits<double>::infinity();
  for (const auto& e : g.edges)
    if (e.kind == WeightKind::tree_series && e.scale > 0)
      zs = std::min(zs, 1 / (2 * std::sqrt(e.tree_d - 1)));
  return zs;
}

inline Eigen::MatrixXd z_matrix(const VLG& g, double z) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.n, g.n);
  for (const auto& e : g.edges) {
    double w = e.kind == WeightKind::monomial
                   ? std::pow(z, static_cast<double>(e.len))
                   : e.scale * s_tree(e.tree_d, z);
    if (e.u == e.v) {
      m(e.u, e.u) += (e.half || e.directed) ? w : 2 * w;
    } else {
      m(e.u, e.v) += w;
      if (!e.directed) m(e.v, e.u) += w;
    }
  }
  return m;
}

inline double perron_value(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  // nonnegative matrix: the spectral radius is an eigenvalue, so it equals
  // the largest real part
  return es.eigenvalues().real().maxCoeff();
}

// growth rate of walk counts: 1/z* with z* the Perron-threshold supremum.
// The threshold bisection over the whole matrix equals the max over strongly
// connected components, so reducible inputs need no special casing.
// Conventions: no closed walks -> 0; when the Perron value stays below 1 up
// to the series branch point, that point is the convergence boundary and the
// answer is exactly its reciprocal.
inline double lambda1_vlg(const VLG& g) {
  validate(g);
  if (g.edges.empty()) return 0;
  double zs = vlg_z_sup(g);
  double hi;
  if (std::isfinite(zs)) {
    if (perron_value(z_matrix(g, zs)) < 1) return 1 / zs;
    hi = zs;
  } else {
    // integer matrix at z=1: the Perron value is 0 (nilpotent, no closed
    // walks) or at least 1, so test well away from the boundary
    if (perron_value(z_matrix(g, 1)) < 0.5) return 0;
    hi = 1;
  }
  double lo = 0;
  while (hi - lo > 1e-10) {
    double mid = (lo + hi) / 2;
    (perron_value(z_matrix(g, mid)) < 1 ? lo : hi) = mid;
  }
  return 2 / (lo + hi);
}

// cross-check route: first positive root of det(I - Z(z)), monomial weights
inline double lambda1_vlg_det(const VLG& g) {
  validate(g);
  for (const auto& e : g.edges)
    if (e.kind != WeightKind::monomial)
      throw domain_error("lambda1_vlg_det: monomial weights only");
  if (g.edges.empty()) return 0;
  if (perron_value(z_matrix(g, 1)) < 0.5) return 0;
  auto det = [&](double z) {
    Eigen::MatrixXd m = -z_matrix(g, z);
    m.diagonal().array() += 1;
    return m.determinant();
  };
  const int steps = 4096;
  double prev = 0;
  for (int i = 1; i <= steps; ++i) {
    double z = static_cast<double>(i) / steps;
    if (det(z) <= 0) {
      double lo = prev, hi = z;
      while (hi - lo > 1e-12) {
        double mid = (lo + hi) / 2;
        (det(mid) <= 0 ? hi : lo) = mid;
      }
      return 2 / (lo + hi);
    }
    prev = z;
  }
  throw domain_error("lambda1_vlg_det: no determinant root located");
}

// beaded-path replacement of every edge; lengths all become 1
inline VLG subdivide(const VLG& g) {
  validate(g);
  VLG out;
  out.n = g.n;
  for (const auto& e : g.edges) {
    if (e.kind != WeightKind::monomial)
      throw domain_error("subdivide: series weights have no finite form");
    if (e.len == 1) {
      out.edges.push_back(e);
      continue;
    }
    int cur = e.u;
    for (long long step = 1; step < e.len; ++step) {
      int bead = out.n++;
      out.edges.push_back(vedge(cur, bead, 1, e.directed));
      cur = bead;
    }
    out.edges.push_back(vedge(cur, e.v, 1, e.directed));
  }
  return out;
}

// undirected all-monomial case, as a labeled multigraph
inline LabeledGraph subdivide_to_graph(const VLG& g) {
  for (const auto& e : g.edges)
    if (e.directed)
      throw domain_error("subdivide_to_graph: undirected edges only");
  VLG s = subdivide(g);
  std::vector<EdgeSpec> es;
  int j = 0;
  for (const auto& e : s.edges) {
    ++j;
    if (e.u == e.v)
      es.push_back({e.u + 1, e.u + 1, e.half ? halfloop(j) : match(j),
                    e.half ? LoopKind::half : LoopKind::whole});
    else
      es.push_back({e.u + 1, e.v + 1, match(j), LoopKind::normal});
  }
  return build_graph(s.n, es);
}

inline VLG vlg_from_graph(const LabeledGraph& g) {
  VLG out;
  out.n = g.n;
  for (const auto& p : g.pairs) {
    if (p.loop == LoopKind::half)
      out.edges.push_back(vloop(p.u, 1, false, true));
    else if (p.loop == LoopKind::whole)
      out.edges.push_back(vloop(p.u, 1));
    else
      out.edges.push_back(vedge(p.u, p.v, 1));
  }
  return out;
}

struct RealizeResult {
  VLG vlg;
  bool truncated = false;
};

namespace detail {

// walk enumeration for a purely directed input
inline RealizeResult realize_directed(const VLG& g,
                                      const std::vector<char>& keep,
                                      long long cap, long long max_edges,
                                      long long step_budget) {
  std::vector<std::vector<const VlgEdge*>> out(g.n);
  for (const auto& e : g.edges) out[e.u].push_back(&e);

  // walks cannot revisit an internal vertex unless the internal part has a
  // cycle; detect one to decide whether the cap can bite
  bool internal_cycle = false;
  {
    std::vector<int> color(g.n, 0);  // kept vertices stay 0, never entered
    std::function<bool(int)> dfs = [&](int v) {
      color[v] = 1;
      for (const auto* e : out[v]) {
        if (keep[e->v]) continue;
        if (e->v == v || color[e->v] == 1) return true;
        if (color[e->v] == 0 && dfs(e->v)) return true;
      }
      color[v] = 2;
      return false;
    };
    for (int v = 0; v < g.n && !internal_cycle; ++v)
      if (!keep[v] && color[v] == 0) internal_cycle = dfs(v);
  }
  long long maxlen = 1;
  for (const auto& e : g.edges) maxlen = std::max(maxlen, e.len);
  // without an internal cycle no walk can revisit a dropped vertex, so the
  // enumeration is exact regardless of the cap
  long long eff =
      internal_cycle ? cap : (static_cast<long long>(g.n) + 1) * maxlen;

  RealizeResult res;
  res.vlg.n = 0;
  std::vector<int> newid(g.n, -1);
  for (int v = 0; v < g.n; ++v)
    if (keep[v]) newid[v] = res.vlg.n++;

  long long steps = 0;
  std::function<void(int, int, long long)> walk = [&](int a, int v,
                                                      long long len) {
    for (const auto* e : out[v]) {
      if (++steps > step_budget)
        throw resource_error("realize: walk enumeration budget exhausted");
      long long nl = len + e->len;
      if (nl > eff) {
        res.truncated = true;
        continue;
      }
      if (keep[e->v]) {
        if (static_cast<long long>(res.vlg.edges.size()) >= max_edges)
          throw resource_error("realize: edge cap exceeded");
        res.vlg.edges.push_back(vedge(newid[a], newid[e->v], nl, true));
      } else {
        walk(a, e->v, nl);
      }
    }
  };
  for (int a = 0; a < g.n; ++a)
    if (keep[a]) walk(a, a, 0);
  return res;
}

// bead suppression for an undirected input: every dropped vertex must be a
// bead (degree 2, no loops) and the dropped set must not contain a cycle;
// beaded chains collapse into single edges of summed length
inline RealizeResult realize_undirected(const VLG& g,
                                        const std::vector<char>& keep) {
  std::vector<std::vector<int>> inc(g.n);
  for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
    const auto& e = g.edges[i];
    if (!keep[e.u] || !keep[e.v]) {
      if (e.u == e.v)
        throw domain_error("realize: dropped vertex carries a loop");
      if (!keep[e.u]) inc[e.u].push_back(i);
      if (!keep[e.v]) inc[e.v].push_back(i);
    }
  }
  for (int v = 0; v < g.n; ++v)
    if (!keep[v] && static_cast<int>(inc[v].size()) != 2)
      throw domain_error("realize: dropped vertex is not a bead");

  RealizeResult res;
  res.vlg.n = 0;
  std::vector<int> newid(g.n, -1);
  for (int v = 0; v < g.n; ++v)
    if (keep[v]) newid[v] = res.vlg.n++;

  std::vector<char> used(g.edges.size(), 0);
  for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
    const auto& e = g.edges[i];
    if (keep[e.u] && keep[e.v]) {
      VlgEdge c = e;
      c.u = newid[e.u];
      c.v = newid[e.v];
      res.vlg.edges.push_back(c);
      used[i] = 1;
    }
  }
  for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
    if (used[i]) continue;
    const auto& e = g.edges[i];
    int start = keep[e.u] ? e.u : (keep[e.v] ? e.v : -1);
    if (start < 0) continue;  // interior edge of a chain, reached later
    // follow the chain of beads
    long long total = 0;
    int cur = start, edge = i;
    while (true) {
      used[edge] = 1;
      total += g.edges[edge].len;
      int next = g.edges[edge].u == cur ? g.edges[edge].v : g.edges[edge].u;
      if (keep[next]) {
        if (newid[start] == newid[next])
          res.vlg.edges.push_back(vloop(newid[start], total));
        else
          res.vlg.edges.push_back(vedge(newid[start], newid[next], total));
        break;
      }
      int e1 = inc[next][0], e2 = inc[next][1];
      edge = e1 == edge ? e2 : e1;
      if (used[edge])
        throw domain_error("realize: dropped set contains a cycle");
      cur = next;
    }
  }
  for (size_t i = 0; i < used.size(); ++i)
    if (!used[i]) throw domain_error("realize: dropped set contains a cycle");
  return res;
}

}  // namespace detail

// restriction of the walk structure to the kept vertices.  Directed inputs
// enumerate kept-avoiding walks (cap L once the dropped part has a cycle);
// undirected inputs require the dropped vertices to form acyclic bead chains,
// the exact inverse of subdivision.
inline RealizeResult realize(const VLG& g, const std::vector<char>& keep,
                             long long L = 64, long long max_edges = 1000000,
                             long long step_budget = 50000000) {
  validate(g);
  if (static_cast<int>(keep.size()) != g.n)
    throw domain_error("realize: keep mask size mismatch");
  int kept = 0;
  for (char c : keep) kept += c != 0;
  if (kept == 0) throw domain_error("realize: must keep at least one vertex");
  for (const auto& e : g.edges)
    if (e.kind != WeightKind::monomial)
      throw domain_error("realize: monomial weights only");
  bool any_directed = false, any_undirected = false;
  for (const auto& e : g.edges)
    (e.directed ? any_directed : any_undirected) = true;
  if (any_directed && any_undirected)
    throw domain_error("realize: mixed edge directedness");
  if (any_directed)
    return detail::realize_directed(g, keep, L, max_edges, step_budget);
  return detail::realize_undirected(g, keep);
}

// walk growth rate of the infinite tree interpolating regular degree d > 2,
// wrapped around the mounted graph x: monomial skeleton plus a diagonal
// series term (d - deg(v)) S_d(z) / (d-1) per vertex
inline double tree_d_norm(const LabeledGraph& x, double d) {
  if (!(d > 2)) throw domain_error("tree_d_norm: d must exceed 2");
  if (x.n < 1) throw domain_error("tree_d_norm: empty graph");
  if (!connected(x)) throw domain_error("tree_d_norm: graph must be connected");
  auto deg = degrees(x);
  for (int v = 0; v < x.n; ++v)
    if (deg[v] > d)
      throw domain_error("tree_d_norm: vertex degree exceeds d");
  VLG g = vlg_from_graph(x);
  for (int v = 0; v < x.n; ++v) {
    double c = (d - deg[v]) / (d - 1);
    if (c > 0) g.edges.push_back(vtree(v, c, d));
  }
  return lambda1_vlg(g);
}

struct LimitStep {
  long long length = 0;
  double lambda1 = 0;
};

struct LimitReport {
  std::vector<LimitStep> steps;
  double limit_lambda1 = 0;
  double final_gap = 0;
  bool monotone_from_above = false;
  bool converged = false;
};

// growth rate along a family where the chosen edges stretch through the
// given lengths, against the family limit with those edges removed
inline LimitReport limit_convergence_check(const VLG& base,
                                           const std::vector<int>& growing,
                                           const std::vector<long long>& lengths,
                                           double tol = 1e-6) {
  validate(base);
  std::vector<char> grows(base.edges.size(), 0);
  for (int i : growing) {
    if (i < 0 || i >= static_cast<int>(base.edges.size()))
      throw domain_error("limit_convergence_check: edge index out of range");
    if (base.edges[i].kind != WeightKind::monomial)
      throw domain_error("limit_convergence_check: can only grow monomials");
    if (base.edges[i].half)
      throw domain_error("limit_convergence_check: cannot grow a half-loop");
    grows[i] = 1;
  }
  LimitReport rep;
  VLG work = base;
  for (long long len : lengths) {
    for (size_t i = 0; i < grows.size(); ++i)
      if (grows[i]) work.edges[i].len = len;
    rep.steps.push_back({len, lambda1_vlg(work)});
  }
  VLG limit;
  limit.n = base.n;
  for (size_t i = 0; i < base.edges.size(); ++i)
    if (!grows[i]) limit.edges.push_back(base.edges[i]);
  rep.limit_lambda1 = lambda1_vlg(limit);

  const double slack = 1e-8;
  rep.monotone_from_above = true;
  for (size_t i = 0; i < rep.steps.size(); ++i) {
    if (rep.steps[i].lambda1 < rep.limit_lambda1 - slack)
      rep.monotone_from_above = false;
    if (i + 1 < rep.steps.size() &&
        rep.steps[i].lambda1 < rep.steps[i + 1].lambda1 - slack)
      rep.monotone_from_above = false;
  }
  if (!rep.steps.empty())
    rep.final_gap = rep.steps.back().lambda1 - rep.limit_lambda1;
  rep.converged = rep.monotone_from_above && std::abs(rep.final_gap) <= tol;
  return rep;
}

}  // namespace alonlab
