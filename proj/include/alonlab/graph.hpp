#pragma once

// Labeled multigraph core: loop conventions, pruning, contraction, order,
// and the non-backtracking (irreducible) spectrum.
//
// Vertices are 1-based in edge specs and in the JSON interchange format,
// 0-based inside a built LabeledGraph. Edge pairs get dense ids at build
// time; directed edge ids are 2*pair and 2*pair+1, where a half-loop only
// occupies the even slot and is its own opposite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace alonlab {

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LabelKind : std::uint8_t { perm, perm_inv, match, halfloop };

struct Label {
  LabelKind kind = LabelKind::match;
  int j = 1;  // 1-based generator index

  friend bool operator==(const Label&, const Label&) = default;

  Label inverse() const {
    if (kind == LabelKind::perm) return {LabelKind::perm_inv, j};
    if (kind == LabelKind::perm_inv) return {LabelKind::perm, j};
    return *this;
  }
  bool self_inverse() const {
    return kind == LabelKind::match || kind == LabelKind::halfloop;
  }
};

inline Label perm(int j) { return {LabelKind::perm, j}; }
inline Label perm_inv(int j) { return {LabelKind::perm_inv, j}; }
inline Label match(int j) { return {LabelKind::match, j}; }
inline Label halfloop(int j) { return {LabelKind::halfloop, j}; }

enum class LoopKind : std::uint8_t { normal, whole, half };

// 1-based endpoints, as in the JSON format
struct EdgeSpec {
  int u = 1;
  int v = 1;
  Label label;
  LoopKind loop = LoopKind::normal;
};

// one undirected edge pair; stored direction is u -> v carrying `label`,
// the opposite direction carries label.inverse()
struct EdgePair {
  int u = 0;
  int v = 0;
  Label label;
  LoopKind loop = LoopKind::normal;
};

class LabeledGraph {
 public:
  int n = 0;
  std::optional<int> d;
  std::optional<char> model;  // 'g', 'h', 'i' or 'j' when known
  std::vector<EdgePair> pairs;

  int num_pairs() const { return static_cast<int>(pairs.size()); }

  bool edge_valid(int e) const {
    if (e < 0 || e >= 2 * num_pairs()) return false;
    return !(pairs[e >> 1].loop == LoopKind::half && (e & 1));
  }
  int num_half_loops() const {
    int h = 0;
    for (const auto& p : pairs) h += p.loop == LoopKind::half;
    return h;
  }
  int num_whole_loops() const {
    int w = 0;
    for (const auto& p : pairs) w += p.loop == LoopKind::whole;
    return w;
  }
  int num_directed() const { return 2 * num_pairs() - num_half_loops(); }

  int tail(int e) const { return (e & 1) ? pairs[e >> 1].v : pairs[e >> 1].u; }
  int head(int e) const { return (e & 1) ? pairs[e >> 1].u : pairs[e >> 1].v; }
  Label label(int e) const {
    return (e & 1) ? pairs[e >> 1].label.inverse() : pairs[e >> 1].label;
  }
  int opp(int e) const {
    return pairs[e >> 1].loop == LoopKind::half ? e : (e ^ 1);
  }

  // valid directed edge ids with a given tail
  std::vector<std::vector<int>> out_edges() const {
    std::vector<std::vector<int>> out(n);
    for (int e = 0; e < 2 * num_pairs(); ++e)
      if (edge_valid(e)) out[tail(e)].push_back(e);
    return out;
  }
};

inline std::vector<int> degrees(const LabeledGraph& g) {
  std::vector<int> deg(g.n, 0);
  for (const auto& p : g.pairs) {
    switch (p.loop) {
      case LoopKind::normal:
        deg[p.u] += 1;
        deg[p.v] += 1;
        break;
      case LoopKind::whole:
        deg[p.u] += 2;
        break;
      case LoopKind::half:
        deg[p.u] += 1;
        break;
    }
  }
  return deg;
}

inline Eigen::MatrixXd adjacency(const LabeledGraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n, g.n);
  for (const auto& p : g.pairs) {
    switch (p.loop) {
      case LoopKind::normal:
        a(p.u, p.v) += 1;
        a(p.v, p.u) += 1;
        break;
      case LoopKind::whole:
        a(p.u, p.u) += 2;
        break;
      case LoopKind::half:
        a(p.u, p.u) += 1;
        break;
    }
  }
  return a;
}

inline LabeledGraph build_graph(int n, const std::vector<EdgeSpec>& edges,
                                std::optional<int> d = std::nullopt,
                                std::optional<char> model = std::nullopt) {
  if (n < 0) throw domain_error("build_graph: negative vertex count");
  LabeledGraph g;
  g.n = n;
  g.model = model;
  for (const auto& e : edges) {
    if (e.u < 1 || e.u > n || e.v < 1 || e.v > n)
      throw domain_error("build_graph: vertex id out of range");
    if (e.label.j < 1) throw domain_error("build_graph: generator index < 1");
    EdgePair p{e.u - 1, e.v - 1, e.label, e.loop};
    if (p.label.kind == LabelKind::perm_inv) {
      std::swap(p.u, p.v);
      p.label = p.label.inverse();
    }
    switch (e.loop) {
      case LoopKind::normal:
        if (p.u == p.v)
          throw domain_error("build_graph: normal edge with equal endpoints");
        break;
      case LoopKind::whole:
        if (p.u != p.v) throw domain_error("build_graph: whole-loop needs u=v");
        break;
      case LoopKind::half:
        if (p.u != p.v) throw domain_error("build_graph: half-loop needs u=v");
        if (p.label.kind != LabelKind::halfloop)
          throw domain_error("build_graph: half-loop must carry a halfloop label");
        break;
    }
    if (p.label.kind == LabelKind::halfloop && e.loop != LoopKind::half)
      throw domain_error("build_graph: halfloop label on a non-half edge");
    g.pairs.push_back(p);
  }
  if (d) {
    if (*d < 1) throw domain_error("build_graph: d must be positive");
    for (const auto& p : g.pairs) {
      bool permkind = p.label.kind == LabelKind::perm ||
                      p.label.kind == LabelKind::perm_inv;
      int cap = permkind ? *d / 2 : *d;
      if (p.label.j > cap)
        throw domain_error("build_graph: generator index exceeds d");
    }
    auto deg = degrees(g);
    for (int v = 0; v < n; ++v)
      if (deg[v] != *d)
        throw domain_error("build_graph: degree violation at vertex " +
                           std::to_string(v + 1));
    g.d = d;
  }
  return g;
}

// keep only vertices marked alive and pairs marked alive, renumbering densely
inline LabeledGraph subgraph(const LabeledGraph& g,
                             const std::vector<char>& vertex_alive,
                             const std::vector<char>& pair_alive) {
  LabeledGraph h;
  h.model = g.model;
  std::vector<int> newid(g.n, -1);
  for (int v = 0; v < g.n; ++v)
    if (vertex_alive[v]) newid[v] = h.n++;
  for (int p = 0; p < g.num_pairs(); ++p) {
    if (!pair_alive[p]) continue;
    const auto& q = g.pairs[p];
    if (!vertex_alive[q.u] || !vertex_alive[q.v])
      throw domain_error("subgraph: edge with a removed endpoint");
    h.pairs.push_back({newid[q.u], newid[q.v], q.label, q.loop});
  }
  return h;
}

inline LabeledGraph prune_completely(const LabeledGraph& g) {
  std::vector<char> valive(g.n, 1), palive(g.num_pairs(), 1);
  auto deg = degrees(g);
  std::vector<std::vector<int>> inc(g.n);
  for (int p = 0; p < g.num_pairs(); ++p) {
    inc[g.pairs[p].u].push_back(p);
    if (g.pairs[p].v != g.pairs[p].u) inc[g.pairs[p].v].push_back(p);
  }
  std::vector<int> stack;
  for (int v = 0; v < g.n; ++v)
    if (deg[v] == 1) stack.push_back(v);
  bool removed_any = false;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (!valive[v] || deg[v] != 1) continue;
    valive[v] = 0;
    removed_any = true;
    for (int p : inc[v]) {
      if (!palive[p]) continue;
      palive[p] = 0;
      const auto& q = g.pairs[p];
      int other = q.u == v ? q.v : q.u;
      if (q.loop == LoopKind::half) {
        deg[v] -= 1;
      } else if (q.u == q.v) {
        deg[v] -= 2;
      } else {
        deg[v] -= 1;
        deg[other] -= 1;
        if (valive[other] && deg[other] == 1) stack.push_back(other);
      }
    }
  }
  if (!removed_any) return g;
  auto h = subgraph(g, valive, palive);
  return h;
}

inline LabeledGraph contract_edge(const LabeledGraph& g, int pair_id) {
  if (pair_id < 0 || pair_id >= g.num_pairs())
    throw domain_error("contract_edge: no such edge pair");
  const auto& e = g.pairs[pair_id];
  if (e.u == e.v) throw domain_error("contract_edge: cannot contract a loop");
  LabeledGraph h;
  h.model = g.model;
  int keep = std::min(e.u, e.v), drop = std::max(e.u, e.v);
  auto remap = [&](int x) {
    if (x == drop) x = keep;
    return x > drop ? x - 1 : x;
  };
  h.n = g.n - 1;
  for (int p = 0; p < g.num_pairs(); ++p) {
    if (p == pair_id) continue;
    auto q = g.pairs[p];
    q.u = remap(q.u);
    q.v = remap(q.v);
    if (q.u == q.v && q.loop == LoopKind::normal) q.loop = LoopKind::whole;
    h.pairs.push_back(q);
  }
  return h;
}

inline int order(const LabeledGraph& g) { return g.num_pairs() - g.n; }

// component ids over the underlying undirected structure
inline std::vector<int> component_ids(const LabeledGraph& g, int* count = nullptr) {
  std::vector<int> comp(g.n, -1);
  int c = 0;
  std::vector<int> stack;
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& p : g.pairs) {
    adj[p.u].push_back(p.v);
    adj[p.v].push_back(p.u);
  }
  for (int s = 0; s < g.n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (comp[w] < 0) {
          comp[w] = c;
          stack.push_back(w);
        }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

inline bool connected(const LabeledGraph& g) {
  if (g.n == 0) return true;
  int c = 0;
  component_ids(g, &c);
  return c <= 1;
}

// connected and at least as many edges as vertices
inline bool loopy(const LabeledGraph& g) {
  return g.n > 0 && connected(g) && g.num_pairs() >= g.n;
}

struct NonBacktrackingGraph {
  int num_nodes = 0;
  std::vector<int> node_to_edge;       // node id -> directed edge id
  std::vector<int> edge_to_node;       // directed edge id -> node id or -1
  std::vector<std::vector<int>> succ;  // arcs
};

inline NonBacktrackingGraph nonbacktracking(const LabeledGraph& g) {
  NonBacktrackingGraph nb;
  nb.edge_to_node.assign(2 * g.num_pairs(), -1);
  for (int e = 0; e < 2 * g.num_pairs(); ++e) {
    if (!g.edge_valid(e)) continue;
    nb.edge_to_node[e] = nb.num_nodes++;
    nb.node_to_edge.push_back(e);
  }
  auto out = g.out_edges();
  nb.succ.resize(nb.num_nodes);
  for (int i = 0; i < nb.num_nodes; ++i) {
    int e1 = nb.node_to_edge[i];
    for (int e2 : out[g.head(e1)])
      if (e2 != g.opp(e1)) nb.succ[i].push_back(nb.edge_to_node[e2]);
  }
  return nb;
}

// Tarjan, iterative; returns component id per node
inline std::vector<int> strongly_connected_components(
    const std::vector<std::vector<int>>& succ, int* count = nullptr) {
  int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stk;
  int next_index = 0, ncomp = 0;
  struct Frame {
    int v;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stk.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& f = frames.back();
      if (f.child < succ[f.v].size()) {
        int w = succ[f.v][f.child++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stk.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          int w;
          do {
            w = stk.back();
            stk.pop_back();
            on_stack[w] = 0;
            comp[w] = ncomp;
          } while (w != f.v);
          ++ncomp;
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  if (count) *count = ncomp;
  return comp;
}

// Perron value of the non-backtracking operator, maximum over strongly
// connected components; power iteration on B+I with Collatz-Wielandt
// bounds, relative tolerance 1e-10, at most 1e5 iterations.
inline double lambda_irred(const LabeledGraph& g) {
  auto nb = nonbacktracking(g);
  if (nb.num_nodes == 0) return 0.0;
  int ncomp = 0;
  auto comp = strongly_connected_components(nb.succ, &ncomp);
  std::vector<std::vector<int>> members(ncomp);
  for (int i = 0; i < nb.num_nodes; ++i) members[comp[i]].push_back(i);
  double best = 0.0;
  std::vector<int> local(nb.num_nodes, -1);
  for (int c = 0; c < ncomp; ++c) {
    const auto& m = members[c];
    bool has_internal_arc = false;
    for (int v : m)
      for (int w : nb.succ[v])
        if (comp[w] == c) has_internal_arc = true;
    if (!has_internal_arc) continue;
    for (size_t i = 0; i < m.size(); ++i) local[m[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> bsucc(m.size());
    for (size_t i = 0; i < m.size(); ++i)
      for (int w : nb.succ[m[i]])
        if (comp[w] == c) bsucc[i].push_back(local[w]);
    std::vector<double> x(m.size(), 1.0), y(m.size());
    double perron = 0.0;
    bool done = false;
    for (long iter = 0; iter < 100000; ++iter) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mx = 0.0;
      for (size_t i = 0; i < m.size(); ++i) {
        double s = x[i];
        for (int w : bsucc[i]) s += x[w];
        y[i] = s;
        double ratio = s / x[i];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        mx = std::max(mx, s);
      }
      for (size_t i = 0; i < m.size(); ++i) x[i] = y[i] / mx;
      if (hi - lo <= 1e-10 * hi) {
        perron = 0.5 * (lo + hi);
        done = true;
        break;
      }
    }
    if (!done)
      throw resource_error("lambda_irred: power iteration did not converge");
    best = std::max(best, perron - 1.0);
  }
  return best;
}

inline LabeledGraph drop_isolated(const LabeledGraph& g) {
  auto deg = degrees(g);
  std::vector<char> valive(g.n, 1), palive(g.num_pairs(), 1);
  bool any = false;
  for (int v = 0; v < g.n; ++v)
    if (deg[v] == 0) {
      valive[v] = 0;
      any = true;
    }
  if (!any) return g;
  return subgraph(g, valive, palive);
}

// 1/y* for the smallest positive root y* of det(I - yA + y^2 (D-I)) = 0,
// computed as the largest real eigenvalue of the companion pencil
// [[A, -(D-I)], [I, 0]]. Loopless graphs only; prunes first, so every
// surviving vertex has degree >= 2.
inline double lambda_irred_ihara(const LabeledGraph& g0) {
  auto g = drop_isolated(prune_completely(g0));
  if (g.n == 0)
    throw domain_error("lambda_irred_ihara: graph prunes to nothing");
  for (const auto& p : g.pairs)
    if (p.loop != LoopKind::normal)
      throw domain_error("lambda_irred_ihara: loops not supported");
  int n = g.n;
  Eigen::MatrixXd a = adjacency(g);
  auto deg = degrees(g);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  k.topLeftCorner(n, n) = a;
  for (int v = 0; v < n; ++v) k(v, n + v) = -(deg[v] - 1.0);
  k.bottomLeftCorner(n, n).setIdentity();
  // every pencil root is an eigenvalue of the non-backtracking operator, so
  // real parts never exceed the Perron value and the Perron root is real;
  // taking the max real part dodges the defective-root splitting on cycles
  Eigen::EigenSolver<Eigen::MatrixXd> es(k, false);
  double best = 0.0;
  for (int i = 0; i < 2 * n; ++i)
    best = std::max(best, es.eigenvalues()[i].real());
  if (best <= 0.0)
    throw domain_error("lambda_irred_ihara: no positive real root");
  return best;
}

struct OneLoopyTriple {
  bool direct = false;
  bool nb_strongly_connected = false;
  bool degree_form = false;
};

// the three equivalent characterizations, evaluated independently
inline OneLoopyTriple is_one_loopy(const LabeledGraph& g) {
  if (!connected(g)) throw domain_error("is_one_loopy: graph not connected");
  OneLoopyTriple r;

  // route 1: removing any single edge leaves every component loopy
  r.direct = loopy(g);
  for (int p = 0; r.direct && p < g.num_pairs(); ++p) {
    std::vector<char> valive(g.n, 1), palive(g.num_pairs(), 1);
    palive[p] = 0;
    auto h = subgraph(g, valive, palive);
    int nc = 0;
    auto comp = component_ids(h, &nc);
    std::vector<int> nv(nc, 0), ne(nc, 0);
    for (int v = 0; v < h.n; ++v) nv[comp[v]]++;
    for (const auto& q : h.pairs) ne[comp[q.u]]++;
    for (int c = 0; c < nc; ++c)
      if (ne[c] < nv[c]) r.direct = false;
  }

  // route 2: the non-backtracking graph is one strongly connected component
  // with at least one arc
  auto nb = nonbacktracking(g);
  if (nb.num_nodes > 0) {
    int ncomp = 0;
    strongly_connected_components(nb.succ, &ncomp);
    size_t arcs = 0;
    for (const auto& s : nb.succ) arcs += s.size();
    r.nb_strongly_connected = ncomp == 1 && arcs > 0;
  }

  // route 3: minimum degree >= 2 and not a cycle (a cycle being a connected
  // graph with all degrees 2 and no half-loops)
  auto deg = degrees(g);
  int mindeg = g.n == 0 ? 0 : *std::min_element(deg.begin(), deg.end());
  bool all_two = g.n > 0;
  for (int v = 0; v < g.n; ++v) all_two = all_two && deg[v] == 2;
  bool is_cycle = all_two && g.num_half_loops() == 0;
  r.degree_form = mindeg >= 2 && !is_cycle;

  return r;
}

}  // namespace alonlab
