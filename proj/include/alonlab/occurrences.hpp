#pragma once

// Label-preserving embeddings of a small connected labeled graph (a tangle)
// into a host graph. An embedding is an injective vertex map under which
// every tangle edge has a host edge pair with the same label and loop kind;
// distinct tangle edges must use distinct host pairs. Because labels follow
// permutations and matchings, candidate images are found by label-following
// from an anchored vertex.

#include <algorithm>
#include <vector>

#include <alonlab/graph.hpp>

namespace alonlab {

struct Occurrence {
  std::vector<int> vertex_map;  // tangle vertex -> host vertex
  std::vector<int> pair_ids;    // host pairs used, sorted
};

namespace detail {

// order tangle pairs so each has a previously-touched endpoint, starting at 0
inline std::vector<int> bfs_pair_order(const LabeledGraph& t) {
  std::vector<char> vseen(t.n, 0), pseen(t.num_pairs(), 0);
  if (t.n > 0) vseen[0] = 1;
  std::vector<int> ord;
  for (int round = 0; round < t.num_pairs(); ++round) {
    int found = -1;
    for (int p = 0; p < t.num_pairs() && found < 0; ++p)
      if (!pseen[p] && (vseen[t.pairs[p].u] || vseen[t.pairs[p].v])) found = p;
    if (found < 0) throw domain_error("occurrences: tangle not connected");
    pseen[found] = 1;
    vseen[t.pairs[found].u] = 1;
    vseen[t.pairs[found].v] = 1;
    ord.push_back(found);
  }
  for (int v = 0; v < t.n; ++v)
    if (!vseen[v]) throw domain_error("occurrences: tangle not connected");
  return ord;
}

// does host pair hp realize tangle pair tp under endpoint images (iu, iv)?
inline bool pair_matches(const EdgePair& hp, const EdgePair& tp, int iu, int iv) {
  if (hp.loop != tp.loop) return false;
  if (hp.u == iu && hp.v == iv && hp.label == tp.label) return true;
  if (hp.u == iv && hp.v == iu && hp.label == tp.label.inverse()) return true;
  return false;
}

}  // namespace detail

inline std::vector<Occurrence> find_occurrences(const LabeledGraph& host,
                                                const LabeledGraph& tangle) {
  std::vector<Occurrence> out;
  if (tangle.n == 0) return out;
  auto order = detail::bfs_pair_order(tangle);

  std::vector<std::vector<int>> incident(host.n);
  for (int p = 0; p < host.num_pairs(); ++p) {
    incident[host.pairs[p].u].push_back(p);
    if (host.pairs[p].v != host.pairs[p].u)
      incident[host.pairs[p].v].push_back(p);
  }

  std::vector<int> phi(tangle.n, -1);
  std::vector<char> vused(host.n, 0), pused(host.num_pairs(), 0);
  std::vector<int> used_pairs;

  auto extend = [&](auto&& self, std::size_t step) -> void {
    if (step == order.size()) {
      Occurrence o;
      o.vertex_map = phi;
      o.pair_ids = used_pairs;
      std::sort(o.pair_ids.begin(), o.pair_ids.end());
      out.push_back(std::move(o));
      return;
    }
    const auto& tp = tangle.pairs[order[step]];
    int a = tp.u, b = tp.v;
    if (phi[a] < 0) std::swap(a, b);
    const auto tpo = a == tp.u ? tp : EdgePair{tp.v, tp.u, tp.label.inverse(), tp.loop};
    for (int hp : incident[phi[a]]) {
      if (pused[hp]) continue;
      const auto& h = host.pairs[hp];
      if (phi[b] >= 0) {
        if (!detail::pair_matches(h, tpo, phi[a], phi[b])) continue;
        pused[hp] = 1;
        used_pairs.push_back(hp);
        self(self, step + 1);
        used_pairs.pop_back();
        pused[hp] = 0;
      } else {
        // b unmapped: infer its image from the matching direction
        int img = -1;
        if (h.loop == tpo.loop) {
          if (h.u == phi[a] && h.label == tpo.label) img = h.v;
          else if (h.v == phi[a] && h.label == tpo.label.inverse()) img = h.u;
        }
        if (img < 0 || vused[img]) continue;
        if (img == phi[a]) continue;  // tangle says b != a here
        phi[b] = img;
        vused[img] = 1;
        pused[hp] = 1;
        used_pairs.push_back(hp);
        self(self, step + 1);
        used_pairs.pop_back();
        pused[hp] = 0;
        vused[img] = 0;
        phi[b] = -1;
      }
    }
  };

  for (int v0 = 0; v0 < host.n; ++v0) {
    phi[0] = v0;
    vused[v0] = 1;
    if (tangle.num_pairs() == 0) {
      out.push_back({phi, {}});
    } else {
      extend(extend, 0);
    }
    vused[v0] = 0;
    phi[0] = -1;
  }
  return out;
}

}  // namespace alonlab
