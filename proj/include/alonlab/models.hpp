#pragma once

// Seeded samplers for the four random d-regular multigraph models:
//   g: d/2 independent uniform permutations (whole-loops at fixed points)
//   h: d/2 independent uniform single-cycle permutations (no loops for n>1)
//   i: d independent uniform perfect matchings (n even)
//   j: d independent near-perfect matchings, one half-loop each (n odd)
//
// Campaign sample i uses stream seed splitmix64(root ^ i); bounded draws use
// rejection sampling on raw 64-bit outputs so replay is bit-stable across
// standard libraries.

#include <cstdint>
#include <random>
#include <vector>

#include <alonlab/graph.hpp>

namespace alonlab {

struct ModelId {
  char tag = 'g';  // 'g', 'h', 'i' or 'j'
  int d = 4;
  int n = 2;
};

inline void validate(const ModelId& m) {
  if (m.n < 1) throw domain_error("model: n must be at least 1");
  switch (m.tag) {
    case 'g':
    case 'h':
      if (m.d < 4 || m.d % 2 != 0)
        throw domain_error("model: permutation models need even d >= 4");
      break;
    case 'i':
      if (m.d < 3) throw domain_error("model: d must be at least 3");
      if (m.n % 2 != 0)
        throw domain_error("model: perfect matchings need even n");
      break;
    case 'j':
      if (m.d < 3) throw domain_error("model: d must be at least 3");
      if (m.n % 2 != 1)
        throw domain_error("model: near-perfect matchings need odd n");
      break;
    default:
      throw domain_error("model: unknown tag");
  }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root ^ index);
}

// unbiased draw from {0, ..., m-1}
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t m) {
  std::uint64_t threshold = (-m) % m;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % m;
  }
}

inline void shuffle_ints(std::vector<int>& a, std::mt19937_64& rng) {
  for (std::size_t i = a.size(); i > 1; --i)
    std::swap(a[i - 1], a[bounded(rng, i)]);
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  shuffle_ints(p, rng);
  return p;
}

// uniform over the (n-1)! permutations whose cycle decomposition is one
// n-cycle: shuffle the visiting order of 2..n after vertex 1, close up
inline std::vector<int> uniform_single_cycle(int n, std::mt19937_64& rng) {
  std::vector<int> ord(n);
  for (int i = 0; i < n; ++i) ord[i] = i;
  for (std::size_t i = ord.size(); i > 2; --i)
    std::swap(ord[i - 1], ord[1 + bounded(rng, i - 1)]);
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[ord[i]] = ord[(i + 1) % n];
  return p;
}

inline LabeledGraph sample(const ModelId& m, std::uint64_t root,
                           std::uint64_t index) {
  validate(m);
  std::mt19937_64 rng(stream_seed(root, index));
  std::vector<EdgeSpec> es;
  if (m.tag == 'g' || m.tag == 'h') {
    for (int j = 1; j <= m.d / 2; ++j) {
      auto p = m.tag == 'g' ? random_permutation(m.n, rng)
                            : uniform_single_cycle(m.n, rng);
      for (int i = 0; i < m.n; ++i)
        es.push_back({i + 1, p[i] + 1, perm(j),
                      p[i] == i ? LoopKind::whole : LoopKind::normal});
    }
  } else {
    for (int j = 1; j <= m.d; ++j) {
      auto ord = random_permutation(m.n, rng);
      for (int i = 0; i + 1 < m.n; i += 2)
        es.push_back({ord[i] + 1, ord[i + 1] + 1, match(j), LoopKind::normal});
      if (m.n % 2 == 1)
        es.push_back({ord[m.n - 1] + 1, ord[m.n - 1] + 1, halfloop(j),
                      LoopKind::half});
    }
  }
  return build_graph(m.n, es, m.d, m.tag);
}

}  // namespace alonlab
