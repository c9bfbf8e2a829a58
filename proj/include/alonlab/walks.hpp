#pragma once

// Exact rational walk probabilities and trace expectations for the four
// random models.  A word over the generator alphabet together with a vertex
// vector t pins down which generator values a walk would determine; the
// probability that random generators agree with all of them is a product of
// one factor per generator, depending only on how many of its edges got
// determined.  Summing over vertex vectors regroups into finitely many
// classes per word (fresh vertices in first-use order), each weighted by a
// falling factorial of n.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <alonlab/graph.hpp>
#include <alonlab/models.hpp>
#include <alonlab/traces.hpp>

namespace alonlab {

struct Word {
  std::vector<Label> letters;

  int k() const { return static_cast<int>(letters.size()); }
};

struct PotentialWalk {
  Word word;
  std::vector<int> t;  // 1-based vertices, length k()+1
};

// per-generator determined edge counts: a permutation value or a matched
// pair each count one edge; in model j the pinned half-loops are flagged
// separately in `half`
struct FormStats {
  std::vector<long long> a;
  std::vector<int> half;
  int v = 0;  // distinct vertices

  long long e() const {
    long long s = 0;
    for (long long x : a) s += x;
    for (int x : half) s += x;
    return s;
  }
};

inline bool irreducible(const Word& w) {
  for (std::size_t i = 1; i < w.letters.size(); ++i)
    if (w.letters[i] == w.letters[i - 1].inverse()) return false;
  return true;
}

// n (n-1) ... (n-k+1); zero once k exceeds a nonnegative n
inline mpz_class falling_factorial(long long n, long long k) {
  if (k < 0) throw domain_error("falling factorial: negative length");
  mpz_class r = 1;
  for (long long i = 0; i < k; ++i) r *= static_cast<long>(n - i);
  return r;
}

inline std::vector<Label> model_alphabet(char model, int d) {
  std::vector<Label> a;
  if (model == 'g' || model == 'h') {
    for (int j = 1; j <= d / 2; ++j) {
      a.push_back(perm(j));
      a.push_back(perm_inv(j));
    }
  } else if (model == 'i' || model == 'j') {
    for (int j = 1; j <= d; ++j) a.push_back(match(j));
    if (model == 'j')
      for (int j = 1; j <= d; ++j) a.push_back(halfloop(j));
  } else {
    throw domain_error("walk: unknown model tag");
  }
  return a;
}

namespace detail {

inline void check_walk_model(char model) {
  if (model != 'g' && model != 'h' && model != 'i' && model != 'j')
    throw domain_error("walk: unknown model tag");
}

inline void check_walk_n(char model, long long n) {
  if (n < 1) throw domain_error("walk: n must be at least 1");
  if (model == 'i' && n % 2 != 0)
    throw domain_error("walk: perfect matchings need even n");
  if (model == 'j' && n % 2 != 1)
    throw domain_error("walk: near-perfect matchings need odd n");
}

inline void check_letter(char model, const Label& l) {
  if (l.j < 1) throw domain_error("walk: generator index must be positive");
  bool perm_kind =
      l.kind == LabelKind::perm || l.kind == LabelKind::perm_inv;
  bool ok = (model == 'g' || model == 'h')
                ? perm_kind
                : (l.kind == LabelKind::match ||
                   (model == 'j' && l.kind == LabelKind::halfloop));
  if (!ok) throw domain_error("walk: letter kind does not fit the model");
}

// probability factor contributed by one generator with `edges` determined
// edges (and, in model j, `half` telling whether its half-loop is pinned)
inline mpq_class generator_factor(char model, long long n, long long edges,
                                  bool half) {
  mpz_class den = 1;
  if (model == 'g') {
    den = falling_factorial(n, edges);
  } else if (model == 'h') {
    den = falling_factorial(n - 1, edges);
  } else if (model == 'i') {
    for (long long t = 1; t <= edges; ++t)
      den *= static_cast<long>(n - 2 * t + 1);
  } else {
    long long top = half ? edges : edges - 1;
    for (long long t = 0; t <= top; ++t) den *= static_cast<long>(n - 2 * t);
  }
  if (den <= 0) throw domain_error("walk: more edges than the model admits");
  return mpq_class(mpz_class(1), den);
}

// incrementally determined generator data along a walk
struct WalkBuilder {
  struct Gen {
    std::vector<int> fwd, bwd;  // permutation models
    std::vector<int> mate;      // matching models
    int halfv = 0;
    long long edges = 0;
  };

  char model;
  int cap;
  std::map<int, Gen> gens;

  WalkBuilder(char m, int capacity) : model(m), cap(capacity) {}

  Gen& gen(int j) {
    auto it = gens.find(j);
    if (it == gens.end()) {
      Gen g;
      if (model == 'g' || model == 'h') {
        g.fwd.assign(cap + 1, 0);
        g.bwd.assign(cap + 1, 0);
      } else {
        g.mate.assign(cap + 1, 0);
      }
      it = gens.emplace(j, std::move(g)).first;
    }
    return it->second;
  }

  struct Undo {
    int j = 0;
    int mode = 0;  // 0 nothing, 1 permutation value, 2 pair, 3 half-loop
    int x = 0, y = 0;
  };

  // record that the letter moves x to y; false when inconsistent
  bool step(const Label& l, int x, int y, Undo& u) {
    u = Undo{};
    Gen& g = gen(l.j);
    if (l.kind == LabelKind::perm || l.kind == LabelKind::perm_inv) {
      int s = l.kind == LabelKind::perm ? x : y;
      int t = l.kind == LabelKind::perm ? y : x;
      if (g.fwd[s] != 0) return g.fwd[s] == t;
      if (g.bwd[t] != 0) return false;
      g.fwd[s] = t;
      g.bwd[t] = s;
      ++g.edges;
      u = {l.j, 1, s, t};
      return true;
    }
    if (l.kind == LabelKind::match) {
      if (x == y) return false;
      if (g.halfv == x || g.halfv == y) return false;
      if (g.mate[x] != 0) return g.mate[x] == y;
      if (g.mate[y] != 0) return false;
      g.mate[x] = y;
      g.mate[y] = x;
      ++g.edges;
      u = {l.j, 2, x, y};
      return true;
    }
    if (x != y) return false;
    if (g.mate[x] != 0) return false;
    if (g.halfv != 0) return g.halfv == x;
    g.halfv = x;
    u = {l.j, 3, x, x};
    return true;
  }

  void unstep(const Undo& u) {
    if (u.mode == 0) return;
    Gen& g = gens.at(u.j);
    if (u.mode == 1) {
      g.fwd[u.x] = 0;
      g.bwd[u.y] = 0;
      --g.edges;
    } else if (u.mode == 2) {
      g.mate[u.x] = 0;
      g.mate[u.y] = 0;
      --g.edges;
    } else {
      g.halfv = 0;
    }
  }
};

// length of the directed cycle in a partial injection, 0 when acyclic;
// injections split into paths and cycles, so following fwd suffices
inline int cycle_length(const WalkBuilder::Gen& g, int cap) {
  std::vector<char> seen(cap + 1, 0);
  for (int s = 1; s <= cap; ++s) {
    if (seen[s] || g.fwd[s] == 0) continue;
    int len = 0, x = s;
    while (x != 0 && !seen[x]) {
      seen[x] = 1;
      ++len;
      x = g.fwd[x];
    }
    if (x == s) return len;
  }
  return 0;
}

inline void check_walk_shape(char model, const Word& w,
                             const std::vector<int>& t, long long limit) {
  if (t.size() != static_cast<std::size_t>(w.k()) + 1)
    throw domain_error("walk: t must have one more entry than the word");
  for (int x : t)
    if (x < 1 || x > limit) throw domain_error("walk: vertex out of range");
  for (const auto& l : w.letters) check_letter(model, l);
}

}  // namespace detail

// probability that all generator values required by the walk (word, t)
// hold simultaneously in a random model instance on n vertices
inline mpq_class prob_walk(char model, const Word& w,
                           const std::vector<int>& t, int n) {
  detail::check_walk_model(model);
  detail::check_walk_n(model, n);
  detail::check_walk_shape(model, w, t, n);

  int cap = *std::max_element(t.begin(), t.end());
  detail::WalkBuilder b(model, cap);
  detail::WalkBuilder::Undo u;
  for (int i = 0; i < w.k(); ++i)
    if (!b.step(w.letters[i], t[i], t[i + 1], u)) return 0;

  mpq_class p = 1;
  for (const auto& [j, g] : b.gens) {
    if (model == 'h') {
      // a cycle is only consistent with a single n-cycle when it has
      // length exactly n, and then the whole permutation is determined
      int c = detail::cycle_length(g, cap);
      if (c > 0) {
        if (c != n) return 0;
        mpz_class fac;
        mpz_fac_ui(fac.get_mpz_t(), static_cast<unsigned long>(n - 1));
        p *= mpq_class(mpz_class(1), fac);
        continue;
      }
    }
    bool half = g.halfv != 0;
    if (g.edges == 0 && !half) continue;
    p *= detail::generator_factor(model, n, g.edges, half);
  }
  return p;
}

inline mpq_class prob_walk(char model, const PotentialWalk& pw, int n) {
  return prob_walk(model, pw.word, pw.t, n);
}

// edge counts, half-loop flags and distinct vertex count of a feasible
// walk; these are all that the probability depends on
inline FormStats walk_stats(char model, const Word& w,
                            const std::vector<int>& t) {
  detail::check_walk_model(model);
  detail::check_walk_shape(model, w, t,
                           std::numeric_limits<int>::max());
  int cap = t.empty() ? 1 : *std::max_element(t.begin(), t.end());
  detail::WalkBuilder b(model, cap);
  detail::WalkBuilder::Undo u;
  for (int i = 0; i < w.k(); ++i)
    if (!b.step(w.letters[i], t[i], t[i + 1], u))
      throw domain_error("walk: word and vertex vector are inconsistent");

  int maxj = 0;
  for (const auto& l : w.letters) maxj = std::max(maxj, l.j);
  FormStats s;
  s.a.assign(maxj, 0);
  if (model == 'j') s.half.assign(maxj, 0);
  for (const auto& [j, g] : b.gens) {
    s.a[j - 1] = g.edges;
    if (model == 'j') s.half[j - 1] = g.halfv != 0;
  }
  std::vector<int> uniq(t);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  s.v = static_cast<int>(uniq.size());
  return s;
}

// falling(n, v) times the probability factors: the expectation, over the
// random instance, of the number of injective placements of the walk shape
inline mpq_class expected_symm(char model, const FormStats& s, long long n) {
  detail::check_walk_model(model);
  detail::check_walk_n(model, n);
  if (s.v < 0) throw domain_error("stats: negative vertex count");
  if (n < s.v) throw domain_error("stats: fewer vertices than the shape");
  if (!s.half.empty() && (model != 'j' || s.half.size() != s.a.size()))
    throw domain_error("stats: half-loop flags fit model j only");
  mpq_class r(falling_factorial(n, s.v));
  for (std::size_t i = 0; i < s.a.size(); ++i) {
    if (s.a[i] < 0) throw domain_error("stats: negative edge count");
    bool half = model == 'j' && !s.half.empty() && s.half[i] != 0;
    if (s.a[i] == 0 && !half) continue;
    r *= detail::generator_factor(model, n, s.a[i], half);
  }
  return r;
}

// canonical closed vertex vectors for a word: t_0 = 1, fresh vertices are
// numbered in first-use order, and the walk must end back at vertex 1.
// Only shape constraints prune here, so the classes cover every n; vectors
// that force an impossible cycle in model h get probability zero later.
inline std::vector<std::vector<int>> closed_walk_classes(char model,
                                                         const Word& w) {
  detail::check_walk_model(model);
  const int k = w.k();
  if (k < 1) throw domain_error("walk: classes need at least one letter");
  if (k > 16) throw resource_error("walk: class enumeration budget exceeded");
  for (const auto& l : w.letters) detail::check_letter(model, l);

  std::vector<std::vector<int>> out;
  std::vector<int> t(k + 1, 0);
  t[0] = 1;
  detail::WalkBuilder b(model, k + 1);
  int v = 1;

  auto rec = [&](auto&& self, int i) -> void {
    if (i == k + 1) {
      out.push_back(t);
      return;
    }
    const Label& l = w.letters[i - 1];
    int x = t[i - 1];
    auto try_y = [&](int y) {
      if (i == k && y != 1) return;
      detail::WalkBuilder::Undo u;
      if (!b.step(l, x, y, u)) return;
      bool fresh = y > v;
      if (fresh) ++v;
      t[i] = y;
      self(self, i + 1);
      if (fresh) --v;
      b.unstep(u);
    };
    int forced = 0;
    detail::WalkBuilder::Gen& g = b.gen(l.j);
    if (l.kind == LabelKind::perm)
      forced = g.fwd[x];
    else if (l.kind == LabelKind::perm_inv)
      forced = g.bwd[x];
    else if (l.kind == LabelKind::match)
      forced = g.mate[x];
    else
      forced = x;
    if (forced != 0) {
      try_y(forced);
    } else {
      for (int y = 1; y <= v; ++y) try_y(y);
      if (i < k) try_y(v + 1);
    }
  };
  rec(rec, 1);
  return out;
}

// expectation of the irreducible trace at length k, summed exactly over
// all irreducible words and closed walk classes
inline mpq_class exact_expected_trace(char model, int n, int d, int k) {
  validate(ModelId{model, d, n});
  if (k < 1) throw domain_error("trace: k must be at least 1");
  if (k > 8 || n > 64)
    throw resource_error("trace: exact expectation budget exceeded");
  auto alpha = model_alphabet(model, d);
  double words = static_cast<double>(alpha.size()) *
                 std::pow(static_cast<double>(alpha.size() - 1), k - 1);
  if (words > 2e7) throw resource_error("trace: word budget exceeded");

  mpq_class total = 0;
  Word w;
  w.letters.resize(k);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == k) {
      for (const auto& t : closed_walk_classes(model, w)) {
        int v = *std::max_element(t.begin(), t.end());
        if (v > n) continue;  // weight falling(n, v) vanishes
        mpq_class p = prob_walk(model, w, t, n);
        if (p == 0) continue;
        total += mpq_class(falling_factorial(n, v)) * p;
      }
      return;
    }
    for (const auto& l : alpha) {
      if (i > 0 && l == w.letters[i - 1].inverse()) continue;
      w.letters[i] = l;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return total;
}

namespace detail {

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline std::vector<std::vector<int>> all_full_cycles(int n) {
  std::vector<std::vector<int>> out;
  if (n == 1) {
    out.push_back({0});
    return out;
  }
  std::vector<int> rest(n - 1);
  for (int i = 0; i < n - 1; ++i) rest[i] = i + 1;
  do {
    std::vector<int> p(n);
    int prev = 0;
    for (int x : rest) {
      p[prev] = x;
      prev = x;
    }
    p[prev] = 0;
    out.push_back(p);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

struct MatchConfig {
  std::vector<std::pair<int, int>> pairs;
  int halfv = -1;
};

inline void matchings_of(std::vector<int>& elems, MatchConfig& cur,
                         std::vector<MatchConfig>& out) {
  if (elems.empty()) {
    out.push_back(cur);
    return;
  }
  int x = elems[0];
  for (std::size_t i = 1; i < elems.size(); ++i) {
    int y = elems[i];
    std::vector<int> rest;
    for (std::size_t t = 1; t < elems.size(); ++t)
      if (t != i) rest.push_back(elems[t]);
    cur.pairs.push_back({x, y});
    matchings_of(rest, cur, out);
    cur.pairs.pop_back();
  }
}

inline std::vector<MatchConfig> all_matchings(int n, bool near) {
  std::vector<MatchConfig> out;
  if (!near) {
    std::vector<int> elems(n);
    for (int i = 0; i < n; ++i) elems[i] = i;
    MatchConfig cur;
    matchings_of(elems, cur, out);
    return out;
  }
  for (int h = 0; h < n; ++h) {
    std::vector<int> elems;
    for (int i = 0; i < n; ++i)
      if (i != h) elems.push_back(i);
    MatchConfig cur;
    cur.halfv = h;
    matchings_of(elems, cur, out);
  }
  return out;
}

}  // namespace detail

// averages the irreducible trace over every instance of the model; the
// edges are emitted exactly as sampling does
inline mpq_class brute_force_expected_trace(char model, int n, int d, int k) {
  validate(ModelId{model, d, n});
  if (k < 1) throw domain_error("trace: k must be at least 1");

  const int gens = (model == 'g' || model == 'h') ? d / 2 : d;
  double predicted = model == 'j' ? n : 1;
  if (model == 'g')
    for (int i = 2; i <= n; ++i) predicted *= i;
  else if (model == 'h')
    for (int i = 2; i <= n - 1; ++i) predicted *= i;
  else
    for (int i = n % 2 ? n - 2 : n - 1; i > 0; i -= 2) predicted *= i;
  if (std::pow(predicted, gens) > 1e6 + 0.5)
    throw resource_error("trace: instance budget exceeded");

  std::vector<std::vector<int>> perms;
  std::vector<detail::MatchConfig> matchings;
  std::size_t configs;
  if (model == 'g') {
    perms = detail::all_permutations(n);
    configs = perms.size();
  } else if (model == 'h') {
    perms = detail::all_full_cycles(n);
    configs = perms.size();
  } else {
    matchings = detail::all_matchings(n, model == 'j');
    configs = matchings.size();
  }

  long long instances = 1;
  for (int j = 0; j < gens; ++j) instances *= static_cast<long long>(configs);

  std::vector<std::size_t> idx(gens, 0);
  long long sum = 0;
  for (long long inst = 0; inst < instances; ++inst) {
    std::vector<EdgeSpec> es;
    for (int j = 1; j <= gens; ++j) {
      if (model == 'g' || model == 'h') {
        const auto& p = perms[idx[j - 1]];
        for (int i = 0; i < n; ++i)
          es.push_back({i + 1, p[i] + 1, perm(j),
                        p[i] == i ? LoopKind::whole : LoopKind::normal});
      } else {
        const auto& mc = matchings[idx[j - 1]];
        for (const auto& [a, b] : mc.pairs)
          es.push_back({a + 1, b + 1, match(j), LoopKind::normal});
        if (mc.halfv >= 0)
          es.push_back(
              {mc.halfv + 1, mc.halfv + 1, halfloop(j), LoopKind::half});
      }
    }
    LabeledGraph g = build_graph(n, es, d, model);
    sum += irred_trace(g, k);
    for (int j = 0; j < gens; ++j) {
      if (++idx[j] < configs) break;
      idx[j] = 0;
    }
  }
  mpq_class r(mpz_class(static_cast<long>(sum)),
              mpz_class(static_cast<long>(instances)));
  r.canonicalize();
  return r;
}

struct WordCensus {
  long long count = 0;
  std::vector<long long> a_sum;  // letter occurrences per generator, summed
};

// counts irreducible words over the permutation alphabet of degree d that
// start with `start` and end with `end`, recording letter usage
inline WordCensus word_census(int k, int d, const Label& start,
                              const Label& end) {
  if (d < 2 || d % 2 != 0)
    throw domain_error("census: the alphabet pairs letters with inverses");
  if (k < 1) throw domain_error("census: k must be at least 1");
  if (k > 12 ||
      static_cast<double>(d) * std::pow(static_cast<double>(d - 1), k - 1) >
          5e7)
    throw resource_error("census: word budget exceeded");
  auto check = [&](const Label& l) {
    if ((l.kind != LabelKind::perm && l.kind != LabelKind::perm_inv) ||
        l.j < 1 || l.j > d / 2)
      throw domain_error("census: letter outside the alphabet");
  };
  check(start);
  check(end);

  WordCensus c;
  c.a_sum.assign(d / 2, 0);
  std::vector<long long> occ(d / 2, 0);
  auto alpha = model_alphabet('g', d);
  occ[start.j - 1] = 1;
  auto rec = [&](auto&& self, int i, const Label& prev) -> void {
    if (i == k) {
      if (prev == end) {
        ++c.count;
        for (int j = 0; j < d / 2; ++j) c.a_sum[j] += occ[j];
      }
      return;
    }
    for (const auto& l : alpha) {
      if (l == prev.inverse()) continue;
      ++occ[l.j - 1];
      self(self, i + 1, l);
      --occ[l.j - 1];
    }
  };
  rec(rec, 1, start);
  return c;
}

inline std::string oracle_csv_header() {
  return "model,n,d,k,method,value_num,value_den";
}

inline std::string oracle_csv_row(char model, int n, int d, int k,
                                  const std::string& method,
                                  const mpq_class& value) {
  std::ostringstream ss;
  ss << model << ',' << n << ',' << d << ',' << k << ',' << method << ','
     << value.get_num().get_str() << ',' << value.get_den().get_str();
  return ss.str();
}

}  // namespace alonlab
