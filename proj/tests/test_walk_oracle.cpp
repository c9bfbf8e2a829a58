#include <catch2/catch_amalgamated.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <alonlab/walks.hpp>

using namespace alonlab;

namespace {

Word power_word(const Label& l, int m) {
  Word w;
  w.letters.assign(m, l);
  return w;
}

Word concat(Word a, const Word& b) {
  a.letters.insert(a.letters.end(), b.letters.begin(), b.letters.end());
  return a;
}

long divisor_count(long m) {
  long c = 0;
  for (long t = 1; t <= m; ++t) c += m % t == 0;
  return c;
}

mpq_class frac(long num, long den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

// probability that the word maps vertex 1 back to itself: anchor t_0 = 1
// and give the remaining fresh vertices injective names
mpq_class anchored_prob(char model, const Word& w, int n) {
  mpq_class s = 0;
  for (const auto& t : closed_walk_classes(model, w)) {
    int v = *std::max_element(t.begin(), t.end());
    if (v > n) continue;
    s += mpq_class(falling_factorial(n - 1, v - 1)) *
         prob_walk(model, w, t, n);
  }
  return s;
}

}  // namespace

TEST_CASE("walk probabilities follow the model formulas") {
  const int n = 10;
  REQUIRE(prob_walk('g', Word{{perm(1)}}, {1, 2}, n) == mpq_class(1, 10));
  REQUIRE(prob_walk('g', Word{{perm(1)}}, {1, 1}, n) == mpq_class(1, 10));
  REQUIRE(prob_walk('g', Word{{perm(1), perm(1)}}, {1, 2, 3}, n) ==
          mpq_class(1, 90));
  REQUIRE(prob_walk('g', Word{{perm(1), perm(1)}}, {1, 1, 1}, n) ==
          mpq_class(1, 10));
  REQUIRE(prob_walk('g', Word{{perm(1), perm(1)}}, {1, 2, 1}, n) ==
          mpq_class(1, 90));
  REQUIRE(prob_walk('g', Word{{perm(1), perm_inv(1)}}, {1, 2, 1}, n) ==
          mpq_class(1, 10));
  REQUIRE(prob_walk('g', Word{{perm(1), perm(2)}}, {1, 2, 1}, n) ==
          mpq_class(1, 100));
  REQUIRE(prob_walk('g', Word{{perm(1), perm_inv(1)}}, {1, 2, 3}, n) == 0);

  REQUIRE(prob_walk('h', Word{{perm(1)}}, {1, 1}, n) == 0);
  REQUIRE(prob_walk('h', Word{{perm(1)}}, {1, 2}, n) == mpq_class(1, 9));
  REQUIRE(prob_walk('h', Word{{perm(1), perm(1)}}, {1, 2, 3}, n) ==
          mpq_class(1, 72));
  REQUIRE(prob_walk('h', Word{{perm(1), perm(1)}}, {1, 2, 1}, n) == 0);
  REQUIRE(prob_walk('h', Word{{perm(1), perm(1)}}, {1, 2, 1}, 2) == 1);

  REQUIRE(prob_walk('i', Word{{match(1)}}, {1, 2}, n) == mpq_class(1, 9));
  REQUIRE(prob_walk('i', Word{{match(1)}}, {1, 1}, n) == 0);
  REQUIRE(prob_walk('i', Word{{match(1), match(1)}}, {1, 2, 1}, n) ==
          mpq_class(1, 9));
  REQUIRE(prob_walk('i', Word{{match(1), match(2)}}, {1, 2, 1}, n) ==
          mpq_class(1, 81));
  REQUIRE(prob_walk('i', Word{{match(1), match(1)}}, {1, 2, 3}, n) == 0);
  REQUIRE(prob_walk('i', Word{{match(1), match(2), match(1)}}, {2, 1, 3, 4},
                    n) == mpq_class(1, 567));

  REQUIRE(prob_walk('j', Word{{halfloop(1)}}, {1, 1}, 9) == mpq_class(1, 9));
  REQUIRE(prob_walk('j', Word{{halfloop(1)}}, {1, 2}, 9) == 0);
  REQUIRE(prob_walk('j', Word{{match(1)}}, {1, 2}, 9) == mpq_class(1, 9));
  REQUIRE(prob_walk('j', Word{{halfloop(1), match(1)}}, {1, 1, 2}, 9) == 0);
  REQUIRE(prob_walk('j', Word{{match(1), halfloop(1)}}, {1, 2, 2}, 9) == 0);
  REQUIRE(prob_walk('j', Word{{halfloop(1), match(2)}}, {1, 1, 2}, 9) ==
          mpq_class(1, 81));
  REQUIRE(prob_walk('j', Word{{match(1), match(2), match(1)}}, {2, 1, 3, 4},
                    9) == mpq_class(1, 567));

  SECTION("model and input violations are rejected") {
    REQUIRE_THROWS_AS(prob_walk('g', Word{{match(1)}}, {1, 2}, n),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('i', Word{{perm(1)}}, {1, 2}, n),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('i', Word{{halfloop(1)}}, {1, 1}, n),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('i', Word{{match(1)}}, {1, 2}, 9),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('j', Word{{match(1)}}, {1, 2}, 10),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('g', Word{{perm(1)}}, {1}, n), domain_error);
    REQUIRE_THROWS_AS(prob_walk('g', Word{{perm(1)}}, {1, 11}, n),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('g', Word{{perm(0)}}, {1, 1}, n),
                      domain_error);
    REQUIRE_THROWS_AS(prob_walk('q', Word{{perm(1)}}, {1, 1}, n),
                      domain_error);
  }
}

TEST_CASE("irreducibility forbids adjacent inverse letters") {
  REQUIRE(irreducible(Word{{perm(1), perm(1)}}));
  REQUIRE_FALSE(irreducible(Word{{perm(1), perm_inv(1)}}));
  REQUIRE_FALSE(irreducible(Word{{perm_inv(2), perm(2)}}));
  REQUIRE(irreducible(Word{{perm(1), perm(2), perm_inv(1)}}));
  REQUIRE_FALSE(irreducible(Word{{match(2), match(2)}}));
  REQUIRE(irreducible(Word{{match(2), match(1), match(2)}}));
  REQUIRE_FALSE(irreducible(Word{{halfloop(1), halfloop(1)}}));
  REQUIRE(irreducible(Word{{halfloop(1), match(1), halfloop(1)}}));
  REQUIRE(irreducible(Word{}));
}

TEST_CASE("permutation powers return at the divisor rate") {
  for (int n : {8, 20})
    for (int m = 1; m <= 8; ++m) {
      INFO("n=" << n << " m=" << m);
      REQUIRE(anchored_prob('g', power_word(perm(1), m), n) ==
              frac(divisor_count(m), n));
    }
  // a single n-cycle has no short cycles, and always a full one
  for (int m = 1; m <= 8; ++m)
    REQUIRE(anchored_prob('h', power_word(perm(1), m), 20) == 0);
  REQUIRE(anchored_prob('h', power_word(perm(1), 5), 5) == 1);
  REQUIRE(anchored_prob('h', power_word(perm(1), 10), 5) == 1);
  REQUIRE(anchored_prob('h', power_word(perm(1), 9), 5) == 0);
}

TEST_CASE("two generator powers match the return-split formula") {
  const int n = 11;
  for (int m1 = 1; m1 <= 4; ++m1)
    for (int m2 = 1; m2 <= 4; ++m2) {
      Word w = concat(power_word(perm(1), m1), power_word(perm(2), m2));
      mpq_class f1(divisor_count(m1)), f2(divisor_count(m2));
      mpq_class want = f1 * f2 / (n * n) +
                       (n - f1) * (n - f2) / (mpq_class(n) * n * (n - 1));
      INFO("m1=" << m1 << " m2=" << m2);
      REQUIRE(anchored_prob('g', w, n) == want);
    }
}

TEST_CASE("symmetric expectation collapses the falling factorial") {
  REQUIRE(expected_symm('g', FormStats{{1}, {}, 1}, 100) == 1);
  REQUIRE(expected_symm('g', FormStats{{1}, {}, 2}, 100) == 99);
  REQUIRE(expected_symm('g', FormStats{{3}, {}, 3}, 9) == 1);
  REQUIRE(expected_symm('j', FormStats{{1}, {1}, 3}, 9) == 8);

  // agreement with prob_walk through the stats of concrete walks
  struct Case {
    char model;
    Word w;
    std::vector<int> t;
    int n;
  };
  const Case cases[] = {
      {'g', Word{{perm(1), perm(1), perm(2)}}, {1, 2, 3, 1}, 12},
      {'h', Word{{perm(1), perm(2), perm_inv(1)}}, {1, 2, 3, 2}, 12},
      {'i', Word{{match(1), match(2), match(1)}}, {2, 1, 3, 4}, 12},
      {'j', Word{{halfloop(1), match(2)}}, {1, 1, 2}, 13},
  };
  for (const auto& c : cases) {
    FormStats s = walk_stats(c.model, c.w, c.t);
    std::vector<int> sorted = c.t;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    REQUIRE(s.v == static_cast<int>(sorted.size()));
    REQUIRE(expected_symm(c.model, s, c.n) ==
            falling_factorial(c.n, s.v) * prob_walk(c.model, c.w, c.t, c.n));
  }
  REQUIRE(walk_stats('j', Word{{halfloop(1), match(2)}}, {1, 1, 2}).e() == 2);

  REQUIRE_THROWS_AS(expected_symm('g', FormStats{{1}, {}, 200}, 100),
                    domain_error);
  REQUIRE_THROWS_AS(expected_symm('g', FormStats{{120}, {}, 2}, 100),
                    domain_error);
  REQUIRE_THROWS_AS(expected_symm('i', FormStats{{1}, {1}, 2}, 10),
                    domain_error);
  REQUIRE_THROWS_AS(walk_stats('i', Word{{match(1)}}, {1, 1}), domain_error);
}

TEST_CASE("renaming the vertex vector leaves probabilities unchanged") {
  std::mt19937_64 rng(4455);
  auto renamed = [&](const std::vector<int>& t, int n) {
    std::vector<int> names(n);
    for (int i = 0; i < n; ++i) names[i] = i + 1;
    std::shuffle(names.begin(), names.end(), rng);
    std::vector<int> s;
    for (int x : t) s.push_back(names[x - 1]);
    return s;
  };
  int nonzero = 0;
  for (int it = 0; it < 300; ++it) {
    char model = "ghij"[it % 4];
    int n = model == 'i' ? 10 : model == 'j' ? 9 : 10;
    auto alpha = model_alphabet(model, model == 'g' || model == 'h' ? 4 : 3);
    int k = 1 + static_cast<int>(rng() % 5);
    Word w;
    for (int i = 0; i < k; ++i) w.letters.push_back(alpha[rng() % alpha.size()]);
    std::vector<int> t(k + 1);
    for (int& x : t) x = 1 + static_cast<int>(rng() % 5);
    mpq_class p = prob_walk(model, w, t, n);
    REQUIRE(prob_walk(model, w, renamed(t, n), n) == p);
    nonzero += p != 0;
  }
  REQUIRE(nonzero > 30);
}

TEST_CASE("closed class enumeration is canonical") {
  auto cls = closed_walk_classes('g', power_word(perm(1), 4));
  REQUIRE(cls.size() == 3);  // returns after 1, 2 or 4 fresh vertices
  for (const auto& t : cls) {
    REQUIRE(t.front() == 1);
    REQUIRE(t.back() == 1);
    int seen = 0;
    for (int x : t) {
      REQUIRE(x <= seen + 1);  // first-use order
      seen = std::max(seen, x);
    }
  }
  REQUIRE(closed_walk_classes('i', Word{{match(1), match(2)}}).size() == 1);
  REQUIRE(closed_walk_classes('j', Word{{halfloop(1)}}).size() == 1);
  REQUIRE(closed_walk_classes('i', Word{{match(1)}}).empty());
}

TEST_CASE("exact and brute force expected traces agree") {
  struct Case {
    char model;
    int n, d, kmax;
  };
  const Case cases[] = {
      {'g', 4, 4, 6}, {'i', 4, 3, 6}, {'h', 4, 4, 5}, {'j', 3, 3, 5},
      {'j', 5, 3, 4}, {'i', 6, 3, 4}, {'g', 3, 6, 3}, {'h', 5, 4, 4},
      {'h', 1, 4, 3},
  };
  for (const auto& c : cases)
    for (int k = 1; k <= c.kmax; ++k) {
      mpq_class exact = exact_expected_trace(c.model, c.n, c.d, k);
      mpq_class brute = brute_force_expected_trace(c.model, c.n, c.d, k);
      INFO(c.model << " n=" << c.n << " d=" << c.d << " k=" << k << ": "
                   << exact.get_str() << " vs " << brute.get_str());
      REQUIRE(exact == brute);
    }
}

TEST_CASE("expected traces hit hand-counted values") {
  REQUIRE(exact_expected_trace('g', 10, 4, 1) == 4);
  REQUIRE(exact_expected_trace('g', 7, 6, 1) == 6);
  REQUIRE(exact_expected_trace('h', 10, 4, 1) == 0);
  REQUIRE(exact_expected_trace('i', 10, 3, 1) == 0);
  REQUIRE(exact_expected_trace('j', 9, 3, 1) == 3);
  REQUIRE(exact_expected_trace('g', 16, 4, 2) == 16);
  REQUIRE(exact_expected_trace('j', 3, 3, 2) == 6);
  REQUIRE(exact_expected_trace('i', 2, 3, 2) == 12);
  REQUIRE(brute_force_expected_trace('g', 1, 4, 2) == 12);
  REQUIRE(brute_force_expected_trace('i', 2, 3, 2) == 12);
}

TEST_CASE("enumeration budgets bound both oracles") {
  REQUIRE_THROWS_AS(exact_expected_trace('g', 4, 4, 0), domain_error);
  REQUIRE_THROWS_AS(exact_expected_trace('g', 4, 4, 9), resource_error);
  REQUIRE_THROWS_AS(exact_expected_trace('g', 66, 4, 3), resource_error);
  REQUIRE_THROWS_AS(exact_expected_trace('g', 64, 40, 8), resource_error);
  REQUIRE_THROWS_AS(brute_force_expected_trace('g', 4, 4, 0), domain_error);
  REQUIRE_THROWS_AS(brute_force_expected_trace('g', 6, 6, 2), resource_error);
  REQUIRE_THROWS_AS(brute_force_expected_trace('i', 8, 4, 2), resource_error);
}

TEST_CASE("word census counts irreducible words") {
  for (int k : {1, 2, 3, 5, 7}) {
    long long total = 0;
    for (int js = 1; js <= 2; ++js)
      for (bool is : {false, true})
        for (int je = 1; je <= 2; ++je)
          for (bool ie : {false, true}) {
            Label s = is ? perm_inv(js) : perm(js);
            Label e = ie ? perm_inv(je) : perm(je);
            WordCensus c = word_census(k, 4, s, e);
            total += c.count;
            long long letters = 0;
            for (long long v : c.a_sum) letters += v;
            REQUIRE(letters == k * c.count);
          }
    REQUIRE(total == 4 * static_cast<long long>(std::pow(3, k - 1)));
  }
  REQUIRE(word_census(1, 4, perm(1), perm(1)).count == 1);
  REQUIRE(word_census(1, 4, perm(1), perm(2)).count == 0);
  REQUIRE(word_census(2, 4, perm(1), perm_inv(1)).count == 0);
  REQUIRE(word_census(2, 4, perm(1), perm(1)).count == 1);
  REQUIRE(word_census(4, 2, perm(1), perm(1)).count == 1);
  REQUIRE_THROWS_AS(word_census(13, 4, perm(1), perm(1)), resource_error);
  REQUIRE_THROWS_AS(word_census(3, 5, perm(1), perm(1)), domain_error);
  REQUIRE_THROWS_AS(word_census(3, 4, perm(3), perm(1)), domain_error);
  REQUIRE_THROWS_AS(word_census(3, 4, match(1), match(1)), domain_error);
}

TEST_CASE("scaled expectations converge with 1/n differences") {
  struct Case {
    char model;
    FormStats s;
    int offset;  // keeps i-model sizes even and j-model sizes odd
  };
  const Case cases[] = {
      {'g', FormStats{{3, 2}, {}, 4}, 0},
      {'i', FormStats{{2, 1}, {}, 4}, 0},
      {'j', FormStats{{1, 1}, {1, 0}, 3}, 1},
  };
  for (const auto& c : cases) {
    long e = static_cast<long>(c.s.e()), v = c.s.v;
    std::vector<double> f;
    for (int i = 10; i <= 20; ++i) {
      long n = (1L << i) + c.offset;
      mpq_class scaled = expected_symm(c.model, c.s, n);
      if (e >= v)
        for (long t = 0; t < e - v; ++t) scaled *= n;
      else
        for (long t = 0; t < v - e; ++t) scaled /= n;
      f.push_back(scaled.get_d());
    }
    std::vector<double> diff;
    for (size_t i = 1; i < f.size(); ++i) diff.push_back(f[i] - f[i - 1]);
    for (size_t i = 1; i < diff.size(); ++i) {
      INFO("model " << c.model << " step " << i);
      REQUIRE(std::abs(diff[i]) < 0.6 * std::abs(diff[i - 1]) + 1e-12);
    }
    REQUIRE(std::abs(diff.back()) < 1e-4);
  }
}

TEST_CASE("oracle report rows are plain CSV") {
  REQUIRE(oracle_csv_header() == "model,n,d,k,method,value_num,value_den");
  REQUIRE(oracle_csv_row('g', 4, 4, 3, "exact", mpq_class(5, 3)) ==
          "g,4,4,3,exact,5,3");
  mpq_class v = brute_force_expected_trace('i', 2, 3, 2);
  REQUIRE(oracle_csv_row('i', 2, 3, 2, "brute", v) == "i,2,3,2,brute,12,1");
}
