#pragma once

// Eigensolving, spreader checks and Monte Carlo campaigns.  Dense
// eigendecomposition up to n = 2000; beyond that a Lanczos run restricted
// to the complement of the all-ones vector extracts lambda_2 and lambda_n
// of regular graphs (the restriction also keeps multiple copies of the
// top eigenvalue visible when a sample is disconnected).

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <alonlab/graph.hpp>
#include <alonlab/io.hpp>
#include <alonlab/models.hpp>
#include <alonlab/tangles.hpp>
#include <alonlab/traces.hpp>

namespace alonlab {

struct Spectrum {
  std::vector<double> eigenvalues;  // descending
  bool full = true;                 // false: only lambda_1, lambda_2, lambda_n

  double lambda1() const { return eigenvalues.front(); }
  double lambda2() const {
    if (eigenvalues.size() < 2)
      throw domain_error("spectrum: no second eigenvalue");
    return eigenvalues[1];
  }
  double lambda_min() const { return eigenvalues.back(); }
};

struct ExtremeEigs {
  double lambda1 = 0, lambda2 = 0, lambda_min = 0;
};

namespace detail {

// adjacency in CSR form with the loop conventions of adjacency()
struct SparseAdj {
  int n = 0;
  std::vector<int> head, col;
  std::vector<double> val;

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    for (int u = 0; u < n; ++u) {
      double s = 0;
      for (int e = head[u]; e < head[u + 1]; ++e) s += val[e] * x[col[e]];
      y[u] = s;
    }
  }
};

inline SparseAdj sparse_adjacency(const LabeledGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> rows(g.n);
  for (const auto& p : g.pairs) {
    if (p.loop == LoopKind::whole) {
      rows[p.u].push_back({p.u, 2});
    } else if (p.loop == LoopKind::half) {
      rows[p.u].push_back({p.u, 1});
    } else {
      rows[p.u].push_back({p.v, 1});
      rows[p.v].push_back({p.u, 1});
    }
  }
  SparseAdj a;
  a.n = g.n;
  a.head.assign(g.n + 1, 0);
  for (int u = 0; u < g.n; ++u) a.head[u + 1] = a.head[u] + rows[u].size();
  a.col.resize(a.head[g.n]);
  a.val.resize(a.head[g.n]);
  for (int u = 0; u < g.n; ++u) {
    int e = a.head[u];
    for (const auto& [v, w] : rows[u]) {
      a.col[e] = v;
      a.val[e] = w;
      ++e;
    }
  }
  return a;
}

}  // namespace detail

// extreme eigenvalues; dense below the cutoff, otherwise Lanczos with full
// reorthogonalization on the complement of the all-ones vector (regular
// graphs only, where that vector is a known top eigenvector)
inline ExtremeEigs extreme_eigs(const LabeledGraph& g, int max_iter = 200,
                                int dense_cutoff = 256) {
  if (g.n < 2) throw domain_error("extreme_eigs: need at least two vertices");
  if (g.n <= dense_cutoff) {
    std::vector<double> s = adjacency_spectrum(g);
    return {s[0], s[1], s.back()};
  }
  std::vector<int> deg = degrees(g);
  for (int x : deg)
    if (x != deg[0])
      throw domain_error("extreme_eigs: iterative mode needs a regular graph");

  const int n = g.n;
  const int m = std::min(n - 1, std::max(2, max_iter));
  detail::SparseAdj a = detail::sparse_adjacency(g);

  auto drop_mean = [n](std::vector<double>& x) {
    double mean = 0;
    for (double t : x) mean += t;
    mean /= n;
    for (double& t : x) t -= mean;
  };
  auto dot = [n](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  };

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> v(n), w(n);
  for (double& t : v) t = unit(rng);
  drop_mean(v);
  double nv = std::sqrt(dot(v, v));
  if (nv < 1e-12) throw domain_error("extreme_eigs: degenerate start vector");
  for (double& t : v) t /= nv;
  basis.push_back(v);

  for (int it = 0; it < m; ++it) {
    a.matvec(basis[it], w);
    drop_mean(w);
    alpha.push_back(dot(w, basis[it]));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : basis) {
        double c = dot(w, u);
        for (int i = 0; i < n; ++i) w[i] -= c * u[i];
      }
    double b = std::sqrt(dot(w, w));
    if (it + 1 == m || b < 1e-12) break;
    beta.push_back(b);
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) next[i] = w[i] / b;
    basis.push_back(std::move(next));
  }

  const int k = static_cast<int>(alpha.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    tri(i, i) = alpha[i];
    if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw domain_error("extreme_eigs: eigensolver failed to converge");
  return {static_cast<double>(deg[0]), es.eigenvalues().maxCoeff(),
          es.eigenvalues().minCoeff()};
}

inline Spectrum spectrum(const LabeledGraph& g) {
  if (g.n < 1) throw domain_error("spectrum: empty graph");
  if (g.n <= 2000) return {adjacency_spectrum(g), true};
  ExtremeEigs e = extreme_eigs(g);
  return {{e.lambda1, e.lambda2, e.lambda_min}, false};
}

struct SpreaderReport {
  double gamma = 0;
  std::vector<int> witness;  // subset realizing the worst ratio, 0-based
  double ratio = 0;          // min |Gamma(A)| / |A| over |A| <= n/2
  bool holds = false;
};

// exhaustive scan of all subsets up to half the vertices; Gamma(A) is the
// set of vertices adjacent to A, loops making a vertex its own neighbor
inline SpreaderReport spreader_check(const LabeledGraph& g, double gamma) {
  if (g.n < 1) throw domain_error("spreader: empty graph");
  if (g.n > 24)
    throw resource_error("spreader: exhaustive scan needs n <= 24");
  const int n = g.n;
  std::vector<std::uint32_t> nbr(n, 0);
  for (const auto& p : g.pairs) {
    nbr[p.u] |= 1u << p.v;
    nbr[p.v] |= 1u << p.u;
  }

  std::vector<std::uint32_t> gam(std::size_t(1) << n, 0);
  SpreaderReport rep{gamma, {}, std::numeric_limits<double>::infinity(), true};
  std::uint32_t best_mask = 0;
  const std::uint32_t end = 1u << n;
  for (std::uint32_t mask = 1; mask < end; ++mask) {
    int low = std::countr_zero(mask);
    gam[mask] = gam[mask & (mask - 1)] | nbr[low];
    int a = std::popcount(mask);
    if (2 * a > n) continue;
    int gsz = std::popcount(gam[mask]);
    if (gsz < (1.0 + gamma) * a) rep.holds = false;
    double r = static_cast<double>(gsz) / a;
    if (r < rep.ratio) {
      rep.ratio = r;
      best_mask = mask;
    }
  }
  for (int i = 0; i < n; ++i)
    if (best_mask & (1u << i)) rep.witness.push_back(i);
  return rep;
}

struct SeparationReport {
  double gamma = 0;
  double bound = 0;         // d^2 - gamma^2 / (4 + 2 gamma^2)
  double max_other_sq = 0;  // max of lambda_i^2 over i >= 2
  bool holds = false;
};

// given that the graph spreads at this gamma, every eigenvalue besides the
// top one satisfies lambda^2 <= d^2 - gamma^2/(4+2gamma^2)
inline SeparationReport separation_check(const LabeledGraph& g, double gamma) {
  if (g.n < 2) throw domain_error("separation: need at least two vertices");
  std::vector<int> deg = degrees(g);
  for (int x : deg)
    if (x != deg[0])
      throw domain_error("separation: needs a regular graph");
  const double d = deg[0];
  Spectrum s = spectrum(g);
  SeparationReport rep;
  rep.gamma = gamma;
  rep.bound = d * d - gamma * gamma / (4 + 2 * gamma * gamma);
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i)
    rep.max_other_sq =
        std::max(rep.max_other_sq, s.eigenvalues[i] * s.eigenvalues[i]);
  rep.holds = rep.max_other_sq <= rep.bound + 1e-9;
  return rep;
}

struct ExperimentConfig {
  char model = 'g';
  int d = 4;
  std::vector<int> n_list;
  int samples = 100;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  int workers = 0;     // 0: ALONLAB_THREADS, else hardware count
  std::string output;  // CSV written here when nonempty
  // NaN: default thresholds 2 sqrt(d-1) and bare + epsilon
  double threshold_bare = std::numeric_limits<double>::quiet_NaN();
  double threshold_eps = std::numeric_limits<double>::quiet_NaN();
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.samples < 100)
    throw domain_error("campaign: samples must be at least 100");
  if (cfg.n_list.empty()) throw domain_error("campaign: n_list is empty");
  int prev = 0;
  for (int n : cfg.n_list) {
    if (n < 2) throw domain_error("campaign: n must be at least 2");
    if (n <= prev)
      throw domain_error("campaign: n_list must increase strictly");
    prev = n;
    validate(ModelId{cfg.model, cfg.d, n});
  }
  if (!(cfg.epsilon >= 0))
    throw domain_error("campaign: epsilon must be nonnegative");
  if (cfg.workers < 0 || cfg.workers > 1024)
    throw domain_error("campaign: workers out of range");
}

struct CampaignRow {
  char model = 'g';
  int d = 0, n = 0, samples = 0;
  std::uint64_t seed = 0;
  long long exceed_bare = 0, exceed_eps = 0;
  double p_bare = 0, p_eps = 0;
  double wilson_lo = 0, wilson_hi = 0;
  double median_lambda2 = 0, median_absmax = 0;
};

// 95% Wilson score interval
inline std::pair<double, double> wilson_interval(long long hits,
                                                 long long total) {
  if (total <= 0) throw domain_error("wilson: empty sample");
  const double z = 1.959963984540054;
  double p = static_cast<double>(hits) / total;
  double denom = 1 + z * z / total;
  double center = (p + z * z / (2 * total)) / denom;
  double half =
      z * std::sqrt(p * (1 - p) / total + z * z / (4.0 * total * total)) /
      denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline std::string campaign_csv_header() {
  return "model,d,n,samples,seed,exceed_bare,exceed_eps,p_bare,p_eps,"
         "wilson_lo,wilson_hi,median_lambda2,median_absmax";
}

inline std::string campaign_csv_row(const CampaignRow& r) {
  std::ostringstream ss;
  ss << r.model << ',' << r.d << ',' << r.n << ',' << r.samples << ','
     << r.seed << ',' << r.exceed_bare << ',' << r.exceed_eps << ','
     << std::setprecision(12) << r.p_bare << ',' << r.p_eps << ','
     << r.wilson_lo << ',' << r.wilson_hi << ',' << r.median_lambda2 << ','
     << r.median_absmax;
  return ss.str();
}

namespace detail {

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t m = xs.size();
  return m % 2 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

}  // namespace detail

// samples every (n, index) pair on its own derived seed stream, so the
// output is identical for any worker count
inline std::vector<CampaignRow> run_campaign(const ExperimentConfig& cfg) {
  validate(cfg);
  const double bare = std::isnan(cfg.threshold_bare)
                          ? 2 * std::sqrt(cfg.d - 1.0)
                          : cfg.threshold_bare;
  const double epsd =
      std::isnan(cfg.threshold_eps) ? bare + cfg.epsilon : cfg.threshold_eps;

  const int per = cfg.samples;
  const long long tasks =
      static_cast<long long>(cfg.n_list.size()) * per;
  std::vector<double> lam2(tasks), amax(tasks);

  std::atomic<long long> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mx;
  auto work = [&]() {
    for (;;) {
      long long t = cursor.fetch_add(1);
      if (t >= tasks) return;
      try {
        int n = cfg.n_list[t / per];
        std::uint64_t root = stream_seed(cfg.seed, static_cast<std::uint64_t>(n));
        LabeledGraph g = sample(ModelId{cfg.model, cfg.d, n}, root,
                                static_cast<std::uint64_t>(t % per));
        ExtremeEigs e = extreme_eigs(g);
        lam2[t] = e.lambda2;
        amax[t] = std::max(std::abs(e.lambda2), std::abs(e.lambda_min));
      } catch (...) {
        std::lock_guard<std::mutex> lk(failure_mx);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  int nw = cfg.workers > 0 ? cfg.workers : detail::env_workers();
  nw = static_cast<int>(std::min<long long>(nw, tasks));
  std::vector<std::thread> pool;
  for (int i = 1; i < nw; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<CampaignRow> rows;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    CampaignRow r;
    r.model = cfg.model;
    r.d = cfg.d;
    r.n = cfg.n_list[ni];
    r.samples = per;
    r.seed = cfg.seed;
    std::vector<double> l2(lam2.begin() + ni * per,
                           lam2.begin() + (ni + 1) * per);
    std::vector<double> am(amax.begin() + ni * per,
                           amax.begin() + (ni + 1) * per);
    for (double x : l2) {
      r.exceed_bare += x > bare;
      r.exceed_eps += x > epsd;
    }
    r.p_bare = static_cast<double>(r.exceed_bare) / per;
    r.p_eps = static_cast<double>(r.exceed_eps) / per;
    auto wi = wilson_interval(r.exceed_bare, per);
    r.wilson_lo = wi.first;
    r.wilson_hi = wi.second;
    r.median_lambda2 = detail::median_of(l2);
    r.median_absmax = detail::median_of(am);
    rows.push_back(r);
  }

  if (!cfg.output.empty()) {
    std::string text = campaign_csv_header() + "\n";
    for (const auto& r : rows) text += campaign_csv_row(r) + "\n";
    write_text_file(cfg.output, text);
  }
  return rows;
}

struct FitResult {
  double slope = 0;
  double std_error = 0;
};

// least squares on log p against log n
inline FitResult fit_exponent(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::pair<double, double>> use;
  for (const auto& [n, p] : pts)
    if (n > 0 && p > 0) use.push_back({std::log(n), std::log(p)});
  const int m = static_cast<int>(use.size());
  if (m < 3) throw domain_error("fit: need at least three positive points");
  double mx = 0, my = 0;
  for (const auto& [x, y] : use) {
    mx += x;
    my += y;
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : use) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0) throw domain_error("fit: degenerate abscissae");
  FitResult f;
  f.slope = sxy / sxx;
  double intercept = my - f.slope * mx;
  double ssr = 0;
  for (const auto& [x, y] : use) {
    double rres = y - (intercept + f.slope * x);
    ssr += rres * rres;
  }
  f.std_error = m > 2 ? std::sqrt(ssr / (m - 2) / sxx) : 0;
  return f;
}

inline FitResult fit_exponent(const std::vector<CampaignRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.exceed_bare > 0)
      pts.push_back({static_cast<double>(r.n), r.p_bare});
  return fit_exponent(pts);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model"] = std::string(1, cfg.model);
  j["d"] = cfg.d;
  j["n_list"] = cfg.n_list;
  j["samples"] = cfg.samples;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["output"] = cfg.output;
  if (!std::isnan(cfg.threshold_bare) && !std::isnan(cfg.threshold_eps))
    j["thresholds"] = {cfg.threshold_bare, cfg.threshold_eps};
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw domain_error("config json: not an object");
  ExperimentConfig cfg;
  cfg.model = detail::model_from_string(detail::json_string(j, "model"));
  cfg.d = detail::json_int(j, "d");
  const nlohmann::json& nl = detail::json_field(j, "n_list");
  if (!nl.is_array())
    throw domain_error("config json: n_list must be an array");
  for (const auto& x : nl) {
    if (!x.is_number_integer())
      throw domain_error("config json: n_list entries must be integers");
    cfg.n_list.push_back(x.get<int>());
  }
  cfg.samples = detail::json_int(j, "samples");
  cfg.epsilon = detail::json_number(j, "epsilon");
  const nlohmann::json& seed = detail::json_field(j, "seed");
  if (!seed.is_number_integer() && !seed.is_number_unsigned())
    throw domain_error("config json: seed must be an integer");
  cfg.seed = seed.get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = detail::json_int(j, "workers");
  if (j.contains("output")) {
    if (!j.at("output").is_string())
      throw domain_error("config json: output must be a string");
    cfg.output = j.at("output").get<std::string>();
  }
  if (j.contains("thresholds")) {
    const nlohmann::json& th = j.at("thresholds");
    if (!th.is_array() || th.size() != 2 || !th[0].is_number() ||
        !th[1].is_number())
      throw domain_error("config json: thresholds must be [bare, eps]");
    cfg.threshold_bare = th[0].get<double>();
    cfg.threshold_eps = th[1].get<double>();
  }
  return cfg;
}

}  // namespace alonlab
