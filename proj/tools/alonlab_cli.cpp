// Command-line driver.  One subcommand per laboratory operation, long flags
// only; every run is a pure function of its flag set and input files.  Exit
// codes: 0 success, 2 invalid input, 3 numerical non-convergence, 4 resource
// budget exceeded.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <alonlab/experiment.hpp>
#include <alonlab/io.hpp>
#include <alonlab/tangles.hpp>
#include <alonlab/traces.hpp>
#include <alonlab/vlg.hpp>
#include <alonlab/walks.hpp>

namespace {

using namespace alonlab;

int g_status = 0;  // soft failures (a failed identity) that still emit output

std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(17) << x;
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
}

LabeledGraph load_graph(const std::string& path) {
  return graph_from_json(read_json_file(path));
}

Tangle load_tangle(const std::string& path) {
  return tangle_from_json(read_json_file(path));
}

// tangle files carry a mandatory ambient "d" that a plain graph load would
// misread as a regularity promise, so route them through the tangle reader
LabeledGraph load_pattern(const std::string& path) {
  nlohmann::json j = read_json_file(path);
  if (j.is_object() && j.contains("model") && j.at("model").is_string() &&
      j.contains("d") && j.at("d").is_number_integer())
    return tangle_from_json(j).graph;
  return graph_from_json(j);
}

// letters: p3 = pi_3, P3 = pi_3 inverse, m2 = matching 2, h1 = half-loop 1
Word parse_word(const std::string& s) {
  Word w;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.size() < 2)
      throw domain_error("word: letters look like p1, P1, m2 or h3");
    LabelKind kind;
    switch (tok[0]) {
      case 'p': kind = LabelKind::perm; break;
      case 'P': kind = LabelKind::perm_inv; break;
      case 'm': kind = LabelKind::match; break;
      case 'h': kind = LabelKind::halfloop; break;
      default:
        throw domain_error("word: unknown letter kind in \"" + tok + "\"");
    }
    int j = 0;
    try {
      std::size_t pos = 0;
      j = std::stoi(tok.substr(1), &pos);
      if (pos + 1 != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw domain_error("word: bad generator index in \"" + tok + "\"");
    }
    w.letters.push_back({kind, j});
  }
  if (w.letters.empty()) throw domain_error("word: empty");
  return w;
}

std::vector<CampaignRow> parse_campaign_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != campaign_csv_header())
    throw domain_error("fit: file does not start with the campaign header");
  std::vector<CampaignRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) f.push_back(tok);
    CampaignRow r;
    try {
      if (f.size() != 13 || f[0].size() != 1) throw std::invalid_argument(line);
      r.model = f[0][0];
      r.d = std::stoi(f[1]);
      r.n = std::stoi(f[2]);
      r.samples = std::stoi(f[3]);
      r.seed = std::stoull(f[4]);
      r.exceed_bare = std::stoll(f[5]);
      r.exceed_eps = std::stoll(f[6]);
      r.p_bare = std::stod(f[7]);
      r.p_eps = std::stod(f[8]);
      r.wilson_lo = std::stod(f[9]);
      r.wilson_hi = std::stod(f[10]);
      r.median_lambda2 = std::stod(f[11]);
      r.median_absmax = std::stod(f[12]);
    } catch (const std::exception&) {
      throw domain_error("fit: malformed row \"" + line + "\"");
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral laboratory for random regular graph models"};
  app.require_subcommand(1);

  // ---- sample ----
  struct {
    std::string model, out;
    int n = 0, d = 0, plant = 0;
    std::uint64_t seed = 0, index = 0;
  } sa;
  auto* c_sample =
      app.add_subcommand("sample", "draw one random graph and write it");
  c_sample->add_option("--model", sa.model, "model letter: g, h, i or j")
      ->required();
  c_sample->add_option("--n", sa.n, "vertex count")->required();
  c_sample->add_option("--d", sa.d, "degree")->required();
  c_sample->add_option("--seed", sa.seed, "root seed (default 0)");
  c_sample->add_option("--index", sa.index, "sample index (default 0)");
  c_sample->add_option("--plant-bouquet", sa.plant,
                       "plant an m-loop bouquet at vertex 1 (model g only)");
  c_sample->add_option("--out", sa.out, "output graph json")->required();
  c_sample->callback([&] {
    char m = detail::model_from_string(sa.model);
    LabeledGraph g =
        sa.plant > 0
            ? (m == 'g' ? planted_bouquet_sample(sa.n, sa.d, sa.plant, sa.seed,
                                                 sa.index)
                        : throw domain_error(
                              "sample: --plant-bouquet needs --model g"))
            : sample(ModelId{m, sa.d, sa.n}, sa.seed, sa.index);
    write_json_file(sa.out, graph_to_json(g));
  });

  // ---- spectrum ----
  struct {
    std::string file, format = "csv", out;
  } spa;
  auto* c_spectrum =
      app.add_subcommand("spectrum", "adjacency eigenvalue summary");
  c_spectrum->add_option("graph", spa.file, "graph json file")->required();
  c_spectrum->add_option("--format", spa.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  c_spectrum->add_option("--out", spa.out, "write here instead of stdout");
  c_spectrum->callback([&] {
    LabeledGraph g = load_graph(spa.file);
    Spectrum s = spectrum(g);
    if (spa.format == "csv") {
      std::string text = "n,lambda1,lambda2,lambda_min\n";
      text += std::to_string(g.n) + ',' + fmt(s.lambda1()) + ',' +
              fmt(s.lambda2()) + ',' + fmt(s.lambda_min()) + '\n';
      emit(text, spa.out);
    } else {
      nlohmann::json j{{"n", g.n},
                       {"full", s.full},
                       {"lambda1", s.lambda1()},
                       {"lambda2", s.lambda2()},
                       {"lambda_min", s.lambda_min()}};
      if (s.full) j["eigenvalues"] = s.eigenvalues;
      emit(j.dump(2) + "\n", spa.out);
    }
  });

  // ---- trace ----
  auto* c_trace = app.add_subcommand("trace", "closed-walk trace machinery");
  c_trace->require_subcommand(1);

  struct {
    std::string file, format = "csv", out;
    int kmax = 0;
  } tva;
  auto* c_tverify =
      c_trace->add_subcommand("verify", "check the trace identities");
  c_tverify->add_option("graph", tva.file, "graph json file")->required();
  c_tverify->add_option("--kmax", tva.kmax, "largest walk length")->required();
  c_tverify->add_option("--format", tva.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  c_tverify->add_option("--out", tva.out, "write here instead of stdout");
  c_tverify->callback([&] {
    IdentityReport rep = verify_identities(load_graph(tva.file), tva.kmax);
    if (tva.format == "csv") {
      std::string text = "identity,k,lhs,rhs,abs_err,pass\n";
      for (const auto& r : rep.rows)
        text += r.identity + ',' + std::to_string(r.k) + ',' + fmt(r.lhs) +
                ',' + fmt(r.rhs) + ',' + fmt(r.abs_err) + ',' +
                (r.pass ? "1" : "0") + '\n';
      emit(text, tva.out);
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : rep.rows)
        rows.push_back({{"identity", r.identity},
                        {"k", r.k},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"abs_err", r.abs_err},
                        {"pass", r.pass}});
      emit(nlohmann::json{{"all_pass", rep.all_pass}, {"rows", rows}}.dump(2) +
               "\n",
           tva.out);
    }
    if (!rep.all_pass) {
      const IdentityRow* f = rep.first_fail();
      std::cerr << "trace verify: " << f->identity << " fails at k=" << f->k
                << " (lhs " << fmt(f->lhs) << ", rhs " << fmt(f->rhs) << ")\n";
      g_status = 3;
    }
  });

  struct {
    std::string file;
    std::vector<std::string> tangles;
    int k = 0, s = 0;
  } tsa;
  auto* c_tsel = c_trace->add_subcommand(
      "selective", "closed walks avoiding tangles on short subpaths");
  c_tsel->add_option("graph", tsa.file, "graph json file")->required();
  c_tsel->add_option("--k", tsa.k, "walk length")->required();
  c_tsel->add_option("--s", tsa.s, "window length")->required();
  c_tsel
      ->add_option("--tangle", tsa.tangles,
                   "tangle or pattern json file (repeatable)")
      ->required();
  c_tsel->callback([&] {
    LabeledGraph g = load_graph(tsa.file);
    std::vector<LabeledGraph> pats;
    for (const auto& p : tsa.tangles) pats.push_back(load_pattern(p));
    std::cout << selective_trace(g, tsa.k, tsa.s, pats) << "\n";
  });

  struct {
    std::string file, format = "csv", out;
    int kmax = 0;
  } tca;
  auto* c_tcount = c_trace->add_subcommand(
      "count", "irreducible and strongly irreducible walk counts");
  c_tcount->add_option("graph", tca.file, "graph json file")->required();
  c_tcount->add_option("--kmax", tca.kmax, "largest walk length")->required();
  c_tcount->add_option("--format", tca.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  c_tcount->add_option("--out", tca.out, "write here instead of stdout");
  c_tcount->callback([&] {
    TraceCounts tc = count_traces(load_graph(tca.file), tca.kmax);
    if (tca.format == "csv") {
      std::string text = "k,irreducible,strongly_irreducible\n";
      for (int k = 1; k <= tca.kmax; ++k)
        text += std::to_string(k) + ',' + std::to_string(tc.ird[k]) + ',' +
                std::to_string(tc.sit[k]) + '\n';
      emit(text, tca.out);
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (int k = 1; k <= tca.kmax; ++k)
        rows.push_back({{"k", k},
                        {"irreducible", tc.ird[k]},
                        {"strongly_irreducible", tc.sit[k]}});
      emit(rows.dump(2) + "\n", tca.out);
    }
  });

  // ---- tangle ----
  auto* c_tangle = app.add_subcommand("tangle", "small labeled subgraphs");
  c_tangle->require_subcommand(1);

  struct {
    std::string file, format = "csv", out;
    int d = 0;
  } cla;
  auto* c_classify =
      c_tangle->add_subcommand("classify", "criticality of a tangle");
  c_classify->add_option("tangle", cla.file, "tangle json file")->required();
  c_classify->add_option("--d", cla.d,
                         "ambient degree override (default: the file's)");
  c_classify->add_option("--format", cla.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  c_classify->add_option("--out", cla.out, "write here instead of stdout");
  c_classify->callback([&] {
    Criticality c = classify(load_tangle(cla.file), cla.d);
    const char* cls = c.cls == CritClass::hypercritical ? "hypercritical"
                      : c.cls == CritClass::critical    ? "critical"
                                                        : "subcritical";
    if (cla.format == "csv") {
      emit(std::string("class,lambda,threshold,exact\n") + cls + ',' +
               fmt(c.lambda) + ',' + fmt(c.threshold) + ',' +
               (c.exact ? "1" : "0") + '\n',
           cla.out);
    } else {
      emit(nlohmann::json{{"class", cls},
                          {"lambda", c.lambda},
                          {"threshold", c.threshold},
                          {"exact", c.exact}}
                   .dump(2) +
               "\n",
           cla.out);
    }
  });

  struct {
    std::string host, tangle;
  } oca;
  auto* c_occ = c_tangle->add_subcommand(
      "occurrences", "count label-respecting embeddings in a host");
  c_occ->add_option("--host", oca.host, "host graph json file")->required();
  c_occ->add_option("--tangle", oca.tangle, "tangle json file")->required();
  c_occ->callback([&] {
    std::cout << count_occurrences(load_graph(oca.host),
                                   load_tangle(oca.tangle))
              << "\n";
  });

  struct {
    std::string file;
  } aua;
  auto* c_auto = c_tangle->add_subcommand(
      "automorphisms", "label-preserving automorphism count");
  c_auto->add_option("tangle", aua.file, "tangle json file")->required();
  c_auto->callback(
      [&] { std::cout << automorphism_count(load_tangle(aua.file)) << "\n"; });

  struct {
    std::string host, tangle;
    int radius = 12;
  } cea;
  auto* c_cert = c_tangle->add_subcommand(
      "certificate", "certified lower bound on lambda_2 of the host");
  c_cert->add_option("--host", cea.host, "host graph json file")->required();
  c_cert->add_option("--tangle", cea.tangle, "tangle json file")->required();
  c_cert->add_option("--radius", cea.radius, "ball radius (default 12)");
  c_cert->callback([&] {
    std::cout << fmt(lambda2_certificate(load_graph(cea.host),
                                         load_tangle(cea.tangle), cea.radius))
              << "\n";
  });

  // ---- taufund ----
  struct {
    std::string model, out;
    int d = 0;
  } tfa;
  auto* c_taufund = app.add_subcommand(
      "taufund", "minimal supercritical tangle order with a witness");
  c_taufund->add_option("--model", tfa.model, "model letter: g, h, i or j")
      ->required();
  c_taufund->add_option("--d", tfa.d, "degree")->required();
  c_taufund->add_option("--out", tfa.out, "write the witness tangle here");
  c_taufund->callback([&] {
    TauFund r = tau_fund(detail::model_from_string(tfa.model), tfa.d);
    std::cout << r.tau << "\n";
    if (!tfa.out.empty()) write_json_file(tfa.out, tangle_to_json(r.witness));
  });

  // ---- treed ----
  struct {
    std::string file;
    double d = 0;
  } tda;
  auto* c_treed = app.add_subcommand(
      "treed", "growth rate of the d-regular tree wrapped around a graph");
  c_treed->add_option("graph", tda.file, "graph or tangle json file")
      ->required();
  c_treed->add_option("--d", tda.d, "degree, real and > 2")->required();
  c_treed->callback(
      [&] { std::cout << fmt(tree_d_norm(load_pattern(tda.file), tda.d)) << "\n"; });

  // ---- vlg ----
  auto* c_vlg = app.add_subcommand("vlg", "variable-length graphs");
  c_vlg->require_subcommand(1);

  struct {
    std::string file, method = "perron";
  } vla;
  auto* c_vl1 = c_vlg->add_subcommand("lambda1", "walk growth rate");
  c_vl1->add_option("vlg", vla.file, "vlg json file")->required();
  c_vl1->add_option("--method", vla.method,
                    "perron (bisection) or det (determinant root)")
      ->check(CLI::IsMember({"perron", "det"}));
  c_vl1->callback([&] {
    VLG g = vlg_from_json(read_json_file(vla.file));
    std::cout << fmt(vla.method == "det" ? lambda1_vlg_det(g) : lambda1_vlg(g))
              << "\n";
  });

  struct {
    std::string file, out;
    bool graph = false;
  } sva;
  auto* c_vsub = c_vlg->add_subcommand(
      "subdivide", "replace every length-L edge by L unit edges");
  c_vsub->add_option("vlg", sva.file, "vlg json file")->required();
  c_vsub->add_option("--out", sva.out, "output json")->required();
  c_vsub->add_flag("--graph", sva.graph,
                   "emit a labeled graph instead of a vlg");
  c_vsub->callback([&] {
    VLG g = vlg_from_json(read_json_file(sva.file));
    if (sva.graph)
      write_json_file(sva.out, graph_to_json(subdivide_to_graph(g)));
    else
      write_json_file(sva.out, vlg_to_json(subdivide(g)));
  });

  struct {
    std::string file, out;
    std::vector<int> keep;
    long long maxlen = 64;
  } rea;
  auto* c_vreal = c_vlg->add_subcommand(
      "realize", "restrict the walk structure to a kept vertex set");
  c_vreal->add_option("vlg", rea.file, "vlg json file")->required();
  c_vreal
      ->add_option("--keep", rea.keep, "kept vertices, 1-based, comma list")
      ->required()
      ->delimiter(',');
  c_vreal->add_option("--max-len", rea.maxlen,
                      "truncation length when the dropped part has a cycle");
  c_vreal->add_option("--out", rea.out, "output vlg json")->required();
  c_vreal->callback([&] {
    VLG g = vlg_from_json(read_json_file(rea.file));
    std::vector<char> keep(g.n, 0);
    for (int v : rea.keep) {
      if (v < 1 || v > g.n)
        throw domain_error("realize: kept vertex out of range");
      keep[v - 1] = 1;
    }
    RealizeResult res = realize(g, keep, rea.maxlen);
    if (res.truncated)
      std::cerr << "realize: walk set truncated at length " << rea.maxlen
                << ", lengths beyond were dropped\n";
    write_json_file(rea.out, vlg_to_json(res.vlg));
  });

  // ---- oracle ----
  auto* c_oracle =
      app.add_subcommand("oracle", "exact rational walk expectations");
  c_oracle->require_subcommand(1);

  struct {
    std::string model, word;
    std::vector<int> t;
    int n = 0;
  } owa;
  auto* c_owalk = c_oracle->add_subcommand(
      "walk", "probability that one potential walk is realized");
  c_owalk->add_option("--model", owa.model, "model letter: g, h, i or j")
      ->required();
  c_owalk->add_option("--n", owa.n, "vertex count")->required();
  c_owalk
      ->add_option("--word", owa.word,
                   "comma list of letters: p1, P1, m2, h3")
      ->required();
  c_owalk
      ->add_option("--t", owa.t, "vertex vector, 1-based, one longer than "
                                 "the word")
      ->required()
      ->delimiter(',');
  c_owalk->callback([&] {
    mpq_class p = prob_walk(detail::model_from_string(owa.model),
                            parse_word(owa.word), owa.t, owa.n);
    std::cout << p.get_str() << "\n";
  });

  struct {
    std::string model;
    int n = 0, d = 0, k = 0;
  } oea;
  auto* c_oexp = c_oracle->add_subcommand(
      "expected", "expected irreducible trace by class enumeration");
  c_oexp->add_option("--model", oea.model, "model letter: g, h, i or j")
      ->required();
  c_oexp->add_option("--n", oea.n, "vertex count")->required();
  c_oexp->add_option("--d", oea.d, "degree")->required();
  c_oexp->add_option("--k", oea.k, "walk length")->required();
  c_oexp->callback([&] {
    char m = detail::model_from_string(oea.model);
    mpq_class v = exact_expected_trace(m, oea.n, oea.d, oea.k);
    std::cout << oracle_csv_header() << "\n"
              << oracle_csv_row(m, oea.n, oea.d, oea.k, "exact", v) << "\n";
  });

  struct {
    std::string model;
    int n = 0, d = 0, k = 0;
  } oba;
  auto* c_obrute = c_oracle->add_subcommand(
      "brute", "expected irreducible trace by full instance enumeration");
  c_obrute->add_option("--model", oba.model, "model letter: g, h, i or j")
      ->required();
  c_obrute->add_option("--n", oba.n, "vertex count")->required();
  c_obrute->add_option("--d", oba.d, "degree")->required();
  c_obrute->add_option("--k", oba.k, "walk length")->required();
  c_obrute->callback([&] {
    char m = detail::model_from_string(oba.model);
    mpq_class v = brute_force_expected_trace(m, oba.n, oba.d, oba.k);
    std::cout << oracle_csv_header() << "\n"
              << oracle_csv_row(m, oba.n, oba.d, oba.k, "brute", v) << "\n";
  });

  // ---- experiment ----
  auto* c_exp =
      app.add_subcommand("experiment", "Monte Carlo eigenvalue campaigns");
  c_exp->require_subcommand(1);

  struct {
    std::string config, model, out;
    std::vector<int> ns;
    int d = 0, samples = 0, workers = 0;
    double epsilon = 0, tbare = 0, teps = 0;
    std::uint64_t seed = 0;
  } era;
  auto* c_erun = c_exp->add_subcommand("run", "sample and summarize lambda_2");
  c_erun->add_option("--config", era.config, "json config file");
  c_erun->add_option("--model", era.model, "model letter: g, h, i or j");
  c_erun->add_option("--d", era.d, "degree");
  c_erun->add_option("--n", era.ns, "vertex counts, strictly increasing")
      ->delimiter(',');
  c_erun->add_option("--samples", era.samples, "samples per n (at least 100)");
  c_erun->add_option("--epsilon", era.epsilon,
                     "offset for the second threshold");
  c_erun->add_option("--seed", era.seed, "root seed");
  c_erun->add_option("--workers", era.workers,
                     "thread count (default: ALONLAB_THREADS)");
  c_erun->add_option("--threshold-bare", era.tbare,
                     "override the 2 sqrt(d-1) threshold");
  c_erun->add_option("--threshold-eps", era.teps,
                     "override the bare + epsilon threshold");
  c_erun->add_option("--out", era.out, "also write the csv here");
  c_erun->callback([&] {
    ExperimentConfig cfg;
    if (!era.config.empty()) cfg = config_from_json(read_json_file(era.config));
    if (c_erun->count("--model"))
      cfg.model = detail::model_from_string(era.model);
    if (c_erun->count("--d")) cfg.d = era.d;
    if (c_erun->count("--n")) cfg.n_list = era.ns;
    if (c_erun->count("--samples")) cfg.samples = era.samples;
    if (c_erun->count("--epsilon")) cfg.epsilon = era.epsilon;
    if (c_erun->count("--seed")) cfg.seed = era.seed;
    if (c_erun->count("--workers")) cfg.workers = era.workers;
    if (c_erun->count("--threshold-bare")) cfg.threshold_bare = era.tbare;
    if (c_erun->count("--threshold-eps")) cfg.threshold_eps = era.teps;
    if (c_erun->count("--out")) cfg.output = era.out;
    std::vector<CampaignRow> rows = run_campaign(cfg);
    std::cout << campaign_csv_header() << "\n";
    for (const auto& r : rows) std::cout << campaign_csv_row(r) << "\n";
  });

  struct {
    std::string file;
  } efa;
  auto* c_efit = c_exp->add_subcommand(
      "fit", "log-log slope of the bare exceedance probability");
  c_efit->add_option("csv", efa.file, "campaign csv file")->required();
  c_efit->callback([&] {
    FitResult fit =
        fit_exponent(parse_campaign_csv(read_text_file(efa.file)));
    std::cout << "slope,std_error\n"
              << fmt(fit.slope) << ',' << fmt(fit.std_error) << "\n";
  });

  // ---- spreader ----
  struct {
    std::string file, format = "csv", out;
    double gamma = 0;
    bool separation = false;
  } sra;
  auto* c_spreader = app.add_subcommand(
      "spreader", "exhaustive neighborhood expansion check");
  c_spreader->add_option("graph", sra.file, "graph json file")->required();
  c_spreader->add_option("--gamma", sra.gamma, "expansion requirement")
      ->required();
  c_spreader->add_flag("--separation", sra.separation,
                       "also check the eigenvalue separation bound");
  c_spreader->add_option("--format", sra.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  c_spreader->add_option("--out", sra.out, "write here instead of stdout");
  c_spreader->callback([&] {
    LabeledGraph g = load_graph(sra.file);
    SpreaderReport sp = spreader_check(g, sra.gamma);
    std::string witness;
    for (std::size_t i = 0; i < sp.witness.size(); ++i)
      witness += (i ? ";" : "") + std::to_string(sp.witness[i] + 1);
    if (sra.format == "csv") {
      std::string text =
          "gamma,spreader_holds,ratio,witness,separation_bound,"
          "max_other_sq,separation_holds\n";
      text += fmt(sp.gamma) + ',' + (sp.holds ? "1" : "0") + ',' +
              fmt(sp.ratio) + ',' + witness;
      if (sra.separation) {
        SeparationReport se = separation_check(g, sra.gamma);
        text += ',' + fmt(se.bound) + ',' + fmt(se.max_other_sq) + ',' +
                (se.holds ? "1" : "0");
      } else {
        text += ",,,";
      }
      emit(text + "\n", sra.out);
    } else {
      nlohmann::json j{{"gamma", sp.gamma},
                       {"holds", sp.holds},
                       {"witness", nlohmann::json::array()}};
      j["ratio"] = std::isfinite(sp.ratio) ? nlohmann::json(sp.ratio)
                                           : nlohmann::json("inf");
      for (int v : sp.witness) j["witness"].push_back(v + 1);
      if (sra.separation) {
        SeparationReport se = separation_check(g, sra.gamma);
        j["separation"] = {{"bound", se.bound},
                           {"max_other_sq", se.max_other_sq},
                           {"holds", se.holds}};
      }
      emit(j.dump(2) + "\n", sra.out);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const resource_error& e) {
    std::cerr << "alonlab: " << e.what() << "\n";
    return std::string(e.what()).find("converge") != std::string::npos ? 3 : 4;
  } catch (const std::exception& e) {
    std::cerr << "alonlab: " << e.what() << "\n";
    return std::string(e.what()).find("converge") != std::string::npos ? 3 : 2;
  }
  return g_status;
}
