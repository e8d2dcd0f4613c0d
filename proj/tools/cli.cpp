#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "pagecusum/asymptotics.hpp"
#include "pagecusum/datagen.hpp"
#include "pagecusum/detectors.hpp"
#include "pagecusum/errors.hpp"
#include "pagecusum/experiments.hpp"
#include "pagecusum/io.hpp"
#include "pagecusum/model.hpp"
#include "pagecusum/wiener.hpp"

namespace pagecusum::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::optional<CriticalValueCache> open_cache(const std::string& dir) {
  if (dir.empty()) return std::nullopt;
  return CriticalValueCache(dir);
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ---- critvals

struct CritvalsOptions {
  double gamma = 0.0;
  double alpha = 0.1;
  std::string side = "one";
  std::string detector = "page";
  std::int64_t reps = 100000;
  std::int64_t grid = 10000;
  std::uint64_t seed = 1;
  std::string out;
  std::string cache;
  unsigned threads = 0;
};

void run_critvals(const CritvalsOptions& o, std::ostream& out) {
  CriticalValueRequest req;
  req.gamma = o.gamma;
  req.alpha = o.alpha;
  req.side = parse_side(o.side);
  req.detector = parse_detector(o.detector);
  req.reps = o.reps;
  req.grid = o.grid;
  req.seed = o.seed;
  req.threads = o.threads;
  req.validate();
  if ((!o.out.empty() || !o.cache.empty()) && o.reps < 1000) {
    throw ValidationError("persisted critical values need reps >= 1000");
  }
  const CriticalValueEstimate est = estimate_critical_value(req);
  const std::string text = to_json(est);
  if (!o.out.empty()) write_text_file(o.out, text + "\n");
  if (auto cache = open_cache(o.cache)) cache->store(est);
  out << text << '\n';
}

// ---- asymptotics

struct AsymptoticsOptions {
  std::int64_t m = 0;
  double gamma = 0.0;
  std::optional<std::int64_t> kstar;
  std::optional<double> theta;
  std::optional<double> beta;
  double delta = 1.0;
  double sigma = 1.0;
  std::optional<double> c;
  double alpha = 0.1;
  std::string side = "one";
  std::string detector = "page";
  std::string cache;
  std::optional<double> x;
  std::optional<double> rate;
  std::optional<double> c_tilde1;
};

ChangeScenario scenario_from(const AsymptoticsOptions& o) {
  if (o.m < 1) throw ValidationError("m must be positive");
  ChangeScenario s;
  if (o.kstar) {
    if (o.theta || o.beta) throw ValidationError("give either --kstar or --theta/--beta, not both");
    if (*o.kstar < 1) throw ValidationError("kstar must be at least 1");
    s = ChangeScenario::from_kstar(o.delta, *o.kstar, o.sigma);
  } else {
    if (!o.theta || !o.beta) throw ValidationError("--kstar or both --theta and --beta are required");
    s = ChangeScenario::from_exponent(o.delta, *o.theta, *o.beta, o.m, o.sigma);
  }
  s.c_tilde1 = o.c_tilde1;
  s.validate();
  return s;
}

void run_asymptotics(const AsymptoticsOptions& o, std::ostream& out) {
  require_gamma(o.gamma);
  const ChangeScenario scenario = scenario_from(o);
  const double c = resolve_critical_value(o.c, open_cache(o.cache), o.gamma, o.alpha, parse_side(o.side),
                                          parse_detector(o.detector));
  const NormalizationInputs in{c, o.m, scenario.kstar, scenario.delta, scenario.sigma, o.gamma};
  const AsymptoticNormalization norm = normalize(in);
  const DeltaRegime regime = o.rate ? DeltaRegime::local(*o.rate) : DeltaRegime::fixed();
  const CaseLabel label = classify_case(scenario, o.gamma, regime, c);

  Json j;
  j["a_m"] = norm.a_m;
  j["b_m"] = norm.b_m;
  j["c"] = c;
  j["kstar"] = scenario.kstar;
  j["case"] = std::string(to_string(label.variant));
  j["eta"] = label.eta;
  if (label.c1) j["c1"] = *label.c1;
  if (label.d1) {
    j["d1"] = *label.d1;
    j["d2"] = compute_d2(c, scenario.sigma, *label.c1, o.gamma, *label.d1);
  }
  if (o.x) j["N"] = compute_N(in, *o.x, norm.a_m);
  out << j.dump() << '\n';
}

// ---- limit-cdf

struct LimitCdfOptions {
  std::string variant;
  std::optional<double> d1;
  double x = 0.0;
};

void run_limit_cdf(const LimitCdfOptions& o, std::ostream& out) {
  LimitLaw law{parse_case(o.variant), o.d1};
  law.validate();
  Json j;
  j["psi_upper"] = limit_cdf_upper(o.x, law);
  j["psi"] = limit_cdf(o.x, law);
  j["case"] = std::string(to_string(law.variant));
  j["x"] = o.x;
  if (law.d1) j["d1"] = *law.d1;
  out << j.dump() << '\n';
}

// ---- generate

const std::set<std::string> kGenerateKeys = {"omega", "alpha", "beta", "burn_in", "mu",
                                             "delta", "theta", "beta_exp", "m", "length"};

struct GenerateOptions {
  std::string spec;
  std::int64_t n = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string split_dir;
};

void run_generate(const GenerateOptions& o, std::ostream& out) {
  const KeyValueConfig cfg = KeyValueConfig::load(o.spec, kGenerateKeys);
  Garch11Spec garch;
  garch.omega = cfg.get_double("omega", garch.omega);
  garch.alpha = cfg.get_double("alpha", garch.alpha);
  garch.beta = cfg.get_double("beta", garch.beta);
  garch.burn_in = cfg.get_integer("burn_in", garch.burn_in);
  garch.validate();

  StreamSpec spec;
  spec.mu = cfg.get_double("mu", 0.0);
  spec.m = cfg.get_integer("m", 100);
  spec.length = cfg.get_integer("length", 2000);
  if (spec.m < 1) throw ValidationError("m must be positive");
  spec.scenario.delta = cfg.get_double("delta", 0.0);
  spec.scenario.theta = cfg.get_double("theta", 1.0);
  spec.scenario.beta = cfg.get_double("beta_exp", 0.0);
  spec.scenario.kstar = resolve_kstar(spec.scenario.theta, spec.scenario.beta, spec.m);
  spec.validate();
  if (o.n < 1) throw ValidationError("--n must be positive");

  std::string csv = "rep,t,x\n";
  for (std::int64_t r = 0; r < o.n; ++r) {
    RngStream rng(o.seed, static_cast<std::uint64_t>(r));
    const auto eps = generate_garch11(garch, spec.m + spec.length, rng);
    const GeneratedSeries series = generate_stream(spec, eps);
    std::int64_t t = 0;
    for (const auto* part : {&series.training, &series.stream}) {
      for (double x : *part) {
        csv += std::to_string(r) + ',' + std::to_string(++t) + ',' + format_double(x) + '\n';
      }
    }
    if (!o.split_dir.empty()) {
      const fs::path dir(o.split_dir);
      write_text_file(dir / ("train_" + std::to_string(r) + ".csv"), format_value_column(series.training));
      write_text_file(dir / ("stream_" + std::to_string(r) + ".csv"), format_value_column(series.stream));
    }
  }
  write_text_file(o.out, csv);
  Json j;
  j["out"] = o.out;
  j["series"] = o.n;
  j["m"] = spec.m;
  j["length"] = spec.length;
  j["kstar"] = spec.scenario.kstar;
  out << j.dump() << '\n';
}

// ---- simulate / density

const std::set<std::string> kRunKeys = {"m",     "gamma",    "alpha",       "side",       "detector",  "delta",
                                        "mu",    "theta",    "beta_exp",    "kstar",      "horizon_factor",
                                        "reps",  "seed",     "grid",        "omega",      "alpha_garch",
                                        "beta_garch", "burn_in"};

struct RunConfig {
  MonitoringParams params;
  ChangeScenario scenario;
  Garch11Spec garch;
  double mu = 0.0;
  std::int64_t reps = 5000;
  std::uint64_t seed = 1;
  std::int64_t grid = 512;
};

RunConfig load_run_config(const fs::path& path) {
  const KeyValueConfig cfg = KeyValueConfig::load(path, kRunKeys);
  RunConfig rc;
  auto& p = rc.params;
  p.m = cfg.get_integer("m", 1000);
  p.gamma = cfg.get_double("gamma", 0.0);
  p.alpha = cfg.get_double("alpha", 0.1);
  if (auto s = cfg.get("side")) p.side = parse_side(*s);
  if (auto d = cfg.get("detector")) p.detector = parse_detector(*d);
  p.horizon_factor = cfg.get_double("horizon_factor", p.horizon_factor);
  p.validate();
  require_alpha(p.alpha);

  auto& s = rc.scenario;
  s.delta = cfg.get_double("delta", 1.0);
  if (cfg.has("kstar") && (cfg.has("theta") || cfg.has("beta_exp"))) {
    throw ValidationError("config: give either kstar or theta/beta_exp, not both");
  }
  if (auto k = cfg.get_integer("kstar")) {
    if (*k < 1) throw ValidationError("kstar must be at least 1");
    s = ChangeScenario::from_kstar(s.delta, *k);
  } else {
    s.theta = cfg.get_double("theta", 1.0);
    s.beta = cfg.get_double("beta_exp", 0.0);
    s.kstar = resolve_kstar(s.theta, s.beta, p.m);
  }
  if (!std::isfinite(s.delta)) throw ValidationError("delta must be finite");
  if (s.delta != 0.0) s.validate();

  rc.garch.omega = cfg.get_double("omega", rc.garch.omega);
  rc.garch.alpha = cfg.get_double("alpha_garch", rc.garch.alpha);
  rc.garch.beta = cfg.get_double("beta_garch", rc.garch.beta);
  rc.garch.burn_in = cfg.get_integer("burn_in", rc.garch.burn_in);
  rc.garch.validate();

  rc.mu = cfg.get_double("mu", 0.0);
  if (!std::isfinite(rc.mu)) throw ValidationError("mu must be finite");
  rc.reps = cfg.get_integer("reps", rc.reps);
  if (rc.reps < 1) throw ValidationError("reps must be positive");
  const long long seed = cfg.get_integer("seed", 1);
  if (seed < 0) throw ValidationError("seed must be nonnegative");
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.grid = cfg.get_integer("grid", rc.grid);
  if (rc.grid < 2) throw ValidationError("grid must be at least 2");
  return rc;
}

// Writes density_<field>.csv for every field with enough distinct values.
Json write_densities(const std::vector<ReplicationRecord>& records, const fs::path& dir, std::int64_t points) {
  Json j = Json::object();
  for (NuField f : {NuField::page, NuField::q, NuField::tilde}) {
    const std::string name(to_string(f));
    const auto values = collect(records, f);
    Json entry;
    entry["n"] = values.size();
    try {
      const DensityEstimate est = kde(values, points);
      write_text_file(dir / ("density_" + name + ".csv"), format_density_csv(est));
      entry["bandwidth"] = est.bandwidth;
    } catch (const ValidationError& e) {
      entry["skipped"] = e.what();
    }
    j[name] = entry;
  }
  return j;
}

struct SimulateOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> c_page;
  std::optional<double> c_q;
  std::string cache;
  unsigned threads = 0;
};

void run_simulate(const SimulateOptions& o, std::ostream& out) {
  RunConfig rc = load_run_config(o.config);
  if (o.seed) rc.seed = *o.seed;
  const auto& p = rc.params;
  const auto cache = open_cache(o.cache);
  const double c_page = resolve_critical_value(o.c_page, cache, p.gamma, p.alpha, p.side, DetectorKind::page);
  const double c_q = resolve_critical_value(o.c_q, cache, p.gamma, p.alpha, p.side, DetectorKind::ordinary);

  const auto records = run_replications(p, rc.scenario, rc.garch, rc.reps, c_page, c_q, rc.seed, o.threads, rc.mu);
  const fs::path dir(o.out);
  write_text_file(dir / "records.csv", format_records_csv(records));
  const Json densities = write_densities(records, dir, rc.grid);
  const ReplicationSummary summary = summarize(records);

  Json meta;
  meta["parameters"] = {{"m", p.m},
                        {"gamma", p.gamma},
                        {"alpha", p.alpha},
                        {"side", std::string(to_string(p.side))},
                        {"detector", std::string(to_string(p.detector))},
                        {"horizon_factor", p.horizon_factor},
                        {"horizon", p.horizon()},
                        {"delta", rc.scenario.delta},
                        {"mu", rc.mu},
                        {"theta", rc.scenario.theta},
                        {"beta_exp", rc.scenario.beta},
                        {"kstar", rc.scenario.kstar},
                        {"reps", rc.reps},
                        {"seed", rc.seed},
                        {"grid", rc.grid},
                        {"omega", rc.garch.omega},
                        {"alpha_garch", rc.garch.alpha},
                        {"beta_garch", rc.garch.beta},
                        {"burn_in", rc.garch.burn_in}};
  meta["critical_values"] = {{"page", c_page}, {"q", c_q}};
  if (rc.scenario.delta != 0.0) {
    NormalizationInputs in{c_page, p.m, rc.scenario.kstar, rc.scenario.delta, rc.scenario.sigma, p.gamma};
    const auto np = normalize(in);
    in.c = c_q;
    const auto nq = normalize(in);
    meta["normalization"] = {{"page", {{"a_m", np.a_m}, {"b_m", np.b_m}}},
                             {"q", {{"a_m", nq.a_m}, {"b_m", nq.b_m}}}};
    const CaseLabel label = classify_case(rc.scenario, p.gamma, DeltaRegime::fixed(), c_page);
    Json c;
    c["label"] = std::string(to_string(label.variant));
    c["eta"] = label.eta;
    c["c1"] = optional_json(label.c1);
    c["d1"] = optional_json(label.d1);
    meta["case"] = c;
    meta["warnings"] = rc.scenario.warnings(p.m);
  } else {
    meta["normalization"] = nullptr;
    meta["case"] = nullptr;
  }
  meta["counts"] = {{"replications", summary.count},
                    {"degenerate_training", summary.degenerate},
                    {"nonstop_page", summary.nonstop_page},
                    {"nonstop_q", summary.nonstop_q}};
  meta["densities"] = densities;
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");

  Json j;
  j["out"] = o.out;
  j["replications"] = summary.count;
  j["nonstop_page"] = summary.nonstop_page;
  j["nonstop_q"] = summary.nonstop_q;
  out << j.dump() << '\n';
}

struct DensityOptions {
  std::string records;
  std::string out;
  std::int64_t points = 512;
};

void run_density(const DensityOptions& o, std::ostream& out) {
  if (o.points < 2) throw ValidationError("--points must be at least 2");
  const auto records = parse_records_csv(read_text_file(o.records));
  const Json j = write_densities(records, o.out, o.points);
  out << j.dump() << '\n';
}

// ---- monitor

struct MonitorOptions {
  std::string train;
  std::string stream;
  double gamma = 0.0;
  double alpha = 0.1;
  std::string side = "one";
  std::string detector = "page";
  std::optional<double> critical_value;
  double horizon_factor = 20.0;
  std::string cache;
};

void run_monitor_command(const MonitorOptions& o, std::ostream& out) {
  MonitoringParams p;
  p.gamma = o.gamma;
  p.alpha = o.alpha;
  p.side = parse_side(o.side);
  p.detector = parse_detector(o.detector);
  p.horizon_factor = o.horizon_factor;
  require_gamma(p.gamma);
  require_alpha(p.alpha);
  const auto training = read_value_column(o.train);
  const auto stream = read_value_column(o.stream);
  p.m = static_cast<std::int64_t>(training.size());
  p.validate();
  const double c = resolve_critical_value(o.critical_value, open_cache(o.cache), p.gamma, p.alpha, p.side, p.detector);
  const StoppingResult r = run_monitor(training, std::span<const double>(stream), p, c);
  Json j;
  j["stopped"] = r.stopped;
  j["tau"] = r.tau ? Json(*r.tau) : Json(nullptr);
  j["k_star_threshold_crossed_value"] = optional_json(r.crossed_value);
  out << j.dump() << '\n';
}

// ---- table1

struct Table1Options {
  double alpha = 0.1;
  std::string cache;
  std::string out;
};

void run_table1(const Table1Options& o, std::ostream& out) {
  require_alpha(o.alpha);
  const auto cache = open_cache(o.cache);
  std::map<double, double> c_page;
  std::map<double, double> c_q;
  for (double g : {0.0, 0.25, 0.45}) {
    c_page[g] = resolve_critical_value(std::nullopt, cache, g, o.alpha, Side::one_sided, DetectorKind::page);
    c_q[g] = resolve_critical_value(std::nullopt, cache, g, o.alpha, Side::one_sided, DetectorKind::ordinary);
  }
  const std::string csv = emit_table1(c_page, c_q);
  if (o.out.empty()) {
    out << csv;
  } else {
    write_text_file(o.out, csv);
  }
}

std::string single_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ordinary and Page CUSUM monitoring toolkit", "pagecusum"};
  app.require_subcommand(1);
  std::function<void()> action;

  CritvalsOptions crit;
  auto* c = app.add_subcommand("critvals", "Monte Carlo critical value of the limiting functional");
  c->add_option("--gamma", crit.gamma)->required();
  c->add_option("--alpha", crit.alpha);
  c->add_option("--side", crit.side);
  c->add_option("--detector", crit.detector);
  c->add_option("--reps", crit.reps);
  c->add_option("--grid", crit.grid);
  c->add_option("--seed", crit.seed);
  c->add_option("--out", crit.out, "JSON output path");
  c->add_option("--cache", crit.cache, "also store in this cache directory");
  c->add_option("--threads", crit.threads);
  c->callback([&] { action = [&] { run_critvals(crit, out); }; });

  AsymptoticsOptions asy;
  auto* a = app.add_subcommand("asymptotics", "a_m, b_m, case label and N(m, x)");
  a->add_option("--m", asy.m)->required();
  a->add_option("--gamma", asy.gamma);
  a->add_option("--kstar", asy.kstar);
  a->add_option("--theta", asy.theta);
  a->add_option("--beta", asy.beta);
  a->add_option("--delta", asy.delta);
  a->add_option("--sigma", asy.sigma);
  a->add_option("--c", asy.c);
  a->add_option("--alpha", asy.alpha);
  a->add_option("--side", asy.side);
  a->add_option("--detector", asy.detector);
  a->add_option("--cache", asy.cache);
  a->add_option("--x", asy.x);
  a->add_option("--rate", asy.rate, "local change |Delta_m| ~ m^-rate");
  a->add_option("--c-tilde1", asy.c_tilde1);
  a->callback([&] { action = [&] { run_asymptotics(asy, out); }; });

  LimitCdfOptions lim;
  auto* l = app.add_subcommand("limit-cdf", "Limit distribution of the normalized delay");
  l->add_option("--case", lim.variant)->required();
  l->add_option("--d1", lim.d1);
  l->add_option("--x", lim.x)->required();
  l->callback([&] { action = [&] { run_limit_cdf(lim, out); }; });

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Simulate GARCH(1,1) location-model series");
  g->add_option("--spec", gen.spec)->required();
  g->add_option("--n", gen.n, "number of series");
  g->add_option("--seed", gen.seed);
  g->add_option("--out", gen.out)->required();
  g->add_option("--split-dir", gen.split_dir, "also write train_<r>.csv / stream_<r>.csv");
  g->callback([&] { action = [&] { run_generate(gen, out); }; });

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Replication study of both stopping rules");
  s->add_option("--config", sim.config)->required();
  s->add_option("--out", sim.out)->required();
  s->add_option("--seed", sim.seed);
  s->add_option("--c-page", sim.c_page);
  s->add_option("--c-q", sim.c_q);
  s->add_option("--cache", sim.cache);
  s->add_option("--threads", sim.threads);
  s->callback([&] { action = [&] { run_simulate(sim, out); }; });

  DensityOptions den;
  auto* d = app.add_subcommand("density", "Kernel density estimates from records.csv");
  d->add_option("--records", den.records)->required();
  d->add_option("--out", den.out)->required();
  d->add_option("--points", den.points);
  d->callback([&] { action = [&] { run_density(den, out); }; });

  MonitorOptions mon;
  auto* m = app.add_subcommand("monitor", "Monitor a stream after a training sample");
  m->add_option("--train", mon.train)->required();
  m->add_option("--stream", mon.stream)->required();
  m->add_option("--gamma", mon.gamma);
  m->add_option("--alpha", mon.alpha);
  m->add_option("--side", mon.side);
  m->add_option("--detector", mon.detector);
  m->add_option("--critical-value", mon.critical_value);
  m->add_option("--horizon-factor", mon.horizon_factor);
  m->add_option("--cache", mon.cache);
  m->callback([&] { action = [&] { run_monitor_command(mon, out); }; });

  Table1Options tab;
  auto* t = app.add_subcommand("table1", "Normalizing sequences for the published scenarios");
  t->add_option("--alpha", tab.alpha);
  t->add_option("--cache", tab.cache);
  t->add_option("--out", tab.out);
  t->callback([&] { action = [&] { run_table1(tab, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << single_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << single_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << single_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace pagecusum::cli
