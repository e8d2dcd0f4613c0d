#include "pagecusum/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pagecusum/detectors.hpp"
#include "pagecusum/errors.hpp"
#include "pagecusum/io.hpp"
#include "pagecusum/parallel.hpp"
#include "pagecusum/rng.hpp"
#include "pagecusum/stats.hpp"

namespace pagecusum {

namespace {

struct PairOfTaus {
  std::optional<std::int64_t> page;
  std::optional<std::int64_t> q;
  bool degenerate = false;
};

// One replication: m training draws, then the stream is generated lazily until
// every active detector has stopped or the horizon is reached.
PairOfTaus run_one(const MonitoringParams& params, const ChangeScenario& scenario, const Garch11Spec& garch,
                   double c_page, double c_q, bool run_page, bool run_q, double mu, std::uint64_t seed,
                   std::int64_t rep) {
  RngStream rng(seed, static_cast<std::uint64_t>(rep));
  Garch11Process process(garch, rng);
  std::vector<double> training(static_cast<std::size_t>(params.m));
  for (auto& x : training) x = mu + process.next();

  PairOfTaus out;
  TrainingSummary summary;
  try {
    summary = summarize_training(training);
  } catch (const DegenerateTrainingError&) {
    out.degenerate = true;
    return out;
  }

  MonitoringParams page_params = params;
  page_params.detector = DetectorKind::page;
  MonitoringParams q_params = params;
  q_params.detector = DetectorKind::ordinary;
  Monitor page(summary, page_params, run_page ? c_page : 1.0);
  Monitor q(summary, q_params, run_q ? c_q : 1.0);

  const std::int64_t horizon = params.horizon();
  for (std::int64_t k = 1; k <= horizon; ++k) {
    double x = mu + process.next();
    if (k >= scenario.kstar) x += scenario.delta;
    if (run_page && !page.stopped()) page.push(x);
    if (run_q && !q.stopped()) q.push(x);
    if ((!run_page || page.stopped()) && (!run_q || q.stopped())) break;
  }
  if (run_page) out.page = page.tau();
  if (run_q) out.q = q.tau();
  return out;
}

std::optional<double> normalized(std::optional<std::int64_t> tau, const AsymptoticNormalization& n) {
  if (!tau) return std::nullopt;
  return (static_cast<double>(*tau) - n.a_m) / n.b_m;
}

std::optional<double> field_of(const ReplicationRecord& r, NuField field) {
  switch (field) {
    case NuField::page:
      return r.nu_page;
    case NuField::q:
      return r.nu_q;
    case NuField::tilde:
      return r.nu_tilde;
  }
  return std::nullopt;
}

void check_replication_inputs(const MonitoringParams& params, const Garch11Spec& garch, std::int64_t reps) {
  params.validate();
  garch.validate();
  if (reps < 1) throw ValidationError("reps must be positive");
}

}  // namespace

std::vector<ReplicationRecord> run_replications(const MonitoringParams& params, const ChangeScenario& scenario,
                                                const Garch11Spec& garch, std::int64_t reps, double c_page,
                                                double c_q, std::uint64_t seed, unsigned threads, double mu) {
  check_replication_inputs(params, garch, reps);
  if (!(c_page > 0.0) || !(c_q > 0.0)) throw ValidationError("critical values must be positive");
  if (scenario.kstar < 1) throw ValidationError("kstar must be at least 1");

  std::optional<AsymptoticNormalization> norm_page;
  std::optional<AsymptoticNormalization> norm_q;
  if (scenario.delta != 0.0) {
    NormalizationInputs in{c_page, params.m, scenario.kstar, scenario.delta, scenario.sigma, params.gamma};
    norm_page = normalize(in);
    in.c = c_q;
    norm_q = normalize(in);
  }

  std::vector<ReplicationRecord> records(static_cast<std::size_t>(reps));
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const auto rep = static_cast<std::int64_t>(i);
    const PairOfTaus taus = run_one(params, scenario, garch, c_page, c_q, true, true, mu, seed, rep);
    ReplicationRecord& r = records[i];
    r.rep = rep;
    r.degenerate = taus.degenerate;
    r.tau_page = taus.page;
    r.tau_q = taus.q;
    if (norm_page) {
      r.nu_page = normalized(taus.page, *norm_page);
      r.nu_q = normalized(taus.q, *norm_q);
      r.nu_tilde = normalized(taus.q, *norm_page);
    }
  });
  return records;
}

double empirical_size(const MonitoringParams& params, const Garch11Spec& garch, std::int64_t reps, double c,
                      std::uint64_t seed, unsigned threads) {
  check_replication_inputs(params, garch, reps);
  if (!(c > 0.0)) throw ValidationError("critical value must be positive");
  ChangeScenario null_scenario;
  null_scenario.delta = 0.0;
  const bool page = params.detector == DetectorKind::page;
  std::vector<char> stopped(static_cast<std::size_t>(reps), 0);
  parallel_for(stopped.size(), threads, [&](std::size_t i) {
    const PairOfTaus taus =
        run_one(params, null_scenario, garch, c, c, page, !page, 0.0, seed, static_cast<std::int64_t>(i));
    stopped[i] = (page ? taus.page : taus.q).has_value() ? 1 : 0;
  });
  const auto hits = std::count(stopped.begin(), stopped.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(reps);
}

ReplicationSummary summarize(std::span<const ReplicationRecord> records) {
  ReplicationSummary s;
  s.count = static_cast<std::int64_t>(records.size());
  for (const auto& r : records) {
    if (r.degenerate) {
      ++s.degenerate;
      continue;
    }
    if (!r.tau_page) ++s.nonstop_page;
    if (!r.tau_q) ++s.nonstop_q;
  }
  return s;
}

std::string_view to_string(NuField field) {
  switch (field) {
    case NuField::page:
      return "page";
    case NuField::q:
      return "q";
    case NuField::tilde:
      return "tilde";
  }
  return "?";
}

std::vector<double> collect(std::span<const ReplicationRecord> records, NuField field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (auto v = field_of(r, field)) out.push_back(*v);
  }
  return out;
}

PairedDifference paired_difference(std::span<const ReplicationRecord> records, NuField a, NuField b) {
  std::vector<double> diff;
  for (const auto& r : records) {
    const auto x = field_of(r, a);
    const auto y = field_of(r, b);
    if (x && y) diff.push_back(*x - *y);
  }
  PairedDifference out;
  out.n = static_cast<std::int64_t>(diff.size());
  if (diff.size() < 2) throw ValidationError("paired difference needs at least two complete records");
  out.mean = mean(diff);
  out.std_err = std::sqrt(sample_variance(diff) / static_cast<double>(diff.size()));
  return out;
}

namespace {

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_same_v<T, double>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(current);
      current.clear();
    } else if (ch != '\r') {
      current += ch;
    }
  }
  fields.push_back(current);
  return fields;
}

constexpr const char* kRecordsHeader = "rep,tau_page,tau_q,nu_page,nu_q,nu_tilde";

}  // namespace

std::string format_records_csv(std::span<const ReplicationRecord> records) {
  std::string out = kRecordsHeader;
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.rep);
    for (const std::string& f : {optional_field(r.tau_page), optional_field(r.tau_q), optional_field(r.nu_page),
                                 optional_field(r.nu_q), optional_field(r.nu_tilde)}) {
      out += ',';
      out += f;
    }
    out += '\n';
  }
  return out;
}

std::vector<ReplicationRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("records.csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw ValidationError("records.csv: unexpected header '" + line + "'");
  std::vector<ReplicationRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    const std::string where = "records.csv line " + std::to_string(line_no);
    if (f.size() != 6) throw ValidationError(where + ": expected 6 fields");
    ReplicationRecord r;
    r.rep = parse_integer(f[0], where);
    auto opt_int = [&](const std::string& s) -> std::optional<std::int64_t> {
      if (s.empty()) return std::nullopt;
      return parse_integer(s, where);
    };
    auto opt_double = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_double(s, where);
    };
    r.tau_page = opt_int(f[1]);
    r.tau_q = opt_int(f[2]);
    r.nu_page = opt_double(f[3]);
    r.nu_q = opt_double(f[4]);
    r.nu_tilde = opt_double(f[5]);
    records.push_back(r);
  }
  return records;
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("kde needs at least two samples");
  const double sd = std::sqrt(sample_variance(samples));
  if (!(sd > 0.0)) throw ValidationError("kde needs samples with positive spread");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

DensityEstimate kde(std::span<const double> samples, double grid_lo, double grid_hi, std::int64_t points) {
  if (points < 2) throw ValidationError("kde needs at least two grid points");
  if (!(grid_lo < grid_hi)) throw ValidationError("kde grid needs lo < hi");
  DensityEstimate est;
  est.bandwidth = silverman_bandwidth(samples);
  est.n = static_cast<std::int64_t>(samples.size());
  const double h = est.bandwidth;
  const double scale = 1.0 / (static_cast<double>(samples.size()) * h);
  const double step = (grid_hi - grid_lo) / static_cast<double>(points - 1);
  est.grid.resize(static_cast<std::size_t>(points));
  est.density.resize(static_cast<std::size_t>(points));
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    const double x = grid_lo + step * static_cast<double>(j);
    double sum = 0.0;
    for (double s : samples) sum += normal_pdf((x - s) / h);
    est.grid[j] = x;
    est.density[j] = sum * scale;
  }
  return est;
}

DensityEstimate kde(std::span<const double> samples, std::int64_t points) {
  const double h = silverman_bandwidth(samples);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  return kde(samples, *lo - 4.0 * h, *hi + 4.0 * h, points);
}

double trapezoid_integral(const DensityEstimate& estimate) {
  double total = 0.0;
  for (std::size_t j = 1; j < estimate.grid.size(); ++j) {
    total += 0.5 * (estimate.density[j] + estimate.density[j - 1]) * (estimate.grid[j] - estimate.grid[j - 1]);
  }
  return total;
}

std::string format_density_csv(const DensityEstimate& estimate) {
  std::string out = "x,density\n";
  for (std::size_t j = 0; j < estimate.grid.size(); ++j) {
    out += format_double(estimate.grid[j]);
    out += ',';
    out += format_double(estimate.density[j]);
    out += '\n';
  }
  return out;
}

KstarRule KstarRule::constant(std::int64_t k) {
  if (k < 1) throw ValidationError("kstar must be at least 1");
  return {Kind::constant, static_cast<double>(k), std::to_string(k)};
}

KstarRule KstarRule::power(double exponent, std::string label) {
  if (!(exponent >= 0.0 && exponent <= 1.0)) throw ValidationError("kstar exponent must lie in [0, 1]");
  return {Kind::power, exponent, std::move(label)};
}

std::int64_t KstarRule::resolve(std::int64_t m) const {
  if (kind == Kind::constant) return static_cast<std::int64_t>(value);
  return resolve_kstar(1.0, value, m);
}

std::vector<NormingRow> reference_scenarios() {
  const double gammas[] = {0.0, 0.25, 0.45};
  std::vector<NormingRow> rows;
  for (double g : gammas) rows.push_back({KstarRule::constant(1), g});
  for (double g : gammas) rows.push_back({KstarRule::constant(100), g});
  for (double g : gammas) rows.push_back({KstarRule::power(0.45, "m^0.45"), g});
  rows.push_back({KstarRule::power(0.5, "m^0.5"), 0.0});
  rows.push_back({KstarRule::power(1.0 / 3.0, "m^(1/3)"), 0.25});
  rows.push_back({KstarRule::power(1.0 / 11.0, "m^(1/11)"), 0.45});
  for (double g : gammas) rows.push_back({KstarRule::power(0.75, "m^0.75"), g});
  return rows;
}

std::vector<NormingEntry> compute_norming_table(std::span<const NormingRow> rows,
                                               std::span<const std::int64_t> m_values,
                                               const std::map<double, double>& c_page_by_gamma,
                                               const std::map<double, double>& c_q_by_gamma) {
  auto lookup = [](const std::map<double, double>& table, double gamma, const char* what) {
    const auto it = table.find(gamma);
    if (it == table.end()) {
      throw ValidationError(std::string("no ") + what + " critical value for gamma = " + format_double(gamma));
    }
    return it->second;
  };
  std::vector<NormingEntry> out;
  for (const auto& row : rows) {
    const double c_page = lookup(c_page_by_gamma, row.gamma, "Page");
    const double c_q = lookup(c_q_by_gamma, row.gamma, "ordinary");
    for (std::int64_t m : m_values) {
      NormingEntry e;
      e.kstar_label = row.rule.label;
      e.gamma = row.gamma;
      e.m = m;
      e.kstar = row.rule.resolve(m);
      NormalizationInputs in{c_page, m, e.kstar, 1.0, 1.0, row.gamma};
      e.page = normalize(in);
      in.c = c_q;
      e.q = normalize(in);
      out.push_back(std::move(e));
    }
  }
  return out;
}

namespace {

std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string format_norming_csv(std::span<const NormingEntry> entries, std::span<const std::int64_t> m_values) {
  std::string out = "kstar,gamma,stat";
  for (const char* det : {"page", "q"}) {
    for (std::int64_t m : m_values) out += std::string(",") + det + "_m" + std::to_string(m);
  }
  out += '\n';
  const std::size_t width = m_values.size();
  if (width == 0 || entries.size() % width != 0) throw ValidationError("table entries do not fill whole rows");
  for (std::size_t row = 0; row < entries.size(); row += width) {
    for (const char stat : {'a', 'b'}) {
      out += entries[row].kstar_label + ',' + format_double(entries[row].gamma) + ',' + stat;
      for (int det = 0; det < 2; ++det) {
        for (std::size_t j = 0; j < width; ++j) {
          const auto& e = entries[row + j];
          const auto& n = det == 0 ? e.page : e.q;
          out += ',' + two_decimals(stat == 'a' ? n.a_m : n.b_m);
        }
      }
      out += '\n';
    }
  }
  return out;
}

std::string emit_table1(const std::map<double, double>& c_page_by_gamma,
                        const std::map<double, double>& c_q_by_gamma) {
  const auto rows = reference_scenarios();
  const std::int64_t ms[] = {100, 1000, 10000};
  const auto entries = compute_norming_table(rows, ms, c_page_by_gamma, c_q_by_gamma);
  return format_norming_csv(entries, ms);
}

}  // namespace pagecusum
