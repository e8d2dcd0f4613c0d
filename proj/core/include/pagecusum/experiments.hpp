#pragma once

// Replication harness for the simulation study: both stopping rules on shared
// GARCH(1,1) data, normalized stopping times, densities, sizes and the table
// of normalizing sequences.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pagecusum/asymptotics.hpp"
#include "pagecusum/datagen.hpp"
#include "pagecusum/model.hpp"

namespace pagecusum {

struct ReplicationRecord {
  std::int64_t rep = 0;
  std::optional<std::int64_t> tau_page;
  std::optional<std::int64_t> tau_q;
  /// (tau_page - a_m(c_page)) / b_m(c_page)
  std::optional<double> nu_page;
  /// (tau_q - a_m(c_q)) / b_m(c_q)
  std::optional<double> nu_q;
  /// (tau_q - a_m(c_page)) / b_m(c_page): ordinary CUSUM on the Page scale.
  std::optional<double> nu_tilde;
  /// Training sample had zero spread; no detector was run. Not written to CSV.
  bool degenerate = false;

  bool operator==(const ReplicationRecord&) const = default;
};

/// Replication `rep` draws training and stream from RngStream(seed, rep) and
/// runs both detectors (side from `params`) on the same observations until both
/// have stopped or params.horizon() is reached. Results do not depend on
/// `threads`. Normalized values are left empty when delta == 0.
std::vector<ReplicationRecord> run_replications(const MonitoringParams& params, const ChangeScenario& scenario,
                                                const Garch11Spec& garch, std::int64_t reps, double c_page,
                                                double c_q, std::uint64_t seed, unsigned threads = 0,
                                                double mu = 0.0);

/// Fraction of no-change replications whose detector (params.detector) stops
/// within params.horizon().
double empirical_size(const MonitoringParams& params, const Garch11Spec& garch, std::int64_t reps, double c,
                      std::uint64_t seed, unsigned threads = 0);

struct ReplicationSummary {
  std::int64_t count = 0;
  std::int64_t degenerate = 0;
  std::int64_t nonstop_page = 0;
  std::int64_t nonstop_q = 0;
};

ReplicationSummary summarize(std::span<const ReplicationRecord> records);

enum class NuField { page, q, tilde };

std::string_view to_string(NuField field);
/// Present values of one normalized field, in record order.
std::vector<double> collect(std::span<const ReplicationRecord> records, NuField field);

struct PairedDifference {
  std::int64_t n = 0;
  double mean = 0.0;
  double std_err = 0.0;
};

/// Mean of a - b over records where both fields are present, with the
/// standard error sd(a - b) / sqrt(n).
PairedDifference paired_difference(std::span<const ReplicationRecord> records, NuField a, NuField b);

std::string format_records_csv(std::span<const ReplicationRecord> records);
std::vector<ReplicationRecord> parse_records_csv(const std::string& text);

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::int64_t n = 0;
};

/// 0.9 min(sd, IQR/1.34) n^(-1/5); falls back to sd when the IQR is zero.
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian kernel estimate on `points` equally spaced values in [grid_lo, grid_hi].
DensityEstimate kde(std::span<const double> samples, double grid_lo, double grid_hi, std::int64_t points);
/// Same, on [min - 4h, max + 4h].
DensityEstimate kde(std::span<const double> samples, std::int64_t points = 512);

double trapezoid_integral(const DensityEstimate& estimate);
std::string format_density_csv(const DensityEstimate& estimate);

/// k* as a function of m: a constant or floor(m^exponent).
struct KstarRule {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  double value = 1.0;
  std::string label;

  static KstarRule constant(std::int64_t k);
  static KstarRule power(double exponent, std::string label);
  std::int64_t resolve(std::int64_t m) const;
};

struct NormingRow {
  KstarRule rule;
  double gamma = 0.0;
};

/// The fifteen (k*, gamma) scenarios of the published table, in its order.
std::vector<NormingRow> reference_scenarios();

struct NormingEntry {
  std::string kstar_label;
  double gamma = 0.0;
  std::int64_t m = 0;
  std::int64_t kstar = 0;
  AsymptoticNormalization page;
  AsymptoticNormalization q;
};

/// Delta = sigma = 1. c_*_by_gamma must hold a value for every gamma in `rows`.
std::vector<NormingEntry> compute_norming_table(std::span<const NormingRow> rows,
                                               std::span<const std::int64_t> m_values,
                                               const std::map<double, double>& c_page_by_gamma,
                                               const std::map<double, double>& c_q_by_gamma);

/// One line per (row, statistic): kstar,gamma,stat,page_m<m>...,q_m<m>...
/// with two decimals, stat in {a, b}.
std::string format_norming_csv(std::span<const NormingEntry> entries, std::span<const std::int64_t> m_values);

/// compute_norming_table + format_norming_csv for the published rows and m in {100, 1000, 10000}.
std::string emit_table1(const std::map<double, double>& c_page_by_gamma,
                        const std::map<double, double>& c_q_by_gamma);

}  // namespace pagecusum
