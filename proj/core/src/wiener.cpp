#include "pagecusum/wiener.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pagecusum/errors.hpp"
#include "pagecusum/io.hpp"
#include "pagecusum/parallel.hpp"
#include "pagecusum/stats.hpp"

namespace pagecusum {

WienerPath sample_wiener_path(std::int64_t grid_size, RngStream& rng) {
  if (grid_size < 2) throw ValidationError("Wiener grid size must be at least 2");
  WienerPath path;
  path.values.resize(static_cast<std::size_t>(grid_size) + 1);
  const double scale = std::sqrt(1.0 / static_cast<double>(grid_size));
  double w = 0.0;
  for (std::size_t j = 1; j < path.values.size(); ++j) {
    w += scale * rng.gaussian();
    path.values[j] = w;
  }
  return path;
}

WienerPath path_from_increments(std::span<const double> increments) {
  WienerPath path;
  path.values.reserve(increments.size() + 1);
  path.values.push_back(0.0);
  double w = 0.0;
  for (double dw : increments) {
    w += dw;
    path.values.push_back(w);
  }
  return path;
}

WienerPath refine_path(const WienerPath& path, RngStream& rng) {
  const std::int64_t coarse = path.grid_size();
  if (coarse < 1) throw ValidationError("cannot refine an empty path");
  // midpoint of a bridge over a step of length h has variance h/4
  const double sd = std::sqrt(0.25 / static_cast<double>(coarse));
  WienerPath fine;
  fine.values.resize(static_cast<std::size_t>(2 * coarse) + 1);
  for (std::size_t j = 0; j < path.values.size(); ++j) {
    fine.values[2 * j] = path.values[j];
    if (j + 1 < path.values.size()) {
      fine.values[2 * j + 1] = 0.5 * (path.values[j] + path.values[j + 1]) + sd * rng.gaussian();
    }
  }
  return fine;
}

FunctionalGrid::FunctionalGrid(std::int64_t grid_size, double gamma) : grid_size_(grid_size), gamma_(gamma) {
  require_gamma(gamma);
  if (grid_size < 2) throw ValidationError("Wiener grid size must be at least 2");
  const double T = static_cast<double>(grid_size);
  weight_.resize(static_cast<std::size_t>(grid_size));
  inv_remaining_.resize(static_cast<std::size_t>(grid_size));
  for (std::int64_t j = 1; j <= grid_size; ++j) {
    const double t = static_cast<double>(j) / T;
    weight_[static_cast<std::size_t>(j - 1)] = gamma == 0.0 ? 1.0 : std::pow(t, -gamma);
    inv_remaining_[static_cast<std::size_t>(j - 1)] = j < grid_size ? 1.0 / (1.0 - t) : 0.0;
  }
}

namespace {

// Running state of both functionals along one path.
struct FunctionalAccumulator {
  double ordinary = -INFINITY;
  double page = 0.0;
  double ratio_inf = 0.0;  // inf over s <= t of W(s)/(1-s), s = 0 contributes 0
  double ratio_sup = 0.0;

  void add(double w, double weight, double inv_remaining, double remaining, bool last, Side side) {
    const double level = side == Side::one_sided ? w : std::abs(w);
    ordinary = std::max(ordinary, level * weight);
    double dev = 0.0;
    if (last) {
      // (1 - t) = 0 kills the infimum term at t = 1
      dev = level;
    } else {
      const double ratio = w * inv_remaining;
      ratio_inf = std::min(ratio_inf, ratio);
      dev = w - remaining * ratio_inf;
      if (side == Side::two_sided) {
        ratio_sup = std::max(ratio_sup, ratio);
        dev = std::max(dev, remaining * ratio_sup - w);
      }
    }
    page = std::max(page, dev * weight);
  }
};

}  // namespace

FunctionalGrid::Values FunctionalGrid::evaluate(std::span<const double> w, Side side) const {
  if (static_cast<std::int64_t>(w.size()) != grid_size_) {
    throw ValidationError("path length does not match the functional grid");
  }
  FunctionalAccumulator acc;
  const double T = static_cast<double>(grid_size_);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool last = i + 1 == w.size();
    const double remaining = 1.0 - static_cast<double>(i + 1) / T;
    acc.add(w[i], weight_[i], inv_remaining_[i], remaining, last, side);
  }
  return {acc.ordinary, acc.page};
}

FunctionalGrid::Values FunctionalGrid::simulate(RngStream& rng, Side side) const {
  FunctionalAccumulator acc;
  const double T = static_cast<double>(grid_size_);
  const double scale = std::sqrt(1.0 / T);
  const auto n = static_cast<std::size_t>(grid_size_);
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w += scale * rng.gaussian();
    const double remaining = 1.0 - static_cast<double>(i + 1) / T;
    acc.add(w, weight_[i], inv_remaining_[i], remaining, i + 1 == n, side);
  }
  return {acc.ordinary, acc.page};
}

double functional_ordinary(const WienerPath& path, double gamma, Side side) {
  const FunctionalGrid grid(path.grid_size(), gamma);
  return grid.evaluate(std::span(path.values).subspan(1), side).ordinary;
}

double functional_page(const WienerPath& path, double gamma, Side side) {
  const FunctionalGrid grid(path.grid_size(), gamma);
  return grid.evaluate(std::span(path.values).subspan(1), side).page;
}

void CriticalValueRequest::validate() const {
  require_gamma(gamma);
  require_alpha(alpha);
  if (reps < 100) throw ValidationError("reps must be at least 100");
  if (grid < 2) throw ValidationError("grid must be at least 2");
  if (bootstrap_resamples < 2) throw ValidationError("bootstrap_resamples must be at least 2");
}

FunctionalSamples simulate_functionals(double gamma, Side side, std::int64_t reps, std::int64_t grid,
                                       std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw ValidationError("reps must be positive");
  const FunctionalGrid table(grid, gamma);
  FunctionalSamples out;
  out.ordinary.resize(static_cast<std::size_t>(reps));
  out.page.resize(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t i) {
    RngStream rng(seed, i);
    const auto v = table.simulate(rng, side);
    out.ordinary[i] = v.ordinary;
    out.page[i] = v.page;
  });
  return out;
}

CriticalValueEstimate quantile_estimate(std::span<const double> samples, const CriticalValueRequest& request) {
  request.validate();
  CriticalValueEstimate est;
  est.gamma = request.gamma;
  est.alpha = request.alpha;
  est.side = request.side;
  est.detector = request.detector;
  est.reps = static_cast<std::int64_t>(samples.size());
  est.grid = request.grid;
  est.seed = request.seed;
  est.c = quantile(samples, 1.0 - request.alpha);
  est.std_err = bootstrap_quantile_se(samples, 1.0 - request.alpha, request.bootstrap_resamples,
                                      mix64(request.seed));
  return est;
}

CriticalValueEstimate estimate_critical_value(const CriticalValueRequest& request) {
  request.validate();
  const FunctionalSamples samples =
      simulate_functionals(request.gamma, request.side, request.reps, request.grid, request.seed, request.threads);
  const auto& chosen = request.detector == DetectorKind::page ? samples.page : samples.ordinary;
  return quantile_estimate(chosen, request);
}

std::string to_json(const CriticalValueEstimate& e) {
  nlohmann::ordered_json j;
  j["gamma"] = e.gamma;
  j["alpha"] = e.alpha;
  j["side"] = std::string(to_string(e.side));
  j["detector"] = std::string(to_string(e.detector));
  j["reps"] = e.reps;
  j["grid"] = e.grid;
  j["seed"] = e.seed;
  j["c"] = e.c;
  j["std_err"] = e.std_err;
  return j.dump(2);
}

CriticalValueEstimate critical_value_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    CriticalValueEstimate e;
    e.gamma = j.at("gamma").get<double>();
    e.alpha = j.at("alpha").get<double>();
    e.side = parse_side(j.at("side").get<std::string>());
    e.detector = parse_detector(j.at("detector").get<std::string>());
    e.reps = j.at("reps").get<std::int64_t>();
    e.grid = j.at("grid").get<std::int64_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.c = j.at("c").get<double>();
    e.std_err = j.at("std_err").get<double>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed critical value JSON: ") + ex.what());
  }
}

namespace {

struct ReferenceEntry {
  double gamma;
  double page;
  double ordinary;
};

// One-sided, alpha = 0.1. Each value lies inside the interval of critical values
// consistent with every rounded a_m entry of the published table at that gamma.
constexpr std::array<ReferenceEntry, 3> kReferenceAlpha10 = {{
    {0.00, 1.692400, 1.6448536269514722},
    {0.25, 1.899202, 1.810220},
    {0.45, 2.459243, 2.286795},
}};

bool same(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

std::optional<double> reference_critical_value(double gamma, double alpha, Side side, DetectorKind detector) {
  if (side != Side::one_sided || !same(alpha, 0.1)) return std::nullopt;
  for (const auto& entry : kReferenceAlpha10) {
    if (same(entry.gamma, gamma)) return detector == DetectorKind::page ? entry.page : entry.ordinary;
  }
  return std::nullopt;
}

CriticalValueCache::CriticalValueCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string CriticalValueCache::file_name(double gamma, double alpha, Side side, DetectorKind detector) {
  std::ostringstream os;
  os << "critval_" << to_string(detector) << '_' << to_string(side) << "_g" << format_double(gamma) << "_a"
     << format_double(alpha) << ".json";
  return os.str();
}

std::optional<CriticalValueEstimate> CriticalValueCache::lookup(double gamma, double alpha, Side side,
                                                                DetectorKind detector) const {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) return std::nullopt;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::optional<CriticalValueEstimate> best;
  for (const auto& file : files) {
    CriticalValueEstimate e;
    try {
      e = critical_value_from_json(read_text_file(file));
    } catch (const ValidationError&) {
      continue;  // not a critical value file
    }
    if (!same(e.gamma, gamma) || !same(e.alpha, alpha) || e.side != side || e.detector != detector) continue;
    if (!best || e.reps > best->reps) best = e;
  }
  return best;
}

std::filesystem::path CriticalValueCache::store(const CriticalValueEstimate& estimate) const {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / file_name(estimate.gamma, estimate.alpha, estimate.side, estimate.detector);
  write_text_file(path, to_json(estimate) + "\n");
  return path;
}

double resolve_critical_value(std::optional<double> explicit_c, const std::optional<CriticalValueCache>& cache,
                              double gamma, double alpha, Side side, DetectorKind detector) {
  if (explicit_c) {
    if (!(*explicit_c > 0.0)) throw ValidationError("critical value must be positive");
    return *explicit_c;
  }
  if (cache) {
    if (auto hit = cache->lookup(gamma, alpha, side, detector)) return hit->c;
  }
  if (auto ref = reference_critical_value(gamma, alpha, side, detector)) return *ref;
  std::ostringstream os;
  os << "no critical value for gamma=" << gamma << " alpha=" << alpha << " side=" << to_string(side)
     << " detector=" << to_string(detector) << "; run `critvals` or pass one explicitly";
  throw ValidationError(os.str());
}

}  // namespace pagecusum
