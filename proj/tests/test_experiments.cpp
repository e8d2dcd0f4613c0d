#include <doctest.h>

#include <cmath>
#include <random>

#include "pagecusum/errors.hpp"
#include "pagecusum/experiments.hpp"
#include "pagecusum/stats.hpp"

using namespace pagecusum;

namespace {

MonitoringParams params_for(std::int64_t m, double gamma) {
  MonitoringParams p;
  p.m = m;
  p.gamma = gamma;
  return p;
}

const Garch11Spec kGarch{0.5, 0.2, 0.3, 500};

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("record count and immediate crossing") {
  const auto s = ChangeScenario::from_kstar(1e6, 1);
  const auto records = run_replications(params_for(50, 0.25), s, kGarch, 37, 2.0, 1.9, 1);
  REQUIRE(records.size() == 37);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].rep == static_cast<std::int64_t>(i));
    CHECK(records[i].tau_page == 1);
    CHECK(records[i].tau_q == 1);
    CHECK(records[i].nu_page.has_value());
  }
}

TEST_CASE("normalized fields follow their definitions") {
  const auto s = ChangeScenario::from_kstar(1.0, 10);
  const auto p = params_for(200, 0.25);
  const auto records = run_replications(p, s, kGarch, 50, 1.9, 1.8, 4);
  const auto np = normalize({1.9, 200, 10, 1.0, 1.0, 0.25});
  const auto nq = normalize({1.8, 200, 10, 1.0, 1.0, 0.25});
  for (const auto& r : records) {
    REQUIRE(r.tau_page);
    REQUIRE(r.tau_q);
    CHECK(*r.nu_page == doctest::Approx((*r.tau_page - np.a_m) / np.b_m));
    CHECK(*r.nu_q == doctest::Approx((*r.tau_q - nq.a_m) / nq.b_m));
    CHECK(*r.nu_tilde == doctest::Approx((*r.tau_q - np.a_m) / np.b_m));
  }
}

TEST_CASE("Page dominates pathwise at equal critical values") {
  for (Side side : {Side::one_sided, Side::two_sided}) {
    auto p = params_for(100, 0.25);
    p.side = side;
    const auto s = ChangeScenario::from_kstar(0.5, 60);
    const auto records = run_replications(p, s, kGarch, 300, 1.9, 1.9, 8);
    for (const auto& r : records) {
      if (r.tau_q) {
        REQUIRE(r.tau_page);
        CHECK(*r.tau_page <= *r.tau_q);
      }
    }
  }
}

TEST_CASE("results do not depend on thread count") {
  const auto s = ChangeScenario::from_kstar(0.8, 5);
  const auto p = params_for(80, 0.0);
  const auto one = run_replications(p, s, kGarch, 101, 1.7, 1.65, 12, 1);
  const auto four = run_replications(p, s, kGarch, 101, 1.7, 1.65, 12, 4);
  CHECK(one == four);
  CHECK(format_records_csv(one) == format_records_csv(four));
}

TEST_CASE("records CSV round trip") {
  const auto s = ChangeScenario::from_kstar(0.4, 30);
  auto p = params_for(60, 0.45);
  p.horizon_factor = 2.0;
  const auto records = run_replications(p, s, kGarch, 200, 2.46, 2.29, 2);
  const auto summary = summarize(records);
  CHECK(summary.nonstop_page > 0);
  CHECK(summary.nonstop_q >= summary.nonstop_page);
  const auto back = parse_records_csv(format_records_csv(records));
  CHECK(back == records);
  CHECK_THROWS_AS(parse_records_csv("rep,tau\n"), ValidationError);
  CHECK_THROWS_AS(parse_records_csv("rep,tau_page,tau_q,nu_page,nu_q,nu_tilde\n1,2\n"), ValidationError);
}

TEST_CASE("empirical size") {
  auto p = params_for(100, 0.0);
  CHECK(empirical_size(p, kGarch, 50, 1e3, 1) == 0.0);
  p.horizon_factor = 5.0;
  double prev = 0.0;
  for (double h : {5.0, 10.0, 20.0, 40.0}) {
    p.horizon_factor = h;
    const double size = empirical_size(p, kGarch, 400, 1.6, 3);
    CHECK(size >= prev);
    prev = size;
  }
  CHECK(prev > 0.0);
  p.detector = DetectorKind::ordinary;
  p.horizon_factor = 20.0;
  const double q = empirical_size(p, kGarch, 400, 1.6, 3);
  p.detector = DetectorKind::page;
  CHECK(empirical_size(p, kGarch, 400, 1.6, 3) >= q);
}

TEST_CASE("early change: Page and ordinary normalized delays agree") {
  const auto s = ChangeScenario::from_kstar(1.0, 1);
  const auto records = run_replications(params_for(1000, 0.0), s, kGarch, 1000, 1.6924, 1.6448536269514722, 2024);
  const auto diff = paired_difference(records, NuField::page, NuField::q);
  CHECK(std::abs(diff.mean) <= 0.2);
}

TEST_CASE("kernel density estimate") {
  CHECK_THROWS_AS(kde(std::vector<double>(10, 0.0), -1.0, 1.0, 50), ValidationError);
  CHECK_THROWS_AS(kde(std::vector<double>{1.0}, -1.0, 1.0, 50), ValidationError);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  std::vector<double> s(100000);
  for (auto& v : s) v = z(rng);
  const auto est = kde(s, -3.0, 3.0, 121);
  double worst = 0.0;
  for (std::size_t j = 0; j < est.grid.size(); ++j) {
    worst = std::max(worst, std::abs(est.density[j] - normal_pdf(est.grid[j])));
  }
  CHECK(worst <= 0.01);
  CHECK(est.n == 100000);

  const auto full = kde(s);
  CHECK(std::abs(trapezoid_integral(full) - 1.0) <= 0.01);

  std::vector<double> skew(2000);
  for (auto& v : skew) v = std::exp(z(rng));
  CHECK(std::abs(trapezoid_integral(kde(skew, 1024)) - 1.0) <= 0.01);
  const double iqr = quantile(skew, 0.75) - quantile(skew, 0.25);
  CHECK(silverman_bandwidth(skew) ==
        doctest::Approx(0.9 * std::min(std::sqrt(sample_variance(skew)), iqr / 1.34) * std::pow(2000.0, -0.2)));
}

TEST_CASE("normalizing-sequence table spot values") {
  const std::map<double, double> cq{{0.0, 1.645}};
  const std::map<double, double> cp{{0.0, 1.6924}};
  const std::vector<NormingRow> rows{{KstarRule::constant(1), 0.0},
                                    {KstarRule::constant(100), 0.0},
                                    {KstarRule::power(0.75, "m^0.75"), 0.0}};
  const std::int64_t ms[] = {100, 10000};
  const auto e = compute_norming_table(rows, ms, cp, cq);
  REQUIRE(e.size() == 6);
  CHECK(e[0].q.a_m == doctest::Approx(17.45));
  CHECK(std::round(e[0].q.b_m * 100) / 100 == doctest::Approx(4.18));
  CHECK(e[2].q.a_m == doctest::Approx(116.45));
  CHECK(e[5].kstar == 1000);
  CHECK(e[5].q.a_m == doctest::Approx(1164.5));
  const std::string csv = format_norming_csv(e, ms);
  CHECK(csv.rfind("kstar,gamma,stat,page_m100,page_m10000,q_m100,q_m10000\n", 0) == 0);
  CHECK(csv.find("1,0,a,17.92,170.24,17.45,165.50\n") != std::string::npos);
  CHECK_THROWS_AS(compute_norming_table(rows, ms, {}, cq), ValidationError);
  CHECK(reference_scenarios().size() == 15);
}

}  // TEST_SUITE
