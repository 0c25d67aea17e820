#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "hypspec/bounds.hpp"
#include "hypspec/errors.hpp"

using namespace hypspec;

namespace {

constexpr double kPi = std::numbers::pi;

// straight-line reference formulas, written independently of the library
double m_ref(double l) {
  const double x = 1.0 / std::sinh(0.5 * l);
  return std::log(x + std::sqrt(x * x + 1.0));
}
double gd_ref(double R) { return std::atan(std::sinh(R)); }
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// mpmath, 30 digits
constexpr double kR2 = 2.37841423000544213;
constexpr double kR3 = 4.11953428781423551;
constexpr double kA2_v3_l1 = 1.21052555572771884;
constexpr double kA3_l1 = 0.0364895262225255340;
constexpr double kA3_l05 = 0.0150332184377394166;
constexpr double kUpper_k05_K2 = 6.71268802793417265;

bounds::SandwichInputs inputs() {
  bounds::SandwichInputs in;
  in.lambda0N_cell = 0.0;
  in.lambda1 = 0.3;
  in.psi0_cuff = 0.4;
  in.l = 1.0;
  in.v = 3;
  in.mu0 = 0.17;
  in.h_lower = 0.5;
  in.h_upper = 1.0;
  in.measured_lambda0 = 0.05;
  return in;
}

}  // namespace

TEST_CASE("Buser constant") {
  CHECK(rel(bounds::buser_constant(2), kR2) < 1e-12);
  CHECK(rel(bounds::buser_constant(2), std::pow(2.0, 1.25)) < 1e-12);
  CHECK(rel(bounds::buser_constant(3), kR3) < 1e-12);
  for (int n = 2; n < 8; ++n) {
    CHECK(rel(bounds::buser_constant(n), std::sqrt(2 * std::sqrt(2.0) * n * (n - 1))) < 1e-12);
    CHECK(bounds::buser_constant(n + 1) > bounds::buser_constant(n));
  }
  CHECK_THROWS_AS(bounds::buser_constant(1), ValidationError);
}

TEST_CASE("Buser upper bound") {
  CHECK(bounds::buser_upper_bound(0.0, 2 * kPi) == 0.0);
  CHECK(bounds::buser_upper_bound(6.0, 2 * kPi) == doctest::Approx(2.2713).epsilon(1e-4));
  CHECK(rel(bounds::buser_upper_bound(6.0, 2 * kPi), kR2 * 6.0 / (2 * kPi)) < 1e-12);
  CHECK(bounds::buser_upper_bound(0.06, 2 * kPi) == doctest::Approx(0.022713).epsilon(1e-4));
  CHECK(bounds::buser_upper_bound(0.06, 2 * kPi) < 0.25);
  CHECK_THROWS_AS(bounds::buser_upper_bound(1.0, 0.0), ValidationError);
}

TEST_CASE("A2") {
  for (double l : {0.3, 1.0, 2.5}) {
    const double m = m_ref(l);
    CHECK(rel(bounds::A2(2, l, 0.0), 1 / (m * m)) < 1e-12);
  }
  CHECK(rel(bounds::A2(3, 1.0, 0.1), kA2_v3_l1) < 1e-12);
  for (int v = 2; v < 6; ++v)
    for (double l : {0.5, 1.0, 2.0}) {
      CHECK(bounds::A2(v + 1, l, 0.1) > bounds::A2(v, l, 0.1));
      CHECK(bounds::A2(v, 1.5 * l, 0.1) > bounds::A2(v, l, 0.1));
      const double m = m_ref(l);
      CHECK(rel(bounds::A2(v, l, 0.2), (v - 1) * (1 / (m * m) + 0.2)) < 1e-12);
    }
}

TEST_CASE("A'' and the collar ratio") {
  for (double l : {0.5, 1.0, 3.0})
    CHECK(rel(bounds::A_doubleprime(0.7, l), 0.7 * l * std::sinh(m_ref(l)) / 4) < 1e-12);
  for (double R : {1e-3, 0.5, 1.0, 2.0}) {
    const double u = std::asin(std::tanh(R));
    const double g = 2 * std::atan(std::exp(R)) - kPi / 2;
    CHECK(rel(bounds::collar_ratio(R), g / (u * u)) < 1e-12);
    CHECK(rel(bounds::collar_ratio(R), 1 / gd_ref(R)) < 1e-10);
  }
}

TEST_CASE("A''' is attained at the collar edge") {
  const double m1 = m_ref(1.0);
  CHECK(bounds::collar_ratio(1e-4) > bounds::collar_ratio(m1));
  const auto r = bounds::A_tripleprime(1.0);
  CHECK(r.minimizer == doctest::Approx(m1).epsilon(1e-9));
  CHECK(rel(r.value, kA3_l1) < 1e-12);
  CHECK(rel(r.value, 1.0 / (8 * kPi) / gd_ref(m1)) < 1e-12);
  CHECK(rel(bounds::A_tripleprime(0.5).value, kA3_l05) < 1e-12);
  for (double l : {0.5, 1.0}) {
    const auto t = bounds::A_tripleprime(l);
    CHECK(rel(t.value / l, t.min_ratio / (8 * kPi)) < 1e-12);
  }
}

TEST_CASE("A1") {
  const double l = 1.0, lam1 = 0.3, eta = 0.3, psi = 0.4;
  const double a2 = lam1 * l * std::sinh(m_ref(l)) / 4;
  const double a3 = l / (8 * kPi) / gd_ref(m_ref(l));
  const double ref = eta / (1 + 1 / lam1) * std::max(a2, a3) * psi * psi / (2 * kPi);
  CHECK(rel(bounds::A1(eta, lam1, l, psi), ref) < 1e-12);
  CHECK(bounds::A1(eta, lam1, l, psi) > 0.0);
  CHECK(bounds::A1(eta, lam1, l, 0.0) == 0.0);
  const double alt = eta / (1 + 1 / lam1) * std::min(a2, a3) * psi * psi / (2 * kPi);
  CHECK(rel(bounds::A1(eta, lam1, l, psi, bounds::Combine::min), alt) < 1e-12);
  double prev = 0.0;
  for (double e : {0.05, 0.1, 0.2, 0.3}) {
    const double a = bounds::A1(e, lam1, l, psi);
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("bounded decomposition coefficients") {
  const auto d = bounds::bounded_decomposition_bounds(0.5, 2.0, 3, 0.2, bounds::LowerVariant::printed);
  CHECK(rel(d.upper, kUpper_k05_K2) < 1e-12);
  CHECK(rel(d.upper, 2.0 * 2 / (m_ref(2.0) * m_ref(2.0))) < 1e-12);
  CHECK(d.lower == doctest::Approx(0.009524).epsilon(1e-4));
  CHECK(rel(d.lower, 0.2 / (1 + 2 / (0.5 * 0.2))) < 1e-12);
  const double mK = m_ref(2.0);
  const double a = std::min(0.2 * 0.5 * std::sinh(mK) / (4 * 2.0), 0.5 / (8 * kPi * gd_ref(mK) * 2.0));
  CHECK(rel(d.lower_analytic, d.lower_printed * a / (2 * kPi)) < 1e-12);
  const auto c = bounds::bounded_decomposition_bounds(0.5, 2.0, 3, 0.2);
  CHECK(c.lower == std::min(c.lower_printed, c.lower_analytic));
  CHECK(c.upper > 0.0);
  CHECK(c.lower > 0.0);
  // continuity as k approaches K
  const auto n1 = bounds::bounded_decomposition_bounds(2.0 - 1e-7, 2.0, 3, 0.2);
  const auto n2 = bounds::bounded_decomposition_bounds(2.0 - 2e-7, 2.0, 3, 0.2);
  CHECK(rel(n1.lower, n2.lower) < 1e-6);
  CHECK_THROWS_AS(bounds::bounded_decomposition_bounds(2.0, 2.0, 3, 0.2), ValidationError);
  CHECK_THROWS_AS(bounds::bounded_decomposition_bounds(3.0, 2.0, 3, 0.2), ValidationError);
}

TEST_CASE("sandwich report") {
  const auto in = inputs();
  const auto r = bounds::sandwich_report(in);
  CHECK(r.lower_bound.value == doctest::Approx(r.A1.value * 0.17));
  CHECK(r.upper_bound.value == doctest::Approx(r.A2.value * 1.0));
  CHECK(r.lower_bound.value <= r.upper_bound.value);
  CHECK(r.lower_holds);
  CHECK(r.A1.value > 0.0);
  CHECK(r.A2.value > 0.0);
  CHECK(r.R2.value == doctest::Approx(kR2));
  CHECK(r.A1.source == bounds::Source::closed_form);
  CHECK(r.mu0.source == bounds::Source::measured);
  CHECK(r.warnings.empty());

  SUBCASE("json carries every field with 17 digits") {
    const auto j = nlohmann::json::parse(bounds::to_json(r));
    for (const auto& [name, q] : r.fields()) REQUIRE(j.contains(name));
    CHECK(j["A1"]["value"].get<double>() == r.A1.value);
    CHECK(j["buser_upper"]["value"].is_null());
    CHECK(j["lower_holds"].get<bool>());
  }
  SUBCASE("csv row matches header") {
    const auto h = bounds::csv_header(r), row = bounds::csv_row(r);
    CHECK(std::count(h.begin(), h.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(h.rfind("lambda0N_cell,eta,", 0) == 0);
  }
  SUBCASE("vanishing psi0 degenerates with a warning") {
    auto z = in;
    z.psi0_cuff = 0.0;
    const auto rz = bounds::sandwich_report(z);
    CHECK(rz.A1.value == 0.0);
    CHECK(rz.warnings.size() == 1);
  }
  SUBCASE("a lower bound above the measured value is a hard failure") {
    auto bad = in;
    bad.measured_lambda0 = 0.0;
    bad.mu0 = 100.0;
    bad.tol = 0.0;
    CHECK_THROWS_AS(bounds::sandwich_report(bad), NumericalError);
  }
  SUBCASE("missing valence") {
    auto bad = in;
    bad.v = 0;
    CHECK_THROWS_AS(bounds::sandwich_report(bad), ValidationError);
  }
  SUBCASE("core data feeds the Buser bound") {
    auto c = in;
    c.core = std::make_pair(6.0, 2 * kPi);
    CHECK(bounds::sandwich_report(c).buser_upper.value == doctest::Approx(2.2713).epsilon(1e-4));
  }
}
