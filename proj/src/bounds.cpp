#include "hypspec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "hypspec/config.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/hyperbolic.hpp"

namespace hypspec::bounds {

namespace {
constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}
}  // namespace

double buser_constant(int n) {
  require(n >= 2, "Buser constant needs n >= 2");
  return std::sqrt(2.0 * std::sqrt(2.0) * n * (n - 1.0));
}

double buser_upper_bound(double boundary_length, double volume, int n) {
  require(boundary_length >= 0.0, "boundary length must be nonnegative");
  require(volume > 0.0, "volume must be positive");
  return buser_constant(n) * boundary_length / volume;
}

double A2(int v, double l, double lambda0N) {
  require(v >= 2 && l > 0.0 && lambda0N >= kTol.eigen_floor, "A2: need v >= 2, l > 0, lambda0N >= 0");
  const double m = hyp::collar_halfwidth(l);
  return (v - 1) * (1.0 / (m * m) + std::max(lambda0N, 0.0));
}

double A_doubleprime(double lambda1, double l) {
  require(l > 0.0, "cuff length must be positive");
  return lambda1 * 0.25 * l * std::sinh(hyp::collar_halfwidth(l));
}

double collar_ratio(double R) {
  require(R > 0.0, "collar ratio needs R > 0");
  const double u = std::asin(std::tanh(R));
  return (2.0 * std::atan(std::exp(R)) - 0.5 * kPi) / (u * u);
}

TripleprimeResult A_tripleprime(double l, double tol) {
  require(l > 0.0, "cuff length must be positive");
  const double m = hyp::collar_halfwidth(l);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = m;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = collar_ratio(x1), f2 = collar_ratio(x2);
  while (b - a > tol) {
    if (f1 > f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = collar_ratio(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = collar_ratio(x1);
    }
  }
  TripleprimeResult r;
  r.minimizer = 0.5 * (a + b);
  r.min_ratio = collar_ratio(r.minimizer);
  if (const double fm = collar_ratio(m); fm <= r.min_ratio) {
    r.minimizer = m;
    r.min_ratio = fm;
  }
  r.value = l / (8.0 * kPi) * r.min_ratio;
  return r;
}

double collar_constant(double lambda1, double l, double psi0_cuff, Combine c) {
  const double a2 = A_doubleprime(lambda1, l);
  const double a3 = A_tripleprime(l).value;
  const double pick = c == Combine::max ? std::max(a2, a3) : std::min(a2, a3);
  return pick * psi0_cuff * psi0_cuff / (2.0 * kPi);
}

double A1(double eta, double lambda1, double l, double psi0_cuff, Combine c) {
  require(eta >= 0.0 && lambda1 > 0.0, "A1: need eta >= 0 and lambda1 > 0");
  return eta / (1.0 + 1.0 / lambda1) * collar_constant(lambda1, l, psi0_cuff, c);
}

DecompositionCoefficients bounded_decomposition_bounds(double k, double K, int v, double eta,
                                                       LowerVariant variant) {
  require(k > 0.0 && K > 0.0, "k and K must be positive");
  require(k < K, "bounded decomposition needs k < K");
  require(v >= 2, "valence must be at least 2");
  require(eta > 0.0, "spectral gap must be positive");
  const double m = hyp::collar_halfwidth(K);
  DecompositionCoefficients d;
  d.upper = K * (v - 1) / (m * m);
  d.lower_printed = eta / (1.0 + K / (k * eta));
  const double a2 = eta * k * std::sinh(m) / (4.0 * K);
  const double a3 = k / (8.0 * kPi * hyp::gudermannian(m) * K);
  d.lower_analytic = d.lower_printed * std::min(a2, a3) / (2.0 * kPi);
  switch (variant) {
    case LowerVariant::printed: d.lower = d.lower_printed; break;
    case LowerVariant::analytic: d.lower = d.lower_analytic; break;
    case LowerVariant::conservative: d.lower = std::min(d.lower_printed, d.lower_analytic); break;
  }
  return d;
}

std::string to_string(Source s) { return s == Source::measured ? "measured" : "closed_form"; }

std::vector<std::pair<std::string, Quantity>> BoundReport::fields() const {
  return {{"lambda0N_cell", lambda0N_cell}, {"eta", eta}, {"lambda1", lambda1},
          {"psi0_cuff", psi0_cuff},         {"l", l},     {"v", v},
          {"m_l", m_l},                     {"R2", R2},   {"A1", A1},
          {"A2", A2},                       {"A_doubleprime", A_doubleprime},
          {"A_tripleprime", A_tripleprime}, {"mu0", mu0}, {"h_lower", h_lower},
          {"h_upper", h_upper},             {"lower_bound", lower_bound},
          {"upper_bound", upper_bound},     {"buser_upper", buser_upper},
          {"measured_lambda0", measured_lambda0}, {"test_quotient", test_quotient}};
}

BoundReport sandwich_report(const SandwichInputs& in) {
  require(in.v >= 2, "report: valence missing");
  require(in.l > 0.0, "report: cuff length missing");
  require(in.lambda1 > 0.0, "report: lambda1 missing");
  const auto M = Source::measured, C = Source::closed_form;
  BoundReport r;
  r.lambda0N_cell = {in.lambda0N_cell, M};
  r.lambda1 = {in.lambda1, M};
  r.eta = {in.lambda1 - in.lambda0N_cell, M};
  r.psi0_cuff = {in.psi0_cuff, M};
  r.l = {in.l, C};
  r.v = {static_cast<double>(in.v), C};
  r.m_l = {hyp::collar_halfwidth(in.l), C};
  r.R2 = {buser_constant(2), C};
  r.A_doubleprime = {A_doubleprime(in.lambda1, in.l), C};
  r.A_tripleprime = {A_tripleprime(in.l).value, C};
  r.A1 = {A1(r.eta.value, in.lambda1, in.l, in.psi0_cuff, in.combine), C};
  r.A2 = {A2(in.v, in.l, in.lambda0N_cell), C};
  r.mu0 = {in.mu0, M};
  r.h_lower = {in.h_lower, M};
  r.h_upper = {in.h_upper, M};
  r.lower_bound = {in.lambda0N_cell + r.A1.value * in.mu0, C};
  r.upper_bound = {in.lambda0N_cell + r.A2.value * in.h_upper, C};
  r.measured_lambda0 = {in.measured_lambda0, M};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.buser_upper = {in.core ? buser_upper_bound(in.core->first, in.core->second) : nan, C};
  r.test_quotient = {in.test_quotient.value_or(nan), M};
  if (in.psi0_cuff == 0.0) r.warnings.push_back("psi0 vanishes on the cuffs: A1 degenerates to 0");
  if (r.eta.value <= 0.0) r.warnings.push_back("spectral gap is not positive");
  r.lower_holds = r.lower_bound.value <= in.measured_lambda0 + in.tol;
  if (in.test_quotient) r.upper_holds = *in.test_quotient <= r.upper_bound.value + in.tol;
  if (!r.lower_holds)
    throw NumericalError("lower bound " + fmt(r.lower_bound.value) +
                         " exceeds the measured Dirichlet approximant " +
                         fmt(in.measured_lambda0));
  return r;
}

std::string to_json(const BoundReport& r) {
  std::ostringstream os;
  os << "{\n";
  for (const auto& [name, q] : r.fields())
    os << "  \"" << name << "\": {\"value\": " << (std::isfinite(q.value) ? fmt(q.value) : "null")
       << ", \"source\": \"" << to_string(q.source) << "\"},\n";
  os << "  \"lower_holds\": " << (r.lower_holds ? "true" : "false") << ",\n";
  os << "  \"upper_holds\": " << (r.upper_holds ? "true" : "false") << ",\n";
  os << "  \"warnings\": " << nlohmann::json(r.warnings).dump() << "\n}\n";
  return os.str();
}

std::string csv_header(const BoundReport& r) {
  std::string s;
  for (const auto& [name, q] : r.fields()) s += (s.empty() ? "" : ",") + name;
  return s + ",lower_holds,upper_holds\n";
}

std::string csv_row(const BoundReport& r) {
  std::string s;
  bool first = true;
  for (const auto& [name, q] : r.fields()) {
    s += (first ? "" : ",") + (std::isfinite(q.value) ? fmt(q.value) : std::string("nan"));
    first = false;
  }
  return s + "," + (r.lower_holds ? "1" : "0") + "," + (r.upper_holds ? "1" : "0") + "\n";
}

}  // namespace hypspec::bounds
