#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

// Closed-form constants of the spectral sandwich and its pinching and
// bounded-decomposition variants.
namespace hypspec::bounds {

/// R_n = sqrt(2 sqrt2 n (n-1)).
double buser_constant(int n);
/// R_n * boundary_length / volume.
double buser_upper_bound(double boundary_length, double volume, int n = 2);

/// (v-1)(1/m(l)^2 + lambda0N)
double A2(int v, double l, double lambda0N);

/// lambda1 * l * sinh(m(l)) / 4
double A_doubleprime(double lambda1, double l);

/// Collar energy ratio (2 arctan(e^R) - pi/2) / U(R)^2 with U(R) = arcsin(tanh R).
double collar_ratio(double R);

struct TripleprimeResult {
  double value = 0.0;      // (l / 8 pi) * min ratio
  double minimizer = 0.0;  // argmin over (0, m(l)]
  double min_ratio = 0.0;
};
/// Golden-section minimisation of collar_ratio over (0, m(l)].
TripleprimeResult A_tripleprime(double l, double tol = 1e-10);

enum class Combine { max, min };

/// A = A' / (2 pi), A' = combine(A'', A''') * psi0_cuff^2.
double collar_constant(double lambda1, double l, double psi0_cuff, Combine c = Combine::max);

/// eta / (1 + 1/lambda1) * A
double A1(double eta, double lambda1, double l, double psi0_cuff, Combine c = Combine::max);

enum class LowerVariant { printed, analytic, conservative };

struct DecompositionCoefficients {
  double upper = 0.0;
  double lower = 0.0;           // the selected variant
  double lower_printed = 0.0;   // eta / (1 + K/(k eta))
  double lower_analytic = 0.0;  // printed * collar constant in terms of (eta, k, K)
};
DecompositionCoefficients bounded_decomposition_bounds(double k, double K, int v, double eta,
                                                       LowerVariant variant = LowerVariant::conservative);

enum class Source { measured, closed_form };
std::string to_string(Source s);

struct Quantity {
  double value = 0.0;
  Source source = Source::closed_form;
};

struct SandwichInputs {
  double lambda0N_cell = 0.0;
  double lambda1 = 0.0;
  double psi0_cuff = 0.0;
  double l = 0.0;
  int v = 0;
  double mu0 = 0.0;
  double h_lower = 0.0;
  double h_upper = 0.0;
  double measured_lambda0 = 0.0;               // Dirichlet approximant
  std::optional<double> test_quotient;         // upper test-function quotient
  std::optional<std::pair<double, double>> core;  // (boundary length, volume)
  double tol = 0.05;
  Combine combine = Combine::max;
};

struct BoundReport {
  Quantity lambda0N_cell, eta, lambda1, psi0_cuff, l, v, m_l, R2, A1, A2, A_doubleprime,
      A_tripleprime, mu0, h_lower, h_upper, lower_bound, upper_bound, buser_upper,
      measured_lambda0, test_quotient;
  bool lower_holds = true;
  bool upper_holds = true;
  std::vector<std::string> warnings;

  std::vector<std::pair<std::string, Quantity>> fields() const;
};

/// Throws NumericalError when the lower bound exceeds the measured
/// approximant by more than the tolerance.
BoundReport sandwich_report(const SandwichInputs& in);

std::string to_json(const BoundReport& r);
std::string csv_header(const BoundReport& r);
std::string csv_row(const BoundReport& r);

}  // namespace hypspec::bounds
