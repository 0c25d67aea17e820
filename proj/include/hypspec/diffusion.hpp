#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hypspec/fem.hpp"

// Continuous-time Markov chain surrogate of Brownian motion on a discretised
// surface: survival decay and lambda-harmonic extension by exit averaging.
namespace hypspec::diffusion {

using SpMat = Eigen::SparseMatrix<double>;

struct Jump {
  int target;   // free state index, or -1 - k for killing at Dirichlet state k, or kCemetery
  double cumulative;
};
inline constexpr int kCemetery = -1000000000;

struct WalkModel {
  std::vector<int> free_states;   // original index per walk state
  std::vector<int> killing_set;   // original indices of Dirichlet states
  std::vector<double> mass;       // lumped mass per walk state
  std::vector<double> exit_rate;  // total jump rate per walk state
  std::vector<std::vector<Jump>> jumps;
  SpMat K_free;                   // clipped stiffness on the free states
  int clipped = 0;                // positive off-diagonal entries dropped
  int start = 0;                  // walk state of the survival runs
  std::uint64_t seed = 1;

  int size() const { return static_cast<int>(free_states.size()); }
};

/// Rates i -> j = -K_ij / m_i; positive off-diagonal entries are dropped
/// (diagonal adjusted to keep row sums) when `clip`, else rejected.
WalkModel build_walk(const SpMat& K, const Eigen::VectorXd& lumped_mass,
                     const std::vector<int>& dirichlet, bool clip = true);
WalkModel build_walk(const fem::Pencil& p, const std::vector<int>& dirichlet, bool clip = true);

/// Smallest eigenvalue of the chain's generator (with killing).
double generator_lambda0(const WalkModel& w);

struct SurvivalOptions {
  double t_max = 1.0;
  int n_paths = 100000;
  int n_times = 101;
  int batches = 32;
  double window_start = 0.5;  // fraction of t_max
  int threads = 1;
  std::uint64_t seed = 1;
};

struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> survival;
  std::vector<double> stderr_;
  int n_paths = 0;
  std::uint64_t seed = 0;
  double fitted_rate = 0.0;
  double ci_half = 0.0;
  double ci_low() const { return fitted_rate - ci_half; }
  double ci_high() const { return fitted_rate + ci_half; }
};

SurvivalCurve survival_curve(const WalkModel& w, const SurvivalOptions& opts);

struct HarmonicOptions {
  int paths_per_state = 4000;
  int threads = 1;
  std::uint64_t seed = 7;
};

struct HarmonicEstimate {
  std::vector<double> value;   // per walk state
  std::vector<double> stderr_;
};

/// f(x) = E_x(e^{lambda tau} f(X_tau)) with boundary data on the killing set
/// (cemetery value 0). Positive lambda needs a survival curve with
/// lambda < rate - 3 CI.
HarmonicEstimate lambda_harmonic_extend(const WalkModel& w, double lambda,
                                        const std::vector<double>& boundary_values,
                                        const std::optional<SurvivalCurve>& curve,
                                        const HarmonicOptions& opts);

/// Direct solve of (K - lambda M) f = 0 on the free states with the same data.
Eigen::VectorXd harmonic_oracle(const WalkModel& w, const SpMat& K_full, double lambda,
                                const std::vector<double>& boundary_values);

std::string survival_csv(const SurvivalCurve& c);
std::string fit_summary(const SurvivalCurve& c);

}  // namespace hypspec::diffusion
