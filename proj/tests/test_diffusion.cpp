#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hypspec/diffusion.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/fem.hpp"
#include "hypspec/graph.hpp"
#include "hypspec/hyperbolic.hpp"
#include "hypspec/mesh.hpp"

using namespace hypspec;
using diffusion::SpMat;

namespace {

struct PathWalk {
  SpMat K;
  diffusion::WalkModel w;
};

// path on 5 vertices, ends killing
PathWalk path_walk() {
  const auto g = graph::lattice(1, 2);
  PathWalk p;
  p.K = graph::combinatorial_laplacian(g, graph::Dirichlet::none);
  std::vector<int> ends;
  for (int i = 0; i < g.size(); ++i)
    if (g.is_boundary(i)) ends.push_back(i);
  p.w = diffusion::build_walk(p.K, Eigen::VectorXd::Ones(g.size()), ends);
  return p;
}

diffusion::SurvivalOptions opts(double t_max, int n, std::uint64_t seed = 11) {
  diffusion::SurvivalOptions o;
  o.t_max = t_max;
  o.n_paths = n;
  o.seed = seed;
  return o;
}

struct CollarWalk {
  fem::Pencil p;
  diffusion::WalkModel w;
  double lambda_fem = 0.0;
};

CollarWalk collar_walk(double h) {
  const double l = 1.0;
  const double m = hyp::collar_halfwidth(l);
  const auto mesh = mesh::collar_domain(l, -m, m, h);
  CollarWalk c;
  c.p = fem::assemble(mesh);
  const std::vector<fem::BC> bc{fem::BC::dirichlet, fem::BC::dirichlet};
  c.lambda_fem = fem::solve_low_spectrum(mesh, c.p, bc, 1).eigenvalues[0];
  c.w = diffusion::build_walk(c.p, fem::dirichlet_dofs(mesh, bc));
  return c;
}

}  // namespace

TEST_CASE("single state with unit killing decays like exp(-t)") {
  SpMat K(1, 1);
  K.insert(0, 0) = 1.0;
  const auto w = diffusion::build_walk(K, Eigen::VectorXd::Ones(1), {});
  CHECK(w.killing_set.empty());
  CHECK(w.exit_rate[0] == doctest::Approx(1.0));
  CHECK(diffusion::generator_lambda0(w) == doctest::Approx(1.0));
  const auto c = diffusion::survival_curve(w, opts(3.0, 20000));
  for (std::size_t k = 0; k < c.times.size(); ++k)
    CHECK(std::abs(c.survival[k] - std::exp(-c.times[k])) <= 4 * c.stderr_[k] + 1e-12);
  CHECK(std::abs(c.fitted_rate - 1.0) <= 3 * c.ci_half);
}

TEST_CASE("path graph walk recovers 2 - sqrt 2") {
  const auto p = path_walk();
  CHECK(p.w.size() == 3);
  // the middle vertex, away from both ends
  for (const auto& j : p.w.jumps[p.w.start]) CHECK(j.target >= 0);
  const double exact = 2.0 - std::sqrt(2.0);
  CHECK(diffusion::generator_lambda0(p.w) == doctest::Approx(exact).epsilon(1e-10));
  const auto c = diffusion::survival_curve(p.w, opts(10.0, 100000));
  MESSAGE("path rate " << c.fitted_rate << " +- " << c.ci_half);
  CHECK(std::abs(c.fitted_rate - exact) <= 3 * c.ci_half);
  CHECK(c.ci_half < 0.05);
}

TEST_CASE("survival curve is a monotone probability") {
  const auto p = path_walk();
  const auto c = diffusion::survival_curve(p.w, opts(8.0, 5000));
  CHECK(c.survival.front() == 1.0);
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    CHECK(c.survival[k] >= 0.0);
    CHECK(c.survival[k] <= 1.0);
    if (k > 0) CHECK(c.survival[k] <= c.survival[k - 1] + 2 * c.stderr_[k]);
  }
}

TEST_CASE("doubling the paths shrinks the interval by about sqrt 2") {
  const auto p = path_walk();
  const auto a = diffusion::survival_curve(p.w, opts(10.0, 50000, 3));
  const auto b = diffusion::survival_curve(p.w, opts(10.0, 100000, 3));
  const double ratio = a.ci_half / b.ci_half;
  MESSAGE("ci ratio " << ratio);
  CHECK(ratio >= std::sqrt(2.0) * 0.7);
  CHECK(ratio <= std::sqrt(2.0) * 1.3);
}

TEST_CASE("fixed seed gives a bit-identical curve for any thread count") {
  const auto p = path_walk();
  auto o = opts(6.0, 4000, 99);
  const auto a = diffusion::survival_curve(p.w, o);
  const auto b = diffusion::survival_curve(p.w, o);
  o.threads = 3;
  const auto c = diffusion::survival_curve(p.w, o);
  CHECK(a.survival == b.survival);
  CHECK(a.fitted_rate == b.fitted_rate);
  CHECK(a.ci_half == b.ci_half);
  CHECK(a.survival == c.survival);
  CHECK(a.fitted_rate == c.fitted_rate);
  o.seed = 100;
  o.threads = 1;
  CHECK(diffusion::survival_curve(p.w, o).survival != a.survival);
}

TEST_CASE("too few survivors is an error") {
  const auto p = path_walk();
  CHECK_THROWS_AS(diffusion::survival_curve(p.w, opts(40.0, 1000)), NumericalError);
  CHECK_THROWS_AS(diffusion::survival_curve(p.w, opts(4.0, 100)), ValidationError);
}

TEST_CASE("harmonic extension at lambda = 0 on a path is linear") {
  const auto p = path_walk();
  REQUIRE(p.w.killing_set.size() == 2);
  const std::vector<double> bv{0.0, 1.0};
  const auto exact = diffusion::harmonic_oracle(p.w, p.K, 0.0, bv);
  std::vector<double> sorted(exact.begin(), exact.end());
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sorted[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sorted[2] == doctest::Approx(0.75).epsilon(1e-12));
  diffusion::HarmonicOptions ho;
  ho.paths_per_state = 20000;
  const auto h = diffusion::lambda_harmonic_extend(p.w, 0.0, bv, std::nullopt, ho);
  for (int s = 0; s < p.w.size(); ++s)
    CHECK(std::abs(h.value[s] - exact[s]) <= 3 * h.stderr_[s] + 1e-12);
}

TEST_CASE("harmonic extension guards integrability") {
  const auto p = path_walk();
  const auto c = diffusion::survival_curve(p.w, opts(10.0, 20000));
  const std::vector<double> bv{1.0, 1.0};
  CHECK_THROWS_AS(diffusion::lambda_harmonic_extend(p.w, 0.1, bv, std::nullopt, {}),
                  ValidationError);
  CHECK_THROWS_AS(diffusion::lambda_harmonic_extend(p.w, c.fitted_rate, bv, c, {}),
                  ValidationError);
  CHECK_THROWS_AS(diffusion::lambda_harmonic_extend(p.w, 0.0, {1.0}, std::nullopt, {}),
                  ValidationError);
}

TEST_CASE("clipping of positive couplings") {
  SpMat K(3, 3);
  K.insert(0, 0) = 1.0;
  K.insert(0, 1) = -1.5;
  K.insert(1, 0) = -1.5;
  K.insert(1, 1) = 2.0;
  K.insert(0, 2) = 0.5;
  K.insert(2, 0) = 0.5;
  K.insert(1, 2) = -0.5;
  K.insert(2, 1) = -0.5;
  K.insert(2, 2) = 0.0;
  const Eigen::VectorXd m = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(diffusion::build_walk(K, m, {2}, false), NumericalError);
  const auto w = diffusion::build_walk(K, m, {2}, true);
  CHECK(w.clipped == 1);
  // row sums survive: state 0 loses its coupling to 2 and keeps sum zero
  CHECK(w.exit_rate[0] == doctest::Approx(1.5));
  CHECK(w.K_free.coeff(0, 0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(diffusion::build_walk(K, -m, {2}), ValidationError);
}

TEST_CASE("collar mesh walk") {
  const auto c = collar_walk(0.2);
  const double gen = diffusion::generator_lambda0(c.w);
  MESSAGE("collar states " << c.w.size() << " clipped " << c.w.clipped << " generator " << gen
                           << " fem " << c.lambda_fem);
  CHECK(std::abs(gen - c.lambda_fem) / c.lambda_fem < 0.05);
  auto o = opts(4.0, 100000, 5);
  const auto s = diffusion::survival_curve(c.w, o);
  MESSAGE("collar rate " << s.fitted_rate << " +- " << s.ci_half);
  CHECK(std::abs(s.fitted_rate - gen) <= 3 * s.ci_half);
  CHECK(std::abs(s.fitted_rate - c.lambda_fem) / c.lambda_fem < 0.05);

  SUBCASE("lambda-harmonic extension at half the rate") {
    const double lambda = 0.5 * s.fitted_rate;
    const std::vector<double> bv(c.w.killing_set.size(), 1.0);
    diffusion::HarmonicOptions ho;
    ho.paths_per_state = 2000;
    const auto h = diffusion::lambda_harmonic_extend(c.w, lambda, bv, s, ho);
    const auto exact = diffusion::harmonic_oracle(c.w, c.p.K, lambda, bv);
    int within = 0;
    for (int k = 0; k < c.w.size(); ++k) {
      CHECK(h.value[k] > 0.0);
      if (std::abs(h.value[k] - exact[k]) <= 3 * h.stderr_[k]) ++within;
    }
    MESSAGE("within 3 sigma: " << within << " of " << c.w.size());
    CHECK(within >= 0.95 * c.w.size());
  }
}

TEST_CASE("csv and fit summary") {
  diffusion::SurvivalCurve c;
  c.times = {0.0};
  c.survival = {1.0};
  c.stderr_ = {0.0};
  c.fitted_rate = 0.5;
  c.ci_half = 0.1;
  c.n_paths = 1000;
  c.seed = 4;
  CHECK(diffusion::survival_csv(c) == "t,survival,stderr\n0,1,0\n");
  CHECK(diffusion::fit_summary(c).find("\"n_paths\": 1000, \"seed\": 4") != std::string::npos);
}
