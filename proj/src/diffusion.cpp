#include "hypspec/diffusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/SparseLU>

#include "hypspec/eigensolver.hpp"
#include "hypspec/errors.hpp"

namespace hypspec::diffusion {

namespace {

constexpr double kRowTol = 1e-10;

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(s);
}

struct Exit {
  double tau;
  int target;  // as in Jump
};

Exit run(const WalkModel& w, int state, double t_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double t = 0.0;
  for (;;) {
    const double q = w.exit_rate[state];
    if (q <= 0.0) return {std::numeric_limits<double>::infinity(), state};
    t += -std::log1p(-U(rng)) / q;
    if (t > t_max) return {std::numeric_limits<double>::infinity(), state};
    const auto& J = w.jumps[state];
    const double u = U(rng) * J.back().cumulative;
    auto it = std::upper_bound(J.begin(), J.end(), u,
                               [](double x, const Jump& j) { return x < j.cumulative; });
    if (it == J.end()) --it;
    if (it->target < 0) return {t, it->target};
    state = it->target;
  }
}

template <class F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int k = 0; k < threads; ++k) {
    const int lo = k * chunk, hi = std::min(n, lo + chunk);
    if (lo < hi) pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

// weighted least squares of log S against t; weights n S / (1 - S)
double fit_rate(const std::vector<double>& t, const std::vector<long>& alive, long n,
                std::size_t first) {
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  int used = 0;
  for (std::size_t k = first; k < t.size(); ++k) {
    if (alive[k] <= 0 || alive[k] >= n) continue;
    const double S = static_cast<double>(alive[k]) / n;
    const double wgt = n * S / (1.0 - S);
    const double y = std::log(S);
    sw += wgt;
    st += wgt * t[k];
    sy += wgt * y;
    stt += wgt * t[k] * t[k];
    sty += wgt * t[k] * y;
    ++used;
  }
  if (used < 2) throw NumericalError("insufficient tail: fewer than two usable points");
  const double den = sw * stt - st * st;
  if (den <= 0.0) throw NumericalError("insufficient tail: degenerate fit window");
  return -(sw * sty - st * sy) / den;
}

}  // namespace

WalkModel build_walk(const SpMat& K, const Eigen::VectorXd& lumped_mass,
                     const std::vector<int>& dirichlet, bool clip) {
  const int n = static_cast<int>(K.rows());
  require(K.cols() == n && lumped_mass.size() == n, "walk: stiffness and mass sizes differ");
  std::vector<int> index(n, 0);
  WalkModel w;
  for (int d : dirichlet) {
    require(d >= 0 && d < n, "walk: dirichlet state out of range");
    if (index[d] == 0) {
      index[d] = -1 - static_cast<int>(w.killing_set.size());
      w.killing_set.push_back(d);
    }
  }
  for (int i = 0; i < n; ++i)
    if (index[i] == 0) {
      index[i] = static_cast<int>(w.free_states.size()) + 1;
      w.free_states.push_back(i);
    }
  require(!w.free_states.empty(), "walk: no free states");
  const int N = w.size();
  auto walk_index = [&](int i) { return index[i] > 0 ? index[i] - 1 : index[i]; };

  SpMat Kr = K;
  Kr.makeCompressed();
  std::vector<Eigen::Triplet<double>> trip;
  w.mass.resize(N);
  w.exit_rate.assign(N, 0.0);
  w.jumps.resize(N);
  double scale = 0.0;
  for (int k = 0; k < Kr.outerSize(); ++k)
    for (SpMat::InnerIterator it(Kr, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  // row access on a column-major symmetric matrix: column i
  for (int s = 0; s < N; ++s) {
    const int i = w.free_states[s];
    const double m = lumped_mass[i];
    require(m > 0.0, "walk: lumped mass must be positive");
    w.mass[s] = m;
    double diag = 0.0, off = 0.0, dropped = 0.0;
    double cum = 0.0;
    for (SpMat::InnerIterator it(Kr, i); it; ++it) {
      const int j = static_cast<int>(it.row());
      const double v = it.value();
      if (j == i) {
        diag = v;
        continue;
      }
      if (v > 0.0) {
        if (v > kRowTol * scale) {
          if (!clip)
            throw NumericalError("walk: positive off-diagonal stiffness (non-Delaunay triangle)");
          ++w.clipped;
        }
        dropped += v;
        continue;
      }
      if (v == 0.0) continue;
      off += -v;
      cum += -v / m;
      const int t = walk_index(j);
      w.jumps[s].push_back({t, cum});
      if (t >= 0) trip.emplace_back(s, t, v);
    }
    // clipping keeps row sums, so the clipped diagonal is diag + dropped;
    // whatever that row sum leaves over is killing without a boundary state
    const double cemetery = (diag + dropped) - off;
    if (cemetery < -kRowTol * std::max(1.0, diag))
      throw NumericalError("walk: generator is not row-consistent (negative killing)");
    if (cemetery > kRowTol * std::max(1.0, diag)) {
      cum += cemetery / m;
      w.jumps[s].push_back({kCemetery, cum});
    }
    w.exit_rate[s] = cum;
    trip.emplace_back(s, s, diag + dropped);
  }
  if (w.clipped > 0)
    std::cerr << "warning: clipped " << w.clipped
              << " positive off-diagonal stiffness entries in the walk generator\n";
  w.K_free.resize(N, N);
  w.K_free.setFromTriplets(trip.begin(), trip.end());
  w.K_free.makeCompressed();

  // start as deep as possible: most jumps away from any killing
  std::vector<int> depth(N, -1);
  std::queue<int> q;
  for (int s = 0; s < N; ++s)
    for (const auto& j : w.jumps[s])
      if (j.target < 0) {
        depth[s] = 0;
        q.push(s);
        break;
      }
  while (!q.empty()) {
    const int s = q.front();
    q.pop();
    for (const auto& j : w.jumps[s])
      if (j.target >= 0 && depth[j.target] < 0) {
        depth[j.target] = depth[s] + 1;
        q.push(j.target);
      }
  }
  w.start = static_cast<int>(std::max_element(depth.begin(), depth.end()) - depth.begin());
  return w;
}

WalkModel build_walk(const fem::Pencil& p, const std::vector<int>& dirichlet, bool clip) {
  const Eigen::VectorXd lumped = p.M * Eigen::VectorXd::Ones(p.size());
  return build_walk(p.K, lumped, dirichlet, clip);
}

double generator_lambda0(const WalkModel& w) {
  SpMat M(w.size(), w.size());
  std::vector<Eigen::Triplet<double>> t;
  for (int s = 0; s < w.size(); ++s) t.emplace_back(s, s, w.mass[s]);
  M.setFromTriplets(t.begin(), t.end());
  eig::Options o;
  o.count = 1;
  return eig::smallest(w.K_free, M, o).values[0];
}

SurvivalCurve survival_curve(const WalkModel& w, const SurvivalOptions& opts) {
  require(opts.t_max > 0.0, "survival: t_max must be positive");
  require(opts.n_paths >= 1000, "survival: need at least 1000 paths");
  require(opts.n_times >= 3, "survival: need at least 3 grid times");
  require(opts.batches >= 16, "survival: need at least 16 batches");
  require(opts.window_start > 0.0 && opts.window_start < 1.0, "survival: window must lie in (0, 1)");
  const int n = opts.n_paths;
  std::vector<double> tau(n);
  parallel_for(n, opts.threads, [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) {
      auto rng = path_rng(opts.seed, static_cast<std::uint64_t>(p));
      tau[p] = run(w, w.start, opts.t_max, rng).tau;
    }
  });

  SurvivalCurve c;
  c.n_paths = n;
  c.seed = opts.seed;
  const int T = opts.n_times;
  for (int k = 0; k < T; ++k) c.times.push_back(opts.t_max * k / (T - 1));
  const int B = opts.batches;
  std::vector<std::vector<long>> alive(B, std::vector<long>(T, 0));
  std::vector<long> batch_n(B, 0);
  for (int p = 0; p < n; ++p) {
    const int b = static_cast<int>(static_cast<long>(p) * B / n);
    ++batch_n[b];
    // grid points strictly before tau
    const auto last = std::lower_bound(c.times.begin(), c.times.end(), tau[p]) - c.times.begin();
    for (long k = 0; k < last; ++k) ++alive[b][k];
  }
  std::vector<long> total(T, 0);
  for (int b = 0; b < B; ++b)
    for (int k = 0; k < T; ++k) total[k] += alive[b][k];
  for (int k = 0; k < T; ++k) {
    const double S = static_cast<double>(total[k]) / n;
    c.survival.push_back(S);
    c.stderr_.push_back(std::sqrt(S * (1.0 - S) / n));
  }
  if (total.back() < 50) {
    std::ostringstream os;
    os << "insufficient tail: " << total.back() << " of " << n << " paths survive to t = "
       << opts.t_max << "; use more paths or a smaller t_max";
    throw NumericalError(os.str());
  }
  const auto first = static_cast<std::size_t>(
      std::lower_bound(c.times.begin(), c.times.end(), opts.window_start * opts.t_max) -
      c.times.begin());
  c.fitted_rate = fit_rate(c.times, total, n, first);

  // delete-one-batch jackknife
  std::vector<double> theta(B);
  for (int b = 0; b < B; ++b) {
    std::vector<long> rest(T);
    for (int k = 0; k < T; ++k) rest[k] = total[k] - alive[b][k];
    theta[b] = fit_rate(c.times, rest, n - batch_n[b], first);
  }
  double mean = 0.0;
  for (double x : theta) mean += x / B;
  double var = 0.0;
  for (double x : theta) var += (x - mean) * (x - mean);
  var *= (B - 1.0) / B;
  c.ci_half = 1.96 * std::sqrt(var);
  return c;
}

HarmonicEstimate lambda_harmonic_extend(const WalkModel& w, double lambda,
                                        const std::vector<double>& boundary_values,
                                        const std::optional<SurvivalCurve>& curve,
                                        const HarmonicOptions& opts) {
  require(boundary_values.size() == w.killing_set.size(),
          "harmonic: one boundary value per killing state");
  require(opts.paths_per_state >= 1, "harmonic: need paths");
  if (lambda > 0.0) {
    require(curve.has_value(), "harmonic: positive lambda needs a fitted survival rate");
    if (!(lambda < curve->fitted_rate - 3.0 * curve->ci_half))
      throw ValidationError("harmonic: lambda must stay below fitted_rate - 3 CI for integrability");
  }
  const int N = w.size();
  const int P = opts.paths_per_state;
  HarmonicEstimate h;
  h.value.assign(N, 0.0);
  h.stderr_.assign(N, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  std::atomic<bool> overflow = false, trapped = false;
  parallel_for(N, opts.threads, [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      double sum = 0.0, sum2 = 0.0;
      for (int p = 0; p < P; ++p) {
        auto rng = path_rng(opts.seed, static_cast<std::uint64_t>(s) * P + p);
        const auto e = run(w, s, inf, rng);
        double val = 0.0;
        if (e.target != kCemetery) {
          if (!std::isfinite(e.tau)) {
            trapped = true;
            break;
          }
          const double expo = lambda * e.tau;
          if (expo > 700.0) {
            overflow = true;
            break;
          }
          val = std::exp(expo) * boundary_values[-1 - e.target];
        }
        sum += val;
        sum2 += val * val;
      }
      const double mean = sum / P;
      h.value[s] = mean;
      h.stderr_[s] = std::sqrt(std::max(0.0, sum2 / P - mean * mean) / P);
    }
  });
  if (trapped) throw NumericalError("harmonic: a path never exits");
  if (overflow) throw NumericalError("harmonic: exponential weight overflow");
  return h;
}

Eigen::VectorXd harmonic_oracle(const WalkModel& w, const SpMat& K_full, double lambda,
                                const std::vector<double>& boundary_values) {
  require(boundary_values.size() == w.killing_set.size(),
          "harmonic: one boundary value per killing state");
  const int N = w.size();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  std::vector<int> pos(K_full.rows(), -1);
  for (int s = 0; s < N; ++s) pos[w.free_states[s]] = s;
  for (std::size_t k = 0; k < w.killing_set.size(); ++k) {
    const int j = w.killing_set[k];
    for (SpMat::InnerIterator it(K_full, j); it; ++it) {
      const int i = pos[it.row()];
      // clipped couplings carry no walk transitions
      if (i >= 0 && it.value() < 0.0) rhs[i] -= it.value() * boundary_values[k];
    }
  }
  SpMat A = w.K_free;
  for (int s = 0; s < N; ++s) A.coeffRef(s, s) -= lambda * w.mass[s];
  Eigen::SparseLU<SpMat> lu(A);
  if (lu.info() != Eigen::Success) throw NumericalError("harmonic oracle: singular system");
  return lu.solve(rhs);
}

std::string survival_csv(const SurvivalCurve& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,survival,stderr\n";
  for (std::size_t k = 0; k < c.times.size(); ++k)
    os << c.times[k] << ',' << c.survival[k] << ',' << c.stderr_[k] << '\n';
  return os.str();
}

std::string fit_summary(const SurvivalCurve& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "{\"rate\": " << c.fitted_rate << ", \"ci_low\": " << c.ci_low()
     << ", \"ci_high\": " << c.ci_high() << ", \"n_paths\": " << c.n_paths
     << ", \"seed\": " << c.seed << "}\n";
  return os.str();
}

}  // namespace hypspec::diffusion
