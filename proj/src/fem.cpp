#include "hypspec/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "hypspec/config.hpp"
#include "hypspec/errors.hpp"

namespace hypspec::fem {

using mesh::DiskMesh;
using mesh::Point;

namespace {

struct QuadPoint {
  double l0, l1, l2, w;
};

const std::vector<QuadPoint>& rule(Quadrature q) {
  static const std::vector<QuadPoint> three{
      {0.5, 0.5, 0.0, 1.0 / 3}, {0.0, 0.5, 0.5, 1.0 / 3}, {0.5, 0.0, 0.5, 1.0 / 3}};
  static const std::vector<QuadPoint> seven = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    return std::vector<QuadPoint>{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225}, {a1, b1, b1, w1},
                                  {b1, a1, b1, w1}, {b1, b1, a1, w1}, {a2, b2, b2, w2},
                                  {b2, a2, b2, w2}, {b2, b2, a2, w2}};
  }();
  return q == Quadrature::three_point ? three : seven;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void assemble_range(const DiskMesh& m, const std::vector<QuadPoint>& qr, std::size_t begin,
                    std::size_t end, Triplets& k, Triplets& mm) {
  for (std::size_t t = begin; t < end; ++t) {
    const auto& tri = m.triangles[t];
    const Point p[3] = {m.points[tri[0]], m.points[tri[1]], m.points[tri[2]]};
    const int d[3] = {m.dof[tri[0]], m.dof[tri[1]], m.dof[tri[2]]};
    double b[3], c[3];
    for (int i = 0; i < 3; ++i) {
      b[i] = p[(i + 1) % 3].imag() - p[(i + 2) % 3].imag();
      c[i] = p[(i + 2) % 3].real() - p[(i + 1) % 3].real();
    }
    const double area = 0.5 * (b[0] * c[1] - b[1] * c[0]);
    if (!(area > kTol.min_triangle_area)) throw NumericalError("assembly: degenerate triangle");
    double me[3][3] = {};
    for (const auto& q : qr) {
      const Point z = q.l0 * p[0] + q.l1 * p[1] + q.l2 * p[2];
      const double f = disk::conformal_factor(z);
      const double lam[3] = {q.l0, q.l1, q.l2};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) me[i][j] += q.w * area * f * f * lam[i] * lam[j];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        k.emplace_back(d[i], d[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
        mm.emplace_back(d[i], d[j], me[i][j]);
      }
  }
}

}  // namespace

std::string to_string(BC bc) { return bc == BC::neumann ? "neumann" : "dirichlet"; }

Pencil assemble(const DiskMesh& m, const AssemblyOptions& opts) {
  require(m.dof_count > 0 && !m.triangles.empty(), "assembly: empty mesh");
  const auto& qr = rule(opts.quadrature);
  const std::size_t nt = m.triangles.size();
  const int threads = std::clamp(opts.threads, 1, 64);
  std::vector<Triplets> k(threads), mm(threads);
  const std::size_t chunk = (nt + threads - 1) / threads;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    const std::size_t b = std::min(nt, w * chunk), e = std::min(nt, b + chunk);
    auto job = [&, w, b, e] {
      try {
        assemble_range(m, qr, b, e, k[w], mm[w]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (threads == 1) job();
    else pool.emplace_back(job);
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  Triplets K, M;
  for (int w = 0; w < threads; ++w) {
    K.insert(K.end(), k[w].begin(), k[w].end());
    M.insert(M.end(), mm[w].begin(), mm[w].end());
  }
  Pencil p;
  p.K.resize(m.dof_count, m.dof_count);
  p.M.resize(m.dof_count, m.dof_count);
  p.K.setFromTriplets(K.begin(), K.end());
  p.M.setFromTriplets(M.begin(), M.end());
  return p;
}

std::vector<int> dirichlet_dofs(const DiskMesh& m, const std::vector<BC>& per_loop) {
  require(per_loop.size() == m.loops.size(), "one boundary condition per loop required");
  std::vector<char> mark(m.dof_count, 0);
  for (std::size_t i = 0; i < per_loop.size(); ++i)
    if (per_loop[i] == BC::dirichlet)
      for (int d : m.loops[i].dofs) mark[d] = 1;
  std::vector<int> out;
  for (int d = 0; d < m.dof_count; ++d)
    if (mark[d]) out.push_back(d);
  return out;
}

SpectralResult solve_low_spectrum(const Pencil& p, const std::vector<int>& dirichlet, int count,
                                  const eig::Options& opts) {
  require(count >= 1, "count must be at least one");
  const int n = p.size();
  std::vector<int> free_index(n, 0);
  for (int d : dirichlet) {
    require(d >= 0 && d < n, "Dirichlet dof out of range");
    free_index[d] = -1;
  }
  int nf = 0;
  for (int& f : free_index)
    if (f == 0) f = nf++;
  require(count <= nf, "more eigenpairs requested than free unknowns");

  auto restrict = [&](const SpMat& A) {
    Triplets t;
    t.reserve(A.nonZeros());
    for (int c = 0; c < A.outerSize(); ++c)
      for (SpMat::InnerIterator it(A, c); it; ++it) {
        const int i = free_index[it.row()], j = free_index[it.col()];
        if (i >= 0 && j >= 0) t.emplace_back(i, j, it.value());
      }
    SpMat out(nf, nf);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  const SpMat Kf = restrict(p.K), Mf = restrict(p.M);
  auto o = opts;
  o.count = count;
  const auto pairs = eig::smallest(Kf, Mf, o);

  SpectralResult r;
  r.eigenvalues = pairs.values;
  r.residuals = pairs.residuals;
  r.iterations = pairs.iterations;
  r.dirichlet = dirichlet;
  r.eigenvectors = Eigen::MatrixXd::Zero(n, count);
  for (int d = 0; d < n; ++d)
    if (free_index[d] >= 0) r.eigenvectors.row(d) = pairs.vectors.row(free_index[d]);
  for (int i = 0; i < count; ++i) {
    if (r.residuals[i] > std::max(opts.tol, kTol.eigen_residual)) {
      std::ostringstream msg;
      msg << "eigenpair " << i << " residual " << r.residuals[i] << " above tolerance";
      throw NumericalError(msg.str());
    }
    if (r.eigenvalues[i] < kTol.eigen_floor)
      throw NumericalError("negative eigenvalue " + std::to_string(r.eigenvalues[i]));
  }
  return r;
}

SpectralResult solve_low_spectrum(const DiskMesh& m, const Pencil& p, const std::vector<BC>& per_loop,
                                  int count, const eig::Options& opts) {
  auto r = solve_low_spectrum(p, dirichlet_dofs(m, per_loop), count, opts);
  r.bc = per_loop;
  r.mesh_h = m.max_edge_length();
  return r;
}

double automorphism_defect(const Pencil& p, const std::vector<int>& J) {
  require(static_cast<int>(J.size()) == p.size(), "symmetry map has the wrong size");
  double worst = 0.0;
  for (const SpMat* A : {&p.K, &p.M}) {
    double scale = 0.0;
    for (int c = 0; c < A->outerSize(); ++c)
      for (SpMat::InnerIterator it(*A, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
    for (int c = 0; c < A->outerSize(); ++c)
      for (SpMat::InnerIterator it(*A, c); it; ++it) {
        const double img = A->coeff(J[it.row()], J[it.col()]);
        worst = std::max(worst, std::abs(img - it.value()) / scale);
      }
  }
  return worst;
}

double symmetry_check(const SpectralResult& r, const Pencil& p, const std::vector<int>& J) {
  const double defect = automorphism_defect(p, J);
  if (defect > kTol.symmetry)
    throw ValidationError("symmetry map is not an automorphism of the pencil (defect " +
                          std::to_string(defect) + ")");
  for (int d : r.dirichlet)
    require(std::binary_search(r.dirichlet.begin(), r.dirichlet.end(), J[d]),
            "symmetry map does not preserve the Dirichlet set");
  const Eigen::VectorXd u = r.psi0();
  double worst = 0.0;
  for (int i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(u[i] - u[J[i]]));
  return worst;
}

double spectral_gap(const SpectralResult& r) {
  require(r.eigenvalues.size() >= 2, "spectral gap needs at least two eigenpairs");
  return r.eigenvalues[1] - r.eigenvalues[0];
}

double rayleigh_quotient(const Pencil& p, const Eigen::VectorXd& u) {
  require(u.size() == p.size(), "vector has the wrong size");
  const double den = u.dot(p.M * u);
  require(den > 0.0, "zero function has no Rayleigh quotient");
  return u.dot(p.K * u) / den;
}

double loop_mean(const DiskMesh& m, const Eigen::VectorXd& u, const std::vector<int>& loops) {
  double s = 0.0;
  int n = 0;
  for (int l : loops)
    for (int d : m.loops.at(l).dofs) {
      s += u[d];
      ++n;
    }
  require(n > 0, "no loop nodes to average over");
  return s / n;
}

std::string spectrum_csv(const SpectralResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    os << i << ',' << r.eigenvalues[i] << ',' << r.residuals[i] << '\n';
  return os.str();
}

}  // namespace hypspec::fem
