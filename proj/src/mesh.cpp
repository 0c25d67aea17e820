#include "hypspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hypspec/config.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/hyperbolic.hpp"

namespace hypspec::mesh {

namespace {

constexpr double kPi = std::numbers::pi;

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.real() - a.real()) * (c.imag() - a.imag()) -
                (c.real() - a.real()) * (b.imag() - a.imag()));
}

double weight(Point z) {
  const double f = disk::conformal_factor(z);
  return f * f;
}

}  // namespace

std::string to_string(LoopKind k) {
  switch (k) {
    case LoopKind::cuff: return "cuff";
    case LoopKind::truncation: return "truncation";
    case LoopKind::collar_edge: return "collar_edge";
    case LoopKind::circle: return "circle";
  }
  return "?";
}

int DiskMesh::chart_count() const {
  return chart.empty() ? 0 : *std::max_element(chart.begin(), chart.end()) + 1;
}

double DiskMesh::hyperbolic_area() const {
  double area = 0.0;
  for (const auto& t : triangles) {
    const Point a = points[t[0]], b = points[t[1]], c = points[t[2]];
    const double w = (weight(0.5 * (a + b)) + weight(0.5 * (b + c)) + weight(0.5 * (c + a))) / 3.0;
    area += std::abs(signed_area(a, b, c)) * w;
  }
  return area;
}

double DiskMesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, disk::distance(points[t[e]], points[t[(e + 1) % 3]]));
  return h;
}

int DiskMesh::euler_characteristic() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = dof[t[e]], b = dof[t[(e + 1) % 3]];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return dof_count - static_cast<int>(edges.size()) + static_cast<int>(triangles.size());
}

void DiskMesh::validate() const {
  const auto fail = [](const std::string& msg) { throw NumericalError("mesh: " + msg); };
  if (points.size() != chart.size() || points.size() != dof.size()) fail("per-point arrays disagree");
  for (const auto& z : points)
    if (!(std::norm(z) < 1.0)) fail("point outside the unit disk");
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= static_cast<int>(points.size())) fail("triangle index out of range");
      if (chart[t[k]] != chart[t[0]]) fail("triangle spans two charts");
    }
    if (signed_area(points[t[0]], points[t[1]], points[t[2]]) <= kTol.min_triangle_area)
      fail("degenerate or clockwise triangle");
    std::set<int> ds{dof[t[0]], dof[t[1]], dof[t[2]]};
    if (ds.size() != 3) fail("triangle with repeated dof");
    for (int e = 0; e < 3; ++e) {
      const int a = dof[t[e]], b = dof[t[(e + 1) % 3]];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  for (const auto& loop : loops) {
    const std::size_t n = loop.dofs.size();
    if (n < 3 || loop.t.size() != n) fail("loop too short");
    if (std::set<int>(loop.dofs.begin(), loop.dofs.end()).size() != n) fail("loop repeats a dof");
    for (std::size_t i = 0; i < n; ++i) {
      const int a = loop.dofs[i], b = loop.dofs[(i + 1) % n];
      if (!edges.count({std::min(a, b), std::max(a, b)})) fail("loop is not closed along mesh edges");
      if (i + 1 < n && !(loop.t[i] < loop.t[i + 1])) fail("loop parameter not increasing");
    }
    if (loop.kind != LoopKind::cuff) continue;
    for (const auto& piece : loop.pieces) {
      if (piece.points.size() < 3) continue;
      const auto g = disk::Geodesic::through(points[piece.points.front()], points[piece.points.back()]);
      for (int p : piece.points)
        if (std::abs(g.signed_distance(points[p])) > kTol.geodesic_snap)
          fail("cuff node off its geodesic");
    }
  }
}

const BoundaryLoop& DiskMesh::loop(LoopKind kind, int id) const {
  for (const auto& l : loops)
    if (l.kind == kind && l.id == id) return l;
  throw ValidationError("mesh has no " + to_string(kind) + " loop " + std::to_string(id));
}

std::vector<int> DiskMesh::loop_indices(LoopKind kind) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < loops.size(); ++i)
    if (loops[i].kind == kind) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> DiskMesh::representative_points() const {
  std::vector<int> rep(dof_count, -1);
  for (std::size_t p = 0; p < points.size(); ++p)
    if (rep[dof[p]] < 0) rep[dof[p]] = static_cast<int>(p);
  return rep;
}

std::vector<int> identify_dofs_map(DiskMesh& m, const std::vector<std::pair<int, int>>& pairs) {
  UnionFind uf(m.dof_count);
  for (auto [a, b] : pairs) uf.unite(a, b);
  std::vector<int> root_to_new(m.dof_count, -1);
  std::vector<int> old_to_new(m.dof_count, -1);
  int next = 0;
  for (int& d : m.dof) {
    const int r = uf.find(d);
    if (root_to_new[r] < 0) root_to_new[r] = next++;
    d = root_to_new[r];
  }
  for (int d = 0; d < static_cast<int>(old_to_new.size()); ++d) {
    const int r = uf.find(d);
    if (root_to_new[r] < 0) root_to_new[r] = next++;
    old_to_new[d] = root_to_new[r];
  }
  m.dof_count = next;
  for (auto& loop : m.loops)
    for (int& d : loop.dofs) d = old_to_new[d];
  return old_to_new;
}

void identify_dofs(DiskMesh& m, const std::vector<std::pair<int, int>>& pairs) {
  identify_dofs_map(m, pairs);
}

void orient(DiskMesh& m) {
  for (auto& t : m.triangles)
    if (signed_area(m.points[t[0]], m.points[t[1]], m.points[t[2]]) < 0) std::swap(t[1], t[2]);
}

void transform_chart(DiskMesh& m, int c, const std::function<Point(Point)>& f) {
  for (std::size_t p = 0; p < m.points.size(); ++p)
    if (m.chart[p] == c) m.points[p] = f(m.points[p]);
  orient(m);
}

// ---- builder ----

int MeshBuilder::add(const DiskMesh& part) {
  parts_.push_back(part);
  dof_offset_.push_back(total_dofs_);
  total_dofs_ += part.dof_count;
  return static_cast<int>(parts_.size()) - 1;
}

void MeshBuilder::glue(int a, int la, int b, int lb, bool reverse) {
  require(a >= 0 && a < static_cast<int>(parts_.size()) && b >= 0 &&
              b < static_cast<int>(parts_.size()),
          "glue: no such part");
  const auto& A = parts_[a];
  const auto& B = parts_[b];
  require(la >= 0 && la < static_cast<int>(A.loops.size()) && lb >= 0 &&
              lb < static_cast<int>(B.loops.size()),
          "glue: no such loop");
  for (const auto& g : glued_)
    require(g != std::make_pair(a, la) && g != std::make_pair(b, lb), "glue: loop already glued");
  require(!(a == b && la == lb), "glue: a loop cannot be glued to itself");
  const auto& LA = A.loops[la];
  const auto& LB = B.loops[lb];
  const double L = LA.length;
  const double tol = kTol.cuff_match * std::max(1.0, L);
  require(std::abs(LA.length - LB.length) <= tol, "glue: cuff lengths differ");
  require(LA.dofs.size() == LB.dofs.size(), "cuff node mismatch: different node counts");
  std::vector<std::pair<double, int>> keys;
  for (std::size_t i = 0; i < LB.dofs.size(); ++i) {
    double k = reverse ? L - LB.t[i] : LB.t[i];
    if (k >= L - tol) k -= L;
    keys.emplace_back(k, LB.dofs[i]);
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < LA.dofs.size(); ++i) {
    double t = LA.t[i];
    if (t >= L - tol) t -= L;
    auto it = std::lower_bound(keys.begin(), keys.end(), std::make_pair(t - tol, -1));
    if (it == keys.end() || std::abs(it->first - t) > tol)
      throw ValidationError("cuff node mismatch at parameter " + std::to_string(LA.t[i]));
    pairs_.emplace_back(dof_offset_[a] + LA.dofs[i], dof_offset_[b] + it->second);
  }
  glued_.emplace_back(a, la);
  glued_.emplace_back(b, lb);
}

MeshBuilder::Result MeshBuilder::finish() const {
  Result r;
  DiskMesh& m = r.mesh;
  int chart_offset = 0;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& P = parts_[i];
    const int point_offset = static_cast<int>(m.points.size());
    r.part_chart_offset.push_back(chart_offset);
    m.points.insert(m.points.end(), P.points.begin(), P.points.end());
    for (int c : P.chart) m.chart.push_back(c + chart_offset);
    for (int d : P.dof) m.dof.push_back(d + dof_offset_[i]);
    for (auto t : P.triangles) m.triangles.push_back({t[0] + point_offset, t[1] + point_offset,
                                                      t[2] + point_offset});
    for (std::size_t l = 0; l < P.loops.size(); ++l) {
      if (std::find(glued_.begin(), glued_.end(),
                    std::make_pair(static_cast<int>(i), static_cast<int>(l))) != glued_.end())
        continue;
      BoundaryLoop loop = P.loops[l];
      for (int& d : loop.dofs) d += dof_offset_[i];
      for (auto& piece : loop.pieces) {
        piece.chart += chart_offset;
        for (int& p : piece.points) p += point_offset;
      }
      m.loops.push_back(std::move(loop));
      r.loop_origin.emplace_back(static_cast<int>(i), static_cast<int>(l));
    }
    chart_offset += P.chart_count();
  }
  m.dof_count = total_dofs_;
  const auto map = identify_dofs_map(m, pairs_);
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    std::vector<int> local(parts_[i].dof_count);
    for (int d = 0; d < parts_[i].dof_count; ++d) local[d] = map[dof_offset_[i] + d];
    r.part_dofs.push_back(std::move(local));
  }
  return r;
}

// ---- generators ----

FermiPatch fermi_patch(double s0, double s1, const std::function<double(double)>& height,
                       int base_intervals, const MeshOptions& opts) {
  require(s1 > s0, "fermi_patch: empty s-range");
  require(opts.h > 0.0, "mesh size must be positive");
  require(base_intervals >= 1, "fermi_patch: need at least one base interval");
  const double width = s1 - s0;
  double rmax = 0.0;
  for (int i = 0; i <= 64; ++i) rmax = std::max(rmax, height(s0 + width * i / 64.0));
  require(rmax > 0.0, "fermi_patch: zero height");

  std::vector<double> rho{0.0};
  std::vector<int> count{base_intervals};
  while (rho.back() < 1.0) {
    const double r = rho.back() * rmax;
    const double tang = width * std::cosh(r) / count.back();
    const double dr = opts.graded ? std::min(opts.h, tang) : opts.h;
    const double next = rho.back() + dr / rmax;
    int n = count.back();
    if (opts.graded && width * std::cosh(std::min(next, 1.0) * rmax) / n > 1.5 * opts.h) n *= 2;
    rho.push_back(next);
    count.push_back(n);
    if (rho.size() > 200000) throw NumericalError("fermi_patch: row count exploded");
  }
  const double scale = rho.back();
  for (double& x : rho) x /= scale;

  FermiPatch out;
  DiskMesh& m = out.mesh;
  std::vector<std::vector<int>> rows(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    for (int j = 0; j <= count[k]; ++j) {
      const double s = s0 + width * j / count[k];
      const double r = rho[k] * height(s);
      rows[k].push_back(static_cast<int>(m.points.size()));
      m.points.push_back(disk::fermi_point(s, r));
      if (k == 0) out.bottom_s.push_back(s);
    }
  }
  for (std::size_t k = 0; k + 1 < rho.size(); ++k) {
    const auto& L = rows[k];
    const auto& U = rows[k + 1];
    const int n = count[k];
    if (count[k + 1] == n) {
      for (int i = 0; i < n; ++i) {
        const double d1 = disk::distance(m.points[L[i]], m.points[U[i + 1]]);
        const double d2 = disk::distance(m.points[L[i + 1]], m.points[U[i]]);
        if (d1 <= d2 * (1.0 + 1e-12)) {
          m.triangles.push_back({L[i], L[i + 1], U[i + 1]});
          m.triangles.push_back({L[i], U[i + 1], U[i]});
        } else {
          m.triangles.push_back({L[i], L[i + 1], U[i]});
          m.triangles.push_back({L[i + 1], U[i + 1], U[i]});
        }
      }
    } else {
      for (int i = 0; i < n; ++i) {
        m.triangles.push_back({L[i], U[2 * i], U[2 * i + 1]});
        m.triangles.push_back({L[i], U[2 * i + 1], L[i + 1]});
        m.triangles.push_back({L[i + 1], U[2 * i + 1], U[2 * i + 2]});
      }
    }
  }
  m.chart.assign(m.points.size(), 0);
  m.dof.resize(m.points.size());
  std::iota(m.dof.begin(), m.dof.end(), 0);
  m.dof_count = static_cast<int>(m.points.size());
  orient(m);
  out.bottom = rows.front();
  out.top = rows.back();
  for (const auto& row : rows) {
    out.left.push_back(row.front());
    out.right.push_back(row.back());
  }
  return out;
}

DiskMesh doubled_polygon(int v, double l, const MeshOptions& opts) {
  const auto q = hyp::LambertQuad::for_polygon(v, l);
  const double x = q.quarter_cuff;
  const int n0 = std::max(1, static_cast<int>(std::ceil(x / opts.h - 1e-9)));
  const auto patch = fermi_patch(0.0, x, [&q](double s) { return q.top(s); }, n0, opts);

  // Carry the polygon centre O to the origin with M_a on the positive axis.
  const Point o(0.0, std::tanh(0.5 * q.apex));
  auto phi = [o](Point z) { return Point(0.0, 1.0) * (z - o) / (1.0 - std::conj(o) * z); };
  std::vector<Point> base;
  for (const auto& z : patch.mesh.points) base.push_back(phi(z));
  if (base[patch.top.back()].imag() < 0)
    for (auto& z : base) z = std::conj(z);

  const int np = static_cast<int>(base.size());
  DiskMesh H;
  const Point rot = std::polar(1.0, 2.0 * kPi / v);
  auto offset_a = [np](int k) { return 2 * k * np; };
  auto offset_b = [np](int k) { return (2 * k + 1) * np; };
  for (int k = 0; k < v; ++k) {
    const Point rk = std::pow(rot, k);
    for (const auto& z : base) H.points.push_back(rk * z);
    for (const auto& z : base) H.points.push_back(rk * std::conj(z));
    for (int c = 0; c < 2; ++c) {
      const int off = (2 * k + c) * np;
      for (auto t : patch.mesh.triangles) H.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
    }
  }
  H.chart.assign(H.points.size(), 0);
  H.dof.resize(H.points.size());
  std::iota(H.dof.begin(), H.dof.end(), 0);
  H.dof_count = static_cast<int>(H.points.size());
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < v; ++k) {
    for (int p : patch.left) pairs.emplace_back(offset_a(k) + p, offset_b(k) + p);
    for (int p : patch.top) pairs.emplace_back(offset_a(k) + p, offset_b((k + 1) % v) + p);
  }
  identify_dofs(H, pairs);

  // Mirror copy in chart 1, glued along the seams.
  DiskMesh m = H;
  const int nh = static_cast<int>(H.points.size());
  const int dh = H.dof_count;
  for (int p = 0; p < nh; ++p) {
    m.points.push_back(std::conj(H.points[p]));
    m.chart.push_back(1);
    m.dof.push_back(H.dof[p] + dh);
  }
  for (auto t : H.triangles) m.triangles.push_back({t[0] + nh, t[1] + nh, t[2] + nh});
  m.dof_count = 2 * dh;
  pairs.clear();
  for (int k = 0; k < v; ++k) {
    for (int p : patch.right) {
      for (int off : {offset_a(k), offset_b(k)}) {
        const int a = off + p;
        pairs.emplace_back(m.dof[a], m.dof[a + nh]);
      }
    }
  }
  identify_dofs(m, pairs);
  orient(m);

  for (int k = 0; k < v; ++k) {
    std::vector<int> chain;
    std::vector<double> t;
    for (int j = n0; j >= 0; --j) {
      chain.push_back(offset_b(k) + patch.bottom[j]);
      t.push_back(x - patch.bottom_s[j]);
    }
    for (int j = 1; j <= n0; ++j) {
      chain.push_back(offset_a(k) + patch.bottom[j]);
      t.push_back(x + patch.bottom_s[j]);
    }
    BoundaryLoop loop;
    loop.id = k;
    loop.kind = LoopKind::cuff;
    loop.length = l;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      loop.dofs.push_back(m.dof[chain[i]]);
      loop.t.push_back(t[i]);
    }
    std::vector<int> mirror;
    for (int i = static_cast<int>(chain.size()) - 1; i >= 0; --i) mirror.push_back(chain[i] + nh);
    for (int i = static_cast<int>(chain.size()) - 2; i >= 1; --i) {
      loop.dofs.push_back(m.dof[chain[i] + nh]);
      loop.t.push_back(l - t[i]);
    }
    loop.pieces.push_back({0, chain});
    loop.pieces.push_back({1, mirror});
    m.loops.push_back(std::move(loop));
  }
  return m;
}

DiskMesh funnel_strip(double l, int base_nodes, double r_trunc, const MeshOptions& opts) {
  require(l > 0.0, "funnel: cuff length must be positive");
  require(base_nodes >= 3, "funnel: need at least three base nodes");
  require(r_trunc > 0.0, "funnel: truncation radius must be positive");
  auto patch = fermi_patch(-0.5 * l, 0.5 * l, [r_trunc](double) { return r_trunc; }, base_nodes,
                           opts);
  DiskMesh& m = patch.mesh;
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < patch.left.size(); ++k) pairs.emplace_back(patch.left[k], patch.right[k]);
  identify_dofs(m, pairs);

  BoundaryLoop base;
  base.id = 0;
  base.kind = LoopKind::cuff;
  base.length = l;
  for (std::size_t j = 0; j + 1 < patch.bottom.size(); ++j) {
    base.dofs.push_back(m.dof[patch.bottom[j]]);
    base.t.push_back(patch.bottom_s[j] + 0.5 * l);
  }
  base.pieces.push_back({0, patch.bottom});
  BoundaryLoop top;
  top.id = 1;
  top.kind = LoopKind::truncation;
  top.length = l * std::cosh(r_trunc);
  const int nt = static_cast<int>(patch.top.size()) - 1;
  for (int j = 0; j < nt; ++j) {
    top.dofs.push_back(m.dof[patch.top[j]]);
    top.t.push_back(top.length * j / nt);
  }
  top.pieces.push_back({0, patch.top});
  m.loops = {std::move(base), std::move(top)};
  return m;
}

DiskMesh collar_domain(double l, double r0, double r1, double h) {
  require(l > 0.0 && r1 > r0 && h > 0.0, "collar_domain: bad parameters");
  const int ns = static_cast<int>(std::ceil(l / h - 1e-9));
  const int nr = static_cast<int>(std::ceil((r1 - r0) / h - 1e-9));
  require(ns >= 3, "collar_domain: need at least three intervals around the collar");
  DiskMesh m;
  auto id = [ns](int i, int j) { return i * (ns + 1) + j; };
  for (int i = 0; i <= nr; ++i)
    for (int j = 0; j <= ns; ++j)
      m.points.push_back(disk::fermi_point(-0.5 * l + l * j / ns, r0 + (r1 - r0) * i / nr));
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ns; ++j) {
      m.triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
    }
  m.chart.assign(m.points.size(), 0);
  m.dof.resize(m.points.size());
  std::iota(m.dof.begin(), m.dof.end(), 0);
  m.dof_count = static_cast<int>(m.points.size());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i <= nr; ++i) pairs.emplace_back(id(i, 0), id(i, ns));
  identify_dofs(m, pairs);
  orient(m);
  for (int side = 0; side < 2; ++side) {
    const int i = side == 0 ? 0 : nr;
    const double r = side == 0 ? r0 : r1;
    BoundaryLoop loop;
    loop.id = side;
    loop.kind = LoopKind::collar_edge;
    loop.length = l * std::cosh(r);
    LoopPiece piece{0, {}};
    for (int j = 0; j <= ns; ++j) {
      piece.points.push_back(id(i, j));
      if (j == ns) continue;
      loop.dofs.push_back(m.dof[id(i, j)]);
      loop.t.push_back(loop.length * j / ns);
    }
    loop.pieces.push_back(std::move(piece));
    m.loops.push_back(std::move(loop));
  }
  return m;
}

DiskMesh geodesic_disk(double radius, double h) {
  require(radius > 0.0 && h > 0.0, "geodesic_disk: bad parameters");
  const int rings = std::max(2, static_cast<int>(std::ceil(radius / h - 1e-9)));
  DiskMesh m;
  m.points.push_back(Point(0.0, 0.0));
  std::vector<std::vector<int>> ring_points(rings + 1);
  ring_points[0] = {0};
  for (int k = 1; k <= rings; ++k) {
    const double rho = radius * k / rings;
    const int n = std::max(6, static_cast<int>(std::ceil(2.0 * kPi * std::sinh(rho) / h)));
    const double rr = std::tanh(0.5 * rho);
    for (int j = 0; j < n; ++j) {
      ring_points[k].push_back(static_cast<int>(m.points.size()));
      m.points.push_back(std::polar(rr, 2.0 * kPi * j / n));
    }
  }
  const auto& first = ring_points[1];
  for (std::size_t j = 0; j < first.size(); ++j)
    m.triangles.push_back({0, first[j], first[(j + 1) % first.size()]});
  for (int k = 1; k < rings; ++k) {
    const auto& L = ring_points[k];
    const auto& U = ring_points[k + 1];
    const int n = static_cast<int>(L.size()), nu = static_cast<int>(U.size());
    int i = 0, j = 0;
    while (i < n || j < nu) {
      const double a = static_cast<double>(i + 1) / n;
      const double b = static_cast<double>(j + 1) / nu;
      if (j == nu || (i < n && a < b)) {
        m.triangles.push_back({L[i % n], L[(i + 1) % n], U[j % nu]});
        ++i;
      } else {
        m.triangles.push_back({L[i % n], U[(j + 1) % nu], U[j % nu]});
        ++j;
      }
    }
  }
  m.chart.assign(m.points.size(), 0);
  m.dof.resize(m.points.size());
  std::iota(m.dof.begin(), m.dof.end(), 0);
  m.dof_count = static_cast<int>(m.points.size());
  orient(m);
  BoundaryLoop rim;
  rim.id = 0;
  rim.kind = LoopKind::circle;
  rim.length = 2.0 * kPi * std::sinh(radius);
  const auto& outer = ring_points[rings];
  for (std::size_t j = 0; j < outer.size(); ++j) {
    rim.dofs.push_back(outer[j]);
    rim.t.push_back(rim.length * j / outer.size());
  }
  rim.pieces.push_back({0, outer});
  m.loops.push_back(std::move(rim));
  return m;
}

std::vector<double> distance_to_loop(const DiskMesh& m, int loop) {
  const auto& L = m.loops.at(loop);
  std::vector<std::pair<int, disk::Geodesic>> lines;
  for (const auto& piece : L.pieces) {
    require(piece.points.size() >= 2, "loop piece too short");
    lines.emplace_back(piece.chart, disk::Geodesic::through(m.points[piece.points.front()],
                                                            m.points[piece.points.back()]));
  }
  std::vector<double> dist(m.dof_count, std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < m.points.size(); ++p)
    for (const auto& [c, g] : lines)
      if (c == m.chart[p])
        dist[m.dof[p]] = std::min(dist[m.dof[p]], std::abs(g.signed_distance(m.points[p])));
  for (int d : L.dofs) dist[d] = 0.0;
  return dist;
}

std::string export_json(const DiskMesh& m) {
  nlohmann::json j;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& z : m.points) pts.push_back({z.real(), z.imag()});
  j["points"] = pts;
  j["charts"] = m.chart;
  j["dofs"] = m.dof;
  j["dof_count"] = m.dof_count;
  nlohmann::json tris = nlohmann::json::array();
  for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  j["triangles"] = tris;
  nlohmann::json loops = nlohmann::json::array();
  for (const auto& l : m.loops)
    loops.push_back({{"id", l.id}, {"kind", to_string(l.kind)}, {"dofs", l.dofs}, {"t", l.t},
                     {"length", l.length}});
  j["loops"] = loops;
  j["hyperbolic_area"] = m.hyperbolic_area();
  return j.dump();
}

}  // namespace hypspec::mesh
