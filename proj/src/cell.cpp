#include "hypspec/cell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

#include "hypspec/errors.hpp"

namespace hypspec::cell {

using mesh::DiskMesh;
using mesh::LoopKind;
using mesh::Point;

namespace {

std::int64_t cell_key(long long i, long long j) { return i * 4000037LL + j; }

Point identity(Point z) { return z; }

}  // namespace

std::vector<int> Cell::gluable_loops() const {
  std::vector<int> out;
  for (int k : boundary_loop)
    if (k >= 0) out.push_back(k);
  return out;
}

std::vector<int> dof_map(const DiskMesh& m, const std::vector<ChartMap>& maps, double tol) {
  require(static_cast<int>(maps.size()) == m.chart_count(), "dof_map: one map per chart needed");
  const double q = std::max(tol * 10.0, 1e-7);
  std::unordered_map<std::int64_t, std::vector<int>> grid;
  auto key_of = [q](Point z, int c, int di, int dj) {
    const auto i = static_cast<long long>(std::floor(z.real() / q)) + di;
    const auto j = static_cast<long long>(std::floor(z.imag() / q)) + dj;
    return cell_key(i * 64 + c, j);
  };
  for (std::size_t p = 0; p < m.points.size(); ++p)
    grid[key_of(m.points[p], m.chart[p], 0, 0)].push_back(static_cast<int>(p));

  std::vector<int> J(m.dof_count, -1);
  for (std::size_t p = 0; p < m.points.size(); ++p) {
    const auto& cm = maps[m.chart[p]];
    const Point w = cm.f(m.points[p]);
    int hit = -1;
    for (int di = -1; di <= 1 && hit < 0; ++di)
      for (int dj = -1; dj <= 1 && hit < 0; ++dj) {
        auto it = grid.find(key_of(w, cm.target, di, dj));
        if (it == grid.end()) continue;
        for (int cand : it->second)
          if (m.chart[cand] == cm.target && std::abs(m.points[cand] - w) <= tol) {
            hit = cand;
            break;
          }
      }
    if (hit < 0) throw NumericalError("symmetry: image of a mesh point is not a mesh point");
    const int from = m.dof[p], to = m.dof[hit];
    if (J[from] >= 0 && J[from] != to) throw NumericalError("symmetry: map is not well defined on dofs");
    J[from] = to;
  }
  std::vector<char> seen(m.dof_count, 0);
  for (int d : J) {
    if (d < 0 || seen[d]) throw NumericalError("symmetry: map is not a bijection on dofs");
    seen[d] = 1;
  }
  return J;
}

Cell build_cell(const hyp::CellSpec& spec, const mesh::MeshOptions& opts) {
  spec.validate();
  require(opts.h > 0.0, "mesh size must be positive");
  require(spec.cuff_length >= 0.01 || opts.graded, "cuff length below 0.01 needs a graded mesh");
  const int v = spec.v;
  const double l = spec.cuff_length;

  mesh::MeshBuilder b;
  std::vector<std::pair<int, int>> boundary;  // (part, loop) of free cuff k
  std::vector<int> pants_perm;                // J on pants parts
  std::function<Point(Point)> rot0 = identity, rot1 = identity;

  switch (spec.topology) {
    case hyp::Topology::pants_ring: {
      b.add(mesh::doubled_polygon(v, l, opts));
      for (int k = 0; k < v; ++k) boundary.emplace_back(0, k);
      const Point r = std::polar(1.0, 2.0 * std::numbers::pi / v);
      rot0 = [r](Point z) { return r * z; };
      rot1 = [r](Point z) { return std::conj(r) * z; };
      pants_perm = {0};
      break;
    }
    case hyp::Topology::torus_with_holes: {
      const auto P = mesh::doubled_polygon(3, l, opts);
      for (int k = 0; k < v; ++k) b.add(P);
      for (int k = 0; k < v; ++k) b.glue(k, 1, (k + 1) % v, 0);
      for (int k = 0; k < v; ++k) {
        boundary.emplace_back(k, 2);
        pants_perm.push_back((k + 1) % v);
      }
      break;
    }
    case hyp::Topology::custom: {
      const auto& g = *spec.custom;
      const auto P = mesh::doubled_polygon(3, l, opts);
      for (int k = 0; k < g.pants; ++k) b.add(P);
      std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> glued;
      std::set<std::pair<int, int>> used;
      auto canon = [](std::pair<int, int> a, std::pair<int, int> c) {
        return a < c ? std::make_pair(a, c) : std::make_pair(c, a);
      };
      for (const auto& e : g.gluings) {
        b.glue(e[0], e[1], e[2], e[3]);
        glued.insert(canon({e[0], e[1]}, {e[2], e[3]}));
        used.insert({e[0], e[1]});
        used.insert({e[2], e[3]});
      }
      std::vector<char> hit(g.pants, 0);
      for (int s : g.symmetry) {
        require(s >= 0 && s < g.pants && !hit[s], "custom symmetry is not a permutation");
        hit[s] = 1;
      }
      for (const auto& e : g.gluings)
        require(glued.count(canon({g.symmetry[e[0]], e[1]}, {g.symmetry[e[2]], e[3]})),
                "custom symmetry does not preserve the gluings");
      std::pair<int, int> start{-1, -1};
      for (int p = 0; p < g.pants && start.first < 0; ++p)
        for (int c = 0; c < 3; ++c)
          if (!used.count({p, c})) {
            start = {p, c};
            break;
          }
      auto cur = start;
      for (int k = 0; k < v; ++k) {
        require(k == 0 || cur != start, "custom symmetry does not cycle the boundaries");
        boundary.push_back(cur);
        cur = {g.symmetry[cur.first], cur.second};
      }
      require(cur == start, "custom symmetry does not have order v on the boundaries");
      pants_perm = g.symmetry;
      break;
    }
  }

  const int n_pants = static_cast<int>(pants_perm.size());
  std::vector<int> funnel_part(v, -1);
  for (int k = 0; k < v; ++k) {
    if (!spec.has_funnel(k)) continue;
    const auto& loop = b.part(boundary[k].first).loops[boundary[k].second];
    const int n = static_cast<int>(loop.dofs.size());
    funnel_part[k] = b.add(mesh::funnel_strip(l, n, spec.r_trunc, opts));
    b.glue(boundary[k].first, boundary[k].second, funnel_part[k], 0);
  }

  auto res = b.finish();
  Cell cell;
  cell.spec = spec;
  cell.h = opts.h;
  cell.boundary_loop.assign(v, -1);
  for (std::size_t i = 0; i < res.loop_origin.size(); ++i) {
    const auto origin = res.loop_origin[i];
    auto& loop = res.mesh.loops[i];
    for (int k = 0; k < v; ++k) {
      if (funnel_part[k] < 0 && origin == boundary[k]) {
        cell.boundary_loop[k] = static_cast<int>(i);
        loop.id = k;
      }
      if (funnel_part[k] >= 0 && origin.first == funnel_part[k]) {
        cell.truncation_loops.push_back(static_cast<int>(i));
        loop.id = k;
      }
    }
  }
  cell.mesh = std::move(res.mesh);
  cell.mesh.validate();

  const int funnels = spec.funnel_count();
  if (funnels == 0 || funnels == v) {
    std::vector<ChartMap> maps(cell.mesh.chart_count());
    for (int p = 0; p < n_pants; ++p) {
      const int src = res.part_chart_offset[p];
      const int dst = res.part_chart_offset[pants_perm[p]];
      maps[src] = {dst, rot0};
      maps[src + 1] = {dst + 1, rot1};
    }
    for (int k = 0; k < v && funnels == v; ++k)
      maps[res.part_chart_offset[funnel_part[k]]] = {
          res.part_chart_offset[funnel_part[(k + 1) % v]], identity};
    cell.J = dof_map(cell.mesh, maps);
  }
  return cell;
}

}  // namespace hypspec::cell
