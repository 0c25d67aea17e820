#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hypspec/config.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/hyperbolic.hpp"
#include "hypspec/mesh.hpp"

using namespace hypspec;
using namespace hypspec::mesh;

constexpr double kPi = std::numbers::pi;

TEST_CASE("fermi patch area and rows") {
  const double x = 0.7, R = 1.2;
  auto p = fermi_patch(0.0, x, [R](double) { return R; }, 4, {0.1, true});
  p.mesh.validate();
  // area of the Fermi rectangle: x sinh R
  CHECK(p.mesh.hyperbolic_area() == doctest::Approx(x * std::sinh(R)).epsilon(5e-3));
  CHECK(p.mesh.max_edge_length() < 0.25);
  CHECK(p.mesh.euler_characteristic() == 1);
  CHECK(p.bottom.size() == 5);
}

TEST_CASE("doubled polygon is a pants of the right area") {
  for (int v : {3, 4, 5}) {
    for (double l : {0.5, 1.0, 2.0}) {
      const auto m = doubled_polygon(v, l, {0.1, true});
      CAPTURE(v);
      CAPTURE(l);
      m.validate();
      CHECK(m.chart_count() == 2);
      CHECK(m.euler_characteristic() == 2 - v);
      CHECK(m.loop_indices(LoopKind::cuff).size() == static_cast<std::size_t>(v));
      const double exact = hyp::gauss_bonnet_area(0, v, 0);
      CHECK(std::abs(m.hyperbolic_area() - exact) / exact < kTol.mesh_area_rel);
      for (int k = 0; k < v; ++k) {
        const auto& c = m.loop(LoopKind::cuff, k);
        CHECK(c.length == doctest::Approx(l));
        CHECK(c.t.front() == doctest::Approx(0.0));
        CHECK(c.t.back() < l);
      }
    }
  }
}

TEST_CASE("area error falls with h") {
  const double exact = 2 * kPi;
  double prev = 1e9;
  for (double h : {0.4, 0.2, 0.1}) {
    const double err = std::abs(doubled_polygon(3, 1.0, {h, true}).hyperbolic_area() - exact);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("cuff loops have uniform parameter spacing matching arclength") {
  const double l = 1.3;
  const auto m = doubled_polygon(3, l, {0.15, true});
  const auto& c = m.loop(LoopKind::cuff, 1);
  const std::size_t n = c.dofs.size();
  CHECK(n % 4 == 0);
  for (std::size_t i = 0; i + 1 < n; ++i) CHECK(c.t[i + 1] - c.t[i] == doctest::Approx(l / n));
  // chart arclength between consecutive nodes of the first piece
  const auto& piece = c.pieces.front();
  for (std::size_t i = 0; i + 1 < piece.points.size(); ++i)
    CHECK(disk::distance(m.points[piece.points[i]], m.points[piece.points[i + 1]]) ==
          doctest::Approx(l / n).epsilon(1e-9));
}

TEST_CASE("collar domain area") {
  const double l = 1.0;
  const double r = hyp::collar_halfwidth(l);
  const auto m = collar_domain(l, -r, r, 0.05);
  m.validate();
  CHECK(m.euler_characteristic() == 0);
  CHECK(m.hyperbolic_area() == doctest::Approx(2 * l * std::sinh(r)).epsilon(5e-3));
  CHECK(m.loop(LoopKind::collar_edge, 1).length == doctest::Approx(l * std::cosh(r)));
}

TEST_CASE("geodesic disk area") {
  const auto m = geodesic_disk(1.0, 0.05);
  m.validate();
  CHECK(m.euler_characteristic() == 1);
  CHECK(m.hyperbolic_area() == doctest::Approx(2 * kPi * (std::cosh(1.0) - 1)).epsilon(5e-3));
}

TEST_CASE("funnel strip") {
  const double l = 1.0;
  const auto m = funnel_strip(l, 12, 3.0, {0.1, true});
  m.validate();
  CHECK(m.euler_characteristic() == 0);
  CHECK(m.hyperbolic_area() == doctest::Approx(l * std::sinh(3.0)).epsilon(5e-3));
  CHECK(m.loop(LoopKind::cuff, 0).dofs.size() == 12);
}

TEST_CASE("gluing two pants into a genus-two surface") {
  MeshBuilder b;
  const auto p = doubled_polygon(3, 1.0, {0.2, true});
  const int a = b.add(p), c = b.add(p);
  for (int k = 0; k < 3; ++k) b.glue(a, k, c, k);
  const auto r = b.finish();
  r.mesh.validate();
  CHECK(r.mesh.loops.empty());
  CHECK(r.mesh.euler_characteristic() == -2);
  CHECK(r.mesh.hyperbolic_area() == doctest::Approx(4 * kPi).epsilon(5e-3));
  CHECK(r.part_dofs[0].size() == static_cast<std::size_t>(p.dof_count));
}

TEST_CASE("funnel glued to a pants cuff") {
  MeshBuilder b;
  const auto p = doubled_polygon(3, 1.0, {0.1, true});
  const int n = static_cast<int>(p.loops[0].dofs.size());
  const int a = b.add(p);
  const int f = b.add(funnel_strip(1.0, n, 2.0, {0.1, true}));
  b.glue(a, 0, f, 0);
  const auto r = b.finish();
  r.mesh.validate();
  CHECK(r.mesh.euler_characteristic() == -1);
  CHECK(r.mesh.loops.size() == 3);
}

TEST_CASE("gluing errors") {
  MeshBuilder b;
  const int a = b.add(doubled_polygon(3, 1.0, {0.1, true}));
  const int c = b.add(doubled_polygon(3, 1.5, {0.1, true}));
  CHECK_THROWS_AS(b.glue(a, 0, c, 0), ValidationError);
  const int d = b.add(doubled_polygon(3, 1.0, {0.3, true}));
  CHECK_THROWS_AS(b.glue(a, 0, d, 0), ValidationError);
  CHECK_THROWS_AS(b.glue(a, 0, a, 0), ValidationError);
  const int e = b.add(doubled_polygon(3, 1.0, {0.1, true}));
  b.glue(a, 0, e, 0);
  CHECK_THROWS_AS(b.glue(a, 0, e, 1), ValidationError);
}

TEST_CASE("distance to a cuff") {
  const double l = 1.0;
  const auto m = funnel_strip(l, 12, 2.0, {0.1, true});
  const auto d = distance_to_loop(m, 0);
  const auto& top = m.loop(LoopKind::truncation, 1);
  for (int dof : top.dofs) CHECK(d[dof] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("json export") {
  const auto s = export_json(geodesic_disk(0.5, 0.2));
  CHECK(s.find("\"triangles\"") != std::string::npos);
}
