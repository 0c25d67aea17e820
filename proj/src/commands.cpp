#include "hypspec/commands.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hypspec/bounds.hpp"
#include "hypspec/diffusion.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/fem.hpp"
#include "hypspec/graph.hpp"
#include "hypspec/hyperbolic.hpp"
#include "hypspec/io.hpp"
#include "hypspec/surface.hpp"

namespace hypspec::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Writer {
  fs::path dir;
  bool plot = true;
  Outcome out;

  void put(const std::string& name, const std::string& content) {
    const auto p = dir / name;
    io::write_atomic(p, content);
    out.artifacts.push_back(p);
  }
  void svg(const std::string& name, const io::PlotSpec& spec, const std::vector<io::Series>& s) {
    if (plot) put(name, io::svg_plot(spec, s));
  }
};

Writer writer(const manifest::RunManifest& m, const RunOptions& o) {
  return Writer{o.out.value_or(m.out_dir), o.plot, {}};
}

surface::SolveOptions solve_options(const manifest::RunManifest& m, const RunOptions& o) {
  surface::SolveOptions s;
  s.mesh.h = m.mesh_h;
  s.assembly.threads = o.threads;
  return s;
}

std::vector<int> radii_of(const manifest::RunManifest& m) {
  return m.radii.empty() ? std::vector<int>{m.graph.radius} : m.radii;
}

std::string num(double x) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string short_num(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// exhaustive lower/upper on small balls, Folner upper otherwise
graph::CheegerEstimate cheeger_of(const graph::Graph& g) {
  graph::CheegerOptions c;
  if (g.interior_count() >= 1 && g.interior_count() <= c.max_size) return graph::cheeger(g, c);
  c.method = graph::CheegerMethod::folner_balls;
  return graph::cheeger(g, c);
}

}  // namespace

Outcome cmd_graph(const manifest::RunManifest& m, const RunOptions& o) {
  auto w = writer(m, o);
  std::ostringstream csv, sum;
  csv << "radius,vertices,interior,edges,mu0_tagged,mu0_outside,h_lower,h_upper,method\n";
  sum << "radius  vertices  interior  mu0_tagged  mu0_outside  h_upper\n";
  for (int r : radii_of(m)) {
    const auto g = m.graph.build(r);
    require(g.size() > 0, "graph is empty");
    const double mu_t = g.interior_count() > 0 ? graph::mu0(g, graph::Dirichlet::tagged) : kNaN;
    const double mu_o = graph::mu0(g, graph::Dirichlet::outside);
    const auto h = cheeger_of(g);
    const std::string method = h.method == graph::CheegerMethod::exhaustive ? "exhaustive" : "folner_balls";
    csv << r << ',' << g.size() << ',' << g.interior_count() << ',' << g.edge_count() << ',' << num(mu_t)
        << ',' << num(mu_o) << ',' << num(h.lower) << ',' << num(h.upper) << ',' << method << '\n';
    sum << std::setw(6) << r << std::setw(10) << g.size() << std::setw(10) << g.interior_count()
        << std::setw(12) << short_num(mu_t) << std::setw(13) << short_num(mu_o) << std::setw(9)
        << short_num(h.upper) << '\n';

    const int count = std::min(10, std::max(1, static_cast<int>(graph::support_vertices(g, graph::Dirichlet::tagged).size())));
    std::ostringstream spec;
    spec << "index,eigenvalue\n";
    if (g.interior_count() > 0) {
      const auto s = graph::laplacian_spectrum(g, graph::Dirichlet::tagged, count);
      for (std::size_t k = 0; k < s.values.size(); ++k) spec << k << ',' << num(s.values[k]) << '\n';
    }
    const std::string tag = "_r" + std::to_string(r);
    w.put("graph_spectrum" + tag + ".csv", spec.str());
    w.put("graph" + tag + ".json", graph::to_json(g) + "\n");
    w.put("witness" + tag + ".json", json{{"method", method}, {"ratio", h.upper}, {"subset", h.witness}}.dump() + "\n");
  }
  w.put("cheeger.csv", csv.str());
  w.out.summary = sum.str();
  return w.out;
}

Outcome cmd_cell(const manifest::RunManifest& m, const RunOptions& o) {
  auto w = writer(m, o);
  const auto so = solve_options(m, o);
  const auto c = surface::analyze_cell(m.cell, so);
  double defect = kNaN;
  if (c.cell.J) defect = fem::symmetry_check(c.spectrum, c.pencil, *c.cell.J);

  json s;
  s["lambda0N"] = c.lambda0N;
  s["lambda1"] = c.lambda1;
  s["eta"] = c.eta;
  s["psi0_cuff"] = finite_or_null(c.psi0_cuff);
  s["dofs"] = c.cell.mesh.dof_count;
  s["area"] = c.cell.mesh.hyperbolic_area();
  s["euler_characteristic"] = c.cell.mesh.euler_characteristic();
  s["symmetry_defect"] = finite_or_null(defect);
  s["mesh_h"] = m.mesh_h;
  w.put("cell.json", s.dump(2) + "\n");
  w.put("cell_spectrum.csv", fem::spectrum_csv(c.spectrum));
  w.put("cell_mesh.json", mesh::export_json(c.cell.mesh));

  // convergence against the collar oracle and of the cell itself
  const double l = m.cell.cuff_length;
  const double half = hyp::collar_halfwidth(l);
  const auto D = hyp::EndCondition::dirichlet;
  const double oracle = hyp::collar_sturm_liouville(l, 0, -half, half, D, D);
  std::ostringstream conv;
  conv << "h,collar_fem,collar_oracle,collar_rel_error,cell_lambda0N,cell_lambda1\n";
  io::Series err{"collar relative error", {}, {}};
  for (double h : {2 * m.mesh_h, m.mesh_h, 0.5 * m.mesh_h}) {
    const auto mesh = mesh::collar_domain(l, -half, half, h);
    const auto p = fem::assemble(mesh, so.assembly);
    const double lam = fem::solve_low_spectrum(mesh, p, {fem::BC::dirichlet, fem::BC::dirichlet}, 1).eigenvalues[0];
    auto sh = so;
    sh.mesh.h = h;
    const auto ch = h == m.mesh_h ? c : surface::analyze_cell(m.cell, sh);
    const double e = std::abs(lam - oracle) / oracle;
    conv << num(h) << ',' << num(lam) << ',' << num(oracle) << ',' << num(e) << ',' << num(ch.lambda0N) << ','
         << num(ch.lambda1) << '\n';
    err.x.push_back(h);
    err.y.push_back(e);
  }
  w.put("convergence.csv", conv.str());
  w.svg("convergence.svg", {"collar Dirichlet eigenvalue", "mesh size h", "relative error", true}, {err});

  std::ostringstream sum;
  sum << "lambda0N " << short_num(c.lambda0N) << "  lambda1 " << short_num(c.lambda1) << "  eta "
      << short_num(c.eta) << "  psi0(cuff) " << short_num(c.psi0_cuff) << "  dofs " << c.cell.mesh.dof_count
      << "  symmetry defect " << short_num(defect) << '\n';
  w.out.summary = sum.str();
  return w.out;
}

namespace {

struct SandwichRow {
  surface::SequenceRow seq;
  surface::TestFunctionResult tf;
  double h_lower = kNaN, h_upper = kNaN;
  bounds::BoundReport report;
};

std::vector<SandwichRow> sandwich_rows(const manifest::RunManifest& m, const surface::CellData& c,
                                       const surface::SolveOptions& so) {
  const auto seq = surface::lambda0_dirichlet_sequence(c, m.graph, radii_of(m), so);
  std::vector<SandwichRow> rows;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i > 0 && seq[i].lambda0_dirichlet > seq[i - 1].lambda0_dirichlet + 1e-8)
      throw NumericalError("Dirichlet eigenvalue increased with the radius");
    SandwichRow r;
    r.seq = seq[i];
    const auto ball = m.graph.build(seq[i].radius);
    r.tf = surface::upper_bound_test_function(c, ball, so);
    r.h_upper = seq[i].boundary_ratio;
    bounds::SandwichInputs in;
    in.lambda0N_cell = c.lambda0N;
    in.lambda1 = c.lambda1;
    in.psi0_cuff = c.psi0_cuff;
    in.l = m.cell.cuff_length;
    in.v = m.cell.v;
    in.mu0 = seq[i].mu0;
    in.h_lower = r.h_lower;
    in.h_upper = r.h_upper;
    in.measured_lambda0 = seq[i].lambda0_dirichlet;
    in.test_quotient = r.tf.quotient;
    r.report = bounds::sandwich_report(in);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

Outcome cmd_assemble(const manifest::RunManifest& m, const RunOptions& o) {
  auto w = writer(m, o);
  const auto so = solve_options(m, o);
  const auto c = surface::analyze_cell(m.cell, so);
  const auto rows = sandwich_rows(m, c, so);

  std::vector<surface::SequenceRow> seq;
  std::vector<double> up, lo, hu;
  std::string report_csv;
  io::Series s_lam{"Dirichlet lambda0", {}, {}}, s_lo{"lower bound", {}, {}, true},
      s_up{"upper bound", {}, {}, true}, s_q{"test quotient", {}, {}};
  std::ostringstream sum;
  sum << "radius  cells  lambda0_D    lower       upper       quotient    holds\n";
  for (const auto& r : rows) {
    seq.push_back(r.seq);
    up.push_back(r.report.upper_bound.value);
    lo.push_back(r.report.lower_bound.value);
    hu.push_back(r.h_upper);
    if (report_csv.empty()) report_csv = "radius," + bounds::csv_header(r.report);
    report_csv += std::to_string(r.seq.radius) + "," + bounds::csv_row(r.report);
    const double x = r.seq.radius;
    s_lam.x.push_back(x), s_lam.y.push_back(r.seq.lambda0_dirichlet);
    s_lo.x.push_back(x), s_lo.y.push_back(r.report.lower_bound.value);
    s_up.x.push_back(x), s_up.y.push_back(r.report.upper_bound.value);
    s_q.x.push_back(x), s_q.y.push_back(r.tf.quotient);
    sum << std::setw(6) << r.seq.radius << std::setw(7) << r.seq.cells << "  " << std::setw(11)
        << short_num(r.seq.lambda0_dirichlet) << ' ' << std::setw(11) << short_num(r.report.lower_bound.value)
        << ' ' << std::setw(11) << short_num(r.report.upper_bound.value) << ' ' << std::setw(11)
        << short_num(r.tf.quotient) << ' ' << (r.report.lower_holds && r.report.upper_holds ? "yes" : "no")
        << '\n';
  }
  w.put("sequence.csv", surface::sequence_csv(seq, up, lo, hu));
  w.put("report.csv", report_csv);
  w.put("report.json", bounds::to_json(rows.back().report));
  w.svg("convergence.svg", {"lambda0 of truncations", "ball radius", "eigenvalue", false}, {s_lam, s_lo, s_up, s_q});
  for (const auto& r : rows)
    if (!r.report.upper_holds)
      throw NumericalError("test-function quotient exceeds the upper bound at radius " +
                           std::to_string(r.seq.radius));
  w.out.summary = sum.str();
  return w.out;
}

Outcome cmd_pinch(const manifest::RunManifest& m, const RunOptions& o) {
  auto w = writer(m, o);
  const auto eps = m.epsilons.empty() ? std::vector<double>{1.0, 0.4, 0.2, 0.1, 0.05} : m.epsilons;
  const auto t = surface::pinch_sweep(m.cell, eps, solve_options(m, o));
  w.put("pinch.csv", surface::pinch_csv(t));
  json j{{"target", t.target}, {"monotone", t.monotone}, {"final_error", t.final_error}, {"warnings", t.warnings}};
  w.put("pinch.json", j.dump(2) + "\n");
  io::Series r{"lambda0 / epsilon", {}, {}}, target{"target", {}, {}, true};
  for (const auto& row : t.rows) {
    r.x.push_back(row.epsilon);
    r.y.push_back(row.ratio);
    target.x.push_back(row.epsilon);
    target.y.push_back(t.target);
  }
  w.svg("pinch.svg", {"pinching", "epsilon", "lambda0 / epsilon", false}, {r, target});
  std::ostringstream sum;
  sum << "epsilon  lambda0      ratio\n";
  for (const auto& row : t.rows)
    sum << std::setw(7) << row.epsilon << "  " << std::setw(11) << short_num(row.lambda0) << "  "
        << short_num(row.ratio) << '\n';
  sum << "target " << short_num(t.target) << "  relative error " << short_num(t.final_error) << "  monotone "
      << (t.monotone ? "yes" : "no") << '\n';
  for (const auto& msg : t.warnings) sum << "warning: " << msg << '\n';
  w.out.summary = sum.str();
  return w.out;
}

Outcome cmd_mc(const manifest::RunManifest& m, const RunOptions& o) {
  auto w = writer(m, o);
  const auto so = solve_options(m, o);
  diffusion::WalkModel walk;
  switch (m.mc.walk) {
    case manifest::WalkKind::graph: {
      const auto g = m.graph.build(radii_of(m).back());
      std::vector<int> tagged;
      for (int i = 0; i < g.size(); ++i)
        if (g.is_boundary(i)) tagged.push_back(i);
      require(!tagged.empty(), "graph walk needs boundary-tagged vertices to kill at");
      walk = diffusion::build_walk(graph::combinatorial_laplacian(g, graph::Dirichlet::none),
                                   Eigen::VectorXd::Ones(g.size()), tagged);
      break;
    }
    case manifest::WalkKind::collar: {
      const double l = m.cell.cuff_length, half = hyp::collar_halfwidth(l);
      const auto mesh = mesh::collar_domain(l, -half, half, m.mesh_h);
      const auto p = fem::assemble(mesh, so.assembly);
      walk = diffusion::build_walk(p, fem::dirichlet_dofs(mesh, {fem::BC::dirichlet, fem::BC::dirichlet}));
      break;
    }
    case manifest::WalkKind::truncation: {
      const auto c = surface::analyze_cell(m.cell, so);
      const auto a = surface::assemble_truncation(c, m.graph.build(radii_of(m).front()), false, so);
      walk = diffusion::build_walk(a.pencil, a.dirichlet);
      break;
    }
  }
  diffusion::SurvivalOptions so_mc;
  so_mc.n_paths = m.mc.n_paths;
  so_mc.t_max = m.mc.t_max;
  so_mc.seed = o.seed.value_or(m.mc.seed);
  so_mc.threads = o.threads;
  const auto curve = diffusion::survival_curve(walk, so_mc);
  const double gen = diffusion::generator_lambda0(walk);
  w.put("survival.csv", diffusion::survival_csv(curve));
  w.put("fit.json", diffusion::fit_summary(curve));
  json check{{"generator_lambda0", gen},
             {"within_3ci", std::abs(curve.fitted_rate - gen) <= 3 * curve.ci_half},
             {"states", walk.size()},
             {"clipped", walk.clipped}};
  w.put("generator.json", check.dump(2) + "\n");
  io::Series s{"survival", curve.times, curve.survival}, fit{"fitted tail", {}, {}, true};
  const std::size_t k0 = curve.times.size() / 2;
  const double c0 = curve.survival[k0] * std::exp(curve.fitted_rate * curve.times[k0]);
  for (double t : curve.times) {
    fit.x.push_back(t);
    fit.y.push_back(c0 * std::exp(-curve.fitted_rate * t));
  }
  w.svg("survival.svg", {"survival of the walk", "t", "P(tau > t)", true}, {s, fit});
  std::ostringstream sum;
  sum << "states " << walk.size() << "  paths " << curve.n_paths << "  seed " << curve.seed << "\nfitted rate "
      << short_num(curve.fitted_rate) << " +- " << short_num(curve.ci_half) << "  generator lambda0 "
      << short_num(gen) << '\n';
  w.out.summary = sum.str();
  return w.out;
}

Outcome cmd_bounds(const manifest::RunManifest& m, const RunOptions& o) {
  auto w = writer(m, o);
  const auto so = solve_options(m, o);
  const auto c = surface::analyze_cell(m.cell, so);
  auto single = m;
  single.radii = {radii_of(m).back()};
  const auto rows = sandwich_rows(single, c, so);
  const auto& r = rows.back().report;
  w.put("bounds.json", bounds::to_json(r));
  w.put("bounds.csv", bounds::csv_header(r) + bounds::csv_row(r));
  std::ostringstream sum;
  sum << std::left << std::setw(18) << "quantity" << std::setw(24) << "value" << "source\n";
  for (const auto& [name, q] : r.fields())
    sum << std::setw(18) << name << std::setw(24) << num(q.value) << bounds::to_string(q.source) << '\n';
  sum << "lower bound holds: " << (r.lower_holds ? "yes" : "no")
      << "   upper bound holds: " << (r.upper_holds ? "yes" : "no") << '\n';
  for (const auto& msg : r.warnings) sum << "warning: " << msg << '\n';
  w.out.summary = sum.str();
  return w.out;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"graph", "cell", "assemble", "pinch", "mc", "bounds"};
  return n;
}

Outcome run(const std::string& name, const manifest::RunManifest& m, const RunOptions& o) {
  if (name == "graph") return cmd_graph(m, o);
  if (name == "cell") return cmd_cell(m, o);
  if (name == "assemble") return cmd_assemble(m, o);
  if (name == "pinch") return cmd_pinch(m, o);
  if (name == "mc") return cmd_mc(m, o);
  if (name == "bounds") return cmd_bounds(m, o);
  throw ValidationError("unknown subcommand '" + name + "'");
}

}  // namespace hypspec::commands
