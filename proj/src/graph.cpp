#include "hypspec/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hypspec/eigensolver.hpp"
#include "hypspec/errors.hpp"

namespace hypspec::graph {

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges, std::vector<bool> boundary,
             int valence)
    : boundary_(std::move(boundary)), valence_(valence) {
  require(n >= 1, "graph needs at least one vertex");
  if (boundary_.empty()) boundary_.assign(n, false);
  require(static_cast<int>(boundary_.size()) == n, "boundary flags do not match vertex count");
  slots_.assign(n, {});
  for (auto [i, j] : edges) {
    require(i >= 0 && i < n && j >= 0 && j < n, "edge endpoint out of range");
    slots_[i].push_back(j);
    slots_[j].push_back(i);
  }
  for (auto& s : slots_)
    if (valence_ > 0 && static_cast<int>(s.size()) < valence_) s.resize(valence_, -1);
  rebuild_adjacency();
  validate();
}

Graph::Graph(std::vector<std::vector<int>> slots, std::vector<bool> boundary, int valence)
    : slots_(std::move(slots)), boundary_(std::move(boundary)), valence_(valence) {
  require(!slots_.empty(), "graph needs at least one vertex");
  require(boundary_.size() == slots_.size(), "boundary flags do not match vertex count");
  rebuild_adjacency();
  validate();
}

void Graph::rebuild_adjacency() {
  adj_.assign(slots_.size(), {});
  for (std::size_t i = 0; i < slots_.size(); ++i)
    for (int j : slots_[i])
      if (j >= 0) adj_[i].push_back(j);
}

int Graph::interior_count() const {
  return static_cast<int>(std::count(boundary_.begin(), boundary_.end(), false));
}

int Graph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& a : adj_) twice += a.size();
  return static_cast<int>(twice / 2);
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int j : adj_[i])
      if (i < j) out.emplace_back(i, j);
  std::sort(out.begin(), out.end());
  return out;
}

int Graph::port(int i, int j) const {
  const auto& s = slots_.at(i);
  for (std::size_t p = 0; p < s.size(); ++p)
    if (s[p] == j) return static_cast<int>(p);
  return -1;
}

std::vector<int> Graph::distances_from_center() const {
  std::vector<int> dist(adj_.size(), -1);
  std::queue<int> q;
  dist[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j : adj_[i])
      if (dist[j] < 0) {
        dist[j] = dist[i] + 1;
        q.push(j);
      }
  }
  return dist;
}

void Graph::validate() const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    std::set<int> seen;
    for (int j : adj_[i]) {
      require(j >= 0 && j < n, "neighbour index out of range");
      require(j != i, "self-loop at vertex " + std::to_string(i));
      require(seen.insert(j).second, "duplicate edge at vertex " + std::to_string(i));
      const auto& back = adj_[j];
      require(std::find(back.begin(), back.end(), i) != back.end(), "adjacency not symmetric");
    }
    if (valence_ > 0) {
      require(static_cast<int>(adj_[i].size()) <= valence_,
              "vertex " + std::to_string(i) + " exceeds the valence");
      if (!boundary_[i])
        require(static_cast<int>(adj_[i].size()) == valence_,
                "interior vertex " + std::to_string(i) + " has degree " +
                    std::to_string(adj_[i].size()) + " != valence " + std::to_string(valence_));
    }
  }
  const auto dist = distances_from_center();
  require(std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; }),
          "graph is disconnected");
}

Graph lattice(int d, int radius) {
  require(d == 1 || d == 2, "lattice dimension must be 1 or 2");
  require(radius >= 0, "radius must be nonnegative");
  using Key = std::pair<int, int>;
  std::map<Key, int> index;
  std::vector<Key> pts;
  auto norm = [](const Key& k) { return std::abs(k.first) + std::abs(k.second); };
  // Shell order keeps vertex 0 at the origin.
  for (int r = 0; r <= radius; ++r) {
    for (int x = -r; x <= r; ++x) {
      if (d == 1) {
        if (std::abs(x) == r) pts.push_back({x, 0});
        continue;
      }
      const int y = r - std::abs(x);
      pts.push_back({x, y});
      if (y != 0) pts.push_back({x, -y});
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) index[pts[i]] = static_cast<int>(i);
  const std::array<Key, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  std::vector<std::vector<int>> slots(pts.size(), std::vector<int>(2 * d, -1));
  std::vector<bool> boundary(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    boundary[i] = norm(pts[i]) == radius;
    for (int p = 0; p < 2 * d; ++p) {
      const Key q{pts[i].first + steps[p].first, pts[i].second + steps[p].second};
      auto it = index.find(q);
      if (it != index.end()) slots[i][p] = it->second;
    }
  }
  return Graph(std::move(slots), std::move(boundary), 2 * d);
}

Graph regular_tree(int v, int depth) {
  require(v >= 3, "regular tree needs valence >= 3");
  require(depth >= 0, "depth must be nonnegative");
  std::vector<std::vector<int>> slots{std::vector<int>(v, -1)};
  std::vector<int> level{0};
  std::vector<int> frontier{0};
  for (int d = 1; d <= depth; ++d) {
    std::vector<int> next;
    for (int parent : frontier) {
      const int first = parent == 0 ? 0 : 1;
      for (int p = first; p < v; ++p) {
        const int child = static_cast<int>(slots.size());
        slots.push_back(std::vector<int>(v, -1));
        level.push_back(d);
        slots[child][0] = parent;
        slots[parent][p] = child;
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  std::vector<bool> boundary(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) boundary[i] = level[i] == depth;
  return Graph(std::move(slots), std::move(boundary), v);
}

Graph free_group_ball(int rank, int radius) {
  require(rank >= 1, "free group rank must be positive");
  require(radius >= 0, "radius must be nonnegative");
  const int v = 2 * rank;
  auto inverse = [](int g) { return g ^ 1; };
  std::vector<std::vector<int>> slots{std::vector<int>(v, -1)};
  std::vector<int> last_letter{-1};
  std::vector<int> length{0};
  std::vector<int> frontier{0};
  for (int r = 1; r <= radius; ++r) {
    std::vector<int> next;
    for (int w : frontier) {
      for (int g = 0; g < v; ++g) {
        if (last_letter[w] >= 0 && g == inverse(last_letter[w])) continue;
        const int child = static_cast<int>(slots.size());
        slots.push_back(std::vector<int>(v, -1));
        last_letter.push_back(g);
        length.push_back(r);
        slots[w][g] = child;
        slots[child][inverse(g)] = w;
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  std::vector<bool> boundary(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) boundary[i] = length[i] == radius;
  return Graph(std::move(slots), std::move(boundary), v);
}

Graph explicit_graph(int n, const std::vector<std::pair<int, int>>& edges,
                     const std::vector<int>& boundary, int valence) {
  std::vector<bool> flags(static_cast<std::size_t>(std::max(n, 0)), false);
  for (int b : boundary) {
    require(b >= 0 && b < n, "boundary vertex out of range");
    flags[b] = true;
  }
  return Graph(n, edges, std::move(flags), valence);
}

Graph GraphSpec::build(std::optional<int> radius_override) const {
  const int r = radius_override.value_or(radius);
  if (kind == "lattice") return lattice(d, r);
  if (kind == "regular_tree") return regular_tree(v, r);
  if (kind == "cayley_ball") {
    if (preset == "free_group") return free_group_ball(rank, r);
    if (preset == "Z^d" || preset == "Z") return lattice(d, r);
    if (preset == "Z^1") return lattice(1, r);
    if (preset == "Z^2") return lattice(2, r);
    throw ValidationError("unsupported Cayley preset '" + preset +
                          "' (explicit relators are not supported)");
  }
  if (kind == "explicit") {
    require(n >= 1, "explicit graph is empty");
    return explicit_graph(n, edges, boundary, valence);
  }
  throw ValidationError("unknown graph kind '" + kind + "'");
}

std::vector<int> support_vertices(const Graph& g, Dirichlet bc) {
  std::vector<int> out;
  for (int i = 0; i < g.size(); ++i)
    if (bc != Dirichlet::tagged || !g.is_boundary(i)) out.push_back(i);
  return out;
}

std::vector<int> interior_vertices(const Graph& g) {
  std::vector<int> out;
  for (int i = 0; i < g.size(); ++i)
    if (!g.is_boundary(i)) out.push_back(i);
  return out;
}

Eigen::SparseMatrix<double> combinatorial_laplacian(const Graph& g, Dirichlet bc) {
  std::vector<int> row(g.size(), -1);
  int m = 0;
  for (int i : support_vertices(g, bc)) row[i] = m++;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < g.size(); ++i) {
    if (row[i] < 0) continue;
    const int degree = bc == Dirichlet::outside && g.valence() > 0
                           ? g.valence()
                           : static_cast<int>(g.neighbors(i).size());
    trip.emplace_back(row[i], row[i], static_cast<double>(degree));
    for (int j : g.neighbors(i))
      if (row[j] >= 0) trip.emplace_back(row[i], row[j], -1.0);
  }
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

Eigen::SparseMatrix<double> combinatorial_laplacian(const Graph& g, bool dirichlet_on_boundary) {
  return combinatorial_laplacian(g, dirichlet_on_boundary ? Dirichlet::tagged : Dirichlet::none);
}

GraphSpectrum laplacian_spectrum(const Graph& g, Dirichlet bc, int count) {
  const auto L = combinatorial_laplacian(g, bc);
  require(L.rows() >= 1, "no unknowns left after removing the boundary");
  count = std::min<int>(count, static_cast<int>(L.rows()));
  Eigen::SparseMatrix<double> I(L.rows(), L.cols());
  I.setIdentity();
  eig::Options opts;
  opts.count = count;
  const auto pairs = eig::smallest(L, I, opts);
  return {pairs.values, pairs.vectors};
}

GraphSpectrum laplacian_spectrum(const Graph& g, bool dirichlet_on_boundary, int count) {
  return laplacian_spectrum(g, dirichlet_on_boundary ? Dirichlet::tagged : Dirichlet::none, count);
}

double mu0(const Graph& g, Dirichlet bc) {
  return std::max(0.0, laplacian_spectrum(g, bc, 1).values.front());
}

double mu0(const Graph& g, bool dirichlet_on_boundary) {
  return mu0(g, dirichlet_on_boundary ? Dirichlet::tagged : Dirichlet::none);
}

std::pair<long long, long long> boundary_ratio(const Graph& g, const std::vector<int>& subset,
                                               BoundaryKind kind) {
  require(!subset.empty(), "empty subset");
  std::vector<bool> in(g.size(), false);
  for (int i : subset) {
    require(i >= 0 && i < g.size(), "subset vertex out of range");
    in[i] = true;
  }
  long long b = 0;
  for (int i : subset) {
    int out = 0;
    for (int j : g.neighbors(i)) out += in[j] ? 0 : 1;
    if (g.valence() > 0) out += g.valence() - static_cast<int>(g.neighbors(i).size());
    b += kind == BoundaryKind::edge ? out : (out > 0 ? 1 : 0);
  }
  return {b, static_cast<long long>(subset.size())};
}

namespace {

struct Best {
  long long num = 1;
  long long den = 0;  // den == 0 means unset
  std::uint64_t mask = 0;

  bool better_than(const Best& o) const {
    if (o.den == 0) return den != 0;
    if (den == 0) return false;
    const long long lhs = num * o.den, rhs = o.num * den;
    if (lhs != rhs) return lhs < rhs;
    if (den != o.den) return den < o.den;
    return mask < o.mask;
  }
};

class Enumerator {
 public:
  Enumerator(std::vector<std::uint64_t> nbr, std::vector<int> outside, BoundaryKind kind)
      : nbr_(std::move(nbr)), outside_(std::move(outside)), kind_(kind) {}

  Best run_root(int root) {
    best_ = Best{};
    const std::uint64_t below = (std::uint64_t{1} << root) - 1;
    const std::uint64_t start = std::uint64_t{1} << root;
    recurse(start, nbr_[root] & ~below & ~start, below | start);
    return best_;
  }

 private:
  void record(std::uint64_t s) {
    long long b = 0;
    for (std::uint64_t rest = s; rest; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      const long long out = outside_[i] + std::popcount(nbr_[i] & ~s);
      b += kind_ == BoundaryKind::edge ? out : (out > 0 ? 1 : 0);
    }
    Best cand{b, std::popcount(s), s};
    if (cand.better_than(best_)) best_ = cand;
  }

  // Each connected set containing the root and only vertices above it is
  // produced exactly once.
  void recurse(std::uint64_t s, std::uint64_t cand, std::uint64_t excluded) {
    record(s);
    while (cand) {
      const int w = std::countr_zero(cand);
      const std::uint64_t bit = std::uint64_t{1} << w;
      cand &= ~bit;
      const std::uint64_t grown = s | bit;
      const std::uint64_t fresh = nbr_[w] & ~(grown | cand | excluded);
      recurse(grown, cand | fresh, excluded);
      excluded |= bit;
    }
  }

  std::vector<std::uint64_t> nbr_;
  std::vector<int> outside_;
  BoundaryKind kind_;
  Best best_;
};

CheegerEstimate exhaustive(const Graph& g, const CheegerOptions& opts) {
  const auto inner = support_vertices(g, opts.include_tagged ? Dirichlet::outside : Dirichlet::tagged);
  const int n = static_cast<int>(inner.size());
  require(n >= 1, "no interior vertices to enumerate");
  require(n <= opts.max_size,
          "exhaustive Cheeger cap exceeded: " + std::to_string(n) + " interior vertices > cap " +
              std::to_string(opts.max_size));
  require(n <= 63, "exhaustive Cheeger supports at most 63 interior vertices");
  std::vector<int> local(g.size(), -1);
  for (int k = 0; k < n; ++k) local[inner[k]] = k;
  std::vector<std::uint64_t> nbr(n, 0);
  std::vector<int> outside(n, 0);
  for (int k = 0; k < n; ++k) {
    const int i = inner[k];
    for (int j : g.neighbors(i)) {
      if (local[j] >= 0)
        nbr[k] |= std::uint64_t{1} << local[j];
      else
        ++outside[k];
    }
    if (g.valence() > 0) outside[k] += g.valence() - static_cast<int>(g.neighbors(i).size());
  }
  const int threads = std::max(1, std::min(opts.threads, n));
  std::vector<Best> per_thread(threads);
  auto work = [&](int t) {
    Enumerator e(nbr, outside, opts.boundary);
    for (int root = t; root < n; root += threads) {
      const Best b = e.run_root(root);
      if (b.better_than(per_thread[t])) per_thread[t] = b;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  Best best;
  for (const auto& b : per_thread)
    if (b.better_than(best)) best = b;
  CheegerEstimate out;
  out.method = CheegerMethod::exhaustive;
  out.boundary_size = best.num;
  out.subset_size = best.den;
  out.lower = out.upper = static_cast<double>(best.num) / static_cast<double>(best.den);
  for (int k = 0; k < n; ++k)
    if (best.mask >> k & 1) out.witness.push_back(inner[k]);
  return out;
}

CheegerEstimate folner(const Graph& g, const CheegerOptions& opts) {
  const auto dist = g.distances_from_center();
  const int radius = *std::max_element(dist.begin(), dist.end());
  CheegerEstimate out;
  out.method = CheegerMethod::folner_balls;
  out.lower = 0.0;
  Best best;
  std::vector<int> best_ball;
  for (int r = 0; r <= radius; ++r) {
    std::vector<int> ball;
    for (int i = 0; i < g.size(); ++i)
      if (dist[i] <= r) ball.push_back(i);
    if (r < radius && std::any_of(ball.begin(), ball.end(),
                                  [&](int i) { return g.is_boundary(i); }))
      continue;
    const auto [b, s] = boundary_ratio(g, ball, opts.boundary);
    Best cand{b, s, 0};
    if (cand.better_than(best)) {
      best = cand;
      best_ball = ball;
    }
  }
  out.upper = static_cast<double>(best.num) / static_cast<double>(best.den);
  out.boundary_size = best.num;
  out.subset_size = best.den;
  out.witness = best_ball;
  return out;
}

}  // namespace

CheegerEstimate cheeger(const Graph& g, const CheegerOptions& opts) {
  return opts.method == CheegerMethod::exhaustive ? exhaustive(g, opts) : folner(g, opts);
}

CheegerSandwich cheeger_inequality_check(const Graph& g, int max_size) {
  require(g.interior_count() >= 2, "Cheeger sandwich needs at least two interior vertices");
  require(g.valence() > 0, "Cheeger sandwich needs a constant-valence graph");
  CheegerOptions opts;
  opts.max_size = max_size;
  CheegerSandwich out;
  out.h_vertex = cheeger(g, opts).upper;
  opts.boundary = BoundaryKind::edge;
  out.h_edge = cheeger(g, opts).upper;
  out.mu0 = mu0(g, true);
  out.lower = out.h_edge * out.h_edge / (2.0 * g.valence());
  const double tol = 1e-10;
  out.holds = out.lower <= out.mu0 + tol && out.mu0 <= out.h_edge + tol;
  if (!out.holds) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Cheeger sandwich violated: h^2/(2v) = " << out.lower << ", mu0 = " << out.mu0
        << ", h = " << out.h_edge;
    throw NumericalError(msg.str());
  }
  return out;
}

void ColboisForm::validate() const {
  require(n >= 1, "Colbois form needs vertices");
  require(static_cast<int>(volumes.size()) == n, "one volume per vertex required");
  require(lengths.size() == edges.size(), "one length per edge required");
  for (double l : lengths) require(l > 0.0 && std::isfinite(l), "edge lengths must be positive");
  for (double v : volumes) require(v >= 0.0 && std::isfinite(v), "volumes must be nonnegative");
  require(std::any_of(volumes.begin(), volumes.end(), [](double v) { return v > 0.0; }),
          "Colbois form has no finite-volume vertex");
  for (auto [i, j] : edges)
    require(i >= 0 && i < n && j >= 0 && j < n && i != j, "bad Colbois edge");
}

std::vector<double> colbois_spectrum(const ColboisForm& form) {
  form.validate();
  std::vector<int> row(form.n, -1);
  int m = 0;
  for (int i = 0; i < form.n; ++i)
    if (form.volumes[i] > 0.0) row[i] = m++;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m), V = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < form.n; ++i)
    if (row[i] >= 0) V(row[i], row[i]) = form.volumes[i];
  for (std::size_t e = 0; e < form.edges.size(); ++e) {
    const auto [i, j] = form.edges[e];
    const double w = form.lengths[e] / std::numbers::pi;
    const int a = row[i], b = row[j];
    if (a >= 0) Q(a, a) += w;
    if (b >= 0) Q(b, b) += w;
    if (a >= 0 && b >= 0) {
      Q(a, b) -= w;
      Q(b, a) -= w;
    }
  }
  const auto pairs = eig::dense_smallest(Q, V, m);
  return pairs.values;
}

std::string to_json(const Graph& g) {
  nlohmann::json j;
  j["vertices"] = g.size();
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  j["edges"] = edges;
  nlohmann::json bnd = nlohmann::json::array();
  for (int i = 0; i < g.size(); ++i)
    if (g.is_boundary(i)) bnd.push_back(i);
  j["boundary"] = bnd;
  j["valence"] = g.valence();
  return j.dump();
}

Graph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("graph JSON: ") + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    require(it.key() == "vertices" || it.key() == "edges" || it.key() == "boundary" ||
                it.key() == "valence",
            "graph JSON: unknown key '" + it.key() + "'");
  try {
    const int n = j.at("vertices").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<int> boundary = j.value("boundary", std::vector<int>{});
    return explicit_graph(n, edges, boundary, j.value("valence", 0));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("graph JSON: ") + e.what());
  }
}

}  // namespace hypspec::graph
