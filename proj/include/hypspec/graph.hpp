#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

// Constant-valence graphs, their combinatorial Laplacian, Cheeger constants
// and the weighted form governing pinched surfaces.
namespace hypspec::graph {

/// Undirected simple graph. Each vertex has port slots (the order in which a
/// cell's boundaries are glued); a slot holds a neighbour or -1 when the edge
/// leaves the ball. Vertices tagged `boundary` form the truncation shell of an
/// infinite-graph ball.
class Graph {
 public:
  Graph() = default;
  /// Ports follow the edge-list order at each vertex.
  Graph(int n, const std::vector<std::pair<int, int>>& edges, std::vector<bool> boundary,
        int valence);
  /// Ports given explicitly, slot per port.
  Graph(std::vector<std::vector<int>> slots, std::vector<bool> boundary, int valence);

  int size() const { return static_cast<int>(adj_.size()); }
  int valence() const { return valence_; }
  const std::vector<int>& neighbors(int i) const { return adj_.at(i); }
  bool is_boundary(int i) const { return boundary_.at(i); }
  int interior_count() const;
  int edge_count() const;
  std::vector<std::pair<int, int>> edges() const;  // i < j, sorted

  const std::vector<int>& ports(int i) const { return slots_.at(i); }
  /// Port of j at i, or -1.
  int port(int i, int j) const;
  /// Breadth-first distance from vertex 0.
  std::vector<int> distances_from_center() const;

  void validate() const;

 private:
  void rebuild_adjacency();

  std::vector<std::vector<int>> slots_;
  std::vector<std::vector<int>> adj_;
  std::vector<bool> boundary_;
  int valence_ = 0;
};

// Ball generators. Vertex 0 is the centre; the outer shell is tagged.
// Port conventions:
//   lattice: port 2k is +e_k, port 2k+1 is -e_k;
//   tree: the root uses ports 0..v-1, other vertices port 0 = parent;
//   free group: port 2k is a_k, port 2k+1 is a_k^-1.
Graph lattice(int d, int radius);
Graph regular_tree(int v, int depth);
Graph free_group_ball(int rank, int radius);
Graph explicit_graph(int n, const std::vector<std::pair<int, int>>& edges,
                     const std::vector<int>& boundary, int valence);

/// Graph-ball generator description, as read from manifests.
struct GraphSpec {
  std::string kind = "lattice";  // lattice | regular_tree | cayley_ball | explicit
  int d = 1;
  int v = 3;
  int radius = 1;
  std::string preset;            // free_group | Z^d
  int rank = 2;
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> boundary;
  int valence = 0;

  /// Builds the graph, substituting `radius` when given.
  Graph build(std::optional<int> radius_override = std::nullopt) const;
};

/// none: plain Laplacian on all vertices (row sums zero).
/// tagged: rows and columns of tagged vertices removed.
/// outside: all vertices kept, ports leaving the ball act as edges to zero.
enum class Dirichlet { none, tagged, outside };

Eigen::SparseMatrix<double> combinatorial_laplacian(const Graph& g, Dirichlet bc);
Eigen::SparseMatrix<double> combinatorial_laplacian(const Graph& g, bool dirichlet_on_boundary);

/// Vertices carrying unknowns under `bc`, in row order.
std::vector<int> support_vertices(const Graph& g, Dirichlet bc);
std::vector<int> interior_vertices(const Graph& g);

struct GraphSpectrum {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // columns, unit Euclidean norm
};

GraphSpectrum laplacian_spectrum(const Graph& g, Dirichlet bc, int count);
GraphSpectrum laplacian_spectrum(const Graph& g, bool dirichlet_on_boundary, int count);
double mu0(const Graph& g, Dirichlet bc);
double mu0(const Graph& g, bool dirichlet_on_boundary);

enum class BoundaryKind { vertex, edge };
enum class CheegerMethod { exhaustive, folner_balls };

struct CheegerEstimate {
  double lower = 0.0;
  double upper = 0.0;
  CheegerMethod method = CheegerMethod::exhaustive;
  std::vector<int> witness;
  long long boundary_size = 0;
  long long subset_size = 0;
};

struct CheegerOptions {
  CheegerMethod method = CheegerMethod::exhaustive;
  BoundaryKind boundary = BoundaryKind::vertex;
  int max_size = 16;
  int threads = 1;
  bool include_tagged = false;  // subsets may use the shell; missing ports count as boundary
};

/// #boundary / #S for a subset S of vertices (complement includes tagged
/// vertices).
std::pair<long long, long long> boundary_ratio(const Graph& g, const std::vector<int>& subset,
                                               BoundaryKind kind);

CheegerEstimate cheeger(const Graph& g, const CheegerOptions& opts = {});

struct CheegerSandwich {
  double h_vertex = 0.0;
  double h_edge = 0.0;
  double mu0 = 0.0;
  double lower = 0.0;  // h_edge^2 / (2v)
  bool holds = false;
};

/// Verifies h^2/(2v) <= mu0 <= h with the edge-boundary Cheeger constant and
/// Dirichlet mu0 on the tagged graph; throws NumericalError on violation.
CheegerSandwich cheeger_inequality_check(const Graph& g, int max_size = 16);

/// Weighted quadratic form (1/pi) sum l_a (f(i) - f(j))^2 against the
/// measure sum V_i delta_i; vertices with V_i = 0 carry Dirichlet data.
struct ColboisForm {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> lengths;
  std::vector<double> volumes;

  void validate() const;
};

std::vector<double> colbois_spectrum(const ColboisForm& form);

// ---- I/O ----

std::string to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

}  // namespace hypspec::graph
