#pragma once

#include <vector>

#include "rrbfpu/spatial.hpp"
#include "rrbfpu/types.hpp"

namespace rrbfpu {

/// Local oriented tangent plane from a PCA of the K-neighborhood.
struct TangentPlane {
  Vec3 center{Vec3::Zero()};
  Vec3 normal{Vec3::Zero()};        // unit, or zero when degenerate
  Vec3 eigenvalues{Vec3::Zero()};   // sorted descending
  bool degenerate{false};
};

/// K-NN graph whose edge costs measure normal misalignment.
struct RiemannGraph {
  struct Edge {
    Eigen::Index i, k;
    double weight;  // 1 - |n_i . n_k|, in [0, 1]
  };
  Eigen::Index vertex_count{0};
  std::vector<Edge> edges;
};

struct OrientedNormals {
  Points3 normals;                    // unit columns; zero where degenerate
  std::vector<bool> degenerate_mask;
};

struct NormalOptions {
  int k{10};
  // Accept the PCA normal when lambda3 <= degeneracy_ratio * lambda2.
  double degeneracy_ratio{0.5};
};

/// Per-point tangent planes from the K nearest neighbors (self excluded;
/// K clamped to n-1).
std::vector<TangentPlane> estimate_tangent_planes(const PointSet& points,
                                                  const NormalOptions& opts);

/// Edge (i,k) present iff i is among k's neighbors or vice versa.
RiemannGraph build_riemann_graph(const PointSet& points,
                                 const std::vector<TangentPlane>& planes, int k);

/// Kruskal minimum spanning forest; one tree per connected component.
std::vector<RiemannGraph::Edge> minimal_spanning_tree(const RiemannGraph& graph);

/// Propagate a consistent sign along the tree, breadth-first per component.
/// Each component is seeded at its highest-x3 vertex, oriented toward +x3.
OrientedNormals orient_normals(const PointSet& points,
                               const std::vector<TangentPlane>& planes,
                               const std::vector<RiemannGraph::Edge>& tree);

/// estimate + graph + MST + orient in one call.
OrientedNormals estimate_normals(const PointSet& points, const NormalOptions& opts);

}  // namespace rrbfpu
