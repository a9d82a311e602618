#include "rrbfpu/normals.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace rrbfpu {

namespace {

// K-neighbor index lists, self excluded, K clamped to n-1.
std::vector<std::vector<Eigen::Index>> neighbor_sets(const PointSet& points, int k) {
  const Eigen::Index n = points.count();
  const int kk = static_cast<int>(std::min<Eigen::Index>(k, n - 1));
  const double cell = std::max((points.coords.rowwise().maxCoeff() -
                                points.coords.rowwise().minCoeff()).maxCoeff() /
                                   std::max(1.0, std::cbrt(static_cast<double>(n))),
                               1e-12);
  SpatialIndex index(points, cell);
  std::vector<std::vector<Eigen::Index>> nbrs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto list = index.knn(points.point(i), kk + 1);  // includes self at rank 0
    std::erase(list, i);
    if (static_cast<int>(list.size()) > kk) list.resize(kk);
    nbrs[i] = std::move(list);
  }
  return nbrs;
}

struct DisjointSet {
  std::vector<Eigen::Index> parent;
  explicit DisjointSet(Eigen::Index n) : parent(n) {
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  bool unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

std::vector<TangentPlane> estimate_tangent_planes(const PointSet& points,
                                                  const NormalOptions& opts) {
  const Eigen::Index n = points.count();
  if (opts.k < 3) throw Error("estimate_tangent_planes: K must be >= 3");
  if (n < 2) throw Error("estimate_tangent_planes: need at least 2 points");

  const auto nbrs = neighbor_sets(points, opts.k);
  std::vector<TangentPlane> planes(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& nb = nbrs[i];
    Vec3 c = Vec3::Zero();
    for (Eigen::Index j : nb) c += points.point(j);
    c /= static_cast<double>(nb.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (Eigen::Index j : nb) {
      const Vec3 d = points.point(j) - c;
      cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
    eig.computeDirect(cov);
    // Eigen returns ascending eigenvalues; store descending.
    TangentPlane& pl = planes[i];
    pl.center = c;
    pl.eigenvalues = Vec3(eig.eigenvalues()(2), eig.eigenvalues()(1),
                          eig.eigenvalues()(0));
    const double l1 = pl.eigenvalues(0);
    const double l2 = pl.eigenvalues(1);
    const double l3 = pl.eigenvalues(2);
    if (l1 <= 1e-24 || l3 > opts.degeneracy_ratio * l2) {
      pl.degenerate = true;
      pl.normal = Vec3::Zero();
    } else {
      pl.normal = eig.eigenvectors().col(0).normalized();
    }
  }
  return planes;
}

RiemannGraph build_riemann_graph(const PointSet& points,
                                 const std::vector<TangentPlane>& planes, int k) {
  const auto nbrs = neighbor_sets(points, k);
  RiemannGraph graph;
  graph.vertex_count = points.count();
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  for (Eigen::Index i = 0; i < points.count(); ++i) {
    for (Eigen::Index j : nbrs[i]) {
      const auto key = std::minmax(i, j);
      if (!seen.insert(key).second) continue;
      const double cost = 1.0 - std::abs(planes[i].normal.dot(planes[j].normal));
      graph.edges.push_back({key.first, key.second, std::clamp(cost, 0.0, 1.0)});
    }
  }
  return graph;
}

std::vector<RiemannGraph::Edge> minimal_spanning_tree(const RiemannGraph& graph) {
  if (graph.vertex_count == 0) throw Error("minimal_spanning_tree: empty graph");
  auto edges = graph.edges;
  std::stable_sort(edges.begin(), edges.end(),
                   [](const auto& a, const auto& b) { return a.weight < b.weight; });
  DisjointSet ds(graph.vertex_count);
  std::vector<RiemannGraph::Edge> tree;
  for (const auto& e : edges) {
    if (ds.unite(e.i, e.k)) tree.push_back(e);
  }
  return tree;
}

OrientedNormals orient_normals(const PointSet& points,
                               const std::vector<TangentPlane>& planes,
                               const std::vector<RiemannGraph::Edge>& tree) {
  const Eigen::Index n = points.count();
  OrientedNormals out;
  out.normals.resize(3, n);
  out.degenerate_mask.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.normals.col(i) = planes[i].normal;
    out.degenerate_mask[i] = planes[i].degenerate;
  }

  std::vector<std::vector<Eigen::Index>> adj(n);
  for (const auto& e : tree) {
    adj[e.i].push_back(e.k);
    adj[e.k].push_back(e.i);
  }

  std::vector<bool> visited(n, false);
  std::vector<bool> done(n, false);
  for (Eigen::Index start = 0; start < n; ++start) {
    if (visited[start]) continue;
    // Collect the component, then seed at its highest-x3 point.
    std::vector<Eigen::Index> component;
    std::queue<Eigen::Index> q;
    q.push(start);
    visited[start] = true;
    while (!q.empty()) {
      const Eigen::Index v = q.front();
      q.pop();
      component.push_back(v);
      for (Eigen::Index w : adj[v])
        if (!visited[w]) {
          visited[w] = true;
          q.push(w);
        }
    }
    Eigen::Index seed = component.front();
    for (Eigen::Index v : component)
      if (points.point(v).z() > points.point(seed).z()) seed = v;
    if (out.normals.col(seed).z() < 0.0) out.normals.col(seed) *= -1.0;

    std::queue<Eigen::Index> bfs;
    bfs.push(seed);
    done[seed] = true;
    while (!bfs.empty()) {
      const Eigen::Index v = bfs.front();
      bfs.pop();
      for (Eigen::Index w : adj[v]) {
        if (done[w]) continue;
        done[w] = true;
        if (out.normals.col(v).dot(out.normals.col(w)) < 0.0)
          out.normals.col(w) *= -1.0;
        bfs.push(w);
      }
    }
  }
  return out;
}

OrientedNormals estimate_normals(const PointSet& points, const NormalOptions& opts) {
  const auto planes = estimate_tangent_planes(points, opts);
  const auto graph = build_riemann_graph(points, planes, opts.k);
  const auto tree = minimal_spanning_tree(graph);
  return orient_normals(points, planes, tree);
}

}  // namespace rrbfpu
