#include "rrbfpu/surface.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "rrbfpu/mc_tables.hpp"

namespace rrbfpu {

ScalarField eval_grid(const PUInterpolant& interp, const Box& box,
                      const std::array<int, 3>& resolution) {
  if (resolution[0] < 2 || resolution[1] < 2 || resolution[2] < 2)
    throw Error("eval_grid: resolution must be >= 2 per axis");
  ScalarField field;
  field.box = box;
  field.resolution = resolution;
  field.values.resize(static_cast<std::size_t>(resolution[0]) * resolution[1] *
                      resolution[2]);

  const unsigned n_threads = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(resolution[2])));
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto slab = [&](int k0, int k1) {
    try {
      for (int k = k0; k < k1; ++k)
        for (int j = 0; j < resolution[1]; ++j)
          for (int i = 0; i < resolution[0]; ++i)
            field.at(i, j, k) = interp.eval(field.grid_point(i, j, k));
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  const int per = (resolution[2] + static_cast<int>(n_threads) - 1) /
                  static_cast<int>(n_threads);
  for (unsigned t = 1; t < n_threads; ++t) {
    const int k0 = static_cast<int>(t) * per;
    if (k0 >= resolution[2]) break;
    pool.emplace_back(slab, k0, std::min(resolution[2], k0 + per));
  }
  slab(0, std::min(resolution[2], per));
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return field;
}

namespace {

// Cube corner offsets and the grid edges they span, Bourke layout.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeEnds[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                  {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                  {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

IsoMesh marching_cubes(const ScalarField& field, double level) {
  IsoMesh mesh;
  mesh.level = level;

  const auto [min_it, max_it] =
      std::minmax_element(field.values.begin(), field.values.end());
  if (!(level > *min_it && level < *max_it)) {
    std::cerr << "warning: marching_cubes level " << level
              << " outside field range [" << *min_it << ", " << *max_it
              << "]; returning empty mesh\n";
    mesh.vertices.resize(3, 0);
    return mesh;
  }

  const int nx = field.resolution[0];
  const int ny = field.resolution[1];
  const int nz = field.resolution[2];

  // Shared vertices keyed by (lower grid node id, edge axis).
  std::unordered_map<std::uint64_t, Eigen::Index> edge_vertex;
  std::vector<Vec3> verts;
  auto node_id = [&](int i, int j, int k) {
    return (static_cast<std::uint64_t>(k) * ny + j) * nx + i;
  };
  auto vertex_on_edge = [&](int i1, int j1, int k1, double v1, int i2, int j2,
                            int k2, double v2) -> Eigen::Index {
    int axis;
    std::uint64_t base;
    if (i1 != i2) {
      axis = 0;
      base = node_id(std::min(i1, i2), j1, k1);
    } else if (j1 != j2) {
      axis = 1;
      base = node_id(i1, std::min(j1, j2), k1);
    } else {
      axis = 2;
      base = node_id(i1, j1, std::min(k1, k2));
    }
    const std::uint64_t key = base * 3 + axis;
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;

    const Vec3 p1 = field.grid_point(i1, j1, k1);
    const Vec3 p2 = field.grid_point(i2, j2, k2);
    const double t = (level - v1) / (v2 - v1);
    const Eigen::Index idx = static_cast<Eigen::Index>(verts.size());
    verts.push_back(p1 + t * (p2 - p1));
    edge_vertex.emplace(key, idx);
    return idx;
  };

  for (int k = 0; k + 1 < nz; ++k)
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        double val[8];
        int gi[8], gj[8], gk[8];
        int cube_index = 0;
        for (int c = 0; c < 8; ++c) {
          gi[c] = i + kCorner[c][0];
          gj[c] = j + kCorner[c][1];
          gk[c] = k + kCorner[c][2];
          val[c] = field.at(gi[c], gj[c], gk[c]);
          if (val[c] < level) cube_index |= 1 << c;
        }
        if (detail::kEdgeTable[cube_index] == 0) continue;

        Eigen::Index edge_vert[12];
        for (int e = 0; e < 12; ++e) {
          if (!(detail::kEdgeTable[cube_index] & (1 << e))) continue;
          const int a = kEdgeEnds[e][0];
          const int b = kEdgeEnds[e][1];
          edge_vert[e] = vertex_on_edge(gi[a], gj[a], gk[a], val[a], gi[b],
                                        gj[b], gk[b], val[b]);
        }
        for (int t = 0; detail::kTriTable[cube_index][t] != -1; t += 3) {
          const Eigen::Index a = edge_vert[detail::kTriTable[cube_index][t]];
          const Eigen::Index b = edge_vert[detail::kTriTable[cube_index][t + 1]];
          const Eigen::Index c = edge_vert[detail::kTriTable[cube_index][t + 2]];
          // Skip only triangles with repeated vertex indices: that removes
          // edge uses in pairs and keeps the mesh closed. Dropping by area
          // would punch holes, since a sliver with three distinct shared
          // vertices is still glued to three neighbors.
          if (a == b || b == c || a == c) continue;
          mesh.triangles.push_back({a, b, c});
        }
      }

  mesh.vertices.resize(3, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t v = 0; v < verts.size(); ++v) mesh.vertices.col(v) = verts[v];
  return mesh;
}

MeshStats mesh_stats(const IsoMesh& mesh) {
  MeshStats stats;
  stats.vertex_count = mesh.vertices.cols();
  stats.triangle_count = static_cast<Eigen::Index>(mesh.triangles.size());
  if (stats.vertex_count > 0) {
    stats.bounding_box.lo = mesh.vertices.rowwise().minCoeff();
    stats.bounding_box.hi = mesh.vertices.rowwise().maxCoeff();
  } else {
    stats.bounding_box = {Vec3::Zero(), Vec3::Zero()};
  }
  std::unordered_map<std::uint64_t, int> edge_use;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint64_t a = static_cast<std::uint64_t>(tri[e]);
      const std::uint64_t b = static_cast<std::uint64_t>(tri[(e + 1) % 3]);
      edge_use[(std::min(a, b) << 32) | std::max(a, b)]++;
    }
  }
  for (const auto& [key, uses] : edge_use)
    if (uses == 1) stats.boundary_edge_count++;
  return stats;
}

}  // namespace rrbfpu
