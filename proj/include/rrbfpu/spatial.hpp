#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rrbfpu/types.hpp"

namespace rrbfpu {

/// Uniform cell grid over a point set, keyed by integer cell coordinates.
/// Immutable after construction; concurrent read-only queries are safe.
class SpatialIndex {
 public:
  SpatialIndex(const PointSet& points, double cell_size);

  /// Indices of the K nearest points to `query`, ordered by distance,
  /// ties broken by ascending node index.
  std::vector<Eigen::Index> knn(const Vec3& query, int k) const;

  /// All indices i with ||x_i - center|| <= radius, ascending.
  std::vector<Eigen::Index> ball_query(const Vec3& center, double radius) const;

  double cell_size() const { return cell_; }
  Eigen::Index count() const { return points_.cols(); }
  Vec3 point(Eigen::Index i) const { return points_.col(i); }

 private:
  struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const CellKey& c) const {
      std::size_t h = std::hash<std::int64_t>{}(c.x);
      h = h * 0x9e3779b97f4a7c15ull + std::hash<std::int64_t>{}(c.y);
      h = h * 0x9e3779b97f4a7c15ull + std::hash<std::int64_t>{}(c.z);
      return h;
    }
  };

  CellKey key_of(const Vec3& p) const;

  Points3 points_;
  double cell_;
  std::unordered_map<CellKey, std::vector<Eigen::Index>, CellHash> cells_;
};

/// Half the minimum pairwise distance; 0 when points coincide.
double separation_distance(const PointSet& points);

/// max over probes of the distance to the nearest node. An estimate from
/// below of the sup-min fill distance; improves with probe density.
double fill_distance_estimate(const PointSet& points, const Box& domain,
                              const PointSet& probes);

/// Regular grid of probes over `domain`, res points per axis.
PointSet probe_grid(const Box& domain, int res);

}  // namespace rrbfpu
