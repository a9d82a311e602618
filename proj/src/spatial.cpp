#include "rrbfpu/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace rrbfpu {

SpatialIndex::SpatialIndex(const PointSet& points, double cell_size)
    : points_(points.coords), cell_(cell_size) {
  if (points.count() < 1) throw Error("SpatialIndex: empty point set");
  if (!(cell_size > 0.0)) throw Error("SpatialIndex: cell_size must be positive");
  if (!points.all_finite()) throw Error("SpatialIndex: non-finite coordinates");
  for (Eigen::Index i = 0; i < points_.cols(); ++i) {
    cells_[key_of(points_.col(i))].push_back(i);
  }
}

SpatialIndex::CellKey SpatialIndex::key_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
          static_cast<std::int64_t>(std::floor(p.y() / cell_)),
          static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

std::vector<Eigen::Index> SpatialIndex::knn(const Vec3& query, int k) const {
  if (k < 1 || k > points_.cols())
    throw Error("knn: K out of range (K=" + std::to_string(k) +
                ", count=" + std::to_string(points_.cols()) + ")");

  // (distance, index) max-heap of current best k.
  using Entry = std::pair<double, Eigen::Index>;
  std::priority_queue<Entry> best;

  const CellKey c0 = key_of(query);
  // Expand rings of cells until the closest possible point in the next ring
  // cannot beat the current k-th distance. Cap rings at the occupied-cell span.
  std::int64_t max_ring = 0;
  for (const auto& [key, _] : cells_) {
    max_ring = std::max({max_ring, std::abs(key.x - c0.x), std::abs(key.y - c0.y),
                         std::abs(key.z - c0.z)});
  }
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    if (static_cast<int>(best.size()) == k) {
      const double ring_min_dist = (ring - 1) * cell_;  // conservative bound
      if (ring >= 1 && ring_min_dist > best.top().first) break;
    }
    for (std::int64_t dx = -ring; dx <= ring; ++dx) {
      for (std::int64_t dy = -ring; dy <= ring; ++dy) {
        for (std::int64_t dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
          auto it = cells_.find({c0.x + dx, c0.y + dy, c0.z + dz});
          if (it == cells_.end()) continue;
          for (Eigen::Index i : it->second) {
            const double d = (points_.col(i) - query).norm();
            if (static_cast<int>(best.size()) < k) {
              best.emplace(d, i);
            } else if (d < best.top().first ||
                       (d == best.top().first && i < best.top().second)) {
              best.pop();
              best.emplace(d, i);
            }
          }
        }
      }
    }
    if (static_cast<int>(best.size()) == k && ring * cell_ > best.top().first) break;
  }

  std::vector<Entry> out;
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
  });
  std::vector<Eigen::Index> idx(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) idx[i] = out[i].second;
  return idx;
}

std::vector<Eigen::Index> SpatialIndex::ball_query(const Vec3& center,
                                                   double radius) const {
  if (!(radius > 0.0)) throw Error("ball_query: radius must be positive");
  std::vector<Eigen::Index> out;
  const CellKey lo = key_of(center - Vec3::Constant(radius));
  const CellKey hi = key_of(center + Vec3::Constant(radius));
  const double r2 = radius * radius;
  for (std::int64_t cx = lo.x; cx <= hi.x; ++cx)
    for (std::int64_t cy = lo.y; cy <= hi.y; ++cy)
      for (std::int64_t cz = lo.z; cz <= hi.z; ++cz) {
        auto it = cells_.find({cx, cy, cz});
        if (it == cells_.end()) continue;
        for (Eigen::Index i : it->second) {
          if ((points_.col(i) - center).squaredNorm() <= r2) out.push_back(i);
        }
      }
  std::sort(out.begin(), out.end());
  return out;
}

double separation_distance(const PointSet& points) {
  const Eigen::Index n = points.count();
  if (n < 2) throw Error("separation_distance: need at least 2 points");
  double min2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = i + 1; k < n; ++k)
      min2 = std::min(min2, (points.coords.col(i) - points.coords.col(k)).squaredNorm());
  return 0.5 * std::sqrt(min2);
}

double fill_distance_estimate(const PointSet& points, const Box& domain,
                              const PointSet& probes) {
  if (points.count() < 1 || probes.count() < 1)
    throw Error("fill_distance_estimate: empty input");
  // Cell size tuned for near-uniform node density.
  const double cell = std::max(domain.extent().maxCoeff() /
                                   std::cbrt(static_cast<double>(points.count())),
                               1e-12);
  SpatialIndex index(points, cell);
  double h = 0.0;
  for (Eigen::Index p = 0; p < probes.count(); ++p) {
    const auto nearest = index.knn(probes.point(p), 1);
    h = std::max(h, (points.point(nearest[0]) - probes.point(p)).norm());
  }
  return h;
}

PointSet probe_grid(const Box& domain, int res) {
  if (res < 2) throw Error("probe_grid: res must be >= 2");
  Points3 pts(3, static_cast<Eigen::Index>(res) * res * res);
  Eigen::Index c = 0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k) {
        const Vec3 t(static_cast<double>(i) / (res - 1),
                     static_cast<double>(j) / (res - 1),
                     static_cast<double>(k) / (res - 1));
        pts.col(c++) = domain.lo + t.cwiseProduct(domain.extent());
      }
  return PointSet(std::move(pts));
}

}  // namespace rrbfpu
