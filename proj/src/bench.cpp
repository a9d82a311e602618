#include "rrbfpu/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <unordered_map>

namespace rrbfpu {

TestSurface surface_f1() {
  TestSurface s;
  s.name = "f1";
  s.implicit = [](const Vec3& x) {
    return (x - Vec3::Constant(0.5)).squaredNorm() - 0.25;
  };
  s.gradient = [](const Vec3& x) -> Vec3 { return 2.0 * (x - Vec3::Constant(0.5)); };
  return s;
}

TestSurface surface_f2() {
  TestSurface s;
  s.name = "f2";
  s.implicit = [](const Vec3& x) {
    const double sn = std::sin(4.0 * x.y());
    return (x - Vec3::Constant(0.5)).squaredNorm() - 0.25 + sn * sn * sn * sn;
  };
  s.gradient = [](const Vec3& x) -> Vec3 {
    Vec3 g = 2.0 * (x - Vec3::Constant(0.5));
    const double sn = std::sin(4.0 * x.y());
    const double cs = std::cos(4.0 * x.y());
    g.y() += 16.0 * sn * sn * sn * cs;
    return g;
  };
  return s;
}

TestSurface surface_by_name(const std::string& name) {
  if (name == "f1") return surface_f1();
  if (name == "f2") return surface_f2();
  throw Error("unknown test surface: " + name);
}

PointSet sample_surface(const TestSurface& surface, Eigen::Index n,
                        unsigned seed) {
  if (n < 4) throw Error("sample_surface: n must be >= 4");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec3 lo = surface.domain.lo;
  const Vec3 ext = surface.domain.extent();

  // Poisson-disk style rejection: purely independent draws can land two
  // samples arbitrarily close, which collapses the separation distance the
  // off-surface step Delta is tied to. Keep the draws quasi-uniform instead.
  const double min_sep = 0.5 / std::sqrt(static_cast<double>(n));
  struct TripleHash {
    std::size_t operator()(const std::array<long, 3>& c) const {
      std::size_t h = std::hash<long>{}(c[0]);
      h = h * 0x9e3779b97f4a7c15ull + std::hash<long>{}(c[1]);
      h = h * 0x9e3779b97f4a7c15ull + std::hash<long>{}(c[2]);
      return h;
    }
  };
  std::unordered_map<std::array<long, 3>, std::vector<Eigen::Index>, TripleHash>
      grid;
  auto cell_of = [&](const Vec3& p) {
    return std::array<long, 3>{static_cast<long>(std::floor(p.x() / min_sep)),
                               static_cast<long>(std::floor(p.y() / min_sep)),
                               static_cast<long>(std::floor(p.z() / min_sep))};
  };

  Points3 pts(3, n);
  Eigen::Index placed = 0;
  long failures = 0;
  while (placed < n) {
    Vec3 x = lo + Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(ext);
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
      const double f = surface.implicit(x);
      if (std::abs(f) <= 1e-10) {
        converged = true;
        break;
      }
      const Vec3 g = surface.gradient(x);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-20) break;
      // Damped Newton along the gradient.
      double step = 1.0;
      Vec3 next = x - step * f * g / g2;
      while (std::abs(surface.implicit(next)) >= std::abs(f) && step > 1e-8) {
        step *= 0.5;
        next = x - step * f * g / g2;
      }
      x = next;
    }
    bool separated = converged && surface.domain.contains(x);
    if (separated) {
      const auto c = cell_of(x);
      for (long di = -1; di <= 1 && separated; ++di)
        for (long dj = -1; dj <= 1 && separated; ++dj)
          for (long dk = -1; dk <= 1 && separated; ++dk) {
            const auto it = grid.find({c[0] + di, c[1] + dj, c[2] + dk});
            if (it == grid.end()) continue;
            for (Eigen::Index i : it->second)
              if ((pts.col(i) - x).norm() < min_sep) {
                separated = false;
                break;
              }
          }
    }
    if (separated) {
      grid[cell_of(x)].push_back(placed);
      pts.col(placed++) = x;
    } else {
      ++failures;
      if (failures > 100 * n)
        throw Error("sample_surface: projection keeps failing for " +
                    surface.name);
    }
  }
  if (failures > 0)
    std::cerr << "sample_surface: resampled " << failures
              << " non-converged draws for " << surface.name << "\n";
  return PointSet(std::move(pts));
}

double rmse_surface(const IsoMesh& mesh, const TestSurface& surface) {
  if (mesh.vertices.cols() == 0) throw Error("rmse_surface: empty mesh");
  double sum = 0.0;
  for (Eigen::Index v = 0; v < mesh.vertices.cols(); ++v) {
    const double f = surface.implicit(mesh.vertices.col(v));
    sum += f * f;
  }
  return std::sqrt(sum / static_cast<double>(mesh.vertices.cols()));
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> eps(20);
  for (int i = 0; i < 20; ++i)
    eps[i] = std::pow(10.0, -3.0 + 5.0 * i / 19.0);
  return eps;
}

std::optional<double> SweepResult::best_rmse(Method method) const {
  std::optional<double> best;
  for (const auto& row : rows) {
    if (row.method != method || !row.rmse) continue;
    if (!best || *row.rmse < *best) best = *row.rmse;
  }
  return best;
}

SweepResult epsilon_sweep(const TestSurface& surface, Eigen::Index n,
                          KernelFamily kernel, unsigned seed,
                          const SweepOptions& opts) {
  SweepResult result;
  result.surface = surface.name;
  result.n = n;
  result.seed = seed;
  result.kernel = kernel;

  const std::vector<double> eps =
      opts.epsilons.empty() ? default_epsilon_grid() : opts.epsilons;

  const PointSet points = sample_surface(surface, n, seed);
  PipelineConfig config = opts.base;
  config.kernel.family = kernel;
  // Normals and augmentation do not depend on epsilon or method.
  const AugmentedDataset data = prepare_dataset(points, std::nullopt, config);

  for (double e : eps) {
    for (Method method : opts.methods) {
      config.kernel.epsilon = e;
      config.method = method;
      SweepRow row{e, method, std::nullopt, 0.0};
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const PUInterpolant interp = fit_interpolant(data, config);
        const ScalarField field = eval_grid(interp, Box::cube(config.gamma),
                                            config.grid_resolution);
        const IsoMesh mesh = marching_cubes(field, data.levels.a);
        if (mesh.vertices.cols() > 0) row.rmse = rmse_surface(mesh, surface);
      } catch (const Error&) {
        // conditioning or evaluation failure: recorded as a missing entry
      }
      row.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << "surface,n,method,kernel,epsilon,rmse,seconds,seed\n";
  for (const auto& row : result.rows) {
    out << result.surface << ',' << result.n << ','
        << (row.method == Method::RBF ? "rbf" : "rrbf") << ','
        << (result.kernel == KernelFamily::GaussianCInf ? "gaussian"
                                                        : "wendland")
        << ',' << row.epsilon << ',';
    if (row.rmse) out << *row.rmse;
    out << ',' << row.seconds << ',' << result.seed << '\n';
  }
}

double cross_validation_error(const PointSet& points,
                              const std::optional<Points3>& normals,
                              const PipelineConfig& config, int folds,
                              unsigned seed) {
  const Eigen::Index n = points.count();
  if (folds < 2) throw Error("cross_validation_error: folds must be >= 2");
  if (folds > n) throw Error("cross_validation_error: more folds than points");

  // Normals come from the full set; held-out points only leave the fit.
  OrientedNormals oriented;
  if (normals && normals->cols() == n) {
    oriented.normals = *normals;
    oriented.degenerate_mask.assign(n, false);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double len = oriented.normals.col(i).norm();
      if (len < 1e-12) {
        oriented.degenerate_mask[i] = true;
      } else {
        oriented.normals.col(i) /= len;
      }
    }
  } else {
    oriented = estimate_normals(points, config.normal_opts);
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  double sq_sum = 0.0;
  Eigen::Index held_total = 0;
  for (int fold = 0; fold < folds; ++fold) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<int>(r % folds) == fold) {
        test.push_back(order[r]);
      } else {
        train.push_back(order[r]);
      }
    }
    if (train.empty())
      throw Error("cross_validation_error: empty training fold");

    PointSet train_points;
    train_points.coords.resize(3, static_cast<Eigen::Index>(train.size()));
    OrientedNormals train_normals;
    train_normals.normals.resize(3, static_cast<Eigen::Index>(train.size()));
    train_normals.degenerate_mask.resize(train.size());
    for (std::size_t t = 0; t < train.size(); ++t) {
      train_points.coords.col(t) = points.point(train[t]);
      train_normals.normals.col(t) = oriented.normals.col(train[t]);
      train_normals.degenerate_mask[t] = oriented.degenerate_mask[train[t]];
    }

    AugmentOptions aug;
    aug.xi = config.xi;
    aug.domain = Box::cube(config.gamma);
    const AugmentedDataset data =
        make_offsurface(train_points, train_normals, config.levels, aug);
    const PUInterpolant interp = fit_interpolant(data, config);
    for (Eigen::Index i : test) {
      const double diff = interp.eval(points.point(i)) - config.levels.a;
      sq_sum += diff * diff;
    }
    held_total += static_cast<Eigen::Index>(test.size());
  }
  return std::sqrt(sq_sum / static_cast<double>(held_total));
}

}  // namespace rrbfpu
