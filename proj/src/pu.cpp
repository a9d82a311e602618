#include "rrbfpu/pu.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

namespace rrbfpu {

Covering build_covering(double gamma, Eigen::Index n_nodes) {
  if (!(gamma > 0.0)) throw Error("build_covering: gamma must be positive");
  if (n_nodes < 1) throw Error("build_covering: need at least one node");

  Covering cov;
  cov.gamma = gamma;
  cov.per_side = static_cast<int>(
      std::ceil(std::cbrt(static_cast<double>(n_nodes)) / 2.0));
  cov.delta = gamma / cov.per_side;
  const int m = cov.per_side;
  cov.centers.resize(3, static_cast<Eigen::Index>(m) * m * m);
  Eigen::Index c = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        cov.centers.col(c++) =
            Vec3(i + 0.5, j + 0.5, k + 0.5) * cov.delta;
  cov.radius.assign(cov.patch_count(), cov.delta);
  cov.patch_nodes.resize(cov.patch_count());
  return cov;
}

void assign_patch_nodes(Covering& covering, const SpatialIndex& index,
                        const PUOptions& opts) {
  const double max_radius =
      covering.delta * std::pow(opts.growth_factor, opts.max_growth_steps);
  for (Eigen::Index j = 0; j < covering.patch_count(); ++j) {
    const Vec3 center = covering.centers.col(j);
    double r = covering.delta;
    auto nodes = index.ball_query(center, r);
    // Surface data leave most cells empty; growing such patches lets their
    // local fits extrapolate over the far field instead of leaving holes
    // next to fitted neighbors. The grown radius is the distance to the
    // min_points-th nearest node (capped): growing by whole ball queries
    // instead can jump from an empty patch to one swallowing thousands of
    // nodes the moment its ball first touches the cloud, which both
    // overwhelms the local solvers and degrades conditioning.
    if (static_cast<int>(nodes.size()) < opts.min_points) {
      const int k = static_cast<int>(
          std::min<Eigen::Index>(opts.min_points, index.count()));
      const auto nearest = index.knn(center, k);
      if (!nearest.empty()) {
        const double d = (index.point(nearest.back()) - center).norm();
        r = std::clamp(d, covering.delta, max_radius);
        nodes = index.ball_query(center, r);
      }
    }
    covering.radius[j] = r;
    covering.patch_nodes[j] = std::move(nodes);
  }
}

namespace {

// Wendland C2 bump scaled to vanish exactly at the patch radius.
double weight_bump(double r, double radius) {
  const KernelSpec w{KernelFamily::WendlandC2, 1.0 / radius};
  return eval_kernel(w, r);
}

}  // namespace

std::vector<PatchWeight> shepard_weights(const Covering& covering,
                                         const std::vector<bool>& has_fit,
                                         const Vec3& x, double max_radius) {
  if (!(max_radius > 0.0)) {
    max_radius = covering.delta;
    for (Eigen::Index j = 0; j < covering.patch_count(); ++j)
      if (has_fit[j]) max_radius = std::max(max_radius, covering.radius[j]);
  }

  const int m = covering.per_side;
  const double cell = covering.delta;
  const int reach = static_cast<int>(std::ceil(max_radius / cell));
  const int ci = static_cast<int>(std::floor(x.x() / cell));
  const int cj = static_cast<int>(std::floor(x.y() / cell));
  const int ck = static_cast<int>(std::floor(x.z() / cell));

  std::vector<PatchWeight> out;
  double total = 0.0;
  for (int i = std::max(0, ci - reach); i <= std::min(m - 1, ci + reach); ++i)
    for (int j = std::max(0, cj - reach); j <= std::min(m - 1, cj + reach); ++j)
      for (int k = std::max(0, ck - reach); k <= std::min(m - 1, ck + reach); ++k) {
        const Eigen::Index p =
            (static_cast<Eigen::Index>(i) * m + j) * m + k;
        if (!has_fit[p]) continue;
        const double r = (x - covering.centers.col(p)).norm();
        // Open support with a few-ulp margin: a point constructed to lie
        // exactly on the boundary sphere can round a hair inside it.
        if (r >= covering.radius[p] * (1.0 - 1e-14)) continue;
        const double w = weight_bump(r, covering.radius[p]);
        if (w <= 0.0) continue;
        out.push_back({p, w});
        total += w;
      }
  if (out.empty())
    throw UncoveredPointError("shepard_weights: point not covered by any patch");
  for (auto& pw : out) pw.weight /= total;
  return out;
}

void PUInterpolant::rebuild_fit_mask() {
  has_fit_.assign(fits.size(), false);
  max_radius_ = covering.delta;
  trust_radius_ = 0.0;
  for (std::size_t j = 0; j < fits.size(); ++j) {
    has_fit_[j] = fits[j].has_value();
    if (!has_fit_[j]) continue;
    max_radius_ = std::max(max_radius_, covering.radius[j]);
    if (trust_radius_ == 0.0) {
      // All patches share one kernel spec; derive the resolution radius
      // once. Capped at the covering cell size: past its own cell a patch
      // is extrapolating even when a wide-support kernel has not decayed.
      const KernelSpec& kernel =
          std::holds_alternative<LocalRBF>(*fits[j])
              ? std::get<LocalRBF>(*fits[j]).kernel
              : std::get<LocalRRBF>(*fits[j]).kernel;
      trust_radius_ =
          std::min(kernel_decay_radius(kernel, 1e-2), covering.delta);
    }
  }
}

std::vector<PatchWeight> PUInterpolant::weights_at(const Vec3& x) const {
  return shepard_weights(covering, has_fit_, x, max_radius_);
}

double PUInterpolant::eval(const Vec3& x) const {
  std::vector<PatchWeight> weights;
  try {
    weights = shepard_weights(covering, has_fit_, x, max_radius_);
  } catch (const UncoveredPointError&) {
    if (sentinel_for_uncovered) return sentinel;
    throw;
  }
  // A rational patch is only trusted where it still resolves a fittable
  // neighborhood of its nodes; elsewhere the ratio is extrapolation noise,
  // as it also is where the denominator sits under the guard. Drop such
  // patches and renormalize over the rest. If no covering patch is
  // trustworthy, classify x by its nearest data node.
  double value = 0.0;
  double kept = 0.0;
  for (const auto& pw : weights) {
    const LocalFit& fit = *fits[pw.patch];
    try {
      if (std::holds_alternative<LocalRBF>(fit)) {
        value += pw.weight * eval_rbf(std::get<LocalRBF>(fit), x);
        kept += pw.weight;
      } else {
        const std::optional<double> local = eval_rrbf_resolved(
            std::get<LocalRRBF>(fit), x, trust_radius_, shell_offset);
        if (!local) continue;
        value += pw.weight * *local;
        kept += pw.weight;
      }
    } catch (const DenominatorNearZeroError&) {
    }
  }
  if (kept == 0.0) {
    if (node_index && node_index->count() > 0)
      return node_values(node_index->knn(x, 1).front());
    if (sentinel_for_uncovered) return sentinel;
    throw UncoveredPointError(
        "eval_pu: every covering patch is degenerate at this point");
  }
  return value / kept;
}

PUInterpolant fit_pu(const AugmentedDataset& data, Covering covering,
                     const KernelSpec& kernel, Method method,
                     const PUOptions& opts) {
  if (method == Method::RRBF && (data.values.array() == 0.0).any())
    throw ZeroFunctionValueError("fit_pu: RRBF requires nonzero values");

  auto index = std::make_shared<SpatialIndex>(data.nodes, covering.delta);
  assign_patch_nodes(covering, *index, opts);

  PUInterpolant interp;
  interp.covering = std::move(covering);
  interp.method = method;
  interp.sentinel = data.levels.b;
  interp.sentinel_for_uncovered = opts.sentinel_for_uncovered;
  interp.shell_offset = data.delta;
  std::vector<Eigen::Index> companions;
  for (std::size_t i = 0; i < data.origin.size(); ++i)
    if (data.origin[i] != NodeOrigin::Surface)
      companions.push_back(static_cast<Eigen::Index>(i));
  if (companions.empty()) {
    interp.node_index = std::move(index);
    interp.node_values = data.values;
  } else {
    PointSet off;
    off.coords.resize(3, static_cast<Eigen::Index>(companions.size()));
    interp.node_values.resize(static_cast<Eigen::Index>(companions.size()));
    for (std::size_t t = 0; t < companions.size(); ++t) {
      off.coords.col(t) = data.nodes.point(companions[t]);
      interp.node_values(t) = data.values(companions[t]);
    }
    interp.node_index =
        std::make_shared<SpatialIndex>(off, interp.covering.delta);
  }
  interp.fits.resize(interp.covering.patch_count());

  const Eigen::Index d = interp.covering.patch_count();
  std::atomic<Eigen::Index> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::string> errors;
  std::mutex err_mutex;
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(d)));
  auto worker = [&] {
    for (Eigen::Index j = next.fetch_add(1); j < d; j = next.fetch_add(1)) {
      if (failed.load(std::memory_order_relaxed)) return;
      const auto& members = interp.covering.patch_nodes[j];
      if (members.empty()) continue;
      Points3 nodes(3, static_cast<Eigen::Index>(members.size()));
      Eigen::VectorXd values(members.size());
      for (std::size_t t = 0; t < members.size(); ++t) {
        nodes.col(t) = data.nodes.point(members[t]);
        values(t) = data.values(members[t]);
      }
      try {
        if (method == Method::RBF) {
          interp.fits[j] = fit_rbf_local(nodes, values, kernel);
        } else {
          interp.fits[j] = fit_rrbf_local(nodes, values, kernel, opts.eig);
        }
      } catch (const std::exception& e) {
        failed.store(true, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.push_back("patch " + std::to_string(j) + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t + 1 < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (!errors.empty())
    throw ConditioningError("fit_pu: local fit failed (" + errors.front() +
                            (errors.size() > 1
                                 ? "; +" + std::to_string(errors.size() - 1) +
                                       " more)"
                                 : ")"));
  interp.rebuild_fit_mask();
  return interp;
}

}  // namespace rrbfpu
