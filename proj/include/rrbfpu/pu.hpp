#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "rrbfpu/augment.hpp"
#include "rrbfpu/interpolants.hpp"
#include "rrbfpu/spatial.hpp"

namespace rrbfpu {

enum class Method { RBF, RRBF };

/// Regular grid of overlapping spherical patches over [0, gamma]^3 with
/// d = (ceil(N^(1/3)/2))^3 patches of radius delta = gamma / d^(1/3).
struct Covering {
  double gamma{1.0};
  int per_side{1};      // d^(1/3)
  double delta{0.0};    // nominal patch radius, equals the cell size
  Points3 centers;      // cell centers, d columns
  std::vector<double> radius;  // per-patch effective radius (>= delta)
  std::vector<std::vector<Eigen::Index>> patch_nodes;

  Eigen::Index patch_count() const { return centers.cols(); }
};

Covering build_covering(double gamma, Eigen::Index n_nodes);

struct PUOptions {
  int min_points{10};
  double growth_factor{1.5};
  int max_growth_steps{5};
  // Value returned at uncovered points; disabled -> UncoveredPointError.
  bool sentinel_for_uncovered{true};
  DacgOptions eig;
};

/// Assigns nodes to patches by ball query; a patch holding fewer than
/// min_points nodes grows its radius (fit and weight radii kept equal) to
/// the distance of the min_points-th nearest node, capped at
/// delta * growth_factor^max_growth_steps. A patch still empty at the cap
/// carries no fit and zero weight.
void assign_patch_nodes(Covering& covering, const SpatialIndex& index,
                        const PUOptions& opts);

struct PatchWeight {
  Eigen::Index patch;
  double weight;
};

/// Normalized Shepard weights of the fitted patches whose ball contains x.
/// The unnormalized weight is a Wendland C2 bump vanishing at the patch
/// radius. Throws UncoveredPointError when no patch covers x.
/// `max_radius` bounds the candidate search; pass 0 to have it computed.
std::vector<PatchWeight> shepard_weights(const Covering& covering,
                                         const std::vector<bool>& has_fit,
                                         const Vec3& x, double max_radius = 0.0);

using LocalFit = std::variant<LocalRBF, LocalRRBF>;

/// Global PU blend of per-patch local fits.
class PUInterpolant {
 public:
  Covering covering;
  std::vector<std::optional<LocalFit>> fits;
  Method method{Method::RRBF};
  double sentinel{0.0};
  bool sentinel_for_uncovered{true};
  // Nearest-node fallback for points where no covering rational patch is
  // trustworthy: the point is classified by the level value of its nearest
  // off-surface node (surface nodes sit exactly at the iso-level and carry
  // no side information). Falls back to all nodes when the dataset has no
  // off-surface companions.
  std::shared_ptr<const SpatialIndex> node_index;
  Eigen::VectorXd node_values;
  // Off-surface companion offset of the fitted dataset. Points within it
  // of a patch node sit inside the constructed level band and are always
  // considered resolved, however sparse the wider neighborhood; this keeps
  // interpolation exact at the nodes in thinly sampled regions.
  double shell_offset{0.0};

  double eval(const Vec3& x) const;
  std::vector<PatchWeight> weights_at(const Vec3& x) const;
  const std::vector<bool>& fit_mask() const { return has_fit_; }
  void rebuild_fit_mask();

 private:
  std::vector<bool> has_fit_;
  double max_radius_{0.0};
  // Radius of the resolution test applied to rational patches: the distance
  // at which the shared kernel has decayed to 1e-2 of its maximum. Beyond
  // it a node no longer contributes meaningfully to the local expansion.
  double trust_radius_{0.0};
};

PUInterpolant fit_pu(const AugmentedDataset& data, Covering covering,
                     const KernelSpec& kernel, Method method,
                     const PUOptions& opts = {});

inline double eval_pu(const PUInterpolant& interp, const Vec3& x) {
  return interp.eval(x);
}

}  // namespace rrbfpu
