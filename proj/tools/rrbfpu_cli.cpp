#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "rrbfpu/bench.hpp"
#include "rrbfpu/io.hpp"
#include "rrbfpu/pipeline.hpp"

namespace {

using namespace rrbfpu;

KernelFamily parse_kernel(const std::string& name) {
  if (name == "gaussian") return KernelFamily::GaussianCInf;
  if (name == "wendland") return KernelFamily::WendlandC2;
  throw Error("unknown kernel: " + name);
}

Method parse_method(const std::string& name) {
  if (name == "rbf") return Method::RBF;
  if (name == "rrbf") return Method::RRBF;
  throw Error("unknown method: " + name);
}

bool log_enabled() {
  const char* v = std::getenv("RRBFPU_LOG");
  return v == nullptr || std::string(v) != "quiet";
}

void log_config(const PipelineConfig& c, unsigned seed, int folds) {
  if (!log_enabled()) return;
  std::cerr << "config: method=" << (c.method == Method::RBF ? "rbf" : "rrbf")
            << " kernel="
            << (c.kernel.family == KernelFamily::GaussianCInf ? "gaussian"
                                                              : "wendland")
            << " epsilon=" << c.kernel.epsilon << " levels=(" << c.levels.a
            << "," << c.levels.b << "," << c.levels.c << ") xi=" << c.xi
            << " K=" << c.normal_opts.k << " gamma=" << c.gamma << " grid=("
            << c.grid_resolution[0] << "," << c.grid_resolution[1] << ","
            << c.grid_resolution[2] << ") min_points=" << c.pu.min_points
            << " seed=" << seed << " folds=" << folds << "\n";
}

// Affine map of the input into [0.05, 0.95]^3, inverted on mesh output.
struct Normalization {
  Vec3 scale{Vec3::Ones()};
  Vec3 offset{Vec3::Zero()};

  static Normalization fit(const PointSet& points) {
    Normalization nm;
    const Vec3 lo = points.coords.rowwise().minCoeff();
    const Vec3 hi = points.coords.rowwise().maxCoeff();
    const double span = std::max((hi - lo).maxCoeff(), 1e-12);
    const double s = 0.9 / span;
    nm.scale = Vec3::Constant(s);
    // Center each axis inside [0.05, 0.95]; the longest axis fills it.
    nm.offset = Vec3::Constant(0.5) - s * 0.5 * (lo + hi);
    return nm;
  }
  Vec3 forward(const Vec3& x) const { return x.cwiseProduct(scale) + offset; }
  Vec3 inverse(const Vec3& y) const { return (y - offset).cwiseQuotient(scale); }
};

int run(int argc, char** argv) {
  CLI::App app{"Rational RBF partition-of-unity surface reconstruction"};
  app.require_subcommand(1);

  std::string input, output;
  std::string method_name = "rrbf", kernel_name = "wendland";
  std::string surface_name = "f1";
  double epsilon = 1.0, xi = 1.0 / 3.0, gamma = 1.0;
  std::vector<double> level_values{2.0, 3.0, 1.0};
  int k_neighbors = 10, grid_res = 80, folds = 10;
  long n_samples = 1089;
  unsigned seed = 42;
  bool normalize = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--kernel", kernel_name, "gaussian | wendland");
    cmd->add_option("--epsilon", epsilon, "shape parameter");
    cmd->add_option("--method", method_name, "rbf | rrbf");
    cmd->add_option("--levels", level_values, "level values a b c")
        ->expected(3);
    cmd->add_option("--xi", xi, "off-surface stepsize factor");
    cmd->add_option("-K,--neighbors", k_neighbors, "K for normal estimation");
    cmd->add_option("--grid", grid_res, "grid resolution per axis");
    cmd->add_option("--gamma", gamma, "domain edge length");
    cmd->add_option("--seed", seed, "random seed");
  };

  auto* cmd_normals = app.add_subcommand(
      "normals", "estimate and orient normals, write 6-column XYZ");
  cmd_normals->add_option("input", input, "point cloud (XYZ or ASCII PLY)")
      ->required();
  cmd_normals->add_option("-o,--output", output, "output XYZ path")->required();
  cmd_normals->add_option("-K,--neighbors", k_neighbors, "K nearest neighbors");

  auto* cmd_rec = app.add_subcommand("reconstruct", "full pipeline to a mesh");
  cmd_rec->add_option("input", input, "point cloud (XYZ or ASCII PLY)")
      ->required();
  cmd_rec->add_option("-o,--output", output, "output mesh (.ply or .obj)")
      ->required();
  cmd_rec->add_flag("--normalize", normalize,
                    "rescale input into [0.05,0.95]^3 and map the mesh back");
  add_common(cmd_rec);

  auto* cmd_sweep = app.add_subcommand(
      "sweep", "epsilon sweep over an analytic test surface, write CSV");
  cmd_sweep->add_option("--surface", surface_name, "f1 | f2");
  cmd_sweep->add_option("--n", n_samples, "number of surface samples");
  cmd_sweep->add_option("-o,--output", output, "output CSV path")->required();
  add_common(cmd_sweep);

  auto* cmd_cv = app.add_subcommand(
      "crossval", "k-fold cross-validation error on a point cloud");
  cmd_cv->add_option("input", input, "point cloud (XYZ or ASCII PLY)")
      ->required();
  cmd_cv->add_option("--folds", folds, "number of folds");
  cmd_cv->add_flag("--normalize", normalize,
                   "rescale input into [0.05,0.95]^3 before fitting");
  add_common(cmd_cv);

  CLI11_PARSE(app, argc, argv);

  PipelineConfig config;
  config.method = parse_method(method_name);
  config.kernel = {parse_kernel(kernel_name), epsilon};
  config.levels = {level_values[0], level_values[1], level_values[2]};
  config.xi = xi;
  config.gamma = gamma;
  config.normal_opts.k = k_neighbors;
  config.grid_resolution = {grid_res, grid_res, grid_res};

  if (cmd_normals->parsed()) {
    const CloudFile cloud = read_point_cloud(input);
    NormalOptions opts;
    opts.k = k_neighbors;
    const OrientedNormals oriented = estimate_normals(cloud.points, opts);
    write_point_cloud_xyz(cloud.points, oriented.normals, output);
    if (log_enabled())
      std::cerr << "wrote " << cloud.points.count() << " oriented normals to "
                << output << "\n";
    return 0;
  }

  if (cmd_rec->parsed()) {
    log_config(config, seed, folds);
    CloudFile cloud = read_point_cloud(input);
    Normalization nm;
    if (normalize) {
      nm = Normalization::fit(cloud.points);
      for (Eigen::Index i = 0; i < cloud.points.count(); ++i)
        cloud.points.coords.col(i) = nm.forward(cloud.points.coords.col(i));
      if (log_enabled())
        std::cerr << "normalize: scale=" << nm.scale.transpose()
                  << " offset=" << nm.offset.transpose() << "\n";
    }
    ReconstructionResult result =
        reconstruct(cloud.points, cloud.normals, config);
    if (normalize) {
      for (Eigen::Index v = 0; v < result.mesh.vertices.cols(); ++v)
        result.mesh.vertices.col(v) = nm.inverse(result.mesh.vertices.col(v));
    }
    const MeshFormat format = output.size() >= 4 &&
                                      output.substr(output.size() - 4) == ".obj"
                                  ? MeshFormat::Obj
                                  : MeshFormat::Ply;
    write_mesh(result.mesh, output, format);
    const MeshStats stats = mesh_stats(result.mesh);
    std::cout << "vertices=" << stats.vertex_count
              << " triangles=" << stats.triangle_count
              << " boundary_edges=" << stats.boundary_edge_count << "\n";
    return 0;
  }

  if (cmd_sweep->parsed()) {
    log_config(config, seed, folds);
    SweepOptions opts;
    opts.base = config;
    const SweepResult result = epsilon_sweep(
        surface_by_name(surface_name), n_samples, config.kernel.family, seed,
        opts);
    write_sweep_csv(result, output);
    if (log_enabled())
      std::cerr << "wrote " << result.rows.size() << " sweep rows to " << output
                << "\n";
    return 0;
  }

  if (cmd_cv->parsed()) {
    log_config(config, seed, folds);
    CloudFile cloud = read_point_cloud(input);
    if (normalize) {
      const Normalization nm = Normalization::fit(cloud.points);
      for (Eigen::Index i = 0; i < cloud.points.count(); ++i)
        cloud.points.coords.col(i) = nm.forward(cloud.points.coords.col(i));
    }
    const double err = cross_validation_error(cloud.points, cloud.normals,
                                              config, folds, seed);
    std::cout << err << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
