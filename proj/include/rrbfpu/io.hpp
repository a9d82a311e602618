#pragma once

#include <optional>
#include <string>

#include "rrbfpu/surface.hpp"
#include "rrbfpu/types.hpp"

namespace rrbfpu {

struct CloudFile {
  PointSet points;
  std::optional<Points3> normals;  // present only if every row carried them
};

/// Reads whitespace-separated XYZ (3 or 6 columns) or ASCII PLY with a
/// vertex element holding x y z [nx ny nz]. Malformed rows report their
/// line number; unsupported PLY elements are skipped with a warning.
CloudFile read_point_cloud(const std::string& path);

void write_point_cloud_xyz(const PointSet& points, const Points3& normals,
                           const std::string& path);

enum class MeshFormat { Ply, Obj };

/// ASCII writer, fixed 9-significant-digit floats; byte-deterministic.
void write_mesh(const IsoMesh& mesh, const std::string& path, MeshFormat format);

/// Reads meshes written by write_mesh (round-trip support).
IsoMesh read_mesh(const std::string& path, MeshFormat format);

}  // namespace rrbfpu
