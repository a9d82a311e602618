#include "rrbfpu/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace rrbfpu {

namespace {

bool parse_doubles(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::istringstream ss(line);
  double v;
  while (ss >> v) out.push_back(v);
  ss.clear();
  std::string rest;
  ss >> rest;
  return rest.empty();
}

CloudFile read_xyz(std::ifstream& in, const std::string& path) {
  std::vector<Vec3> pts, nrm;
  std::string line;
  std::size_t lineno = 0;
  bool all_have_normals = true;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!parse_doubles(line, row) || (row.size() != 3 && row.size() != 6))
      throw Error(path + ":" + std::to_string(lineno) + ": malformed row");
    for (double v : row)
      if (!std::isfinite(v))
        throw Error(path + ":" + std::to_string(lineno) +
                    ": non-finite coordinate");
    pts.emplace_back(row[0], row[1], row[2]);
    if (row.size() == 6) {
      nrm.emplace_back(row[3], row[4], row[5]);
    } else {
      all_have_normals = false;
    }
  }
  if (pts.empty()) throw Error(path + ": no points");

  CloudFile cloud;
  cloud.points.coords.resize(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) cloud.points.coords.col(i) = pts[i];
  if (all_have_normals && nrm.size() == pts.size()) {
    Points3 normals(3, static_cast<Eigen::Index>(nrm.size()));
    for (std::size_t i = 0; i < nrm.size(); ++i) normals.col(i) = nrm[i];
    cloud.normals = std::move(normals);
  }
  return cloud;
}

CloudFile read_ply_cloud(std::ifstream& in, const std::string& path) {
  std::string line;
  std::size_t lineno = 1;  // "ply" already consumed
  std::size_t vertex_count = 0;
  std::vector<std::string> vertex_props;
  std::vector<std::pair<std::string, std::size_t>> other_elements;
  bool in_vertex_element = false;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "end_header") break;
    if (tok == "comment" || tok == "format") continue;
    if (tok == "element") {
      std::string name;
      std::size_t count;
      ss >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) {
        vertex_count = count;
      } else {
        other_elements.emplace_back(name, count);
      }
    } else if (tok == "property" && in_vertex_element) {
      std::string type, name;
      ss >> type >> name;
      vertex_props.push_back(name);
    }
  }
  if (vertex_count == 0) throw Error(path + ": PLY without vertex element");

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1;
  for (int p = 0; p < static_cast<int>(vertex_props.size()); ++p) {
    const std::string& n = vertex_props[p];
    if (n == "x") ix = p;
    if (n == "y") iy = p;
    if (n == "z") iz = p;
    if (n == "nx") inx = p;
    if (n == "ny") iny = p;
    if (n == "nz") inz = p;
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw Error(path + ": PLY vertex element lacks x y z");
  const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

  CloudFile cloud;
  cloud.points.coords.resize(3, static_cast<Eigen::Index>(vertex_count));
  Points3 normals;
  if (has_normals) normals.resize(3, static_cast<Eigen::Index>(vertex_count));

  std::vector<double> row;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line))
      throw Error(path + ": truncated PLY vertex list");
    ++lineno;
    if (!parse_doubles(line, row) || row.size() < vertex_props.size())
      throw Error(path + ":" + std::to_string(lineno) + ": malformed row");
    cloud.points.coords.col(v) = Vec3(row[ix], row[iy], row[iz]);
    if (has_normals) normals.col(v) = Vec3(row[inx], row[iny], row[inz]);
  }
  if (!cloud.points.all_finite()) throw Error(path + ": non-finite coordinates");
  if (has_normals) cloud.normals = std::move(normals);
  for (const auto& [name, count] : other_elements)
    std::cerr << "warning: " << path << ": skipping PLY element '" << name
              << "' (" << count << " entries)\n";
  return cloud;
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

CloudFile read_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open file");
  std::string first;
  if (!std::getline(in, first)) throw Error(path + ": empty file");
  if (first.rfind("ply", 0) == 0 && (first.size() == 3 || first[3] == '\r'))
    return read_ply_cloud(in, path);
  in.clear();
  in.seekg(0);
  return read_xyz(in, path);
}

void write_point_cloud_xyz(const PointSet& points, const Points3& normals,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open file for writing");
  const bool with_normals = normals.cols() == points.count();
  for (Eigen::Index i = 0; i < points.count(); ++i) {
    out << fmt9(points.coords(0, i)) << ' ' << fmt9(points.coords(1, i)) << ' '
        << fmt9(points.coords(2, i));
    if (with_normals)
      out << ' ' << fmt9(normals(0, i)) << ' ' << fmt9(normals(1, i)) << ' '
          << fmt9(normals(2, i));
    out << '\n';
  }
}

void write_mesh(const IsoMesh& mesh, const std::string& path, MeshFormat format) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open file for writing");
  if (format == MeshFormat::Ply) {
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertices.cols() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    for (Eigen::Index v = 0; v < mesh.vertices.cols(); ++v)
      out << fmt9(mesh.vertices(0, v)) << ' ' << fmt9(mesh.vertices(1, v))
          << ' ' << fmt9(mesh.vertices(2, v)) << '\n';
    for (const auto& tri : mesh.triangles)
      out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  } else {
    for (Eigen::Index v = 0; v < mesh.vertices.cols(); ++v)
      out << "v " << fmt9(mesh.vertices(0, v)) << ' '
          << fmt9(mesh.vertices(1, v)) << ' ' << fmt9(mesh.vertices(2, v))
          << '\n';
    for (const auto& tri : mesh.triangles)
      out << "f " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1
          << '\n';
  }
}

IsoMesh read_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open file");
  IsoMesh mesh;
  std::vector<Vec3> verts;
  if (format == MeshFormat::Ply) {
    std::string line;
    std::size_t vertex_count = 0, face_count = 0;
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      std::string tok;
      ss >> tok;
      if (tok == "element") {
        std::string name;
        std::size_t count;
        ss >> name >> count;
        if (name == "vertex") vertex_count = count;
        if (name == "face") face_count = count;
      } else if (tok == "end_header") {
        break;
      }
    }
    for (std::size_t v = 0; v < vertex_count; ++v) {
      double x, y, z;
      in >> x >> y >> z;
      verts.emplace_back(x, y, z);
    }
    for (std::size_t f = 0; f < face_count; ++f) {
      int n, a, b, c;
      in >> n >> a >> b >> c;
      if (n != 3) throw Error(path + ": non-triangle face");
      mesh.triangles.push_back({a, b, c});
    }
  } else {
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      std::string tok;
      ss >> tok;
      if (tok == "v") {
        double x, y, z;
        ss >> x >> y >> z;
        verts.emplace_back(x, y, z);
      } else if (tok == "f") {
        Eigen::Index a, b, c;
        ss >> a >> b >> c;
        mesh.triangles.push_back({a - 1, b - 1, c - 1});
      }
    }
  }
  mesh.vertices.resize(3, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t v = 0; v < verts.size(); ++v) mesh.vertices.col(v) = verts[v];
  return mesh;
}

}  // namespace rrbfpu
