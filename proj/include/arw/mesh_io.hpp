#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arw/errors.hpp"
#include "arw/mesh.hpp"

namespace arw {

enum class MeshFormat { StlBinary, StlAscii, Obj };

struct LoadReport {
  std::size_t dropped_faces = 0;
};

namespace detail {

inline float read_f32(std::istream& in, long offset) {
  char buf[4];
  in.read(buf, 4);
  if (!in) throw ParseError("truncated float record", offset);
  float f;
  std::memcpy(&f, buf, 4);
  return f;
}

inline std::uint32_t read_u32(std::istream& in, long offset) {
  char buf[4];
  in.read(buf, 4);
  if (!in) throw ParseError("truncated uint32", offset);
  std::uint32_t v;
  std::memcpy(&v, buf, 4);
  return v;
}

inline std::vector<Triangle> parse_stl_binary(std::istream& in) {
  char header[80];
  in.read(header, 80);
  if (!in) throw ParseError("truncated STL header", 0);
  std::uint32_t count = read_u32(in, 80);
  std::vector<Triangle> tris;
  tris.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    long base = 84 + 50L * i;
    Vec3 pts[4];  // normal + 3 vertices
    for (int k = 0; k < 4; ++k) {
      pts[k].x = read_f32(in, base + 12 * k);
      pts[k].y = read_f32(in, base + 12 * k + 4);
      pts[k].z = read_f32(in, base + 12 * k + 8);
    }
    char attr[2];
    in.read(attr, 2);
    if (!in) throw ParseError("truncated facet record", base + 48);
    tris.emplace_back(pts[1], pts[2], pts[3]);  // stored normal recomputed
  }
  return tris;
}

inline std::vector<Triangle> parse_stl_ascii(std::istream& in) {
  std::vector<Triangle> tris;
  std::string tok;
  std::vector<Vec3> verts;
  long offset = 0;
  while (in >> tok) {
    if (tok == "vertex") {
      Vec3 v;
      if (!(in >> v.x >> v.y >> v.z))
        throw ParseError("malformed vertex record", static_cast<long>(in.tellg()));
      verts.push_back(v);
    } else if (tok == "endfacet") {
      if (verts.size() != 3)
        throw ParseError("facet without exactly 3 vertices", static_cast<long>(in.tellg()));
      tris.emplace_back(verts[0], verts[1], verts[2]);
      verts.clear();
    }
    offset = static_cast<long>(in.tellg());
  }
  (void)offset;
  return tris;
}

inline std::vector<Triangle> parse_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<Triangle> tris;
  std::string line;
  long line_start = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) throw ParseError("malformed v record", line_start);
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string field;
      while (ls >> field) {
        // Accept "i", "i/t", "i/t/n", "i//n"; only the vertex index matters.
        long i = std::strtol(field.c_str(), nullptr, 10);
        if (i == 0) throw ParseError("malformed f record", line_start);
        if (i < 0) i = static_cast<long>(verts.size()) + 1 + i;
        if (i < 1 || i > static_cast<long>(verts.size()))
          throw ParseError("f index out of range", line_start);
        idx.push_back(i - 1);
      }
      if (idx.size() < 3) throw ParseError("f record with <3 vertices", line_start);
      // Triangulated fan for polygons.
      for (std::size_t k = 1; k + 1 < idx.size(); ++k)
        tris.emplace_back(verts[idx[0]], verts[idx[k]], verts[idx[k + 1]]);
    }
    line_start += static_cast<long>(line.size()) + 1;
  }
  return tris;
}

}  // namespace detail

inline TriangleMesh load_mesh(const std::string& path, MeshFormat format,
                              LoadReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path);
  std::vector<Triangle> tris;
  switch (format) {
    case MeshFormat::StlBinary: tris = detail::parse_stl_binary(in); break;
    case MeshFormat::StlAscii:  tris = detail::parse_stl_ascii(in); break;
    case MeshFormat::Obj:       tris = detail::parse_obj(in); break;
  }
  std::size_t dropped = 0;
  TriangleMesh mesh = TriangleMesh::from_triangles(tris, &dropped);
  if (report) report->dropped_faces = dropped;
  return mesh;
}

// Format inferred from the extension; .stl is sniffed for the "solid" keyword.
inline TriangleMesh load_mesh(const std::string& path, LoadReport* report = nullptr) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".obj") return load_mesh(path, MeshFormat::Obj, report);
  if (ext == ".stl") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path);
    char head[6] = {0};
    in.read(head, 5);
    bool ascii = std::string(head).rfind("solid", 0) == 0;
    return load_mesh(path, ascii ? MeshFormat::StlAscii : MeshFormat::StlBinary, report);
  }
  throw ParseError("unrecognized mesh extension: " + path, 0);
}

inline void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileNotFound(path);
  out.precision(12);
  for (const auto& t : mesh.triangles()) {
    out << "v " << t.v0.x << " " << t.v0.y << " " << t.v0.z << "\n"
        << "v " << t.v1.x << " " << t.v1.y << " " << t.v1.z << "\n"
        << "v " << t.v2.x << " " << t.v2.y << " " << t.v2.z << "\n";
  }
  for (std::size_t i = 0; i < mesh.face_count(); ++i)
    out << "f " << 3 * i + 1 << " " << 3 * i + 2 << " " << 3 * i + 3 << "\n";
}

inline void save_stl_ascii(const TriangleMesh& mesh, const std::string& path,
                           const std::string& name = "mesh") {
  std::ofstream out(path);
  if (!out) throw FileNotFound(path);
  out.precision(12);
  out << "solid " << name << "\n";
  for (const auto& t : mesh.triangles()) {
    out << "  facet normal " << t.normal.x << " " << t.normal.y << " " << t.normal.z << "\n"
        << "    outer loop\n"
        << "      vertex " << t.v0.x << " " << t.v0.y << " " << t.v0.z << "\n"
        << "      vertex " << t.v1.x << " " << t.v1.y << " " << t.v1.z << "\n"
        << "      vertex " << t.v2.x << " " << t.v2.y << " " << t.v2.z << "\n"
        << "    endloop\n"
        << "  endfacet\n";
  }
  out << "endsolid " << name << "\n";
}

// Debug dump: mesh faces as an ASCII PLY (positions only, one face per triangle).
inline void save_ply(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileNotFound(path);
  out.precision(9);
  std::size_t f = mesh.face_count();
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << 3 * f << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "element face " << f << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (const auto& t : mesh.triangles()) {
    out << t.v0.x << " " << t.v0.y << " " << t.v0.z << "\n"
        << t.v1.x << " " << t.v1.y << " " << t.v1.z << "\n"
        << t.v2.x << " " << t.v2.y << " " << t.v2.z << "\n";
  }
  for (std::size_t i = 0; i < f; ++i)
    out << "3 " << 3 * i << " " << 3 * i + 1 << " " << 3 * i + 2 << "\n";
}

}  // namespace arw
