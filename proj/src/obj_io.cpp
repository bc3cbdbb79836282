#include "cardiomesh/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace cardiomesh {

using nlohmann::json;

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open OBJ file: " + path);

  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": malformed vertex record");
      vertices.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> fv{};
      std::string token;
      int k = 0;
      while (ls >> token) {
        if (k >= 3)
          throw ValidationError(path + ":" + std::to_string(line_no) +
                                ": only triangle faces are supported");
        // accept i, i/t, i//n, i/t/n; honor the vertex index only
        size_t pos = 0;
        long idx = 0;
        try {
          idx = std::stol(token, &pos);
        } catch (const std::exception&) {
          throw ValidationError(path + ":" + std::to_string(line_no) +
                                ": malformed face index '" + token + "'");
        }
        if (pos != token.size() && token[pos] != '/')
          throw ValidationError(path + ":" + std::to_string(line_no) +
                                ": malformed face index '" + token + "'");
        if (idx < 1)
          throw ValidationError(path + ":" + std::to_string(line_no) +
                                ": face indices must be positive (1-based)");
        fv[k++] = static_cast<int>(idx - 1);
      }
      if (k != 3)
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": face must have exactly 3 vertices");
      faces.push_back(fv);
    }
  }

  TriangleMesh mesh;
  mesh.vertices.resize(vertices.size(), 3);
  for (size_t i = 0; i < vertices.size(); ++i)
    mesh.vertices.row(i) = vertices[i];
  mesh.faces.resize(faces.size(), 3);
  for (size_t i = 0; i < faces.size(); ++i)
    for (int k = 0; k < 3; ++k) mesh.faces(i, k) = faces[i][k];
  mesh.validate();
  return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
  FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw ValidationError("cannot write OBJ file: " + path);
  for (int i = 0; i < mesh.vertex_count(); ++i)
    std::fprintf(out, "v %.17g %.17g %.17g\n", mesh.vertices(i, 0),
                 mesh.vertices(i, 1), mesh.vertices(i, 2));
  for (int f = 0; f < mesh.face_count(); ++f)
    std::fprintf(out, "f %d %d %d\n", mesh.faces(f, 0) + 1,
                 mesh.faces(f, 1) + 1, mesh.faces(f, 2) + 1);
  std::fclose(out);
}

static std::vector<int> face_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer())
      throw ValidationError(what + " must contain integer face indices");
    out.push_back(v.get<int>());
  }
  return out;
}

TemplateTags load_tags(const std::string& path, int vertex_count) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open tags file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("tags file " + path + ": " + e.what());
  }

  TemplateTags tags;
  if (j.contains("structures")) {
    if (!j["structures"].is_object())
      throw ValidationError("tags: 'structures' must be an object");
    for (const auto& [name, ids] : j["structures"].items())
      tags.structures[name] = face_list(ids, "structure '" + name + "'");
  }
  if (j.contains("caps")) {
    for (const auto& c : j["caps"]) {
      CapRecord cap;
      cap.name = c.value("name", std::string{});
      cap.cap_faces = face_list(c.at("cap_faces"), "cap_faces");
      cap.wall_faces = face_list(c.at("wall_faces"), "wall_faces");
      tags.caps.push_back(std::move(cap));
    }
  }
  if (j.contains("vertex_weights")) {
    const auto& w = j["vertex_weights"];
    if (!w.is_array())
      throw ValidationError("tags: 'vertex_weights' must be an array");
    tags.vertex_weights.resize(w.size());
    for (size_t i = 0; i < w.size(); ++i)
      tags.vertex_weights[i] = w[i].get<double>();
  } else {
    tags.vertex_weights = VectorXd::Ones(vertex_count);
  }
  return tags;
}

void save_tags(const std::string& path, const TemplateTags& tags) {
  json j;
  j["structures"] = json::object();
  for (const auto& [name, ids] : tags.structures) j["structures"][name] = ids;
  j["caps"] = json::array();
  for (const auto& cap : tags.caps)
    j["caps"].push_back({{"name", cap.name},
                         {"cap_faces", cap.cap_faces},
                         {"wall_faces", cap.wall_faces}});
  std::vector<double> w(tags.vertex_weights.data(),
                        tags.vertex_weights.data() + tags.vertex_weights.size());
  j["vertex_weights"] = w;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write tags file: " + path);
  out << j.dump(2) << "\n";
}

TaggedMesh load_tagged_mesh(const std::string& mesh_path,
                            const std::string& tags_path) {
  TaggedMesh tm;
  tm.mesh = load_obj(mesh_path);
  tm.tags = load_tags(tags_path, tm.mesh.vertex_count());
  tm.tags.validate(tm.mesh);
  return tm;
}

}  // namespace cardiomesh
