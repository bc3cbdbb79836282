#pragma once

#include <string>

#include "cardiomesh/mesh.hpp"

namespace cardiomesh {

/// Reads `v x y z` and `f i j k` records (1-based indices, optional
/// `i/t/n` suffixes); every other record type is ignored.
TriangleMesh load_obj(const std::string& path);

/// Writes vertices and faces with round-trip-exact doubles.
void save_obj(const std::string& path, const TriangleMesh& mesh);

/// Tags sidecar: {"structures":{name:[face,...]},
///                "caps":[{"name","cap_faces","wall_faces"}],
///                "vertex_weights":[...]} (weights optional, 0-based indices).
TemplateTags load_tags(const std::string& path, int vertex_count);

void save_tags(const std::string& path, const TemplateTags& tags);

/// Loads mesh + tags and validates every invariant.
TaggedMesh load_tagged_mesh(const std::string& mesh_path,
                            const std::string& tags_path);

}  // namespace cardiomesh
