#include <doctest.h>

#include <Eigen/Geometry>
#include <cardiomesh/obj_io.hpp>
#include <cardiomesh/quality.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "synthetic.hpp"

using namespace cardiomesh;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "cardiomesh_mesh_tests";
  fs::create_directories(dir);
  return dir;
}

Eigen::Matrix3d rotation_xyz(double a, double b, double c) {
  return (Eigen::AngleAxisd(a, Vec3::UnitX()) *
          Eigen::AngleAxisd(b, Vec3::UnitY()) *
          Eigen::AngleAxisd(c, Vec3::UnitZ()))
      .toRotationMatrix();
}

}  // namespace

TEST_CASE("load_tagged_mesh reads a cube with one structure") {
  const auto dir = scratch_dir();
  const TriangleMesh cube = synthetic::unit_cube();
  save_obj((dir / "cube.obj").string(), cube);
  {
    std::ofstream tags(dir / "cube.tags.json");
    tags << R"({"structures":{"all":[0,1,2,3,4,5,6,7,8,9,10,11]}})";
  }
  const TaggedMesh tm = load_tagged_mesh((dir / "cube.obj").string(),
                                         (dir / "cube.tags.json").string());
  CHECK(tm.mesh.vertex_count() == 8);
  CHECK(tm.mesh.face_count() == 12);
  CHECK(tm.tags.structures.at("all").size() == 12);
  CHECK(tm.tags.vertex_weights.size() == 8);
}

TEST_CASE("tags referencing an out-of-range face fail validation") {
  const auto dir = scratch_dir();
  const TriangleMesh cube = synthetic::unit_cube();
  save_obj((dir / "cube2.obj").string(), cube);
  {
    std::ofstream tags(dir / "bad.tags.json");
    tags << R"({"structures":{"all":[1000000000]}})";
  }
  CHECK_THROWS_AS(load_tagged_mesh((dir / "cube2.obj").string(),
                                   (dir / "bad.tags.json").string()),
                  ValidationError);
}

TEST_CASE("negative vertex weights fail validation") {
  const auto dir = scratch_dir();
  save_obj((dir / "tri.obj").string(), synthetic::single_triangle());
  {
    std::ofstream tags(dir / "tri.tags.json");
    tags << R"({"structures":{"all":[0]},"vertex_weights":[1.0,-0.5,1.0]})";
  }
  CHECK_THROWS_AS(load_tagged_mesh((dir / "tri.obj").string(),
                                   (dir / "tri.tags.json").string()),
                  ValidationError);
}

TEST_CASE("OBJ round trip is exact") {
  const auto dir = scratch_dir();
  TriangleMesh mesh = synthetic::icosphere(2);
  mesh.vertices.row(0) << 0.1234567890123456789, -1e-17, 3.0000000000000004;
  const auto path = (dir / "roundtrip.obj").string();
  save_obj(path, mesh);
  const TriangleMesh back = load_obj(path);
  CHECK(back.vertices == mesh.vertices);
  CHECK(back.faces == mesh.faces);
}

TEST_CASE("synthetic vessel template is watertight with 4 disjoint caps") {
  const TaggedMesh tm = synthetic::vessel_template(4);
  CHECK(tm.tags.caps.size() == 4);
  CHECK(boundary_edges(tm.mesh).empty());
  CHECK(enclosed_volume(tm.mesh).sign == 1);
  for (const auto& cap : tm.tags.caps) {
    CHECK(!cap.cap_faces.empty());
    CHECK(!cap.wall_faces.empty());
  }
  // caps are planar fans at rest
  const auto coplanarity = cap_coplanarity(tm.mesh, tm.tags);
  for (double c : coplanarity) CHECK(c < 1e-12);
}

TEST_CASE("face normals of the unit square and winding flip") {
  const TriangleMesh square = synthetic::unit_square();
  const VertexMatrix n = face_normals(square);
  for (int f = 0; f < 2; ++f) {
    CHECK(n(f, 0) == doctest::Approx(0.0));
    CHECK(n(f, 1) == doctest::Approx(0.0));
    CHECK(n(f, 2) == doctest::Approx(1.0));
  }

  TriangleMesh flipped = square;
  flipped.faces.col(1).swap(flipped.faces.col(2));
  const VertexMatrix nf = face_normals(flipped);
  for (int f = 0; f < 2; ++f) CHECK(nf(f, 2) == doctest::Approx(-1.0));
}

TEST_CASE("icosphere normals point radially outward") {
  const TriangleMesh sphere = synthetic::icosphere(2);
  const VertexMatrix n = face_normals(sphere);
  double max_angle = 0.0;
  for (int f = 0; f < sphere.face_count(); ++f) {
    const Vec3 centroid = (sphere.vertices.row(sphere.faces(f, 0)) +
                           sphere.vertices.row(sphere.faces(f, 1)) +
                           sphere.vertices.row(sphere.faces(f, 2))) /
                          3.0;
    const double cosine = n.row(f).dot(centroid.normalized().transpose());
    max_angle = std::max(max_angle, std::acos(std::clamp(cosine, -1.0, 1.0)));
  }
  CHECK(max_angle < 12.0 * M_PI / 180.0);
}

TEST_CASE("degenerate face raises") {
  TriangleMesh mesh = synthetic::single_triangle();
  mesh.vertices.row(2) = mesh.vertices.row(1);  // zero area
  CHECK_THROWS_AS(face_normals(mesh), ValidationError);
}

TEST_CASE("enclosed volume of the unit cube") {
  const auto result = enclosed_volume(synthetic::unit_cube());
  CHECK(result.volume == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.sign == 1);
}

TEST_CASE("enclosed volume of an icosphere approaches the sphere volume") {
  const auto result = enclosed_volume(synthetic::icosphere(4));
  const double exact = 4.0 / 3.0 * M_PI;
  CHECK(std::abs(result.volume - exact) / exact < 5e-3);
}

TEST_CASE("open mesh raises with boundary edges listed") {
  TriangleMesh cube = synthetic::unit_cube();
  cube.faces.conservativeResize(11, 3);  // drop one face
  CHECK_THROWS_WITH_AS(enclosed_volume(cube),
                       doctest::Contains("boundary edges"), ValidationError);
}

TEST_CASE("enclosed volume is rigid invariant") {
  const TriangleMesh sphere = synthetic::icosphere(3);
  const double v0 = enclosed_volume(sphere).volume;
  TriangleMesh moved = sphere;
  const Eigen::Matrix3d R = rotation_xyz(0.3, -1.1, 2.2);
  moved.vertices = (sphere.vertices * R.transpose()).rowwise() +
                   Eigen::RowVector3d(4.0, -7.5, 11.0);
  const double v1 = enclosed_volume(moved).volume;
  CHECK(std::abs(v1 - v0) / v0 < 1e-9);
}

TEST_CASE("face normals rotate with the mesh") {
  const TriangleMesh sphere = synthetic::icosphere(2);
  const Eigen::Matrix3d R = rotation_xyz(0.7, 0.2, -0.9);
  TriangleMesh rotated = sphere;
  rotated.vertices = sphere.vertices * R.transpose();
  const VertexMatrix n0 = face_normals(sphere) * R.transpose();
  const VertexMatrix n1 = face_normals(rotated);
  CHECK((n1 - n0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("surface sampling is deterministic and area weighted") {
  const TriangleMesh square = synthetic::unit_square();
  const int count = 100000;
  const SurfaceSamples a = surface_samples(square, count, 7);
  const SurfaceSamples b = surface_samples(square, count, 7);
  CHECK(a.points == b.points);
  CHECK(a.normals == b.normals);
  CHECK(a.source_face == b.source_face);

  // the two half-square triangles have equal area; counts within 2%
  int first = 0;
  for (int i = 0; i < count; ++i) first += a.source_face[i] == 0;
  CHECK(std::abs(first - count / 2) < 0.02 * count / 2);

  const SurfaceSamples c = surface_samples(square, count, 8);
  CHECK(c.points != a.points);
}

TEST_CASE("samples on a single triangle stay inside with the face normal") {
  const TriangleMesh tri = synthetic::single_triangle();
  const SurfaceSamples s = surface_samples(tri, 3, 0);
  for (int i = 0; i < 3; ++i) {
    CHECK(s.source_face[i] == 0);
    const Vec3 p = s.points.row(i);
    CHECK(p.x() >= 0.0);
    CHECK(p.y() >= 0.0);
    CHECK(p.x() + p.y() <= 1.0 + 1e-12);
    CHECK(p.z() == 0.0);
    CHECK(s.normals(i, 2) == doctest::Approx(1.0));
  }
}
