#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qipp/mesh.hpp"

#include <set>
#include <sstream>

using namespace qipp;

TEST_CASE("structured 2x2 mesh: 8 triangles, 9 vertices, 1 interior vertex")
{
  const Mesh mesh = generate_structured(2, 2);
  CHECK(mesh.num_elements() == 8);
  CHECK(mesh.num_vertices() == 9);
  CHECK(mesh.interior_vertices().size() == 1);
  CHECK(mesh.interior_vertices()[0] == 4);
}

TEST_CASE("structured 1D mesh: smallest admissible has one interior vertex")
{
  const Mesh mesh = generate_structured(1, 2);
  CHECK(mesh.num_elements() == 2);
  CHECK(mesh.interior_vertices().size() == 1);
  CHECK_THROWS(generate_structured(1, 1));
}

TEST_CASE("refinement quadruples triangles and halves h")
{
  const Mesh mesh = generate_structured(2, 4);
  CHECK(mesh.num_elements() == 32);
  const Mesh fine = refine_uniform(mesh);
  CHECK(fine.num_elements() == 128);
  CHECK(fine.mesh_size() == doctest::Approx(0.5 * mesh.mesh_size()).epsilon(1e-14));
  CHECK(fine.interior_vertices().size() >= mesh.interior_vertices().size());
  for (int t = 0; t < fine.num_elements(); ++t) CHECK(fine.element_measure(t) > 0.0);

  std::vector<int> parents;
  const Mesh fine2 = refine_uniform(mesh, &parents);
  CHECK(parents.size() == 128);
  CHECK(parents[5] == 1);
}

TEST_CASE("edge incidence count identity")
{
  for (int n : {2, 3, 5}) {
    const Mesh mesh = generate_structured(2, n);
    int interior = 0, boundary = 0;
    for (int e = 0; e < mesh.num_edges(); ++e)
      (mesh.edge_on_boundary(e) ? boundary : interior)++;
    CHECK(2 * interior + boundary == 3 * mesh.num_elements());
  }
}

TEST_CASE("element patches: valence and monotonicity")
{
  const Mesh mesh = generate_structured(2, 4);
  // a regular interior vertex of the criss-cross mesh has 6 incident elements
  const int z = mesh.interior_vertices()[4];
  const PatchRef p1 = element_patch(mesh, SeedKind::Vertex, z, 1);
  CHECK(p1.size() == 6);
  const PatchRef p2 = element_patch(mesh, SeedKind::Vertex, z, 2);
  CHECK(p2.size() > p1.size());
  for (int t : p1.elements) CHECK(p2.contains(t));
  // stabilizes at the full mesh
  const PatchRef pbig = element_patch(mesh, SeedKind::Vertex, z, 32);
  CHECK(pbig.size() == mesh.num_elements());
}

TEST_CASE("1D interior vertex patch has the two incident intervals")
{
  const Mesh mesh = generate_structured(1, 5);
  const int z = mesh.interior_vertices()[1];
  const PatchRef p = element_patch(mesh, SeedKind::Vertex, z, 1);
  CHECK(p.size() == 2);
}

TEST_CASE("anchors: r = 1 for elements touching an interior vertex")
{
  const Mesh mesh = generate_structured(2, 4);
  int corner_count = 0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const Anchor a = anchor_of_element(mesh, t);
    bool touches_interior = false;
    for (int v : mesh.element(t)) touches_interior |= !mesh.vertex_on_boundary(v);
    if (touches_interior) {
      CHECK(a.order == 1);
    } else {
      ++corner_count;
      CHECK(a.order == 2);
    }
  }
  // With one consistent diagonal, exactly two corner squares contribute a
  // triangle whose vertices all lie on the boundary, so R = 2.
  CHECK(corner_count == 2);
  CHECK(mesh_constant_R(mesh) == 2);
}

TEST_CASE("anchor order bounded by mesh graph diameter")
{
  const Mesh mesh = generate_structured(2, 3);
  for (int t = 0; t < mesh.num_elements(); ++t)
    CHECK(anchor_of_element(mesh, t).order <= mesh.num_elements());
}

TEST_CASE("single-interior-vertex strip mesh reaches R = 4")
{
  // An elongated fan: a strip of squares with only one interior vertex at the
  // far left; the far-right entities need four patch hops.
  std::vector<Eigen::Vector2d> verts;
  std::vector<std::vector<int>> elems;
  const int cols = 4;
  for (int i = 0; i <= cols; ++i) {
    verts.push_back({static_cast<double>(i), 0.0});
    verts.push_back({static_cast<double>(i), 1.0});
  }
  for (int i = 0; i < cols; ++i) {
    const int a = 2 * i, b = 2 * i + 2, c = 2 * i + 3, d = 2 * i + 1;
    elems.push_back({a, b, c});
    elems.push_back({a, c, d});
  }
  // split the first square's lower triangle by its centroid -> interior vertex
  const int centroid = static_cast<int>(verts.size());
  verts.push_back({2.0 / 3.0, 1.0 / 3.0});
  // replace element 0 = {0, 2, 3} by three triangles around the centroid
  elems[0] = {0, 2, centroid};
  elems.push_back({2, 3, centroid});
  elems.push_back({3, 0, centroid});
  const Mesh mesh(2, verts, elems);
  CHECK(mesh.interior_vertices().size() == 1);
  CHECK(mesh_constant_R(mesh) == 4);
}

TEST_CASE("mesh text io round trip is byte identical")
{
  const Mesh mesh = generate_structured(2, 3);
  std::stringstream s1;
  write_mesh(s1, mesh);
  std::stringstream input(s1.str());
  const Mesh back = read_mesh(input);
  std::stringstream s2;
  write_mesh(s2, back);
  CHECK(s1.str() == s2.str());
  CHECK(back.num_elements() == mesh.num_elements());

  const Mesh mesh1 = generate_structured(1, 4);
  std::stringstream t1;
  write_mesh(t1, mesh1);
  std::stringstream tin(t1.str());
  std::stringstream t2;
  write_mesh(t2, read_mesh(tin));
  CHECK(t1.str() == t2.str());
}

TEST_CASE("random delaunay meshes are conforming and shape regular")
{
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Mesh mesh = random_delaunay_mesh(5, seed);
    CHECK(mesh.interior_vertices().size() > 0);
    for (int t = 0; t < mesh.num_elements(); ++t) CHECK(mesh.element_measure(t) > 0.0);
    // conformity is validated by the constructor; spot check Euler's formula
    CHECK(mesh.num_vertices() - mesh.num_edges() + mesh.num_elements() == 1);
  }
}

TEST_CASE("mesh rejects inverted and interior-vertex-free inputs")
{
  std::vector<Eigen::Vector2d> verts{{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS(Mesh(2, verts, {{0, 2, 1}}));  // clockwise
  CHECK_THROWS(Mesh(2, verts, {{0, 1, 2}}));  // no interior vertex
}
