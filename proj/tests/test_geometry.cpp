#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "prrbc/geometry.hpp"

using namespace prrbc;

namespace {

ComponentGeometry rect(ComponentKind kind, double L, double H) {
  ComponentGeometry g;
  g.kind = kind;
  g.length = L;
  g.thickness = H;
  return g;
}

ComponentGeometry cracked(double L, double H, double cx, double depth, double opening = 0.006) {
  ComponentGeometry g = rect(ComponentKind::RectLoadedCracked, L, H);
  g.crack = CrackSpec{cx, depth, opening};
  return g;
}

// independent oracle: unique undirected vertex pairs over all triangles
int count_edges(const ComponentMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m.tris)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  return static_cast<int>(edges.size());
}

}  // namespace

TEST_CASE("unit square at h=1 is two triangles with nine P2 nodes") {
  auto m = generate_component_mesh(rect(ComponentKind::Rect, 1, 1), 1.0);
  CHECK(m.tris.size() == 2);
  CHECK(m.num_nodes() == 9);
  CHECK(m.n_vertices == 4);
  CHECK(mesh_area(m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rect 5x1 at h=0.25 matches the combinatorial node oracle") {
  auto m = generate_component_mesh(rect(ComponentKind::Rect, 5, 1), 0.25);
  CHECK(m.tris.size() == 160);  // 20x4 cells, split in two
  CHECK(m.n_vertices == 21 * 5);
  CHECK(m.num_nodes() == m.n_vertices + count_edges(m));
  CHECK(mesh_area(m) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("no duplicate nodes within tolerance") {
  auto m = generate_component_mesh(rect(ComponentKind::Rect, 5, 1), 0.25);
  std::set<std::pair<long, long>> seen;
  const double tol = 1e-12 * m.geom.length;
  for (const auto& p : m.nodes) {
    auto key = std::make_pair(std::lround(p.x() / tol), std::lround(p.y() / tol));
    CHECK(seen.insert(key).second);
  }
}

TEST_CASE("refining h by two quadruples the triangle count for rectangular kinds") {
  for (auto kind : {ComponentKind::Rect, ComponentKind::RectLoaded, ComponentKind::Rect15L}) {
    auto coarse = generate_component_mesh(rect(kind, 5, 1), 0.5);
    auto fine = generate_component_mesh(rect(kind, 5, 1), 0.25);
    CHECK(fine.tris.size() == 4 * coarse.tris.size());
  }
}

TEST_CASE("T-shape carries pier, clamp and both ports") {
  ComponentGeometry g = rect(ComponentKind::TShape, 5, 1);
  auto m = generate_component_mesh(g, 0.25);
  CHECK(mesh_area(m) == doctest::Approx(5.0 + 3.0).epsilon(1e-12));
  CHECK(m.has_port(PortSide::Left));
  CHECK(m.has_port(PortSide::Right));
  CHECK(!m.dirichlet_dofs().empty());
  // clamped nodes sit at the pier bottom
  for (int d : m.dirichlet_dofs()) CHECK(m.nodes[d / 2].y() == doctest::Approx(-3.0));
}

TEST_CASE("crack doubles nodes with equal coordinates and distinct indices") {
  auto m = generate_component_mesh(cracked(5, 1, 2.5, 0.25), 0.25);
  std::map<std::pair<long, long>, std::vector<int>> by_coord;
  for (int i = 0; i < m.num_nodes(); ++i) {
    auto key = std::make_pair(std::lround(m.nodes[i].x() * 1e9), std::lround(m.nodes[i].y() * 1e9));
    by_coord[key].push_back(i);
  }
  int doubled = 0;
  for (const auto& [coord, ids] : by_coord) {
    CHECK(ids.size() <= 2);
    if (ids.size() == 2) {
      ++doubled;
      CHECK(m.nodes[ids[0]] == m.nodes[ids[1]]);
      CHECK(std::abs(m.nodes[ids[0]].x() - 2.5) < 1e-12);
    }
  }
  // one doubled vertex on the loaded boundary, one doubled slit-edge midpoint
  CHECK(doubled == 2);
}

TEST_CASE("crack tip line can be supplied as an extra grid line") {
  const double extra[] = {0.7};
  auto m = generate_component_mesh(cracked(5, 1, 2.5, 0.3), 0.25, extra);
  CHECK(m.tris.size() == 160);  // the nearest uniform line moved, cell count unchanged
  // misaligned slit rejected without the extra line
  CHECK_THROWS_AS(generate_component_mesh(cracked(5, 1, 2.5, 0.3), 0.25), std::invalid_argument);
  CHECK_THROWS_AS(generate_component_mesh(cracked(5, 1, 2.6, 0.25), 0.25), std::invalid_argument);
}

TEST_CASE("invalid dimensions are rejected") {
  CHECK_THROWS_AS(generate_component_mesh(rect(ComponentKind::Rect, -1, 1), 0.25),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_component_mesh(rect(ComponentKind::Rect, 1, 1), -0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_component_mesh(cracked(5, 1, 2.5, 1.5), 0.25), std::invalid_argument);
}

TEST_CASE("port dofs are ordered bottom to top, x before y, deterministically") {
  auto m = generate_component_mesh(rect(ComponentKind::Rect, 5, 1), 0.25);
  auto dofs = extract_port_dofs(m, PortSide::Left);
  CHECK(dofs.size() == 18);  // 9 port nodes
  for (size_t i = 0; i + 1 < dofs.size(); i += 2) {
    CHECK(dofs[i] % 2 == 0);
    CHECK(dofs[i + 1] == dofs[i] + 1);
  }
  for (size_t i = 2; i < dofs.size(); i += 2)
    CHECK(m.nodes[dofs[i] / 2].y() > m.nodes[dofs[i - 2] / 2].y());
  CHECK(extract_port_dofs(m, PortSide::Left) == dofs);

  auto right = extract_port_dofs(m, PortSide::Right);
  CHECK(right.size() == dofs.size());  // compatible components match

  auto abutment = generate_component_mesh(rect(ComponentKind::Rect15L, 7.5, 1), 0.25);
  CHECK_THROWS_AS(extract_port_dofs(abutment, PortSide::Left), std::invalid_argument);
  CHECK(extract_port_dofs(abutment, PortSide::Right).size() == 18);
}

TEST_CASE("mirrored abutment flips port and clamp sides") {
  ComponentGeometry g = rect(ComponentKind::Rect15L, 7.5, 1);
  g.mirrored = true;
  auto m = generate_component_mesh(g, 0.25);
  CHECK(m.has_port(PortSide::Left));
  CHECK(!m.has_port(PortSide::Right));
  for (int d : m.dirichlet_dofs()) {
    CHECK(m.nodes[d / 2].y() == doctest::Approx(0.0));
    CHECK(m.nodes[d / 2].x() >= 7.5 - 1.0 - 1e-12);
  }
}

TEST_CASE("debug dump lists nodes, triangles and tagged edges") {
  auto m = generate_component_mesh(rect(ComponentKind::Rect, 1, 1), 0.5);
  std::ostringstream os;
  dump_mesh(m, os);
  const std::string s = os.str();
  CHECK(s.find("node 0 ") != std::string::npos);
  CHECK(s.find("tri 0 ") != std::string::npos);
  CHECK(s.find("port_left") != std::string::npos);
}
