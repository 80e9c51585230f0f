#ifndef PRRBC_GEOMETRY_HPP
#define PRRBC_GEOMETRY_HPP

#include <Eigen/Core>
#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prrbc {

// Archetype kinds of the component library.  Rect15L is the abutment span
// (clamped at its outer end, one port); TShape carries a pier; Rect is a
// plain deck span with two ports; RectLoaded adds the traction boundary and
// RectLoadedCracked additionally carries an open slit on the loaded edge.
enum class ComponentKind { Rect15L, TShape, Rect, RectLoaded, RectLoadedCracked };

struct CrackSpec {
  double center_x = 0.0;  // measured from the component's left end [m]
  double depth = 0.0;     // slit depth from the loaded (upper) boundary [m]
  double opening = 0.0;   // nominal opening [m]; meshed as a collapsed slit
};

struct ComponentGeometry {
  ComponentKind kind = ComponentKind::Rect;
  double length = 5.0;     // m
  double thickness = 1.0;  // m
  std::optional<CrackSpec> crack;
  // Rect15L only: mirrored instances clamp at the right end and expose the
  // port on the left (used for the far abutment of a chain assembly).
  bool mirrored = false;
  // TShape pier: width = thickness, height = pier_height_factor * thickness,
  // centered under the deck and clamped at its bottom edge.
  double pier_height_factor = 3.0;

  void validate() const;  // throws std::invalid_argument
};

enum class BoundaryTag { DirichletClamped, NeumannFree, NeumannLoaded, PortLeft, PortRight };
enum class PortSide { Left, Right };

// Oriented boundary edge (domain lies to the left of v0->v1).
struct BoundaryEdge {
  int v0, v1, mid;
  BoundaryTag tag;
};

struct ComponentMesh {
  ComponentGeometry geom;
  double hx = 0.0, hy = 0.0;  // realized grid spacings
  std::vector<Eigen::Vector2d> nodes;       // vertices first, then midpoints
  int n_vertices = 0;
  std::vector<std::array<int, 6>> tris;     // v0,v1,v2,m01,m12,m20 (CCW)
  std::vector<BoundaryEdge> boundary;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_dofs() const { return 2 * num_nodes(); }
  // dof layout: node n -> (2n) x-displacement, (2n+1) y-displacement
  std::vector<int> dirichlet_dofs() const;  // sorted, unique
  bool has_port(PortSide side) const;
};

// Structured P2 triangulation of one archetype component.  extra_y_lines are
// additional horizontal grid lines in (0, thickness) required for library-wide
// port conformity (e.g. the crack-tip height); a required line replaces the
// nearest interior uniform line when within half a cell, else it is inserted.
ComponentMesh generate_component_mesh(const ComponentGeometry& geom, double h_target,
                                      std::span<const double> extra_y_lines = {});

// Port dofs ordered bottom-to-top, x before y per node.
std::vector<int> extract_port_dofs(const ComponentMesh& mesh, PortSide side);

double mesh_area(const ComponentMesh& mesh);

// Plain-text node/element listing (one record per line) for inspection.
void dump_mesh(const ComponentMesh& mesh, std::ostream& os);

}  // namespace prrbc

#endif
