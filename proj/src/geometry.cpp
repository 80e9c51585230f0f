#include "prrbc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace prrbc {

namespace {

constexpr double kRelTol = 1e-9;

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Uniform grid lines over [lo,hi] with n cells; required interior lines either
// replace the nearest interior uniform line (within half a cell) or are
// inserted, keeping the line set sorted and duplicate-free.
std::vector<double> make_lines(double lo, double hi, int n, std::span<const double> extra,
                               double tol) {
  std::vector<double> lines(n + 1);
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) lines[i] = lo + i * h;
  lines.front() = lo;
  lines.back() = hi;
  for (double e : extra) {
    if (e <= lo + tol || e >= hi - tol) continue;
    auto it = std::min_element(lines.begin(), lines.end(),
                               [e](double a, double b) { return std::abs(a - e) < std::abs(b - e); });
    if (close(*it, e, tol)) continue;
    if (it != lines.begin() && it != lines.end() - 1 && std::abs(*it - e) <= 0.5 * h) {
      *it = e;
    } else {
      lines.insert(std::upper_bound(lines.begin(), lines.end(), e), e);
    }
  }
  return lines;
}

int line_index(const std::vector<double>& lines, double v, double tol) {
  for (int i = 0; i < static_cast<int>(lines.size()); ++i)
    if (close(lines[i], v, tol)) return i;
  return -1;
}

struct GridMesher {
  const ComponentGeometry& geom;
  double tol;
  std::vector<double> xs, ys;
  // active cell predicate over (ix, iy) cell indices
  int pier_ix0 = -1, pier_ix1 = -1;  // TShape pier column range
  int deck_iy0 = 0;                  // first cell row at or above y=0

  std::map<std::pair<int, int>, int> vertex_ids;
  ComponentMesh mesh;

  explicit GridMesher(const ComponentGeometry& g, double t) : geom(g), tol(t) { mesh.geom = g; }

  bool cell_active(int ix, int iy) const {
    if (iy >= deck_iy0) return true;
    return ix >= pier_ix0 && ix < pier_ix1;
  }

  bool point_used(int ix, int iy) const {
    // a grid point is kept if any adjacent cell is active
    for (int dx = -1; dx <= 0; ++dx)
      for (int dy = -1; dy <= 0; ++dy) {
        int cx = ix + dx, cy = iy + dy;
        if (cx < 0 || cy < 0 || cx >= static_cast<int>(xs.size()) - 1 ||
            cy >= static_cast<int>(ys.size()) - 1)
          continue;
        if (cell_active(cx, cy)) return true;
      }
    return false;
  }

  int vertex(int ix, int iy) {
    auto [it, inserted] = vertex_ids.try_emplace({ix, iy}, -1);
    if (inserted) {
      it->second = static_cast<int>(mesh.nodes.size());
      mesh.nodes.emplace_back(xs[ix], ys[iy]);
    }
    return it->second;
  }

  void build_cells() {
    for (int iy = 0; iy + 1 < static_cast<int>(ys.size()); ++iy)
      for (int ix = 0; ix + 1 < static_cast<int>(xs.size()); ++ix) {
        if (!cell_active(ix, iy)) continue;
        int v00 = vertex(ix, iy), v10 = vertex(ix + 1, iy);
        int v11 = vertex(ix + 1, iy + 1), v01 = vertex(ix, iy + 1);
        mesh.tris.push_back({v00, v10, v11, -1, -1, -1});
        mesh.tris.push_back({v00, v11, v01, -1, -1, -1});
      }
    mesh.n_vertices = static_cast<int>(mesh.nodes.size());
  }

  void split_crack() {
    if (!geom.crack) return;
    const CrackSpec& ck = *geom.crack;
    const double tip_y = geom.thickness - ck.depth;
    if (line_index(xs, ck.center_x, tol) < 0 || line_index(ys, tip_y, tol) < 0)
      throw std::invalid_argument("crack slit does not align with mesh lines");
    // duplicate vertices on the slit (strictly above the tip)
    std::map<int, int> dup;
    for (int v = 0; v < mesh.n_vertices; ++v) {
      const auto& p = mesh.nodes[v];
      if (close(p.x(), ck.center_x, tol) && p.y() > tip_y + tol) {
        dup[v] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(p);
      }
    }
    if (dup.empty()) throw std::invalid_argument("crack slit depth below mesh resolution");
    mesh.n_vertices = static_cast<int>(mesh.nodes.size());
    // triangles right of the slit reference the duplicates
    for (auto& t : mesh.tris) {
      double cx = (mesh.nodes[t[0]].x() + mesh.nodes[t[1]].x() + mesh.nodes[t[2]].x()) / 3.0;
      if (cx <= ck.center_x) continue;
      for (int k = 0; k < 3; ++k) {
        auto it = dup.find(t[k]);
        if (it != dup.end()) t[k] = it->second;
      }
    }
  }

  void build_midpoints() {
    std::map<std::pair<int, int>, int> edge_mid;
    auto mid_of = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = edge_mid.try_emplace({key.first, key.second}, -1);
      if (inserted) {
        it->second = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
      }
      return it->second;
    };
    for (auto& t : mesh.tris) {
      t[3] = mid_of(t[0], t[1]);
      t[4] = mid_of(t[1], t[2]);
      t[5] = mid_of(t[2], t[0]);
    }
  }

  void build_boundary() {
    std::map<std::pair<int, int>, std::pair<int, int>> directed;  // (v0,v1) -> (mid, count of reverse)
    std::set<std::pair<int, int>> edges;
    std::map<std::pair<int, int>, int> mids;
    for (const auto& t : mesh.tris) {
      const int v[3] = {t[0], t[1], t[2]};
      const int m[3] = {t[3], t[4], t[5]};
      for (int k = 0; k < 3; ++k) {
        edges.insert({v[k], v[(k + 1) % 3]});
        mids[{v[k], v[(k + 1) % 3]}] = m[k];
      }
    }
    for (const auto& e : edges) {
      if (edges.count({e.second, e.first})) continue;  // interior
      mesh.boundary.push_back({e.first, e.second, mids[e], classify(e.first, e.second)});
    }
    std::sort(mesh.boundary.begin(), mesh.boundary.end(),
              [](const BoundaryEdge& a, const BoundaryEdge& b) {
                return std::tie(a.v0, a.v1) < std::tie(b.v0, b.v1);
              });
  }

  BoundaryTag classify(int a, int b) const {
    const auto& pa = mesh.nodes[a];
    const auto& pb = mesh.nodes[b];
    const double xm = 0.5 * (pa.x() + pb.x());
    const double ym = 0.5 * (pa.y() + pb.y());
    const bool vertical = close(pa.x(), pb.x(), tol);
    const double L = geom.length, H = geom.thickness;
    switch (geom.kind) {
      case ComponentKind::Rect15L: {
        if (vertical && close(xm, geom.mirrored ? 0.0 : L, tol))
          return geom.mirrored ? BoundaryTag::PortLeft : BoundaryTag::PortRight;
        if (close(ym, 0.0, tol)) {
          const bool clamped = geom.mirrored ? (xm >= L - H - tol) : (xm <= H + tol);
          if (clamped) return BoundaryTag::DirichletClamped;
        }
        return BoundaryTag::NeumannFree;
      }
      case ComponentKind::TShape: {
        if (vertical && close(xm, 0.0, tol)) return BoundaryTag::PortLeft;
        if (vertical && close(xm, L, tol)) return BoundaryTag::PortRight;
        if (close(ym, -geom.pier_height_factor * H, tol)) return BoundaryTag::DirichletClamped;
        return BoundaryTag::NeumannFree;
      }
      case ComponentKind::Rect:
      case ComponentKind::RectLoaded:
      case ComponentKind::RectLoadedCracked: {
        if (vertical && close(xm, 0.0, tol)) return BoundaryTag::PortLeft;
        if (vertical && close(xm, L, tol)) return BoundaryTag::PortRight;
        if (geom.kind != ComponentKind::Rect && close(ym, H, tol))
          return BoundaryTag::NeumannLoaded;
        return BoundaryTag::NeumannFree;
      }
    }
    return BoundaryTag::NeumannFree;
  }
};

}  // namespace

void ComponentGeometry::validate() const {
  if (length <= 0 || thickness <= 0) throw std::invalid_argument("component dimensions must be positive");
  const bool cracked = kind == ComponentKind::RectLoadedCracked;
  if (cracked != crack.has_value())
    throw std::invalid_argument("crack spec required iff kind is RectLoadedCracked");
  if (crack) {
    if (crack->depth <= 0 || crack->depth >= thickness)
      throw std::invalid_argument("crack depth must lie in (0, thickness)");
    if (crack->opening <= 0 || crack->opening > 0.1 * length)
      throw std::invalid_argument("crack opening must be positive and small against the length");
    if (crack->center_x <= 0 || crack->center_x >= length)
      throw std::invalid_argument("crack center must be interior");
  }
  if (kind == ComponentKind::TShape && pier_height_factor <= 0)
    throw std::invalid_argument("pier height factor must be positive");
}

ComponentMesh generate_component_mesh(const ComponentGeometry& geom, double h_target,
                                      std::span<const double> extra_y_lines) {
  geom.validate();
  if (h_target <= 0) throw std::invalid_argument("h_target must be positive");
  const double L = geom.length, H = geom.thickness;
  const double tol = kRelTol * std::max(L, H);

  GridMesher mb(geom, tol);
  const int nx = std::max(1, static_cast<int>(std::lround(L / h_target)));
  const int ny = std::max(1, static_cast<int>(std::lround(H / h_target)));
  mb.xs = make_lines(0.0, L, nx, {}, tol);
  mb.ys = make_lines(0.0, H, ny, extra_y_lines, tol);
  mb.mesh.hx = L / nx;
  mb.mesh.hy = H / ny;

  if (geom.kind == ComponentKind::TShape) {
    const double ph = geom.pier_height_factor * H;
    const int npy = std::max(1, static_cast<int>(std::lround(ph / h_target)));
    std::vector<double> pier = make_lines(-ph, 0.0, npy, {}, tol);
    pier.pop_back();  // y=0 already in deck lines
    mb.ys.insert(mb.ys.begin(), pier.begin(), pier.end());
    mb.deck_iy0 = npy;
    const double x0 = 0.5 * L - 0.5 * H, x1 = 0.5 * L + 0.5 * H;
    mb.pier_ix0 = line_index(mb.xs, x0, tol);
    mb.pier_ix1 = line_index(mb.xs, x1, tol);
    if (mb.pier_ix0 < 0 || mb.pier_ix1 < 0)
      throw std::invalid_argument("pier faces do not align with mesh lines; adjust h_target");
  }

  mb.build_cells();
  if (geom.crack) mb.split_crack();
  mb.build_midpoints();
  mb.build_boundary();
  return std::move(mb.mesh);
}

std::vector<int> ComponentMesh::dirichlet_dofs() const {
  std::set<int> nodes_on;
  for (const auto& e : boundary)
    if (e.tag == BoundaryTag::DirichletClamped) {
      nodes_on.insert(e.v0);
      nodes_on.insert(e.v1);
      nodes_on.insert(e.mid);
    }
  std::vector<int> dofs;
  dofs.reserve(2 * nodes_on.size());
  for (int n : nodes_on) {
    dofs.push_back(2 * n);
    dofs.push_back(2 * n + 1);
  }
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

bool ComponentMesh::has_port(PortSide side) const {
  const BoundaryTag want = side == PortSide::Left ? BoundaryTag::PortLeft : BoundaryTag::PortRight;
  return std::any_of(boundary.begin(), boundary.end(),
                     [want](const BoundaryEdge& e) { return e.tag == want; });
}

std::vector<int> extract_port_dofs(const ComponentMesh& mesh, PortSide side) {
  const BoundaryTag want = side == PortSide::Left ? BoundaryTag::PortLeft : BoundaryTag::PortRight;
  std::set<int> nodes_on;
  for (const auto& e : mesh.boundary)
    if (e.tag == want) {
      nodes_on.insert(e.v0);
      nodes_on.insert(e.v1);
      nodes_on.insert(e.mid);
    }
  if (nodes_on.empty()) throw std::invalid_argument("mesh has no port on the requested side");
  std::vector<int> order(nodes_on.begin(), nodes_on.end());
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return mesh.nodes[a].y() < mesh.nodes[b].y(); });
  std::vector<int> dofs;
  dofs.reserve(2 * order.size());
  for (int n : order) {
    dofs.push_back(2 * n);
    dofs.push_back(2 * n + 1);
  }
  return dofs;
}

double mesh_area(const ComponentMesh& mesh) {
  double area = 0;
  for (const auto& t : mesh.tris) {
    const auto& a = mesh.nodes[t[0]];
    const auto& b = mesh.nodes[t[1]];
    const auto& c = mesh.nodes[t[2]];
    area += 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
  }
  return area;
}

void dump_mesh(const ComponentMesh& mesh, std::ostream& os) {
  static const char* tag_names[] = {"dirichlet", "free", "loaded", "port_left", "port_right"};
  os << "nodes " << mesh.num_nodes() << " vertices " << mesh.n_vertices << " tris "
     << mesh.tris.size() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i)
    os << "node " << i << " " << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << "\n";
  for (size_t i = 0; i < mesh.tris.size(); ++i) {
    const auto& t = mesh.tris[i];
    os << "tri " << i;
    for (int k : t) os << " " << k;
    os << "\n";
  }
  for (const auto& e : mesh.boundary)
    os << "edge " << e.v0 << " " << e.v1 << " " << e.mid << " "
       << tag_names[static_cast<int>(e.tag)] << "\n";
}

}  // namespace prrbc
