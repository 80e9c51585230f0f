#ifndef PRRBC_QUADRATURE_HPP
#define PRRBC_QUADRATURE_HPP

#include <array>
#include <cstddef>

namespace prrbc {

// Quadrature points on the reference triangle {(r,s): r,s >= 0, r+s <= 1},
// weights normalized so they sum to 1 (multiply by the physical area).
struct TriQuadPoint {
  double r, s, w;
};

// Degree-2 rule (exact for gradients of P2): edge midpoints.
inline constexpr std::array<TriQuadPoint, 3> tri_rule_deg2{{
    {0.5, 0.0, 1.0 / 3.0},
    {0.5, 0.5, 1.0 / 3.0},
    {0.0, 0.5, 1.0 / 3.0},
}};

// Degree-4 Dunavant rule (exact for P2 x P2 mass terms).
inline constexpr std::array<TriQuadPoint, 6> tri_rule_deg4{{
    {0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.109951743655322},
    {0.816847572980459, 0.091576213509771, 0.109951743655322},
}};

// P2 shape functions on the reference triangle; node order
// (v0,v1,v2,m01,m12,m20) with v0=(0,0), v1=(1,0), v2=(0,1).
inline std::array<double, 6> p2_values(double r, double s) {
  const double t = 1.0 - r - s;
  return {t * (2 * t - 1), r * (2 * r - 1), s * (2 * s - 1),
          4 * r * t,       4 * r * s,       4 * s * t};
}

// Reference-coordinate gradients (d/dr, d/ds) of the P2 shape functions.
inline std::array<std::array<double, 2>, 6> p2_gradients(double r, double s) {
  const double t = 1.0 - r - s;
  return {{{1 - 4 * t, 1 - 4 * t},
           {4 * r - 1, 0.0},
           {0.0, 4 * s - 1},
           {4 * (t - r), -4 * r},
           {4 * s, 4 * r},
           {-4 * s, 4 * (t - s)}}};
}

// 1D quadratic Lagrange on xi in [0,1], nodes (0, 1, 1/2).
inline std::array<double, 3> p2_edge_values(double xi) {
  return {(2 * xi - 1) * (xi - 1), xi * (2 * xi - 1), 4 * xi * (1 - xi)};
}

inline std::array<double, 3> p2_edge_derivs(double xi) {
  return {4 * xi - 3, 4 * xi - 1, 4 - 8 * xi};
}

// Gauss-Legendre points on [0,1].
struct GaussPoint {
  double x, w;
};

inline constexpr std::array<GaussPoint, 3> gauss3{{
    {0.1127016653792583, 5.0 / 18.0},
    {0.5, 8.0 / 18.0},
    {0.8872983346207417, 5.0 / 18.0},
}};

inline constexpr std::array<GaussPoint, 4> gauss4{{
    {0.0694318442029737, 0.1739274225687269},
    {0.3300094782075719, 0.3260725774312731},
    {0.6699905217924281, 0.3260725774312731},
    {0.9305681557970263, 0.1739274225687269},
}};

}  // namespace prrbc

#endif
