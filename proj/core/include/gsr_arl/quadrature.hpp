#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsr {

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Throws DomainError unless 1 <= n <= 256.
GaussLegendreRule gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre discretization of [0, A].
struct QuadratureGrid {
  std::vector<double> nodes;        // strictly increasing, inside (0, A)
  std::vector<double> weights;      // positive, sum to A
  std::vector<double> panel_edges;  // 0 = e_0 < e_1 < ... < e_P = A
  std::size_t points_per_panel = 0;
  double threshold = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t panels() const noexcept { return panel_edges.size() - 1; }
  /// Index range [first, first + points_per_panel) of panel p's nodes.
  std::size_t first_node(std::size_t panel) const noexcept {
    return panel * points_per_panel;
  }
};

/**
 * Builds a composite Gauss-Legendre grid over [0, A].
 *
 * Every breakpoint becomes a panel edge. The breakpoints split [0, A] into
 * segments; each segment gets at least one panel and the remaining panels go
 * to whichever segment currently has the widest panels. The total is
 * max(panels, number of segments).
 *
 * Throws DomainError when A <= 0, panels == 0, points_per_panel is outside
 * [2, 64], or breakpoints are unsorted, repeated, or not inside (0, A).
 */
QuadratureGrid build_grid(double threshold, std::size_t panels, std::size_t points_per_panel,
                          std::span<const double> breakpoints = {});

/// Barycentric weights for Lagrange interpolation through the given nodes.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Values of every Lagrange basis polynomial at x; out.size() == nodes.size().
void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out);

}  // namespace gsr
