#include "gsr_arl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "gsr_arl/errors.hpp"

namespace gsr {

namespace {

// Legendre P_n(z) and P_{n-1}(z) by the three-term recurrence.
std::pair<double, double> legendre_pair(std::size_t n, double z) {
  double prev = 1.0;
  double cur = z;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = ((2.0 * kk - 1.0) * z * cur - (kk - 1.0) * prev) / kk;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

}  // namespace

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0 || n > 256) {
    throw DomainError("gauss_legendre: need 1 <= n <= 256, got " + std::to_string(n));
  }
  if (n == 1) return {{0.0}, {2.0}};

  GaussLegendreRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double order = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi's initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (order + 0.5));
    double derivative = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p_n, p_prev] = legendre_pair(n, z);
      derivative = order * (z * p_n - p_prev) / (z * z - 1.0);
      const double dz = p_n / derivative;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const auto [p_n, p_prev] = legendre_pair(n, z);
    derivative = order * (z * p_n - p_prev) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureGrid build_grid(double threshold, std::size_t panels, std::size_t points_per_panel,
                          std::span<const double> breakpoints) {
  if (!std::isfinite(threshold) || !(threshold > 0.0)) {
    throw DomainError("build_grid: A must be finite and > 0");
  }
  if (panels == 0) throw DomainError("build_grid: panels must be >= 1");
  if (points_per_panel < 2 || points_per_panel > 64) {
    throw DomainError("build_grid: points_per_panel must lie in [2, 64]");
  }
  std::vector<double> cuts{0.0};
  for (double b : breakpoints) {
    if (!(b > cuts.back()) || !(b < threshold)) {
      throw DomainError("build_grid: breakpoints must be strictly increasing inside (0, A)");
    }
    cuts.push_back(b);
  }
  cuts.push_back(threshold);

  const std::size_t segments = cuts.size() - 1;
  std::vector<std::size_t> per_segment(segments, 1);
  for (std::size_t extra = segments; extra < panels; ++extra) {
    std::size_t widest = 0;
    double widest_width = -1.0;
    for (std::size_t s = 0; s < segments; ++s) {
      const double width = (cuts[s + 1] - cuts[s]) / static_cast<double>(per_segment[s]);
      if (width > widest_width) {
        widest_width = width;
        widest = s;
      }
    }
    ++per_segment[widest];
  }

  QuadratureGrid grid;
  grid.points_per_panel = points_per_panel;
  grid.threshold = threshold;
  grid.panel_edges.push_back(0.0);
  for (std::size_t s = 0; s < segments; ++s) {
    const double width = (cuts[s + 1] - cuts[s]) / static_cast<double>(per_segment[s]);
    for (std::size_t k = 1; k < per_segment[s]; ++k) {
      grid.panel_edges.push_back(cuts[s] + width * static_cast<double>(k));
    }
    grid.panel_edges.push_back(cuts[s + 1]);
  }

  const GaussLegendreRule rule = gauss_legendre(points_per_panel);
  const std::size_t total_panels = grid.panel_edges.size() - 1;
  grid.nodes.reserve(total_panels * points_per_panel);
  grid.weights.reserve(total_panels * points_per_panel);
  for (std::size_t p = 0; p < total_panels; ++p) {
    const double lo = grid.panel_edges[p];
    const double hi = grid.panel_edges[p + 1];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < points_per_panel; ++k) {
      grid.nodes.push_back(mid + half * rule.nodes[k]);
      grid.weights.push_back(half * rule.weights[k]);
    }
  }
  return grid;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  std::vector<double> bary(nodes.size(), 1.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k != j) bary[j] /= (nodes[j] - nodes[k]);
    }
  }
  return bary;
}

void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out) {
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (x == nodes[j]) {
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out[j] = bary[j] / (x - nodes[j]);
    denom += out[j];
  }
  for (double& v : out) v /= denom;
}

}  // namespace gsr
