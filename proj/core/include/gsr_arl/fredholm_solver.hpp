#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gsr_arl/arl_exact.hpp"
#include "gsr_arl/exp_model.hpp"
#include "gsr_arl/quadrature.hpp"

namespace gsr {

/**
 * Discretized solution l(., A) of the ARL renewal equation
 *
 *     l(x) = 1 + integral_{s(x)}^{A} K(x, y) l(y) dy,    s(x) = (1 + x)/(1 + theta),
 *
 * produced either by Nystrom quadrature or by the backward sweep. Immutable
 * once built; evaluate() is safe to call concurrently.
 */
class ArlSolution {
 public:
  ArlRoute route() const noexcept { return route_; }
  const ExpShiftModel& model() const noexcept { return model_; }
  double threshold() const noexcept { return threshold_; }

  /// Solve nodes: the quadrature nodes (Nystrom) or the sweep grid (backward).
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Quadrature grid of a Nystrom solution; nullptr for the backward route.
  const QuadratureGrid* grid() const noexcept { return grid_.get(); }

  /// Sup-norm of the renewal-equation residual on a check grid off the nodes.
  double residual_sup() const noexcept { return residual_sup_; }

  /// Nystrom: reciprocal-condition based estimate of cond_1(I - WK).
  double condition_estimate() const noexcept { return condition_estimate_; }

  /// Backward: max relative change at shared nodes when the step is halved.
  double richardson_change() const noexcept { return richardson_change_; }

  /// Backward: set when the Richardson change exceeds 1e-6 or the residual 1e-4.
  bool resolution_flagged() const noexcept { return resolution_flagged_; }

  /// l(x) through the solver's own interpolation formula. Reproduces the
  /// node values at the nodes. Throws DomainError for x < 0.
  double evaluate(double x) const;

  /// Integrand breakpoints in y for residual checks: points where the
  /// interpolant's construction changes.
  std::vector<double> smoothness_breaks() const;

  // Opaque per-route state, defined in the solver translation unit.
  struct NystromData;
  struct BackwardData;

 private:
  friend ArlSolution solve_arl_nystrom(const ExpShiftModel&, double, const QuadratureGrid&);
  friend ArlSolution solve_arl_backward(const ExpShiftModel&, double, std::size_t);

  ArlSolution(ExpShiftModel model, double threshold, ArlRoute route)
      : model_(model), threshold_(threshold), route_(route) {}

  ExpShiftModel model_;
  double threshold_;
  ArlRoute route_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::shared_ptr<const QuadratureGrid> grid_;
  std::shared_ptr<const NystromData> nystrom_;
  std::shared_ptr<const BackwardData> backward_;
  double residual_sup_ = 0.0;
  double condition_estimate_ = 1.0;
  double richardson_change_ = 0.0;
  bool resolution_flagged_ = false;
};

/// Free-function spelling of ArlSolution::evaluate.
inline double evaluate(const ArlSolution& solution, double x) { return solution.evaluate(x); }

/// Packs evaluate(x) with the solver route and residual as diagnostic.
ArlResult to_arl_result(const ArlSolution& solution, double x);

/// Composite grid with about `nodes` points (at least one panel per
/// segment). Panel edges sit at the kernel support edge 1/(1+theta), at
/// geometrically spaced points above it, and, when A < 1/theta, at the kink
/// (1+theta)A - 1 of the solution.
QuadratureGrid default_grid(const ExpShiftModel& model, double threshold, std::size_t nodes,
                            std::size_t points_per_panel = 8);

/**
 * Nystrom solution of the renewal equation on the given grid.
 *
 * Row i integrates over [s(node_i), A] only. Each panel, clipped at
 * s(node_i) where the support edge cuts it, is integrated by a finer
 * Gauss rule against the Lagrange interpolant through the panel's nodes
 * (product integration). The dense system (I - WK) l = 1 is solved by LU
 * with partial pivoting.
 *
 * Throws DomainError if grid.threshold != A, SolverConditioning if the
 * condition estimate exceeds 1e12.
 */
ArlSolution solve_arl_nystrom(const ExpShiftModel& model, double threshold,
                              const QuadratureGrid& grid);

/// default_grid(model, A, nodes) followed by the solve above.
ArlSolution solve_arl_nystrom(const ExpShiftModel& model, double threshold,
                              std::size_t nodes = 512);

/**
 * Backward sweep for A < 1/theta.
 *
 * There l(x) = 1 for x >= (1+theta)A - 1 and s(x) - x >= 1 - theta A > 0 below
 * that, so l at x depends only on values strictly to its right. The sweep
 * keeps G(u) = integral_u^A K-weighted l, advances it cell by cell with
 * Gauss-Legendre and reads it back through cubic Hermite interpolation.
 *
 * grid_resolution is the number of cells per unit of 1/theta; the step is
 * further limited to (1 - theta A)/2. A second sweep at half the step gives
 * richardson_change().
 *
 * Throws RegimeMismatch if A >= 1/theta, DomainError if A <= 0 or the grid
 * would exceed 2^24 cells.
 */
ArlSolution solve_arl_backward(const ExpShiftModel& model, double threshold,
                               std::size_t grid_resolution = 4096);

/**
 * max |l(x) - 1 - integral_{s(x)}^{A} K(x, y) l(y) dy| over check_points
 * equispaced points in (0, max(A, (1+theta)A - 1)), offset so that they avoid
 * the solve nodes. The integral is adaptive Gauss-Kronrod, split at
 * `breaks` when given. Throws DomainError when check_points < 8.
 */
double residual_sup(const ExpShiftModel& model, double threshold,
                    const std::function<double(double)>& ell, std::size_t check_points = 64,
                    std::span<const double> breaks = {});

double residual_sup(const ExpShiftModel& model, double threshold, const ArlSolution& solution,
                    std::size_t check_points = 64);

}  // namespace gsr
