#include "gsr_arl/fredholm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gsr_arl/errors.hpp"

namespace gsr {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kRichardsonTolerance = 1e-6;
constexpr double kBackwardResidualFlag = 1e-4;
constexpr std::size_t kMaxBackwardCells = std::size_t{1} << 24;
constexpr std::size_t kSolveCheckPoints = 64;

// Golden-section offset keeps check points away from panel nodes and edges.
constexpr double kCheckOffset = 0.3819660112501051;

void require_threshold(double threshold) {
  if (!std::isfinite(threshold) || !(threshold > 0.0)) {
    throw DomainError("threshold A must be finite and > 0");
  }
}

double power_ratio(double exponent, double num, double den) {
  return std::exp(exponent * std::log(num / den));
}

}  // namespace

// ---------------------------------------------------------------------------
// Nystrom

struct ArlSolution::NystromData {
  std::shared_ptr<const QuadratureGrid> grid;
  std::vector<double> values;
  std::vector<double> ref_nodes;  // panel rule on [-1, 1]
  std::vector<double> ref_bary;
  GaussLegendreRule product_rule;  // integrates K times the panel interpolant
  // Per-panel integral of (p / t) (lo_p / t)^p l_interp(t) over the whole
  // panel, so that a panel inside the support contributes (s / lo_p)^p times it.
  std::vector<double> panel_moments;

  // Calls visit(j, w) with the weights w_j(x) for which the integral over
  // [s(x), A] of K(x, y) l(y) dy is approximated by sum_j w_j(x) l_j. Each
  // panel (clipped to the support when s(x) cuts it) is integrated against
  // the Lagrange interpolant through its nodes.
  template <class Visit>
  void visit_row(const ExpShiftModel& model, double x, std::vector<double>& basis,
                 Visit&& visit) const {
    const double edge = model.support_edge(x);
    const std::size_t ppp = grid->points_per_panel;
    for (std::size_t p = 0; p < grid->panels(); ++p) {
      const double lo = grid->panel_edges[p];
      const double hi = grid->panel_edges[p + 1];
      if (hi <= edge) continue;
      const std::size_t first = grid->first_node(p);
      const double from = std::max(lo, edge);
      const double half = 0.5 * (hi - from);
      const double mid = 0.5 * (hi + from);
      for (std::size_t m = 0; m < product_rule.nodes.size(); ++m) {
        const double t = mid + half * product_rule.nodes[m];
        const double kt = half * product_rule.weights[m] * model.kernel(x, t);
        lagrange_basis(ref_nodes, ref_bary, (2.0 * t - lo - hi) / (hi - lo), basis);
        for (std::size_t k = 0; k < ppp; ++k) visit(first + k, kt * basis[k]);
      }
    }
  }

  double interpolate(std::size_t panel, double t, std::vector<double>& basis) const {
    const double lo = grid->panel_edges[panel];
    const double hi = grid->panel_edges[panel + 1];
    lagrange_basis(ref_nodes, ref_bary, (2.0 * t - lo - hi) / (hi - lo), basis);
    const std::size_t first = grid->first_node(panel);
    double value = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) value += basis[k] * values[first + k];
    return value;
  }

  void compute_panel_moments(double exponent) {
    std::vector<double> basis(grid->points_per_panel);
    panel_moments.assign(grid->panels(), 0.0);
    for (std::size_t p = 0; p < grid->panels(); ++p) {
      const double lo = grid->panel_edges[p];
      const double hi = grid->panel_edges[p + 1];
      const double half = 0.5 * (hi - lo);
      const double mid = 0.5 * (hi + lo);
      for (std::size_t m = 0; m < product_rule.nodes.size(); ++m) {
        const double t = mid + half * product_rule.nodes[m];
        panel_moments[p] += half * product_rule.weights[m] * exponent / t *
                            power_ratio(exponent, lo, t) * interpolate(p, t, basis);
      }
    }
  }

  double evaluate(const ExpShiftModel& model, double x) const {
    const double edge = model.support_edge(x);
    if (edge >= grid->threshold) return 1.0;
    const double exponent = model.tail_exponent();
    std::vector<double> basis(grid->points_per_panel);
    double total = 0.0;
    for (std::size_t p = 0; p < grid->panels(); ++p) {
      const double lo = grid->panel_edges[p];
      const double hi = grid->panel_edges[p + 1];
      if (hi <= edge) continue;
      if (lo >= edge) {
        total += power_ratio(exponent, edge, lo) * panel_moments[p];
        continue;
      }
      const double half = 0.5 * (hi - edge);
      const double mid = 0.5 * (hi + edge);
      for (std::size_t m = 0; m < product_rule.nodes.size(); ++m) {
        const double t = mid + half * product_rule.nodes[m];
        total += half * product_rule.weights[m] * model.kernel(x, t) * interpolate(p, t, basis);
      }
    }
    return 1.0 + total;
  }
};

// ---------------------------------------------------------------------------
// Backward sweep

struct ArlSolution::BackwardData {
  double threshold = 0.0;
  double kink = 0.0;  // (1 + theta) A - 1; l == 1 at and above it
  double exponent = 0.0;
  std::vector<double> nodes;
  std::vector<double> ell;
  // Scaled tail integral G(u) = integral_u^A beta(y) l(y) dy with
  // beta(y) = (p / y) (A / y)^p, so K(x, y) = (s(x) / A)^p beta(y).
  std::vector<double> tail;
  std::vector<double> tail_slope;  // G'(z_k) = -beta(z_k) l(z_k)

  double beta(double y) const {
    const double value = exponent / y * power_ratio(exponent, threshold, y);
    if (!std::isfinite(value)) {
      throw DomainError("solve_arl_backward: kernel overflow at y = " + std::to_string(y));
    }
    return value;
  }

  double tail_at(double u) const {
    if (u >= threshold) return 0.0;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), u);
    std::size_t m = static_cast<std::size_t>(it - nodes.begin());
    m = std::clamp<std::size_t>(m, 1, nodes.size() - 1) - 1;
    const double h = nodes[m + 1] - nodes[m];
    const double t = (u - nodes[m]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * tail[m] + (t3 - 2 * t2 + t) * h * tail_slope[m] +
           (-2 * t3 + 3 * t2) * tail[m + 1] + (t3 - t2) * h * tail_slope[m + 1];
  }

  double ell_at(const ExpShiftModel& model, double x) const {
    if (x >= kink) return 1.0;
    const double edge = model.support_edge(x);
    return 1.0 + power_ratio(exponent, edge, threshold) * tail_at(edge);
  }
};

namespace {

ArlSolution::BackwardData sweep_backward(const ExpShiftModel& model, double threshold,
                                         double kink, std::size_t left_cells,
                                         std::size_t right_cells) {
  ArlSolution::BackwardData data;
  data.threshold = threshold;
  data.kink = kink;
  data.exponent = model.tail_exponent();

  const std::size_t cells = left_cells + right_cells;
  data.nodes.resize(cells + 1);
  for (std::size_t k = 0; k <= left_cells; ++k) {
    data.nodes[k] = kink * static_cast<double>(k) / static_cast<double>(left_cells);
  }
  for (std::size_t k = 1; k <= right_cells; ++k) {
    data.nodes[left_cells + k] =
        kink + (threshold - kink) * static_cast<double>(k) / static_cast<double>(right_cells);
  }
  data.nodes[left_cells] = kink;
  data.nodes[cells] = threshold;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  data.ell.assign(cells + 1, nan);
  data.tail.assign(cells + 1, nan);
  data.tail_slope.assign(cells + 1, nan);

  const double lowest_edge = model.support_edge(0.0);
  const GaussLegendreRule rule = gauss_legendre(8);

  data.ell[cells] = 1.0;
  data.tail[cells] = 0.0;
  data.tail_slope[cells] = -data.beta(threshold);
  for (std::size_t k = cells; k-- > 0;) {
    const double z = data.nodes[k];
    data.ell[k] = data.ell_at(model, z);
    if (data.nodes[k + 1] < lowest_edge) continue;  // G is never read this low
    const double lo = z;
    const double hi = data.nodes[k + 1];
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double cell_integral = 0.0;
    for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
      const double t = mid + half * rule.nodes[m];
      cell_integral += half * rule.weights[m] * data.beta(t) * data.ell_at(model, t);
    }
    data.tail[k] = data.tail[k + 1] + cell_integral;
    data.tail_slope[k] = -data.beta(z) * data.ell[k];
  }
  return data;
}

}  // namespace

// ---------------------------------------------------------------------------

double ArlSolution::evaluate(double x) const {
  if (!(x >= 0.0)) throw DomainError("evaluate: x must be >= 0");
  if (nystrom_) return nystrom_->evaluate(model_, x);
  if (backward_) return backward_->ell_at(model_, x);
  return 1.0;
}

std::vector<double> ArlSolution::smoothness_breaks() const {
  const double scale = 1.0 + model_.theta();
  std::vector<double> breaks;
  if (nystrom_) {
    for (double e : nystrom_->grid->panel_edges) {
      const double y = scale * e - 1.0;
      if (y > 0.0 && y < threshold_) breaks.push_back(y);
    }
  } else if (backward_) {
    // The kink at (1+theta)A - 1 and its preimages under s.
    for (double y = backward_->kink; y > 0.0; y = scale * y - 1.0) {
      if (y < threshold_) breaks.push_back(y);
      if (scale * y - 1.0 >= y) break;
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

ArlResult to_arl_result(const ArlSolution& solution, double x) {
  return {solution.evaluate(x), solution.route(), solution.residual_sup()};
}

QuadratureGrid default_grid(const ExpShiftModel& model, double threshold, std::size_t nodes,
                            std::size_t points_per_panel) {
  require_threshold(threshold);
  if (points_per_panel == 0) throw DomainError("default_grid: points_per_panel must be >= 1");
  std::vector<double> candidates;
  const double lowest_edge = model.support_edge(0.0);
  candidates.push_back(lowest_edge);
  // K(x, .) has a pole at y = 0, a distance lowest_edge below the support.
  // Halve panel widths toward the support edge until they are no wider than
  // that distance.
  for (double offset = 0.5 * (threshold - lowest_edge); offset > lowest_edge; offset *= 0.5) {
    candidates.push_back(lowest_edge + offset);
  }
  candidates.push_back((1.0 + model.theta()) * threshold - 1.0);

  std::sort(candidates.begin(), candidates.end());
  const double min_gap = 1e-9 * threshold;
  std::vector<double> breaks;
  for (double b : candidates) {
    if (b <= min_gap || b >= threshold - min_gap) continue;
    if (!breaks.empty() && b - breaks.back() < min_gap) continue;
    breaks.push_back(b);
  }
  const std::size_t panels = std::max<std::size_t>(
      1, (nodes + points_per_panel - 1) / points_per_panel);
  return build_grid(threshold, panels, points_per_panel, breaks);
}

ArlSolution solve_arl_nystrom(const ExpShiftModel& model, double threshold,
                              const QuadratureGrid& grid) {
  require_threshold(threshold);
  if (grid.threshold != threshold || grid.size() == 0) {
    throw DomainError("solve_arl_nystrom: grid was built for a different threshold");
  }

  auto data = std::make_shared<ArlSolution::NystromData>();
  data->grid = std::make_shared<const QuadratureGrid>(grid);
  const GaussLegendreRule panel_rule = gauss_legendre(grid.points_per_panel);
  data->ref_nodes = panel_rule.nodes;
  data->ref_bary = barycentric_weights(data->ref_nodes);
  data->product_rule = gauss_legendre(std::max<std::size_t>(24, 3 * grid.points_per_panel));

  const std::size_t n = grid.size();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                     static_cast<Eigen::Index>(n));
  std::vector<double> basis(grid.points_per_panel);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    data->visit_row(model, grid.nodes[i], basis, [&](std::size_t j, double w) {
      system(row, static_cast<Eigen::Index>(j)) -= w;
    });
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    std::ostringstream msg;
    msg << "Nystrom system is ill-conditioned (condition estimate " << condition << ")";
    throw SolverConditioning(msg.str(), condition);
  }
  const Eigen::VectorXd solution = lu.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
  data->values.assign(solution.data(), solution.data() + n);

  data->compute_panel_moments(model.tail_exponent());

  ArlSolution result(model, threshold, ArlRoute::nystrom);
  result.nodes_ = grid.nodes;
  result.values_ = data->values;
  result.grid_ = data->grid;
  result.nystrom_ = std::move(data);
  result.condition_estimate_ = condition;
  result.residual_sup_ = residual_sup(model, threshold, result, kSolveCheckPoints);
  return result;
}

ArlSolution solve_arl_nystrom(const ExpShiftModel& model, double threshold, std::size_t nodes) {
  return solve_arl_nystrom(model, threshold, default_grid(model, threshold, nodes));
}

ArlSolution solve_arl_backward(const ExpShiftModel& model, double threshold,
                               std::size_t grid_resolution) {
  require_threshold(threshold);
  const double theta = model.theta();
  if (threshold * theta >= 1.0) {
    std::ostringstream msg;
    msg << "backward sweep needs A < 1/theta = " << 1.0 / theta << ", got A = " << threshold;
    throw RegimeMismatch(msg.str(), "use the Nystrom solver (`solve`) or the closed form (`exact`)");
  }
  if (grid_resolution == 0) throw DomainError("solve_arl_backward: grid_resolution must be >= 1");

  ArlSolution result(model, threshold, ArlRoute::backward);
  const double kink = (1.0 + theta) * threshold - 1.0;
  if (kink <= 0.0) {
    // s(0) >= A: every start crosses on the first step.
    auto data = std::make_shared<ArlSolution::BackwardData>();
    data->threshold = threshold;
    data->kink = 0.0;
    data->exponent = model.tail_exponent();
    result.nodes_ = {0.0, threshold};
    result.values_ = {1.0, 1.0};
    result.backward_ = std::move(data);
    return result;
  }

  const double step =
      std::min(1.0 / theta / static_cast<double>(grid_resolution), 0.5 * (1.0 - theta * threshold));
  const auto left = static_cast<std::size_t>(std::ceil(kink / step));
  const auto right = static_cast<std::size_t>(std::ceil((threshold - kink) / step));
  if (2 * (left + right) > kMaxBackwardCells) {
    throw DomainError("solve_arl_backward: A is too close to 1/theta for the sweep grid");
  }

  const std::size_t left_cells = std::max<std::size_t>(left, 1);
  const std::size_t right_cells = std::max<std::size_t>(right, 1);
  auto coarse = std::make_shared<ArlSolution::BackwardData>(
      sweep_backward(model, threshold, kink, left_cells, right_cells));
  const ArlSolution::BackwardData fine =
      sweep_backward(model, threshold, kink, 2 * left_cells, 2 * right_cells);

  double change = 0.0;
  for (std::size_t k = 0; k < coarse->nodes.size(); ++k) {
    change = std::max(change, std::abs(fine.ell[2 * k] - coarse->ell[k]) / coarse->ell[k]);
  }

  result.nodes_ = coarse->nodes;
  result.values_ = coarse->ell;
  result.backward_ = std::move(coarse);
  result.richardson_change_ = change;
  result.residual_sup_ = residual_sup(model, threshold, result, kSolveCheckPoints);
  result.resolution_flagged_ =
      change > kRichardsonTolerance || result.residual_sup_ > kBackwardResidualFlag;
  return result;
}

// ---------------------------------------------------------------------------
// Residual

double residual_sup(const ExpShiftModel& model, double threshold,
                    const std::function<double(double)>& ell, std::size_t check_points,
                    std::span<const double> breaks) {
  require_threshold(threshold);
  if (check_points < 8) throw DomainError("residual_sup: need at least 8 check points");

  using Integrator = boost::math::quadrature::gauss_kronrod<double, 21>;
  const double span_end = std::max(threshold, (1.0 + model.theta()) * threshold - 1.0);
  double worst = 0.0;
  std::vector<double> cuts;
  for (std::size_t c = 0; c < check_points; ++c) {
    const double x =
        span_end * (static_cast<double>(c) + kCheckOffset) / static_cast<double>(check_points);
    const double edge = model.support_edge(x);
    double integral = 0.0;
    if (edge < threshold) {
      cuts.assign({edge});
      for (double b : breaks) {
        if (b > edge && b < threshold) cuts.push_back(b);
      }
      cuts.push_back(threshold);
      auto integrand = [&](double y) { return model.kernel(x, y) * ell(y); };
      for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        integral += Integrator::integrate(integrand, cuts[piece], cuts[piece + 1], 6, 1e-11);
      }
    }
    worst = std::max(worst, std::abs(ell(x) - 1.0 - integral));
  }
  return worst;
}

double residual_sup(const ExpShiftModel& model, double threshold, const ArlSolution& solution,
                    std::size_t check_points) {
  const std::vector<double> breaks = solution.smoothness_breaks();
  return residual_sup(
      model, threshold, [&](double y) { return solution.evaluate(y); }, check_points, breaks);
}

}  // namespace gsr
