#pragma once

#include <optional>

#include "lqt/model.hpp"
#include "lqt/odeint.hpp"

namespace lqt {

inline constexpr double kDefaultDivergenceThreshold = 1e4;

/// Costs of a trajectory. When `diverged` is set both cost fields are +inf.
struct CostReport {
    double total_cost = 0.0;
    double average_cost = 0.0;
    std::optional<double> pe_vs_optimal;
    bool diverged = false;
};

/// Left-rectangle accumulation of the running cost over the step intervals.
class CostAccumulator {
  public:
    CostAccumulator(double dt, double horizon) : dt_(dt), horizon_(horizon) {}

    void add_scalar(double q, double r, double error, double control) {
        total_ += 0.5 * dt_ * (q * error * error + r * control * control);
    }
    void add(double stage_cost) { total_ += dt_ * stage_cost; }

    double total() const { return total_; }
    /// Finalises into a report, classifying non-finite or large costs as divergent.
    CostReport report(double threshold = kDefaultDivergenceThreshold) const;

  private:
    double dt_;
    double horizon_;
    double total_ = 0.0;
};

/// Reads channels `y` and `alpha` (matrix: `y_i`, `alpha_j`).
CostReport evaluate_cost(const ScalarLqtProblem& problem, const Trajectory& trajectory,
                         double threshold = kDefaultDivergenceThreshold);
CostReport evaluate_cost(const MatrixLqtProblem& problem, const Trajectory& trajectory,
                         double threshold = kDefaultDivergenceThreshold);

/// (approx - opt) / opt × 100. Throws UndefinedBaselineError for opt ≤ 0.
double percentage_error(double cost_approx, double cost_opt);

/// PE for two reports; empty when either side diverged.
std::optional<double> percentage_error(const CostReport& approx, const CostReport& opt);

} // namespace lqt
