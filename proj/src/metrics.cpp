#include "lqt/metrics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lqt/error.hpp"

namespace lqt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CostReport diverged_report() {
    return {kInf, kInf, std::nullopt, true};
}

void require_horizon(const Trajectory& trajectory, double horizon) {
    const auto& g = trajectory.grid();
    if (std::abs(g.duration() - horizon) > 1e-9 * std::max(1.0, horizon))
        throw DimensionError(fmt::format("trajectory covers {} s but the horizon is {} s", g.duration(), horizon));
}

} // namespace

CostReport CostAccumulator::report(double threshold) const {
    const double avg = total_ / horizon_;
    if (!std::isfinite(total_) || avg > threshold)
        return diverged_report();
    return {total_, avg, std::nullopt, false};
}

CostReport evaluate_cost(const ScalarLqtProblem& problem, const Trajectory& trajectory, double threshold) {
    require_horizon(trajectory, problem.horizon);
    if (trajectory.diverged())
        return diverged_report();
    const auto& grid = trajectory.grid();
    const auto& y = trajectory.channel("y");
    const auto& alpha = trajectory.channel("alpha");
    CostAccumulator acc(grid.dt(), problem.horizon);
    for (std::size_t k = 0; k < grid.n_steps(); ++k)
        acc.add_scalar(problem.q, problem.r, y[k] - problem.signal.sample(grid.time(k), problem.horizon),
                       alpha[k]);
    return acc.report(threshold);
}

CostReport evaluate_cost(const MatrixLqtProblem& problem, const Trajectory& trajectory, double threshold) {
    require_horizon(trajectory, problem.horizon);
    if (trajectory.diverged())
        return diverged_report();
    const auto& grid = trajectory.grid();
    const int n = problem.state_dim(), m = problem.control_dim();
    std::vector<const std::vector<double>*> ys, as;
    for (int i = 0; i < n; ++i)
        ys.push_back(&trajectory.channel(channel_name("y", i, n)));
    for (int j = 0; j < m; ++j)
        as.push_back(&trajectory.channel(channel_name("alpha", j, m)));

    CostAccumulator acc(grid.dt(), problem.horizon);
    Eigen::VectorXd y(n), a(m);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        for (int i = 0; i < n; ++i)
            y(i) = (*ys[i])[k];
        for (int j = 0; j < m; ++j)
            a(j) = (*as[j])[k];
        const Eigen::VectorXd e = y - problem.f * problem.signal.sample_vector(grid.time(k), problem.horizon);
        acc.add(0.5 * (e.dot(problem.q * e) + a.dot(problem.r * a)));
    }
    return acc.report(threshold);
}

double percentage_error(double cost_approx, double cost_opt) {
    if (!(cost_opt > 0.0))
        throw UndefinedBaselineError(fmt::format("percentage error needs a positive baseline, got {}", cost_opt));
    return (cost_approx - cost_opt) / cost_opt * 100.0;
}

std::optional<double> percentage_error(const CostReport& approx, const CostReport& opt) {
    if (approx.diverged || opt.diverged || !(opt.average_cost > 0.0))
        return std::nullopt;
    return percentage_error(approx.average_cost, opt.average_cost);
}

} // namespace lqt
