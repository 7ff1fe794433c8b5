#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "lqt/error.hpp"
#include "lqt/solvers.hpp"
#include "solver_support.hpp"

namespace lqt {

double mpc_first_control(const ScalarLqtProblem& problem, double ds, std::span<const double> z, double y0) {
    if (z.size() < 2)
        throw ValidationError("an MPC window needs at least two grid points");
    const double ad = 1.0 + problem.a * ds;
    const double bd = problem.b * ds;
    // Value-to-go P y²/2 + v y, swept from the zero terminal cost back to stage 0.
    double P = 0.0, v = 0.0, K = 0.0, kff = 0.0;
    for (std::size_t j = z.size(); j-- > 0;) {
        const double den = ds * problem.r + bd * bd * P;
        K = bd * P * ad / den;
        kff = bd * v / den;
        const double coupling = ad * bd * P;
        const double P_next = ds * problem.q + ad * ad * P - coupling * coupling / den;
        const double v_next = -ds * problem.q * z[j] + ad * v - coupling * bd * v / den;
        P = P_next;
        v = v_next;
    }
    return -(K * y0 + kff);
}

SolveResult solve_mpc(const ScalarLqtProblem& problem, const TimeGrid& grid, const MpcConfig& config,
                      const SolveOptions& options) {
    problem.validate();
    detail::require_horizon_grid(grid, problem.horizon);
    if (config.window_steps < 2)
        throw ValidationError(fmt::format("MPC window must be at least 2 steps, got {}", config.window_steps));
    const auto start = std::chrono::steady_clock::now();

    detail::Recorder rec(grid, {"y", "alpha"}, options.keep_trajectory);
    CostAccumulator acc(grid.dt(), problem.horizon);
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();

    // Reference samples are read lazily as windows first reach them.
    std::vector<double> z(n + 1);
    std::size_t sampled = 0;
    double y = problem.x0;
    for (std::size_t k = 0;; ++k) {
        if (options.on_step)
            options.on_step(k, grid.time(k));
        if (!detail::bounded(y, options.magnitude_bound)) {
            rec.trajectory.mark_diverged(k);
            break;
        }
        const std::size_t end = std::min(k + config.window_steps - 1, n);
        for (; sampled <= end; ++sampled)
            z[sampled] = problem.signal.sample(grid.time(sampled), problem.horizon);
        // A one-point window has no cost the control can influence.
        const double alpha = end > k ? mpc_first_control(problem, dt, {z.data() + k, end - k + 1}, y) : 0.0;
        rec.set(0, k, y);
        rec.set(1, k, alpha);
        if (k == n)
            break;
        acc.add_scalar(problem.q, problem.r, y - z[k], alpha);
        y = euler_step(y, problem.a * y + problem.b * alpha, dt);
    }
    return detail::finish(rec, acc, options, SolverId::mpc(static_cast<int>(config.window_steps)), start);
}

} // namespace lqt
