#include "lqt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lqt/error.hpp"
#include "lqt/riccati.hpp"
#include "solver_support.hpp"

namespace lqt {

std::string to_string(const SolverId& id) {
    switch (id.kind) {
    case SolverKind::Optimal:
        return "optimal";
    case SolverKind::ForwardSift:
        return "forward";
    case SolverKind::Mpc:
        return fmt::format("mpc(w={})", id.window);
    }
    return "unknown";
}

namespace detail {

Recorder::Recorder(const TimeGrid& grid, const std::vector<std::string>& names, bool keep)
    : trajectory(grid), keep_(keep) {
    if (!keep_)
        return;
    for (const auto& name : names)
        columns_.push_back(&trajectory.add_channel(name));
}

void require_horizon_grid(const TimeGrid& grid, double horizon) {
    const double tol = 1e-9 * std::max(1.0, horizon);
    if (std::abs(grid.t_start()) > tol || std::abs(grid.t_end() - horizon) > tol)
        throw DimensionError(fmt::format("grid [{}, {}] does not span the horizon [0, {}]", grid.t_start(),
                                         grid.t_end(), horizon));
}

SolveResult finish(Recorder& rec, const CostAccumulator& acc, const SolveOptions& options, SolverId id,
                   std::chrono::steady_clock::time_point start) {
    SolveResult out{std::move(rec.trajectory), 0.0, 0.0, 0.0, false, id};
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const CostReport report = out.trajectory.diverged() ? CostReport{std::numeric_limits<double>::infinity(),
                                                                     std::numeric_limits<double>::infinity(),
                                                                     std::nullopt, true}
                                                        : acc.report(options.divergence_threshold);
    out.total_cost = report.total_cost;
    out.average_cost = report.average_cost;
    out.diverged = report.diverged;
    return out;
}

} // namespace detail

using detail::bounded;
using detail::Recorder;

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> matrix_channels(int n, int m) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i)
        names.push_back(channel_name("y", i, n));
    for (int i = 0; i < n; ++i)
        names.push_back(channel_name("p", i, n));
    for (int j = 0; j < m; ++j)
        names.push_back(channel_name("alpha", j, m));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            names.push_back(channel_name("theta", i, j, n, n));
    for (int i = 0; i < n; ++i)
        names.push_back(channel_name("eta", i, n));
    return names;
}

void record_matrix(Recorder& rec, std::size_t k, const Eigen::VectorXd& y, const Eigen::VectorXd& p,
                   const Eigen::VectorXd& alpha, const Eigen::MatrixXd& theta, const Eigen::VectorXd& eta) {
    std::size_t c = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        rec.set(c++, k, y(i));
    for (Eigen::Index i = 0; i < p.size(); ++i)
        rec.set(c++, k, p(i));
    for (Eigen::Index j = 0; j < alpha.size(); ++j)
        rec.set(c++, k, alpha(j));
    for (Eigen::Index i = 0; i < theta.rows(); ++i)
        for (Eigen::Index j = 0; j < theta.cols(); ++j)
            rec.set(c++, k, theta(i, j));
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        rec.set(c++, k, eta(i));
}

double stage_cost(const MatrixLqtProblem& problem, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                  double t) {
    const Eigen::VectorXd e = y - problem.f * problem.signal.sample_vector(t, problem.horizon);
    return 0.5 * (e.dot(problem.q * e) + alpha.dot(problem.r * alpha));
}

MatrixLqtProblem tracking_copy(const MatrixLqtProblem& problem) {
    MatrixLqtProblem p = problem;
    p.d = Eigen::MatrixXd::Zero(problem.state_dim(), problem.state_dim());
    return p;
}

} // namespace

SolveResult solve_optimal(const ScalarLqtProblem& problem, const TimeGrid& grid, const SolveOptions& options) {
    problem.validate();
    detail::require_horizon_grid(grid, problem.horizon);
    const auto start = Clock::now();

    const RiccatiOptions ropt{options.magnitude_bound};
    const auto theta_hat = solve_forward_flipped(problem, grid, 0.0, ropt);
    const auto eta_traj = feedforward_forward(problem, theta_hat, grid, SignalAccess::TimeReversed, ropt);
    const auto& eta_hat = eta_traj.channel("eta");

    Recorder rec(grid, {"y", "p", "alpha", "theta", "eta"}, options.keep_trajectory);
    CostAccumulator acc(grid.dt(), problem.horizon);
    const std::size_t n = grid.n_steps();
    const double gain = problem.b / problem.r;
    double y = problem.x0;
    for (std::size_t k = 0;; ++k) {
        if (options.on_step)
            options.on_step(k, grid.time(k));
        const double theta = theta_hat.theta[n - k];
        const double eta = eta_hat[n - k];
        if (!bounded(y, options.magnitude_bound) || !bounded(theta, options.magnitude_bound) ||
            !bounded(eta, options.magnitude_bound)) {
            rec.trajectory.mark_diverged(k);
            break;
        }
        const double p = theta * y + eta;
        const double alpha = -gain * p;
        rec.set(0, k, y);
        rec.set(1, k, p);
        rec.set(2, k, alpha);
        rec.set(3, k, theta);
        rec.set(4, k, eta);
        if (k == n)
            break;
        acc.add_scalar(problem.q, problem.r, y - problem.signal.sample(grid.time(k), problem.horizon), alpha);
        y = euler_step(y, problem.a * y + problem.b * alpha, grid.dt());
    }
    return detail::finish(rec, acc, options, SolverId::optimal(), start);
}

SolveResult solve_forward_sift(const ScalarLqtProblem& problem, const TimeGrid& grid,
                               const SolveOptions& options) {
    problem.validate();
    detail::require_horizon_grid(grid, problem.horizon);
    const auto start = Clock::now();

    Recorder rec(grid, {"y", "p", "alpha", "theta", "eta"}, options.keep_trajectory);
    CostAccumulator acc(grid.dt(), problem.horizon);
    const std::size_t n = grid.n_steps();
    const double a = problem.a, s = problem.s_coef(), q = problem.q, dt = grid.dt();
    const double gain = problem.b / problem.r;
    double y = problem.x0, theta = 0.0, eta = 0.0;
    for (std::size_t k = 0;; ++k) {
        if (options.on_step)
            options.on_step(k, grid.time(k));
        if (!bounded(y, options.magnitude_bound) || !bounded(theta, options.magnitude_bound) ||
            !bounded(eta, options.magnitude_bound)) {
            rec.trajectory.mark_diverged(k);
            break;
        }
        const double p = theta * y + eta;
        const double alpha = -gain * p;
        rec.set(0, k, y);
        rec.set(1, k, p);
        rec.set(2, k, alpha);
        rec.set(3, k, theta);
        rec.set(4, k, eta);
        if (k == n)
            break;
        const double z = problem.signal.sample(grid.time(k), problem.horizon);
        acc.add_scalar(q, problem.r, y - z, alpha);
        y = euler_step(y, a * y + problem.b * alpha, dt);
        const double theta_next = euler_step(theta, flipped_riccati_rhs(theta, a, s, q), dt);
        eta = euler_step(eta, flipped_feedforward_rhs(eta, theta, a, s, q, z), dt);
        theta = theta_next;
    }
    return detail::finish(rec, acc, options, SolverId::forward(), start);
}

SolveResult solve_optimal(const MatrixLqtProblem& input, const TimeGrid& grid, const SolveOptions& options) {
    const MatrixLqtProblem problem = tracking_copy(input);
    problem.validate();
    detail::require_horizon_grid(grid, problem.horizon);
    const auto start = Clock::now();

    const RiccatiOptions ropt{options.magnitude_bound};
    const auto theta_hat = solve_forward_flipped(problem, grid, ropt);
    const auto eta_traj = feedforward_forward(problem, theta_hat, grid, SignalAccess::TimeReversed, ropt);
    const int n_state = problem.state_dim();
    std::vector<const std::vector<double>*> eta_cols;
    for (int i = 0; i < n_state; ++i)
        eta_cols.push_back(&eta_traj.channel(channel_name("eta", i, n_state)));

    Recorder rec(grid, matrix_channels(n_state, problem.control_dim()), options.keep_trajectory);
    CostAccumulator acc(grid.dt(), problem.horizon);
    const Eigen::MatrixXd gain = problem.gain_matrix();
    const std::size_t n = grid.n_steps();
    Eigen::VectorXd y = problem.x0, eta(n_state);
    for (std::size_t k = 0;; ++k) {
        if (options.on_step)
            options.on_step(k, grid.time(k));
        const Eigen::MatrixXd& theta = theta_hat.theta[n - k];
        for (int i = 0; i < n_state; ++i)
            eta(i) = (*eta_cols[i])[n - k];
        if (!bounded(y, options.magnitude_bound) || !bounded(theta, options.magnitude_bound) ||
            !bounded(eta, options.magnitude_bound)) {
            rec.trajectory.mark_diverged(k);
            break;
        }
        const Eigen::VectorXd p = theta * y + eta;
        const Eigen::VectorXd alpha = -gain * p;
        record_matrix(rec, k, y, p, alpha, theta, eta);
        if (k == n)
            break;
        acc.add(stage_cost(problem, y, alpha, grid.time(k)));
        y = euler_step(y, problem.a * y + problem.b * alpha, grid.dt());
    }
    return detail::finish(rec, acc, options, SolverId::optimal(), start);
}

SolveResult solve_forward_sift(const MatrixLqtProblem& input, const TimeGrid& grid,
                               const SolveOptions& options) {
    const MatrixLqtProblem problem = tracking_copy(input);
    problem.validate();
    detail::require_horizon_grid(grid, problem.horizon);
    const auto start = Clock::now();

    const int n_state = problem.state_dim();
    Recorder rec(grid, matrix_channels(n_state, problem.control_dim()), options.keep_trajectory);
    CostAccumulator acc(grid.dt(), problem.horizon);
    const Eigen::MatrixXd s = problem.s_matrix();
    const Eigen::MatrixXd gain = problem.gain_matrix();
    const Eigen::MatrixXd qf = problem.q * problem.f;
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();
    Eigen::VectorXd y = problem.x0;
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n_state, n_state);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n_state);
    for (std::size_t k = 0;; ++k) {
        if (options.on_step)
            options.on_step(k, grid.time(k));
        if (!bounded(y, options.magnitude_bound) || !bounded(theta, options.magnitude_bound) ||
            !bounded(eta, options.magnitude_bound)) {
            rec.trajectory.mark_diverged(k);
            break;
        }
        const Eigen::VectorXd p = theta * y + eta;
        const Eigen::VectorXd alpha = -gain * p;
        record_matrix(rec, k, y, p, alpha, theta, eta);
        if (k == n)
            break;
        const Eigen::VectorXd z = problem.signal.sample_vector(grid.time(k), problem.horizon);
        const Eigen::VectorXd e = y - problem.f * z;
        acc.add(0.5 * (e.dot(problem.q * e) + alpha.dot(problem.r * alpha)));
        y = euler_step(y, problem.a * y + problem.b * alpha, dt);
        eta = euler_step(eta, flipped_feedforward_rhs(eta, theta, problem.a, s, qf, z), dt);
        Eigen::MatrixXd next = theta + dt * flipped_riccati_rhs(theta, problem.a, s, problem.q);
        theta = 0.5 * (next + next.transpose());
    }
    return detail::finish(rec, acc, options, SolverId::forward(), start);
}

} // namespace lqt
