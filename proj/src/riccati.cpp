#include "lqt/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lqt/error.hpp"

namespace lqt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool out_of_bounds(double v, double bound) {
    return !std::isfinite(v) || std::abs(v) > bound;
}

bool out_of_bounds(const Eigen::MatrixXd& m, double bound) {
    return !m.allFinite() || m.cwiseAbs().maxCoeff() > bound;
}

void require_horizon_grid(const TimeGrid& grid, double horizon) {
    const double tol = 1e-9 * std::max(1.0, horizon);
    if (std::abs(grid.t_start()) > tol || std::abs(grid.t_end() - horizon) > tol)
        throw DimensionError(fmt::format("grid [{}, {}] does not span the horizon [0, {}]", grid.t_start(),
                                         grid.t_end(), horizon));
}

template <typename Rhs>
ScalarRiccatiSolution integrate_scalar(const TimeGrid& grid, double initial, RiccatiDirection direction,
                                       const RiccatiOptions& options, Rhs rhs) {
    ScalarRiccatiSolution sol{grid, std::vector<double>(grid.size(), kNaN), direction, std::nullopt};
    double theta = initial;
    const double dt = grid.dt();
    for (std::size_t k = 0;; ++k) {
        if (out_of_bounds(theta, options.magnitude_bound)) {
            sol.divergence_index = k;
            break;
        }
        sol.theta[k] = theta;
        if (k == grid.n_steps())
            break;
        theta = euler_step(theta, rhs(theta), dt);
    }
    return sol;
}

// Applies the index reversal that turns a flipped solution in τ into θ(t).
template <typename Solution>
Solution reversed(Solution flipped) {
    std::reverse(flipped.theta.begin(), flipped.theta.end());
    flipped.direction = RiccatiDirection::BackwardOriginal;
    if (flipped.divergence_index)
        flipped.divergence_index = flipped.grid.n_steps() - *flipped.divergence_index;
    return flipped;
}

} // namespace

Trajectory RiccatiSolution::to_trajectory() const {
    Trajectory traj(grid);
    const int n = theta.empty() ? 0 : static_cast<int>(theta.front().rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto& col = traj.add_channel(channel_name("theta", i, j, n, n));
            for (std::size_t k = 0; k < theta.size(); ++k)
                col[k] = theta[k](i, j);
        }
    return traj;
}

Trajectory ScalarRiccatiSolution::to_trajectory() const {
    Trajectory traj(grid);
    traj.add_channel("theta") = theta;
    return traj;
}

Eigen::MatrixXd flipped_riccati_rhs(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& s, const Eigen::MatrixXd& q) {
    return -theta * s * theta + theta * a + a.transpose() * theta + q;
}

Eigen::MatrixXd original_riccati_rhs(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& s, const Eigen::MatrixXd& q) {
    return theta * s * theta - theta * a - a.transpose() * theta - q;
}

Eigen::VectorXd flipped_feedforward_rhs(const Eigen::VectorXd& eta, const Eigen::MatrixXd& theta,
                                        const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                                        const Eigen::MatrixXd& qf, const Eigen::VectorXd& z) {
    return (a.transpose() - theta * s) * eta - qf * z;
}

RiccatiSolution solve_forward_flipped(const MatrixLqtProblem& problem, const TimeGrid& grid,
                                      const RiccatiOptions& options) {
    problem.validate();
    const Eigen::MatrixXd s = problem.s_matrix();
    const Eigen::Index n = problem.a.rows();
    RiccatiSolution sol{grid, {}, RiccatiDirection::ForwardFlipped, std::nullopt};
    sol.theta.reserve(grid.size());
    Eigen::MatrixXd theta = problem.d;
    for (std::size_t k = 0;; ++k) {
        if (out_of_bounds(theta, options.magnitude_bound)) {
            sol.divergence_index = k;
            sol.theta.resize(grid.size(), Eigen::MatrixXd::Constant(n, n, kNaN));
            break;
        }
        sol.theta.push_back(theta);
        if (k == grid.n_steps())
            break;
        Eigen::MatrixXd next = theta + grid.dt() * flipped_riccati_rhs(theta, problem.a, s, problem.q);
        theta = 0.5 * (next + next.transpose());
    }
    return sol;
}

RiccatiSolution solve_backward(const MatrixLqtProblem& problem, const TimeGrid& grid,
                               const RiccatiOptions& options) {
    return reversed(solve_forward_flipped(problem, grid, options));
}

ScalarRiccatiSolution solve_forward_flipped(const ScalarLqtProblem& problem, const TimeGrid& grid,
                                            double initial, const RiccatiOptions& options) {
    problem.validate();
    const double a = problem.a, s = problem.s_coef(), q = problem.q;
    return integrate_scalar(grid, initial, RiccatiDirection::ForwardFlipped, options,
                            [=](double th) { return flipped_riccati_rhs(th, a, s, q); });
}

ScalarRiccatiSolution solve_backward(const ScalarLqtProblem& problem, const TimeGrid& grid, double terminal,
                                     const RiccatiOptions& options) {
    return reversed(solve_forward_flipped(problem, grid, terminal, options));
}

ScalarRiccatiSolution solve_forward_unflipped(const ScalarLqtProblem& problem, const TimeGrid& grid,
                                              double initial, const RiccatiOptions& options) {
    problem.validate();
    const double a = problem.a, s = problem.s_coef(), q = problem.q;
    // Stepping forward in t; the direction tag records which equation was used.
    return integrate_scalar(grid, initial, RiccatiDirection::BackwardOriginal, options,
                            [=](double th) { return original_riccati_rhs(th, a, s, q); });
}

ScalarRiccatiClosedForm ScalarRiccatiClosedForm::make(double a, double b, double q, double r) {
    if (b == 0.0)
        throw UnsupportedCaseError("closed form needs B != 0");
    if (!(r > 0.0))
        throw InvalidWeightError("closed form needs R > 0");
    const double disc = a * a + q * b * b / r;
    if (disc < 0.0)
        throw UnsupportedCaseError("A^2 + Q B^2 / R is negative");
    if (disc == 0.0)
        throw UnsupportedCaseError("double root lambda1 = lambda2 is not supported");
    const double root = std::sqrt(disc);
    return {a + root, a - root, r / (b * b)};
}

double ScalarRiccatiClosedForm::theta(double tau) const {
    // Numerator and denominator divided by exp(lambda1 tau) so large tau stays finite.
    const double decay = std::exp((lambda2 - lambda1) * tau);
    const double num = lambda1 * lambda2 * (1.0 - decay);
    const double den = lambda2 - lambda1 * decay;
    const double scale = std::abs(lambda2) + std::abs(lambda1 * decay);
    if (std::abs(den) <= 1e-14 * scale)
        throw PoleError(fmt::format("closed-form denominator vanishes at tau={}", tau));
    return r_over_b2 * num / den;
}

double closed_form_theta(double a, double b, double q, double r, double tau) {
    return ScalarRiccatiClosedForm::make(a, b, q, r).theta(tau);
}

AlgebraicRoots algebraic_roots(double a, double b, double q, double r) {
    if (!(r > 0.0))
        throw InvalidWeightError("algebraic roots need R > 0");
    const double s = b * b / r;
    if (s == 0.0) {
        if (a == 0.0)
            throw UnsupportedCaseError("S = 0 and A = 0: the equation has no isolated root");
        return {-q / (2.0 * a), std::nullopt};
    }
    const double disc = a * a + s * q;
    if (disc < 0.0)
        throw UnsupportedCaseError("algebraic Riccati equation has complex roots");
    const double root = std::sqrt(disc);
    return {(a - root) / s, (a + root) / s};
}

Trajectory feedforward_forward(const MatrixLqtProblem& problem, const RiccatiSolution& theta,
                               const TimeGrid& grid, SignalAccess access, const RiccatiOptions& options) {
    problem.validate();
    if (!(theta.grid == grid) || theta.theta.size() != grid.size())
        throw DimensionError("Riccati solution lives on a different grid");
    if (theta.direction != RiccatiDirection::ForwardFlipped)
        throw ValidationError("feedforward needs a forward-flipped Riccati solution");
    require_horizon_grid(grid, problem.horizon);

    const int n = problem.state_dim();
    const Eigen::MatrixXd s = problem.s_matrix();
    const Eigen::MatrixXd qf = problem.q * problem.f;
    Trajectory traj(grid);
    std::vector<std::vector<double>*> cols;
    for (int i = 0; i < n; ++i)
        cols.push_back(&traj.add_channel(channel_name("eta", i, n)));

    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    const std::size_t last = grid.n_steps();
    for (std::size_t k = 0;; ++k) {
        if (out_of_bounds(eta, options.magnitude_bound)) {
            traj.mark_diverged(k);
            break;
        }
        for (int i = 0; i < n; ++i)
            (*cols[i])[k] = eta(i);
        if (k == last)
            break;
        const double t = access == SignalAccess::PresentTime ? grid.time(k) : grid.time(last - k);
        const Eigen::VectorXd z = problem.signal.sample_vector(t, problem.horizon);
        eta += grid.dt() * flipped_feedforward_rhs(eta, theta.theta[k], problem.a, s, qf, z);
    }
    return traj;
}

Trajectory feedforward_forward(const ScalarLqtProblem& problem, const ScalarRiccatiSolution& theta,
                               const TimeGrid& grid, SignalAccess access, const RiccatiOptions& options) {
    problem.validate();
    if (!(theta.grid == grid) || theta.theta.size() != grid.size())
        throw DimensionError("Riccati solution lives on a different grid");
    if (theta.direction != RiccatiDirection::ForwardFlipped)
        throw ValidationError("feedforward needs a forward-flipped Riccati solution");
    require_horizon_grid(grid, problem.horizon);

    const double a = problem.a, s = problem.s_coef(), q = problem.q;
    Trajectory traj(grid);
    auto& col = traj.add_channel("eta");
    double eta = 0.0;
    const std::size_t last = grid.n_steps();
    for (std::size_t k = 0;; ++k) {
        if (out_of_bounds(eta, options.magnitude_bound)) {
            traj.mark_diverged(k);
            break;
        }
        col[k] = eta;
        if (k == last)
            break;
        const double t = access == SignalAccess::PresentTime ? grid.time(k) : grid.time(last - k);
        const double z = problem.signal.sample(t, problem.horizon);
        eta = euler_step(eta, flipped_feedforward_rhs(eta, theta.theta[k], a, s, q, z), grid.dt());
    }
    return traj;
}

} // namespace lqt
