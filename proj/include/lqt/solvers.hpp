#pragma once

#include <functional>
#include <span>
#include <string>

#include "lqt/metrics.hpp"
#include "lqt/model.hpp"
#include "lqt/odeint.hpp"

namespace lqt {

enum class SolverKind { Optimal, ForwardSift, Mpc };

struct SolverId {
    SolverKind kind = SolverKind::Optimal;
    int window = 0; // MPC only

    static SolverId optimal() { return {SolverKind::Optimal, 0}; }
    static SolverId forward() { return {SolverKind::ForwardSift, 0}; }
    static SolverId mpc(int w) { return {SolverKind::Mpc, w}; }

    bool operator==(const SolverId&) const = default;
};

/// "optimal", "forward", "mpc(w=85)".
std::string to_string(const SolverId& id);

struct SolveOptions {
    /// When false only costs and timing are returned; the trajectory has no channels.
    bool keep_trajectory = true;
    double magnitude_bound = 1e12;
    double divergence_threshold = kDefaultDivergenceThreshold;
    /// Called with (k, t_k) at the start of every outer step, before the signal
    /// is read for that step.
    std::function<void(std::size_t, double)> on_step;
};

struct SolveResult {
    Trajectory trajectory;
    double total_cost = 0.0;
    double average_cost = 0.0;
    double wall_seconds = 0.0;
    bool diverged = false;
    SolverId solver;

    CostReport cost() const { return {total_cost, average_cost, std::nullopt, diverged}; }
};

/// Backward θ, η with zero terminal values, then forward rollout of
/// α* = -R⁻¹Bᵀ(θy + η). Reads the whole reference. Channels y, p, alpha, theta, eta.
SolveResult solve_optimal(const ScalarLqtProblem& problem, const TimeGrid& grid, const SolveOptions& options = {});
SolveResult solve_optimal(const MatrixLqtProblem& problem, const TimeGrid& grid, const SolveOptions& options = {});

/// θ̃, η̃, ỹ stepped together forward from τ = 0; step k reads z only at t_k.
SolveResult solve_forward_sift(const ScalarLqtProblem& problem, const TimeGrid& grid,
                               const SolveOptions& options = {});
SolveResult solve_forward_sift(const MatrixLqtProblem& problem, const TimeGrid& grid,
                               const SolveOptions& options = {});

struct MpcConfig {
    /// Number of grid points in each window, clipped at the horizon. Must be ≥ 2.
    std::size_t window_steps = 2;
};

/// First control of the discrete window problem
///   min Σ_j ds·[q(y_j - z_j)² + r a_j²]/2,  y_{j+1} = (1 + a·ds) y_j + b·ds·a_j,
/// j = 0..z.size()-1, zero terminal cost, solved by backward dynamic programming.
double mpc_first_control(const ScalarLqtProblem& problem, double ds, std::span<const double> z, double y0);

/// Receding horizon: solve the window problem at t_k, apply its first
/// control for one Euler step, move on. Channels y, alpha.
SolveResult solve_mpc(const ScalarLqtProblem& problem, const TimeGrid& grid, const MpcConfig& config,
                      const SolveOptions& options = {});

} // namespace lqt
