#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lqt/model.hpp"
#include "lqt/odeint.hpp"

namespace lqt {

enum class RiccatiDirection { BackwardOriginal, ForwardFlipped };

/// How the feedforward equation reads the reference: z(τ) (causal) or z(T - τ).
enum class SignalAccess { PresentTime, TimeReversed };

struct RiccatiOptions {
    double magnitude_bound = 1e12;
};

/// θ on a grid. BackwardOriginal solutions are indexed by forward time t_k;
/// ForwardFlipped solutions by τ_k. Entries past a divergence point are NaN.
struct RiccatiSolution {
    TimeGrid grid;
    std::vector<Eigen::MatrixXd> theta;
    RiccatiDirection direction = RiccatiDirection::ForwardFlipped;
    std::optional<std::size_t> divergence_index;

    bool diverged() const { return divergence_index.has_value(); }
    /// Channels `theta` (1×1) or `theta_i_j`.
    Trajectory to_trajectory() const;
};

struct ScalarRiccatiSolution {
    TimeGrid grid;
    std::vector<double> theta;
    RiccatiDirection direction = RiccatiDirection::ForwardFlipped;
    std::optional<std::size_t> divergence_index;

    bool diverged() const { return divergence_index.has_value(); }
    Trajectory to_trajectory() const;
};

// Right-hand sides shared by every integrator in the library. `s` is B R⁻¹ Bᵀ.

/// -θ S θ + θ A + Aᵀ θ + Q
Eigen::MatrixXd flipped_riccati_rhs(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& s, const Eigen::MatrixXd& q);
/// θ S θ - θ A - Aᵀ θ - Q
Eigen::MatrixXd original_riccati_rhs(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& s, const Eigen::MatrixXd& q);
/// (Aᵀ - θ S) η - Q F z
Eigen::VectorXd flipped_feedforward_rhs(const Eigen::VectorXd& eta, const Eigen::MatrixXd& theta,
                                        const Eigen::MatrixXd& a, const Eigen::MatrixXd& s,
                                        const Eigen::MatrixXd& qf, const Eigen::VectorXd& z);

inline double flipped_riccati_rhs(double theta, double a, double s, double q) {
    return -theta * s * theta + theta * a + a * theta + q;
}

inline double original_riccati_rhs(double theta, double a, double s, double q) {
    return theta * s * theta - theta * a - a * theta - q;
}

inline double flipped_feedforward_rhs(double eta, double theta, double a, double s, double q, double z) {
    return (a - theta * s) * eta - q * z;
}

/// θ' = θSθ - θA - Aᵀθ - Q from θ(T) = D, realised as the flipped equation
/// integrated forward and read back in reverse index order.
RiccatiSolution solve_backward(const MatrixLqtProblem& problem, const TimeGrid& grid,
                               const RiccatiOptions& options = {});
/// θ̂' = -θ̂Sθ̂ + θ̂A + Aᵀθ̂ + Q from θ̂(0) = D. Symmetrised after every step.
RiccatiSolution solve_forward_flipped(const MatrixLqtProblem& problem, const TimeGrid& grid,
                                      const RiccatiOptions& options = {});

ScalarRiccatiSolution solve_backward(const ScalarLqtProblem& problem, const TimeGrid& grid,
                                     double terminal = 0.0, const RiccatiOptions& options = {});
ScalarRiccatiSolution solve_forward_flipped(const ScalarLqtProblem& problem, const TimeGrid& grid,
                                            double initial = 0.0, const RiccatiOptions& options = {});
/// The original (unflipped) scalar equation stepped forward in t from θ(0).
ScalarRiccatiSolution solve_forward_unflipped(const ScalarLqtProblem& problem, const TimeGrid& grid,
                                              double initial = 0.0, const RiccatiOptions& options = {});

/// Closed form of the scalar flipped equation with θ̂(0) = 0.
struct ScalarRiccatiClosedForm {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double r_over_b2 = 0.0;

    /// Throws UnsupportedCaseError for b = 0 or a double root.
    static ScalarRiccatiClosedForm make(double a, double b, double q, double r);
    /// Throws PoleError where the denominator vanishes.
    double theta(double tau) const;
    /// lim τ→∞ θ̂(τ) = λ₁ R / B².
    double limit() const { return lambda1 * r_over_b2; }
};

double closed_form_theta(double a, double b, double q, double r, double tau);

/// Roots of -Sθ² + 2Aθ + Q = 0, S = B²/R, ascending. With S = 0 the equation is
/// linear and `second` is empty.
struct AlgebraicRoots {
    double first = 0.0;
    std::optional<double> second;
};

AlgebraicRoots algebraic_roots(double a, double b, double q, double r);

/// Feedforward η forward from η(0) = 0 against a ForwardFlipped θ̂ on the same
/// grid. PresentTime gives the causal η̃; TimeReversed gives η̂ (so that
/// η(t_k) = η̂(τ_{n-k})). Channel `eta` or `eta_i`.
Trajectory feedforward_forward(const MatrixLqtProblem& problem, const RiccatiSolution& theta,
                               const TimeGrid& grid, SignalAccess access,
                               const RiccatiOptions& options = {});
Trajectory feedforward_forward(const ScalarLqtProblem& problem, const ScalarRiccatiSolution& theta,
                               const TimeGrid& grid, SignalAccess access,
                               const RiccatiOptions& options = {});

} // namespace lqt
