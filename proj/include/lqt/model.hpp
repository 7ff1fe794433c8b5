#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace lqt {

enum class SignalKind { Z1, Z2, Z3, Constant, Custom };

std::string to_string(SignalKind kind);
std::optional<SignalKind> parse_signal_kind(std::string_view text);

/// Tracking target z(s) on [0, T].
///
/// Built-in kinds are the three benchmark signals plus a constant. Samples are
/// produced on demand only; nothing is tabulated ahead of time, so a solver can
/// only ever see the instants it explicitly asks for.
class ReferenceSignal {
  public:
    /// Custom sampler, called with (s, horizon).
    using Sampler = std::function<Eigen::VectorXd(double, double)>;

    static ReferenceSignal z1(double frequency);
    static ReferenceSignal z2(double frequency);
    static ReferenceSignal z3(double frequency);
    static ReferenceSignal constant(double value);
    static ReferenceSignal custom(std::string name, Sampler sampler, int dimension = 1);
    static ReferenceSignal from_kind(SignalKind kind, double frequency);

    SignalKind kind() const { return kind_; }
    double frequency() const { return frequency_; }
    int dimension() const { return dimension_; }
    const std::string& name() const { return name_; }

    /// Scalar sample. Throws DomainError for s outside [0, horizon] and
    /// DimensionError for vector-valued custom signals.
    double sample(double s, double horizon) const;
    Eigen::VectorXd sample_vector(double s, double horizon) const;

  private:
    ReferenceSignal(SignalKind kind, std::string name, double frequency, double value, int dimension)
        : kind_(kind), name_(std::move(name)), frequency_(frequency), value_(value), dimension_(dimension) {}

    double evaluate_builtin(double s, double horizon) const;

    SignalKind kind_;
    std::string name_;
    double frequency_ = 0.0;
    double value_ = 0.0;
    int dimension_ = 1;
    Sampler sampler_;
};

double sample_signal(const ReferenceSignal& signal, double s, double horizon);

/// Scalar tracking problem: y' = a y + b α, cost ∫ q(y - z)²/2 + r α²/2.
struct ScalarLqtProblem {
    double a = 1.0;
    double b = 1.0;
    double q = 1.0;
    double r = 1.0;
    double horizon = 1.0;
    double x0 = 0.0;
    ReferenceSignal signal = ReferenceSignal::constant(0.0);

    /// b² / r.
    double s_coef() const { return b * b / r; }
    void validate() const;
};

/// Matrix tracking problem: y' = A y + B α, cost ∫ (y - F z)ᵀQ(y - F z)/2 + αᵀRα/2.
///
/// `d` is the terminal weight of the pure regulator problem; the tracking
/// solvers always use a zero terminal condition.
struct MatrixLqtProblem {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    Eigen::MatrixXd q;
    Eigen::MatrixXd r;
    Eigen::MatrixXd f;
    Eigen::MatrixXd d;
    double horizon = 1.0;
    Eigen::VectorXd x0;
    ReferenceSignal signal = ReferenceSignal::constant(0.0);

    int state_dim() const { return static_cast<int>(a.rows()); }
    int control_dim() const { return static_cast<int>(b.cols()); }
    int signal_dim() const { return static_cast<int>(f.cols()); }

    /// B R⁻¹ Bᵀ.
    Eigen::MatrixXd s_matrix() const;
    /// R⁻¹ Bᵀ, the map from costate to (negated) control.
    Eigen::MatrixXd gain_matrix() const;
    void validate() const;
};

/// Two-state embedding where the control drives the derivative of the
/// effective input y₂: A = [[a11, a12], [0, 0]], B = [0, b]ᵀ, Q = diag(q, 0),
/// F = [1, 0]ᵀ.
MatrixLqtProblem kinetic_embedding(double a11, double a12, double b, double q, double r, double horizon,
                                   const Eigen::Vector2d& x0, ReferenceSignal signal);

MatrixLqtProblem lift_scalar(const ScalarLqtProblem& problem);

} // namespace lqt
