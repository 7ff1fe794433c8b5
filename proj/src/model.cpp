#include "lqt/model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "lqt/error.hpp"

namespace lqt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_symmetric(const Eigen::MatrixXd& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void require_psd(const Eigen::MatrixXd& m, const char* name) {
    if (m.size() == 0)
        return;
    if (!is_symmetric(m))
        throw InvalidWeightError(fmt::format("{} must be symmetric", name));
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (min_eigenvalue(m) < -1e-12 * scale)
        throw InvalidWeightError(fmt::format("{} must be positive semidefinite", name));
}

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols)
        throw DimensionError(
            fmt::format("{} is {}x{}, expected {}x{}", name, m.rows(), m.cols(), rows, cols));
}

} // namespace

std::string to_string(SignalKind kind) {
    switch (kind) {
    case SignalKind::Z1: return "z1";
    case SignalKind::Z2: return "z2";
    case SignalKind::Z3: return "z3";
    case SignalKind::Constant: return "constant";
    case SignalKind::Custom: return "custom";
    }
    return "unknown";
}

std::optional<SignalKind> parse_signal_kind(std::string_view text) {
    if (text == "z1") return SignalKind::Z1;
    if (text == "z2") return SignalKind::Z2;
    if (text == "z3") return SignalKind::Z3;
    if (text == "constant") return SignalKind::Constant;
    return std::nullopt;
}

ReferenceSignal ReferenceSignal::z1(double frequency) {
    return {SignalKind::Z1, "z1", frequency, 0.0, 1};
}

ReferenceSignal ReferenceSignal::z2(double frequency) {
    return {SignalKind::Z2, "z2", frequency, 0.0, 1};
}

ReferenceSignal ReferenceSignal::z3(double frequency) {
    return {SignalKind::Z3, "z3", frequency, 0.0, 1};
}

ReferenceSignal ReferenceSignal::constant(double value) {
    return {SignalKind::Constant, "constant", 0.0, value, 1};
}

ReferenceSignal ReferenceSignal::custom(std::string name, Sampler sampler, int dimension) {
    if (!sampler)
        throw ValidationError("custom signal needs a sampler");
    if (dimension < 1)
        throw DimensionError("custom signal dimension must be >= 1");
    ReferenceSignal sig{SignalKind::Custom, std::move(name), 0.0, 0.0, dimension};
    sig.sampler_ = std::move(sampler);
    return sig;
}

ReferenceSignal ReferenceSignal::from_kind(SignalKind kind, double frequency) {
    switch (kind) {
    case SignalKind::Z1: return z1(frequency);
    case SignalKind::Z2: return z2(frequency);
    case SignalKind::Z3: return z3(frequency);
    case SignalKind::Constant: return constant(0.0);
    case SignalKind::Custom: break;
    }
    throw ValidationError("custom signals must be built with ReferenceSignal::custom");
}

double ReferenceSignal::evaluate_builtin(double s, double horizon) const {
    const double half = horizon / 2.0;
    const double f = frequency_;
    switch (kind_) {
    case SignalKind::Z1: {
        const double t = s <= half ? s : half;
        return -5.0 * std::cos(kTwoPi * f * t);
    }
    case SignalKind::Z2:
        // Right-hand branch owns s = T/2.
        if (s < half)
            return -10.0 / horizon * (-s + half) *
                   (std::cos(kTwoPi * f * s) + 0.3 * std::cos(5.0 * std::numbers::pi * f * s));
        return 1.0 / (1.0 + std::exp(-s + 2.0 * horizon / 3.0));
    case SignalKind::Z3:
        if (s < half)
            return 10.0 / horizon * (-s + half) * std::cos(kTwoPi * f * s) / (kTwoPi * f * s + 1.0);
        return 1.0;
    case SignalKind::Constant: return value_;
    case SignalKind::Custom: break;
    }
    return 0.0;
}

double ReferenceSignal::sample(double s, double horizon) const {
    if (!(s >= 0.0 && s <= horizon))
        throw DomainError(fmt::format("signal sampled at s={} outside [0, {}]", s, horizon));
    if (kind_ != SignalKind::Custom)
        return evaluate_builtin(s, horizon);
    if (dimension_ != 1)
        throw DimensionError("scalar sample requested from a vector-valued signal");
    return sampler_(s, horizon)(0);
}

Eigen::VectorXd ReferenceSignal::sample_vector(double s, double horizon) const {
    if (!(s >= 0.0 && s <= horizon))
        throw DomainError(fmt::format("signal sampled at s={} outside [0, {}]", s, horizon));
    if (kind_ != SignalKind::Custom)
        return Eigen::VectorXd::Constant(1, evaluate_builtin(s, horizon));
    Eigen::VectorXd v = sampler_(s, horizon);
    if (v.size() != dimension_)
        throw DimensionError("custom sampler returned a vector of the wrong size");
    return v;
}

double sample_signal(const ReferenceSignal& signal, double s, double horizon) {
    return signal.sample(s, horizon);
}

void ScalarLqtProblem::validate() const {
    if (!(r > 0.0) || !std::isfinite(r))
        throw InvalidWeightError(fmt::format("R must be positive and finite, got {}", r));
    if (!(q >= 0.0) || !std::isfinite(q))
        throw InvalidWeightError(fmt::format("Q must be non-negative, got {}", q));
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError(fmt::format("horizon must be positive, got {}", horizon));
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x0))
        throw ValidationError("A, B and x0 must be finite");
    if (!std::isfinite(s_coef()))
        throw InvalidWeightError("B^2/R is not finite");
    if (signal.dimension() != 1)
        throw DimensionError("scalar problem needs a scalar reference signal");
}

Eigen::MatrixXd MatrixLqtProblem::s_matrix() const {
    return b * gain_matrix();
}

Eigen::MatrixXd MatrixLqtProblem::gain_matrix() const {
    return r.llt().solve(b.transpose());
}

void MatrixLqtProblem::validate() const {
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    const Eigen::Index p = f.cols();
    if (n == 0 || m == 0)
        throw DimensionError("empty system matrices");
    require_shape(a, n, n, "A");
    require_shape(b, n, m, "B");
    require_shape(q, n, n, "Q");
    require_shape(r, m, m, "R");
    require_shape(f, n, p, "F");
    require_shape(d, n, n, "D");
    if (x0.size() != n)
        throw DimensionError(fmt::format("x0 has {} entries, expected {}", x0.size(), n));
    if (signal.dimension() != p)
        throw DimensionError(
            fmt::format("signal dimension {} does not match F columns {}", signal.dimension(), p));
    require_psd(q, "Q");
    require_psd(d, "D");
    if (!is_symmetric(r))
        throw InvalidWeightError("R must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success)
        throw InvalidWeightError("R must be positive definite");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError(fmt::format("horizon must be positive, got {}", horizon));
}

MatrixLqtProblem kinetic_embedding(double a11, double a12, double b, double q, double r, double horizon,
                                   const Eigen::Vector2d& x0, ReferenceSignal signal) {
    if (r == 0.0)
        throw InvalidWeightError("kinetic embedding needs R != 0");
    MatrixLqtProblem p;
    p.a = Eigen::MatrixXd::Zero(2, 2);
    p.a(0, 0) = a11;
    p.a(0, 1) = a12;
    p.b = Eigen::MatrixXd::Zero(2, 1);
    p.b(1, 0) = b;
    p.q = Eigen::MatrixXd::Zero(2, 2);
    p.q(0, 0) = q;
    p.r = Eigen::MatrixXd::Constant(1, 1, r);
    p.f = Eigen::MatrixXd::Zero(2, 1);
    p.f(0, 0) = 1.0;
    p.d = Eigen::MatrixXd::Zero(2, 2);
    p.horizon = horizon;
    p.x0 = x0;
    p.signal = std::move(signal);
    p.validate();
    return p;
}

MatrixLqtProblem lift_scalar(const ScalarLqtProblem& s) {
    MatrixLqtProblem p;
    p.a = Eigen::MatrixXd::Constant(1, 1, s.a);
    p.b = Eigen::MatrixXd::Constant(1, 1, s.b);
    p.q = Eigen::MatrixXd::Constant(1, 1, s.q);
    p.r = Eigen::MatrixXd::Constant(1, 1, s.r);
    p.f = Eigen::MatrixXd::Constant(1, 1, 1.0);
    p.d = Eigen::MatrixXd::Zero(1, 1);
    p.horizon = s.horizon;
    p.x0 = Eigen::VectorXd::Constant(1, s.x0);
    p.signal = s.signal;
    return p;
}

} // namespace lqt
