#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lqt {

/// Uniform grid t_k = t_start + k·dt, k = 0..n_steps.
class TimeGrid {
  public:
    /// n_steps = round((t_end - t_start) / dt); throws ValidationError unless
    /// dt divides the interval to 1e-9 relative.
    static TimeGrid uniform(double t_start, double t_end, double dt);
    static TimeGrid with_steps(double t_start, double t_end, std::size_t n_steps);

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t size() const { return n_steps_ + 1; }
    double duration() const { return t_end_ - t_start_; }

    /// The last sample is pinned to t_end so endpoint lookups never drift past it.
    double time(std::size_t k) const {
        return k == n_steps_ ? t_end_ : t_start_ + static_cast<double>(k) * dt_;
    }

    bool operator==(const TimeGrid&) const = default;

  private:
    TimeGrid(double t_start, double t_end, double dt, std::size_t n)
        : t_start_(t_start), t_end_(t_end), dt_(dt), n_steps_(n) {}

    double t_start_;
    double t_end_;
    double dt_;
    std::size_t n_steps_;
};

struct Channel {
    std::string name;
    std::vector<double> values;
};

/// Named time series sharing one grid. Entries after a divergence point are NaN.
class Trajectory {
  public:
    explicit Trajectory(TimeGrid grid) : grid_(grid) {}

    const TimeGrid& grid() const { return grid_; }

    /// Adds a zero-filled channel of grid length and returns it for filling.
    std::vector<double>& add_channel(std::string name);
    bool has_channel(std::string_view name) const;
    const std::vector<double>& channel(std::string_view name) const;
    std::vector<double>& channel(std::string_view name);
    std::span<const Channel> channels() const { return channels_; }

    bool diverged() const { return divergence_index_.has_value(); }
    std::optional<std::size_t> divergence_index() const { return divergence_index_; }
    /// Marks divergence at sample k and NaN-fills every channel from k on.
    void mark_diverged(std::size_t k);

    /// `t,<channel>,...` header, one row per grid point, 17 significant digits.
    void write_csv(std::ostream& out) const;
    void save_csv(const std::filesystem::path& path) const;

  private:
    TimeGrid grid_;
    std::vector<Channel> channels_;
    std::optional<std::size_t> divergence_index_;
};

/// `base` for one-dimensional quantities, `base_i` otherwise.
std::string channel_name(std::string_view base, int i, int dim);
/// `base` for 1×1, `base_i_j` otherwise (row-major flattening).
std::string channel_name(std::string_view base, int i, int j, int rows, int cols);

using State = Eigen::VectorXd;
using VectorField = std::function<State(double, const State&)>;

inline double euler_step(double state, double derivative, double dt) {
    return state + dt * derivative;
}

State euler_step(const State& state, const State& derivative, double dt);

struct IntegrateOptions {
    double magnitude_bound = 1e12;
    std::string channel = "y";
};

/// Fixed-step explicit Euler. Halts and flags divergence as soon as any
/// component is non-finite or exceeds the magnitude bound.
Trajectory integrate(const VectorField& rhs, const State& init, const TimeGrid& grid,
                     const IntegrateOptions& options = {});

} // namespace lqt
