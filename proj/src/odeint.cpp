#include "lqt/odeint.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "lqt/error.hpp"

namespace lqt {

TimeGrid TimeGrid::uniform(double t_start, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError(fmt::format("time step must be positive, got {}", dt));
    if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end))
        throw ValidationError(fmt::format("empty time interval [{}, {}]", t_start, t_end));
    const double ratio = (t_end - t_start) / dt;
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    if (n < 1)
        throw ValidationError("time step is larger than the interval");
    const double end = t_start + static_cast<double>(n) * dt;
    if (std::abs(end - t_end) > 1e-9 * std::max(std::abs(t_end), std::abs(t_end - t_start)))
        throw ValidationError(
            fmt::format("dt={} does not divide [{}, {}] into whole steps", dt, t_start, t_end));
    return {t_start, t_end, dt, n};
}

TimeGrid TimeGrid::with_steps(double t_start, double t_end, std::size_t n_steps) {
    if (n_steps < 1)
        throw ValidationError("grid needs at least one step");
    if (!(t_end > t_start))
        throw ValidationError(fmt::format("empty time interval [{}, {}]", t_start, t_end));
    return {t_start, t_end, (t_end - t_start) / static_cast<double>(n_steps), n_steps};
}

std::vector<double>& Trajectory::add_channel(std::string name) {
    if (has_channel(name))
        throw ValidationError(fmt::format("duplicate channel '{}'", name));
    channels_.push_back({std::move(name), std::vector<double>(grid_.size(), 0.0)});
    return channels_.back().values;
}

bool Trajectory::has_channel(std::string_view name) const {
    for (const auto& c : channels_)
        if (c.name == name)
            return true;
    return false;
}

const std::vector<double>& Trajectory::channel(std::string_view name) const {
    for (const auto& c : channels_)
        if (c.name == name)
            return c.values;
    throw ValidationError(fmt::format("trajectory has no channel '{}'", name));
}

std::vector<double>& Trajectory::channel(std::string_view name) {
    return const_cast<std::vector<double>&>(std::as_const(*this).channel(name));
}

void Trajectory::mark_diverged(std::size_t k) {
    divergence_index_ = k;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto& c : channels_)
        for (std::size_t i = k; i < c.values.size(); ++i)
            c.values[i] = nan;
}

void Trajectory::write_csv(std::ostream& out) const {
    std::string line = "t";
    for (const auto& c : channels_) {
        line += ',';
        line += c.name;
    }
    out << line << '\n';
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        line = fmt::format("{:.17g}", grid_.time(k));
        for (const auto& c : channels_)
            line += fmt::format(",{:.17g}", c.values[k]);
        out << line << '\n';
    }
}

void Trajectory::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    write_csv(out);
}

std::string channel_name(std::string_view base, int i, int dim) {
    if (dim == 1)
        return std::string(base);
    return fmt::format("{}_{}", base, i);
}

std::string channel_name(std::string_view base, int i, int j, int rows, int cols) {
    if (rows == 1 && cols == 1)
        return std::string(base);
    return fmt::format("{}_{}_{}", base, i, j);
}

State euler_step(const State& state, const State& derivative, double dt) {
    if (state.size() != derivative.size())
        throw DimensionError("state and derivative sizes differ");
    return state + dt * derivative;
}

Trajectory integrate(const VectorField& rhs, const State& init, const TimeGrid& grid,
                     const IntegrateOptions& options) {
    const int dim = static_cast<int>(init.size());
    Trajectory traj(grid);
    std::vector<std::vector<double>*> columns;
    for (int i = 0; i < dim; ++i)
        columns.push_back(&traj.add_channel(channel_name(options.channel, i, dim)));

    auto out_of_bounds = [&](const State& y) {
        return !y.allFinite() || y.cwiseAbs().maxCoeff() > options.magnitude_bound;
    };

    State y = init;
    for (std::size_t k = 0;; ++k) {
        if (out_of_bounds(y)) {
            traj.mark_diverged(k);
            return traj;
        }
        for (int i = 0; i < dim; ++i)
            (*columns[i])[k] = y(i);
        if (k == grid.n_steps())
            break;
        State dy = rhs(grid.time(k), y);
        if (dy.size() != y.size())
            throw DimensionError("vector field returned the wrong dimension");
        y = euler_step(y, dy, grid.dt());
    }
    return traj;
}

} // namespace lqt
