#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "lqt/solvers.hpp"

namespace lqt::detail {

inline bool bounded(double v, double bound) {
    return std::isfinite(v) && std::abs(v) <= bound;
}

template <typename Derived>
bool bounded(const Eigen::MatrixBase<Derived>& m, double bound) {
    return m.allFinite() && (m.size() == 0 || m.cwiseAbs().maxCoeff() <= bound);
}

/// Channel writer that becomes a no-op when trajectories are not kept.
class Recorder {
  public:
    Recorder(const TimeGrid& grid, const std::vector<std::string>& names, bool keep);

    void set(std::size_t column, std::size_t k, double v) {
        if (keep_)
            (*columns_[column])[k] = v;
    }

    Trajectory trajectory;

  private:
    bool keep_;
    std::vector<std::vector<double>*> columns_;
};

void require_horizon_grid(const TimeGrid& grid, double horizon);

SolveResult finish(Recorder& rec, const CostAccumulator& acc, const SolveOptions& options, SolverId id,
                   std::chrono::steady_clock::time_point start);

} // namespace lqt::detail
