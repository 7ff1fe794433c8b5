#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lqt/config.hpp"
#include "lqt/riccati.hpp"
#include "lqt/solvers.hpp"

namespace lqt {

/// How a horizon is discretised.
///
/// `step_schedule` uses n = max(40000, round(T / 0.0025)) steps, i.e.
/// dt = 6.25e-4 for T = 25 and dt = 2.5e-3 for T ≥ 100.
struct GridPolicy {
    enum class Kind { Fixed, StepSchedule };

    Kind kind = Kind::Fixed;
    double dt = 0.01;
    int halvings = 0;

    static GridPolicy fixed(double dt) { return {Kind::Fixed, dt, 0}; }
    static GridPolicy step_schedule() { return {Kind::StepSchedule, 0.0, 0}; }

    TimeGrid grid_for(double horizon) const;
    /// Same policy with every step halved.
    GridPolicy refined() const;
    std::string describe() const;
};

struct ExperimentGrid {
    std::vector<double> horizons{25.0, 250.0, 2000.0};
    std::vector<double> r_values{8e-4, 0.01, 1.0};
    std::vector<SignalKind> signals{SignalKind::Z1, SignalKind::Z2, SignalKind::Z3};
    double f = 0.02;
    double a = 1.0;
    double b = 1.0;
    double q = 1.0;
    double x0 = 2.0;
    std::vector<SolverId> solvers{SolverId::optimal(), SolverId::forward()};
    GridPolicy policy = GridPolicy::fixed(0.01);
    double threshold = kDefaultDivergenceThreshold;

    void validate() const;
    ScalarLqtProblem problem(double horizon, double r, SignalKind signal) const;
};

/// Grid from config keys A, B, Q, x0, f, dt (or `grid = schedule`), T, R and
/// signal (comma lists), solvers (optimal, forward, mpc) and w (MPC windows).
ExperimentGrid experiment_from_config(const KeyValueConfig& config);

struct CellRecord {
    double horizon = 0.0;
    double r = 0.0;
    SignalKind signal = SignalKind::Z1;
    SolverId solver;
    double dt = 0.0;
    std::size_t n_steps = 0;
    double average_cost = 0.0; // +inf when diverged
    double total_cost = 0.0;
    std::optional<double> pe_pct;
    double wall_ms = 0.0;
    bool diverged = false;
};

/// {solver, T, R, signal, w?, avg_cost, pe_pct, wall_ms, diverged, dt, n_steps};
/// divergent costs and missing PE are null.
nlohmann::json to_json(const CellRecord& record);

CellRecord make_record(const ScalarLqtProblem& problem, const TimeGrid& grid, const SolveResult& result,
                       std::optional<double> pe_pct);

struct ComparisonReport {
    ExperimentGrid grid;
    std::vector<CellRecord> records;

    const CellRecord* find(double horizon, double r, SignalKind signal, const SolverId& solver) const;
    /// One row per (T, R); a cost column group per solver then a PE group per
    /// non-optimal solver, one column per signal. Divergent cells show "*".
    std::string markdown() const;
    std::string jsonl() const;
    void write_jsonl(const std::filesystem::path& path) const;
};

/// Runs every (T, R, signal, solver) cell sequentially. PE is measured against
/// the optimal solver on the same grid, which is run even when not requested.
ComparisonReport run_grid(const ExperimentGrid& grid);

SolveResult run_solver(const ScalarLqtProblem& problem, const TimeGrid& grid, const SolverId& solver,
                       const SolveOptions& options = {});

struct TimingRow {
    SolverId solver;
    double average_cost = 0.0;
    std::optional<double> pe_pct;
    double wall_seconds = 0.0; // median over repeats
    bool diverged = false;
    double window_seconds = 0.0; // MPC: w·dt
};

struct TimingReport {
    ScalarLqtProblem problem;
    TimeGrid grid;
    TimingRow optimal;
    TimingRow forward;
    std::vector<TimingRow> mpc;

    std::string markdown() const;
    std::string jsonl() const;
};

/// Optimal and forward once each, MPC once per window, every solve repeated
/// `repeats` times sequentially and timed by the median.
TimingReport run_timing(const ScalarLqtProblem& problem, const TimeGrid& grid,
                        const std::vector<std::size_t>& windows, int repeats = 3);

struct StabilityReport {
    double a = 1.0, b = 1.0, q = 3.0, r = 1.0;
    double horizon = 20.0;
    double dt = 1e-3;
    ScalarRiccatiSolution unflipped;
    ScalarRiccatiSolution flipped;
    /// Unflipped run started just above the larger root.
    ScalarRiccatiSolution unflipped_perturbed;
    AlgebraicRoots roots;
    double closed_form_limit = 0.0;

    double flipped_final() const { return flipped.theta.back(); }
    double flipped_last_change() const;
    std::string text() const;
};

StabilityReport run_stability_demo(double horizon = 20.0, double dt = 1e-3);

} // namespace lqt
