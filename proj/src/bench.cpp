#include "lqt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "lqt/error.hpp"

namespace lqt {

namespace {

constexpr std::size_t kScheduleMinSteps = 40000;
constexpr double kScheduleStep = 0.0025;

std::string format_cost(const CellRecord* rec) {
    if (rec == nullptr)
        return "";
    return rec->diverged ? "*" : fmt::format("{:.4f}", rec->average_cost);
}

std::string format_pe(const CellRecord* rec) {
    if (rec == nullptr || !rec->pe_pct)
        return rec != nullptr && rec->diverged ? "*" : "";
    return fmt::format("{:.2f}", *rec->pe_pct);
}

std::string md_row(const std::vector<std::string>& cells) {
    std::string line = "|";
    for (const auto& c : cells)
        line += fmt::format(" {} |", c);
    return line + "\n";
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

nlohmann::json nullable(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::vector<SolverId> solvers_from_config(const KeyValueConfig& config) {
    const auto names = config.get_strings("solvers").value_or(std::vector<std::string>{"optimal", "forward"});
    std::vector<SolverId> out;
    for (const auto& name : names) {
        if (name == "optimal") {
            out.push_back(SolverId::optimal());
        } else if (name == "forward") {
            out.push_back(SolverId::forward());
        } else if (name == "mpc") {
            const auto ws = config.get_doubles("w");
            if (!ws || ws->empty())
                throw ValidationError("solver 'mpc' needs a window list 'w'");
            for (double w : *ws) {
                if (w < 2 || w != std::floor(w))
                    throw ValidationError(fmt::format("MPC window must be an integer >= 2, got {}", w));
                out.push_back(SolverId::mpc(static_cast<int>(w)));
            }
        } else {
            throw ValidationError(fmt::format("unknown solver '{}'", name));
        }
    }
    return out;
}

} // namespace

TimeGrid GridPolicy::grid_for(double horizon) const {
    const double scale = std::ldexp(1.0, halvings);
    if (kind == Kind::Fixed)
        return TimeGrid::uniform(0.0, horizon, dt / scale);
    const auto base = std::max<std::size_t>(kScheduleMinSteps, std::llround(horizon / kScheduleStep));
    return TimeGrid::with_steps(0.0, horizon, base << halvings);
}

GridPolicy GridPolicy::refined() const {
    GridPolicy out = *this;
    ++out.halvings;
    return out;
}

std::string GridPolicy::describe() const {
    const double scale = std::ldexp(1.0, halvings);
    if (kind == Kind::Fixed)
        return fmt::format("fixed dt = {:g}", dt / scale);
    if (halvings == 0)
        return "schedule n = max(40000, T/0.0025)";
    return fmt::format("schedule n = {} * max(40000, T/0.0025)", 1 << halvings);
}

void ExperimentGrid::validate() const {
    if (horizons.empty() || r_values.empty() || signals.empty())
        throw ValidationError("experiment grid needs at least one horizon, R value and signal");
    if (solvers.empty())
        throw ValidationError("experiment grid needs at least one solver");
    for (double t : horizons)
        if (!(t > 0.0))
            throw ValidationError(fmt::format("horizon must be positive, got {}", t));
    for (double r : r_values)
        if (!(r > 0.0))
            throw InvalidWeightError(fmt::format("R must be positive, got {}", r));
    for (const auto& s : solvers)
        if (s.kind == SolverKind::Mpc && s.window < 2)
            throw ValidationError(fmt::format("MPC window must be at least 2, got {}", s.window));
    if (policy.kind == GridPolicy::Kind::Fixed && !(policy.dt > 0.0))
        throw ValidationError("grid step must be positive");
}

ScalarLqtProblem ExperimentGrid::problem(double horizon, double r, SignalKind signal) const {
    ScalarLqtProblem p;
    p.a = a;
    p.b = b;
    p.q = q;
    p.r = r;
    p.horizon = horizon;
    p.x0 = x0;
    p.signal = ReferenceSignal::from_kind(signal, f);
    p.validate();
    return p;
}

ExperimentGrid experiment_from_config(const KeyValueConfig& config) {
    ExperimentGrid g;
    g.a = config.get_double_or("A", g.a);
    g.b = config.get_double_or("B", g.b);
    g.q = config.get_double_or("Q", g.q);
    g.x0 = config.get_double_or("x0", g.x0);
    g.f = config.get_double_or("f", g.f);
    g.threshold = config.get_double_or("threshold", g.threshold);
    if (auto t = config.get_doubles("T"))
        g.horizons = *t;
    if (auto r = config.get_doubles("R"))
        g.r_values = *r;
    if (auto sigs = config.get_strings("signal")) {
        g.signals.clear();
        for (const auto& name : *sigs) {
            const auto kind = parse_signal_kind(name);
            if (!kind || *kind == SignalKind::Constant || *kind == SignalKind::Custom)
                throw ValidationError(fmt::format("grid signal must be z1, z2 or z3, got '{}'", name));
            g.signals.push_back(*kind);
        }
    }
    g.solvers = solvers_from_config(config);
    if (config.get_string("grid") == "schedule") {
        if (config.has("dt"))
            throw ValidationError("give either 'dt' or 'grid = schedule', not both");
        g.policy = GridPolicy::step_schedule();
    } else if (auto grid = config.get_string("grid"); grid && *grid != "fixed") {
        throw ValidationError(fmt::format("unknown grid policy '{}'", *grid));
    } else {
        g.policy = GridPolicy::fixed(config.get_double_or("dt", 0.01));
    }
    g.validate();
    return g;
}

nlohmann::json to_json(const CellRecord& record) {
    nlohmann::json j;
    j["solver"] = record.solver.kind == SolverKind::Mpc ? "mpc" : to_string(record.solver);
    j["T"] = record.horizon;
    j["R"] = record.r;
    j["signal"] = to_string(record.signal);
    if (record.solver.kind == SolverKind::Mpc)
        j["w"] = record.solver.window;
    j["avg_cost"] = nullable(record.average_cost);
    j["pe_pct"] = record.pe_pct ? nlohmann::json(*record.pe_pct) : nlohmann::json(nullptr);
    j["wall_ms"] = record.wall_ms;
    j["diverged"] = record.diverged;
    j["dt"] = record.dt;
    j["n_steps"] = record.n_steps;
    return j;
}

CellRecord make_record(const ScalarLqtProblem& problem, const TimeGrid& grid, const SolveResult& result,
                       std::optional<double> pe_pct) {
    CellRecord rec;
    rec.horizon = problem.horizon;
    rec.r = problem.r;
    rec.signal = problem.signal.kind();
    rec.solver = result.solver;
    rec.dt = grid.dt();
    rec.n_steps = grid.n_steps();
    rec.average_cost = result.average_cost;
    rec.total_cost = result.total_cost;
    rec.pe_pct = pe_pct;
    rec.wall_ms = result.wall_seconds * 1e3;
    rec.diverged = result.diverged;
    return rec;
}

const CellRecord* ComparisonReport::find(double horizon, double r, SignalKind signal,
                                         const SolverId& solver) const {
    for (const auto& rec : records)
        if (rec.horizon == horizon && rec.r == r && rec.signal == signal && rec.solver == solver)
            return &rec;
    return nullptr;
}

std::string ComparisonReport::markdown() const {
    std::vector<SolverId> pe_solvers;
    for (const auto& s : grid.solvers)
        if (s.kind != SolverKind::Optimal)
            pe_solvers.push_back(s);

    std::vector<std::string> groups{"", ""}, header{"T", "R"};
    for (const auto& s : grid.solvers)
        for (std::size_t i = 0; i < grid.signals.size(); ++i) {
            groups.push_back(i == 0 ? to_string(s) : "");
            header.push_back(to_string(grid.signals[i]));
        }
    for (const auto& s : pe_solvers)
        for (std::size_t i = 0; i < grid.signals.size(); ++i) {
            groups.push_back(i == 0 ? fmt::format("PE% {}", to_string(s)) : "");
            header.push_back(to_string(grid.signals[i]));
        }

    std::string out = md_row(groups);
    out += md_row(std::vector<std::string>(groups.size(), "---"));
    out += md_row(header);
    for (double t : grid.horizons)
        for (double r : grid.r_values) {
            std::vector<std::string> row{fmt::format("{:g}", t), fmt::format("{:g}", r)};
            for (const auto& s : grid.solvers)
                for (auto sig : grid.signals)
                    row.push_back(format_cost(find(t, r, sig, s)));
            for (const auto& s : pe_solvers)
                for (auto sig : grid.signals)
                    row.push_back(format_pe(find(t, r, sig, s)));
            out += md_row(row);
        }
    return out;
}

std::string ComparisonReport::jsonl() const {
    std::string out;
    for (const auto& rec : records)
        out += to_json(rec).dump() + "\n";
    return out;
}

void ComparisonReport::write_jsonl(const std::filesystem::path& path) const {
    std::ofstream file(path);
    if (!file)
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    file << jsonl();
}

SolveResult run_solver(const ScalarLqtProblem& problem, const TimeGrid& grid, const SolverId& solver,
                       const SolveOptions& options) {
    switch (solver.kind) {
    case SolverKind::Optimal:
        return solve_optimal(problem, grid, options);
    case SolverKind::ForwardSift:
        return solve_forward_sift(problem, grid, options);
    case SolverKind::Mpc:
        return solve_mpc(problem, grid, MpcConfig{static_cast<std::size_t>(solver.window)}, options);
    }
    throw ValidationError("unknown solver kind");
}

ComparisonReport run_grid(const ExperimentGrid& grid) {
    grid.validate();
    ComparisonReport report{grid, {}};
    SolveOptions options;
    options.keep_trajectory = false;
    options.divergence_threshold = grid.threshold;

    for (double t : grid.horizons) {
        const TimeGrid tg = grid.policy.grid_for(t);
        for (double r : grid.r_values)
            for (auto sig : grid.signals) {
                const auto problem = grid.problem(t, r, sig);
                const SolveResult optimal = solve_optimal(problem, tg, options);
                for (const auto& s : grid.solvers) {
                    if (s.kind == SolverKind::Optimal) {
                        report.records.push_back(make_record(problem, tg, optimal, std::nullopt));
                        continue;
                    }
                    const SolveResult res = run_solver(problem, tg, s, options);
                    report.records.push_back(
                        make_record(problem, tg, res, percentage_error(res.cost(), optimal.cost())));
                }
            }
    }
    return report;
}

TimingReport run_timing(const ScalarLqtProblem& problem, const TimeGrid& grid,
                        const std::vector<std::size_t>& windows, int repeats) {
    if (repeats < 1)
        throw ValidationError("timing needs at least one repeat");
    SolveOptions options;
    options.keep_trajectory = false;

    auto timed = [&](const SolverId& id) {
        std::vector<double> walls;
        std::optional<SolveResult> last;
        for (int i = 0; i < repeats; ++i) {
            last = run_solver(problem, grid, id, options);
            walls.push_back(last->wall_seconds);
        }
        TimingRow row;
        row.solver = id;
        row.average_cost = last->average_cost;
        row.diverged = last->diverged;
        row.wall_seconds = median(walls);
        if (id.kind == SolverKind::Mpc)
            row.window_seconds = id.window * grid.dt();
        return std::pair{row, last->cost()};
    };

    TimingReport report{problem, grid, {}, {}, {}};
    auto [opt_row, opt_cost] = timed(SolverId::optimal());
    report.optimal = opt_row;
    auto [fwd_row, fwd_cost] = timed(SolverId::forward());
    fwd_row.pe_pct = percentage_error(fwd_cost, opt_cost);
    report.forward = fwd_row;
    for (std::size_t w : windows) {
        auto [row, cost] = timed(SolverId::mpc(static_cast<int>(w)));
        row.pe_pct = percentage_error(cost, opt_cost);
        report.mpc.push_back(row);
    }
    return report;
}

std::string TimingReport::markdown() const {
    std::string out = fmt::format("T = {:g}, R = {:g}, signal = {}, dt = {:g}, n = {}\n\n", problem.horizon,
                                  problem.r, problem.signal.name(), grid.dt(), grid.n_steps());
    out += md_row({"solver", "w", "window (s)", "avg cost", "PE%", "time (s)"});
    out += md_row({"---", "---", "---", "---", "---", "---"});
    auto row = [&](const TimingRow& r) {
        const bool mpc = r.solver.kind == SolverKind::Mpc;
        out += md_row({to_string(r.solver), mpc ? std::to_string(r.solver.window) : "",
                       mpc ? fmt::format("{:g}", r.window_seconds) : "",
                       r.diverged ? "*" : fmt::format("{:.4f}", r.average_cost),
                       r.pe_pct ? fmt::format("{:.2f}", *r.pe_pct) : "", fmt::format("{:.4f}", r.wall_seconds)});
    };
    row(optimal);
    for (const auto& m : mpc)
        row(m);
    row(forward);
    return out;
}

std::string TimingReport::jsonl() const {
    std::string out;
    auto emit = [&](const TimingRow& r) {
        SolveResult res{Trajectory(grid), 0.0, r.average_cost, r.wall_seconds, r.diverged, r.solver};
        out += to_json(make_record(problem, grid, res, r.pe_pct)).dump() + "\n";
    };
    emit(optimal);
    emit(forward);
    for (const auto& m : mpc)
        emit(m);
    return out;
}

double StabilityReport::flipped_last_change() const {
    const auto& th = flipped.theta;
    return th.size() < 2 ? 0.0 : std::abs(th[th.size() - 1] - th[th.size() - 2]);
}

std::string StabilityReport::text() const {
    std::ostringstream out;
    out << fmt::format("Scalar Riccati, A={:g} B={:g} Q={:g} R={:g}, tau in [0, {:g}], dt={:g}\n", a, b, q, r,
                       horizon, dt);
    out << fmt::format("algebraic roots: {:g}, {:g}\n", roots.first, roots.second.value_or(NAN));
    auto describe = [&](const char* label, const ScalarRiccatiSolution& s) {
        if (s.diverged())
            out << fmt::format("{}: diverged at t = {:g}\n", label, s.grid.time(*s.divergence_index));
        else
            out << fmt::format("{}: bounded, final value {:.12g}\n", label, s.theta.back());
    };
    describe("unflipped from theta(0)=0", unflipped);
    describe("flipped from theta(0)=0", flipped);
    out << fmt::format("flipped last step change: {:.3e}\n", flipped_last_change());
    out << fmt::format("lambda1 R / B^2 = {:g}\n", closed_form_limit);
    const double start = unflipped_perturbed.theta.front();
    describe(fmt::format("unflipped from theta(0)={:g}", start).c_str(), unflipped_perturbed);
    if (!unflipped.diverged())
        out << fmt::format("note: theta' = theta S theta - 2 A theta - Q from 0 settles on the smaller root {:g}; "
                           "it only blows up when started above the larger root {:g}\n",
                           roots.first, roots.second.value_or(NAN));
    out << fmt::format("known discrepancy: the example is often stated as the flipped solution returning {:g}; "
                       "it converges to lambda1 R / B^2 = {:g}\n",
                       roots.first, closed_form_limit);
    return out.str();
}

StabilityReport run_stability_demo(double horizon, double dt) {
    ScalarLqtProblem p;
    p.a = 1.0;
    p.b = 1.0;
    p.q = 3.0;
    p.r = 1.0;
    p.horizon = horizon;
    const TimeGrid grid = TimeGrid::uniform(0.0, horizon, dt);
    const AlgebraicRoots roots = algebraic_roots(p.a, p.b, p.q, p.r);
    return StabilityReport{p.a,
                           p.b,
                           p.q,
                           p.r,
                           horizon,
                           dt,
                           solve_forward_unflipped(p, grid, 0.0),
                           solve_forward_flipped(p, grid, 0.0),
                           solve_forward_unflipped(p, grid, roots.second.value_or(0.0) + 0.01),
                           roots,
                           ScalarRiccatiClosedForm::make(p.a, p.b, p.q, p.r).limit()};
}

} // namespace lqt
