// Acceptance suite. Prints detail lines and one PASS/FAIL line per criterion;
// exits non-zero if any selected criterion fails.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lqt/bench.hpp"
#include "lqt/riccati.hpp"
#include "lqt/solvers.hpp"

using namespace lqt;

namespace {

// ---- tolerances ------------------------------------------------------------
constexpr double kTable1CostRel = 0.10;
constexpr double kGridStabilityRel = 0.01;
constexpr double kPeAbs = 3.0;
constexpr double kPeAbsLarge = 15.0;
constexpr double kClosedFormAbs = 1e-6;
constexpr double kClosedFormDt = 1e-4;
constexpr double kAsymptoteAbs = 1e-6;
constexpr double kStabilityHorizon = 20.0;
constexpr double kStabilityDt = 1e-3;
constexpr double kSettledStep = 1e-10;
constexpr double kTable3CostRel = 0.25;
constexpr double kTable4CostRel = 0.10;
constexpr double kTable4PeAbs = 2.0;
constexpr double kSpeedupMin = 10.0;
constexpr double kOrderingSlackRel = 1e-3;
constexpr double kPeFloor = -0.1;
constexpr double kOrderLow = 1.7, kOrderHigh = 2.3;
constexpr double kSymmetryRel = 1e-10;
constexpr double kEigenFloor = -1e-8;
constexpr double kLiftAbs = 1e-12;
constexpr double kFullWindowRel = 0.01;

const std::array<double, 3> kHorizons{25, 250, 2000};
const std::array<double, 3> kWeights{8e-4, 0.01, 1};
const std::array<SignalKind, 3> kSignals{SignalKind::Z1, SignalKind::Z2, SignalKind::Z3};

// Reference averages indexed [T][R][signal].
constexpr double kOptimal[3][3][3] = {
    {{0.0306, 0.0433, 0.0065}, {0.1296, 0.1684, 0.0316}, {2.2223, 2.0674, 0.7386}},
    {{0.0104, 0.0054, 0.0009}, {0.1027, 0.0278, 0.0063}, {4.7220, 0.7464, 0.2280}},
    {{0.0079, 0.0016, 0.00029}, {0.0945, 0.0150, 0.0030}, {4.7030, 0.6677, 0.1402}},
};
constexpr double kForward[3][3][3] = {
    {{0.0404, 0.0576, 0.0087}, {0.1658, 0.2207, 0.0398}, {2.8346, 2.8804, 1.5665}},
    {{0.0116, 0.0069, 0.0012}, {0.1082, 0.0339, 0.0071}, {4.8580, 0.8462, 0.3062}},
    {{0.0082, 0.0019, 0.00032}, {0.0969, 0.0166, 0.0031}, {4.7620, 0.7016, 0.1500}},
};
constexpr double kPe[3][3][3] = {
    {{32.02, 33.03, 33.85}, {27.93, 31.06, 25.95}, {27.55, 39.32, 112.09}},
    {{11.53, 27.78, 33.33}, {5.36, 21.94, 12.69}, {2.88, 13.37, 34.29}},
    {{3.80, 18.75, 10.34}, {2.54, 10.67, 3.33}, {1.26, 5.08, 6.99}},
};
// MPC with w = 2, R = 8e-4, for T = 250 and T = 2000.
constexpr double kMpcW2[2][3] = {{2.084, 0.319, 0.103}, {2.085, 0.296, 0.062}};

constexpr double kTable4MpcCost = 0.1080;
constexpr double kTable4MpcPe = 5.16;

const GridPolicy kTable1Grid = GridPolicy::fixed(5e-4);

class Check {
  public:
    void expect(bool ok, const std::string& what) {
        fmt::print("  [{}] {}\n", ok ? "ok" : "FAIL", what);
        ok_ = ok_ && ok;
    }
    void note(const std::string& what) { fmt::print("  note: {}\n", what); }
    bool ok() const { return ok_; }

  private:
    bool ok_ = true;
};

bool within_rel(double got, double want, double rel) {
    return std::isfinite(got) && std::abs(got - want) <= rel * std::abs(want);
}

ExperimentGrid table1_grid(GridPolicy policy) {
    ExperimentGrid g;
    g.policy = policy;
    return g;
}

ComparisonReport& table1_report() {
    static ComparisonReport report = run_grid(table1_grid(kTable1Grid));
    return report;
}

ScalarLqtProblem scalar(double a, double b, double q, double r, double horizon) {
    ScalarLqtProblem p;
    p.a = a;
    p.b = b;
    p.q = q;
    p.r = r;
    p.horizon = horizon;
    return p;
}

bool criterion1(Check& c) {
    const auto& base = table1_report();
    const auto fine = run_grid(table1_grid(kTable1Grid.refined()));
    c.note(fmt::format("grid {} and {}", kTable1Grid.describe(), kTable1Grid.refined().describe()));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                const double T = kHorizons[i], R = kWeights[j];
                const auto sig = kSignals[k];
                for (auto [id, table] : {std::pair{SolverId::optimal(), &kOptimal},
                                         std::pair{SolverId::forward(), &kForward}}) {
                    const double want = (*table)[i][j][k];
                    const double got = base.find(T, R, sig, id)->average_cost;
                    const double got_fine = fine.find(T, R, sig, id)->average_cost;
                    c.expect(within_rel(got, want, kTable1CostRel),
                             fmt::format("T={:g} R={:g} {} {}: {:.5f} vs {:.5f} ({:+.1f}%)", T, R, to_string(sig),
                                         to_string(id), got, want, 100 * (got - want) / want));
                    c.expect(within_rel(got_fine, got, kGridStabilityRel),
                             fmt::format("  halving dt moves it by {:.3f}%", 100 * (got_fine - got) / got));
                }
            }
    return c.ok();
}

bool criterion2(Check& c) {
    const auto& base = table1_report();
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k) {
            std::array<double, 3> pe{};
            for (std::size_t i = 0; i < 3; ++i) {
                const double T = kHorizons[i], R = kWeights[j];
                const auto* rec = base.find(T, R, kSignals[k], SolverId::forward());
                pe[i] = rec->pe_pct.value_or(NAN);
                const double tol = (T == 25 && R == 1) ? kPeAbsLarge : kPeAbs;
                c.expect(std::abs(pe[i] - kPe[i][j][k]) <= tol,
                         fmt::format("T={:g} R={:g} {}: PE {:.2f} vs {:.2f} (tol {:g})", T, R,
                                     to_string(kSignals[k]), pe[i], kPe[i][j][k], tol));
            }
            c.expect(pe[0] > pe[1] && pe[1] > pe[2],
                     fmt::format("R={:g} {}: PE falls with T ({:.2f} > {:.2f} > {:.2f})", kWeights[j],
                                 to_string(kSignals[k]), pe[0], pe[1], pe[2]));
        }
    return c.ok();
}

bool criterion3(Check& c) {
    const std::array<std::array<double, 4>, 5> cases{{
        {1, 1, 3, 1}, {0, 1, 1, 1}, {-1, 1, 2, 0.5}, {0.5, 2, 1, 1}, {2, 1, 1, 4}}};
    const auto grid = TimeGrid::uniform(0, 10, kClosedFormDt);
    for (const auto& [a, b, q, r] : cases) {
        const auto cf = ScalarRiccatiClosedForm::make(a, b, q, r);
        const auto sol = solve_forward_flipped(scalar(a, b, q, r, 10), grid);
        double err = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            err = std::max(err, std::abs(sol.theta[k] - cf.theta(grid.time(k))));
        c.expect(err <= kClosedFormAbs, fmt::format("A={:g} B={:g} Q={:g} R={:g}: max |closed form - Euler| on "
                                                    "[0, 10] at dt={:g} is {:.3e}",
                                                    a, b, q, r, kClosedFormDt, err));

        // Asymptote of the closed form and of the long numeric run.
        const auto long_grid = TimeGrid::uniform(0, 200, 1e-3);
        const double tail = solve_forward_flipped(scalar(a, b, q, r, 200), long_grid).theta.back();
        c.expect(std::abs(cf.theta(200) - cf.limit()) <= kAsymptoteAbs &&
                     std::abs(tail - cf.limit()) <= kAsymptoteAbs,
                 fmt::format("  limit lambda1 R/B^2 = {:.10g}; closed form at 200: {:.10g}; Euler at 200: {:.10g}",
                             cf.limit(), cf.theta(200), tail));
    }
    const auto ex = ScalarRiccatiClosedForm::make(1, 1, 3, 1);
    c.expect(ex.limit() == 3.0, fmt::format("A=1 Q=3 B=R=1: lambda1 = {:g}, limit = {:g}", ex.lambda1, ex.limit()));
    c.note("known discrepancy: the example is often stated as the flipped forward solution returning theta = -1; "
           "the closed-form limit and the numerics both give 3");
    return c.ok();
}

bool criterion4(Check& c) {
    const auto r = run_stability_demo(kStabilityHorizon, kStabilityDt);
    const bool unflipped_diverged =
        r.unflipped.diverged() && r.unflipped.grid.time(*r.unflipped.divergence_index) < kStabilityHorizon;
    c.expect(unflipped_diverged,
             r.unflipped.diverged()
                 ? fmt::format("unflipped run diverges at t = {:g}", r.unflipped.grid.time(*r.unflipped.divergence_index))
                 : fmt::format("unflipped run from 0 stays bounded and ends at {:.12g} (smaller root {:g})",
                               r.unflipped.theta.back(), r.roots.first));
    c.expect(!r.flipped.diverged() && r.flipped_last_change() < kSettledStep,
             fmt::format("flipped run ends at {:.12g}, last step change {:.3e}", r.flipped_final(),
                         r.flipped_last_change()));
    if (r.unflipped_perturbed.diverged())
        c.note(fmt::format("unflipped run started at {:g} diverges at t = {:g}", r.unflipped_perturbed.theta.front(),
                           r.unflipped_perturbed.grid.time(*r.unflipped_perturbed.divergence_index)));
    return c.ok();
}

bool criterion5(Check& c) {
    ExperimentGrid g;
    g.solvers = {SolverId::mpc(2)};
    g.policy = GridPolicy::step_schedule();
    const auto report = run_grid(g);
    c.note(g.policy.describe());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k) {
                const double T = kHorizons[i], R = kWeights[j];
                const auto* rec = report.find(T, R, kSignals[k], SolverId::mpc(2));
                const std::string cell = fmt::format("T={:g} R={:g} {}", T, R, to_string(kSignals[k]));
                if (T == 25 || R != 8e-4) {
                    c.expect(rec->diverged, fmt::format("{}: {}", cell, rec->diverged ? "diverged" : "finite"));
                } else {
                    const double want = kMpcW2[i - 1][k];
                    c.expect(!rec->diverged && within_rel(rec->average_cost, want, kTable3CostRel),
                             fmt::format("{}: {:.4f} vs {:.3f}", cell, rec->average_cost, want));
                }
            }
    return c.ok();
}

bool criterion6(Check& c) {
    ExperimentGrid g;
    const auto grid = GridPolicy::step_schedule().grid_for(250);
    c.note(fmt::format("dt = {:g}, n = {}", grid.dt(), grid.n_steps()));
    const auto mid = run_timing(g.problem(250, 0.01, SignalKind::Z1), grid, {85});
    const auto& m = mid.mpc.front();
    c.expect(within_rel(m.average_cost, kTable4MpcCost, kTable4CostRel),
             fmt::format("R=0.01 w=85: MPC cost {:.4f} vs {:.4f}", m.average_cost, kTable4MpcCost));
    c.expect(m.pe_pct && std::abs(*m.pe_pct - kTable4MpcPe) <= kTable4PeAbs,
             fmt::format("R=0.01 w=85: MPC PE {:.2f} vs {:.2f}", m.pe_pct.value_or(NAN), kTable4MpcPe));
    const double s1 = m.wall_seconds / mid.forward.wall_seconds;
    c.expect(s1 >= kSpeedupMin, fmt::format("R=0.01 w=85: MPC {:.4f} s, forward {:.4f} s, ratio {:.1f}",
                                            m.wall_seconds, mid.forward.wall_seconds, s1));
    const auto big = run_timing(g.problem(250, 1, SignalKind::Z1), grid, {975});
    const auto& b = big.mpc.front();
    const double s2 = b.wall_seconds / big.forward.wall_seconds;
    c.expect(s2 >= kSpeedupMin, fmt::format("R=1 w=975: MPC {:.4f} s, forward {:.4f} s, ratio {:.1f}",
                                            b.wall_seconds, big.forward.wall_seconds, s2));
    return c.ok();
}

bool criterion7(Check& c) {
    // (a), (b): ordering and PE floor over the forward grid and the w = 2 MPC grid.
    const auto& base = table1_report();
    bool order_ok = true, pe_ok = true;
    double min_pe = INFINITY;
    for (const auto& rec : base.records) {
        if (rec.solver.kind != SolverKind::ForwardSift || !rec.pe_pct)
            continue;
        order_ok = order_ok && *rec.pe_pct >= -100 * kOrderingSlackRel;
        pe_ok = pe_ok && *rec.pe_pct >= kPeFloor;
        min_pe = std::min(min_pe, *rec.pe_pct);
    }
    ExperimentGrid mg;
    mg.solvers = {SolverId::mpc(2), SolverId::mpc(17)};
    mg.horizons = {250, 2000};
    mg.policy = GridPolicy::step_schedule();
    const auto mpc = run_grid(mg);
    double min_mpc_pe = INFINITY;
    for (const auto& rec : mpc.records)
        if (rec.pe_pct) {
            order_ok = order_ok && *rec.pe_pct >= -100 * kOrderingSlackRel;
            min_mpc_pe = std::min(min_mpc_pe, *rec.pe_pct);
        }
    c.expect(order_ok, fmt::format("(a) optimal <= forward and MPC in every finite cell (min PE forward {:.3f}%, "
                                   "MPC {:.3f}%)",
                                   min_pe, min_mpc_pe));
    c.expect(pe_ok, fmt::format("(b) forward PE >= {:g}% everywhere (min {:.3f}%)", kPeFloor, min_pe));

    // (c) causality probe over every signal and weight.
    std::size_t future = 0, queries = 0;
    for (auto sig : kSignals)
        for (double R : kWeights) {
            double now = -1.0;
            const auto basez = ReferenceSignal::from_kind(sig, 0.02);
            auto p = scalar(1, 1, 1, R, 250);
            p.x0 = 2;
            p.signal = ReferenceSignal::custom("probe", [&](double s, double T) {
                ++queries;
                future += s > now;
                return Eigen::VectorXd::Constant(1, basez.sample(s, T));
            });
            SolveOptions opts;
            opts.keep_trajectory = false;
            opts.on_step = [&](std::size_t, double t) { now = t; };
            solve_forward_sift(p, TimeGrid::uniform(0, 250, 0.01), opts);
        }
    c.expect(future == 0, fmt::format("(c) forward solver: {} future-time queries out of {}", future, queries));

    // (d) Euler order on y' = y.
    auto err = [](double dt) {
        const auto traj = integrate([](double, const State& y) { return State(y); }, State::Ones(1),
                                    TimeGrid::uniform(0, 1, dt));
        return std::abs(traj.channel("y").back() - std::exp(1.0));
    };
    const double r1 = err(1e-2) / err(5e-3), r2 = err(5e-3) / err(2.5e-3);
    c.expect(r1 >= kOrderLow && r1 <= kOrderHigh && r2 >= kOrderLow && r2 <= kOrderHigh,
             fmt::format("(d) Euler error ratios {:.4f}, {:.4f}", r1, r2));

    // (e) kinetic flipped Riccati.
    const auto kin = kinetic_embedding(1, 1, 1, 1, 1, 50, {2, 0}, ReferenceSignal::z1(0.02));
    const auto th = solve_forward_flipped(kin, TimeGrid::uniform(0, 50, 1e-3));
    double asym = 0.0, min_eig = INFINITY;
    for (const auto& m : th.theta) {
        asym = std::max(asym, (m - m.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, m.cwiseAbs().maxCoeff()));
        min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff());
    }
    c.expect(!th.diverged() && asym <= kSymmetryRel && min_eig >= kEigenFloor,
             fmt::format("(e) kinetic theta: relative asymmetry {:.2e}, min eigenvalue {:.3e}", asym, min_eig));

    // (f) 1×1 matrix path against the scalar path.
    auto sp = table1_grid(kTable1Grid).problem(250, 0.01, SignalKind::Z2);
    const auto mp = lift_scalar(sp);
    const auto g = TimeGrid::uniform(0, 250, 0.01);
    double lift = 0.0;
    for (auto [s, m] : {std::pair{solve_optimal(sp, g), solve_optimal(mp, g)},
                        std::pair{solve_forward_sift(sp, g), solve_forward_sift(mp, g)}})
        for (const char* ch : {"y", "p", "alpha", "theta", "eta"}) {
            const auto& a = s.trajectory.channel(ch);
            const auto& b = m.trajectory.channel(ch);
            for (std::size_t k = 0; k < a.size(); ++k)
                lift = std::max(lift, std::abs(a[k] - b[k]));
        }
    c.expect(lift <= kLiftAbs, fmt::format("(f) max |scalar - 1x1 matrix| = {:.2e}", lift));

    // (g) MPC whose window always reaches the horizon.
    bool full_ok = true;
    for (auto sig : kSignals) {
        const auto p = table1_grid(kTable1Grid).problem(10, 0.01, sig);
        const auto gg = TimeGrid::uniform(0, 10, 0.01);
        const double opt = solve_optimal(p, gg).average_cost;
        const double full = solve_mpc(p, gg, {gg.size()}).average_cost;
        const bool ok = within_rel(full, opt, kFullWindowRel);
        full_ok = full_ok && ok;
        c.note(fmt::format("(g) {}: full-window MPC {:.6f}, optimal {:.6f}", to_string(sig), full, opt));
    }
    c.expect(full_ok, "(g) full-window MPC within 1% of the optimal cost");
    return c.ok();
}

const std::map<int, std::pair<const char*, std::function<bool(Check&)>>> kCriteria{
    {1, {"average cost grid matches reference values and is grid-stable", criterion1}},
    {2, {"percentage error matches reference values and falls with T", criterion2}},
    {3, {"closed-form oracle for the flipped Riccati equation", criterion3}},
    {4, {"stability of the flipped vs unflipped scalar Riccati equation", criterion4}},
    {5, {"MPC with w = 2 diverges or matches reference values", criterion5}},
    {6, {"MPC vs forward cost, PE and wall time", criterion6}},
    {7, {"property suite", criterion7}},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LQT acceptance suite"};
    std::vector<int> selected;
    app.add_option("--criterion", selected, "Criterion number(s); default all")->check(CLI::Range(1, 7));
    CLI11_PARSE(app, argc, argv);
    if (selected.empty())
        for (const auto& [n, _] : kCriteria)
            selected.push_back(n);

    bool all = true;
    for (int n : selected) {
        const auto& [title, run] = kCriteria.at(n);
        fmt::print("criterion {}: {}\n", n, title);
        Check check;
        const bool ok = run(check);
        fmt::print("{} criterion {}: {}\n", ok ? "PASS" : "FAIL", n, title);
        std::fflush(stdout);
        all = all && ok;
    }
    return all ? 0 : 1;
}
