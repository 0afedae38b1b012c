#pragma once

/**
 * @file harness.hpp
 * @brief Scenario runner: trajectory comparisons, convergence studies,
 *        energy traces and the accuracy-versus-runtime benchmark, plus the
 *        bundled demo systems and named scenario presets.
 */

#include "sdyn/bea.hpp"
#include "sdyn/compensation.hpp"
#include "sdyn/integrators.hpp"
#include "sdyn/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdyn {

enum class ScenarioCompensation { none, damping, fourth_order };

struct MethodSpec {
    Method method = Method::newmark;
    double gamma = 0.5;
    double beta = 0.25;
    std::optional<double> rho_inf;
    bool compensated = false;  // opt into the scenario's compensation kind
    std::string label;         // unique name in reports; defaults to the method name

    StepperConfig config(double dt) const;
};

struct SlopeAssertion {
    std::string label;      // method label
    std::string variable;   // "q" or "v"
    double min = 0.0, max = 0.0;
};

struct Scenario {
    std::string name;
    SecondOrderSystem system;
    std::vector<MethodSpec> methods;
    ScenarioCompensation compensation = ScenarioCompensation::none;
    double t_end = 1.0;
    double t_eval = 1.0;
    std::vector<double> dts;  // schedule; front() is the base step

    // benchmark controls
    double bench_error_target = 0.0;  // 0 = run the whole schedule
    int bench_repeats = 5;

    std::vector<SlopeAssertion> assertions;

    static std::vector<double> halving_schedule(double dt0, int halvings);
};

struct RunResult {
    std::string label;
    Trajectory trajectory;
    double seconds = 0.0;        // stepping loop only
    double build_seconds = 0.0;  // compensation construction, when any
};

/// Run every configured method at the scenario's base step. Compensation,
/// when requested, is applied to the system before stepping; a fourth-order
/// compensation with (gamma, beta) != (1/2, 1/6) is refused.
std::vector<RunResult> run_scenario(const Scenario& s);

struct ConvergenceRow {
    double dt = 0.0;
    double error_q = 0.0;
    double error_v = 0.0;
    bool floor = false;  // excluded from slope fits
};

struct MethodConvergence {
    std::string label;
    std::vector<ConvergenceRow> rows;
    double slope_q = 0.0;
    double slope_v = 0.0;
};

struct ConvergenceReport {
    std::vector<MethodConvergence> methods;
    const MethodConvergence& at(const std::string& label) const;
};

/**
 * Errors against the fine-step reference at t_eval for every (method, dt)
 * pair of the schedule, with per-method log-log slopes. Rows after the first
 * error increase are flagged as floor rows and excluded from the fit.
 */
ConvergenceReport convergence_study(const Scenario& s);

/// Least-squares slope of log e against log dt. Requires >= 2 points with
/// positive errors.
double observed_order(const std::vector<std::pair<double, double>>& errors);

/// Energy along a trajectory, always evaluated with the given system's
/// (original) M and K.
std::vector<std::pair<double, double>> energy_trace(const Trajectory& traj,
                                                    const SecondOrderSystem& sys);

struct BenchRow {
    std::string label;
    double dt = 0.0;
    long steps = 0;
    double error = 0.0;
    double seconds = 0.0;        // max over repeats, stepping loop only
    double build_seconds = 0.0;  // compensation construction
};

/**
 * For each method, walk the dt schedule (halving), timing each run
 * bench_repeats times (max reported) and measuring the error at t_eval
 * against a shared reference. When bench_error_target > 0, a method's rows
 * stop once its error reaches the target.
 */
std::vector<BenchRow> accuracy_runtime_benchmark(const Scenario& s);

/// Fitted exponential rate of a positive trace: least-squares slope of
/// log E against t.
double fitted_exponential_rate(const std::vector<std::pair<double, double>>& trace);

// ---------------------------------------------------------------------------
// bundled systems
// ---------------------------------------------------------------------------

enum class Builtin3DofForcing { sinusoid, zero, square_wave, pulse };

/// Bundled damped 3-DoF demo system; optionally undamped and with an
/// alternative excitation.
SecondOrderSystem paper_3dof(bool damped = true,
                             Builtin3DofForcing forcing = Builtin3DofForcing::sinusoid);

/// Bundled 1-DoF convergence test case: m = 1, damping ratio 0.02,
/// omega = 2 pi, F(t) = 0.8 cos(10 omega t), q0 = v0 = 1.
SecondOrderSystem oscillator_1dof();

/// Unit-frequency free oscillator (m = k = 1) used by the explicit-Euler
/// distortion demo.
SecondOrderSystem unit_oscillator(double x0 = 1.0, double v0 = 0.0);

/// Synthetic sparse banded stand-in for a 1-D finite-element beam: a chain
/// of elements with consistent (tridiagonal) mass, anchored at the left end
/// and plucked at the free end.
SecondOrderSystem fe_beam_synthetic(int n = 400, double stiffness = 100.0,
                                    double mass = 1.0, double pluck = 0.01);

SecondOrderSystem builtin_system(const std::string& name);

/// Named scenario presets, one per bundled experiment (see list_presets).
Scenario preset_scenario(const std::string& name);
std::vector<std::string> list_presets();

}  // namespace sdyn
