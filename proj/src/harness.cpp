#include "sdyn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sdyn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string default_label(const MethodSpec& m, ScenarioCompensation comp) {
    std::string base = method_name(m.method);
    if (!m.compensated) return base;
    if (comp == ScenarioCompensation::damping) return base + "-damping-compensated";
    if (comp == ScenarioCompensation::fourth_order) return base + "-fourth-order";
    return base;
}

/// Resolve the system a method actually steps. Compensation is opt-in per
/// method, supported for plain Newmark only, and rebuilt for every dt.
struct PreparedSystem {
    SecondOrderSystem system;
    double build_seconds = 0.0;
};

PreparedSystem prepare_system(const Scenario& s, const MethodSpec& m, double dt) {
    if (s.compensation == ScenarioCompensation::none || !m.compensated)
        return {s.system, 0.0};
    if (m.method != Method::newmark)
        throw CompensationError("compensation is only supported for the newmark method");

    const auto t0 = Clock::now();
    if (s.compensation == ScenarioCompensation::damping) {
        auto comp = damping_compensation(s.system, m.config(dt));
        return {comp.system(), seconds_since(t0)};
    }
    auto comp = fourth_order_compensation(s.system, dt);
    comp.require_parameters(m.gamma, m.beta);
    return {comp.system(), seconds_since(t0)};
}

struct FinalState {
    Vec q, v;
    double seconds = 0.0;
};

/// Step to t_end recording nothing but the final state; used where full
/// trajectories would only distort the timing (benchmark rows).
FinalState run_to_final(const SecondOrderSystem& sys, const StepperConfig& cfg,
                        double t_end) {
    const long steps = step_count(cfg.dt, t_end);
    FinalState out;
    if (cfg.method == Method::rk4 || cfg.method == Method::explicit_euler) {
        const FirstOrderView view = first_order_view(sys, false);
        Vec y = view.initial_state();
        const auto t0 = Clock::now();
        for (long j = 0; j < steps; ++j) {
            const double t = j * cfg.dt;
            y = cfg.method == Method::rk4 ? rk4_step(view, y, t, cfg.dt)
                                          : explicit_euler_step(view, y, t, cfg.dt);
        }
        out.seconds = seconds_since(t0);
        out.q = y.head(sys.dof());
        out.v = y.tail(sys.dof());
        return out;
    }

    double gamma = cfg.gamma, beta = cfg.beta, am = 0.0, af = 0.0;
    if (cfg.method == Method::generalized_alpha && cfg.rho_inf) {
        const auto p = generalized_alpha_params(*cfg.rho_inf);
        gamma = p.gamma; beta = p.beta; am = p.alpha_m; af = p.alpha_f;
    }
    NewmarkFamilyStepper stepper(sys, cfg.dt, gamma, beta, am, af);
    State s;
    s.t = 0.0;
    s.q = sys.q0();
    s.v = sys.v0();
    s.a = initial_acceleration(sys, s.q, s.v);
    const auto t0 = Clock::now();
    for (long j = 0; j < steps; ++j) s = stepper.step(s);
    out.seconds = seconds_since(t0);
    out.q = std::move(s.q);
    out.v = std::move(s.v);
    return out;
}

}  // namespace

StepperConfig MethodSpec::config(double dt) const {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.gamma = gamma;
    cfg.beta = beta;
    cfg.rho_inf = rho_inf;
    cfg.method = method;
    return cfg;
}

std::vector<double> Scenario::halving_schedule(double dt0, int halvings) {
    std::vector<double> out;
    out.reserve(halvings + 1);
    double dt = dt0;
    for (int k = 0; k <= halvings; ++k, dt /= 2.0) out.push_back(dt);
    return out;
}

std::vector<RunResult> run_scenario(const Scenario& s) {
    if (s.dts.empty()) throw IntegrationError("scenario has no dt schedule");
    const double dt = s.dts.front();

    std::vector<RunResult> out;
    std::map<std::string, int> seen;
    for (const auto& m : s.methods) {
        std::string label = m.label.empty() ? default_label(m, s.compensation) : m.label;
        if (int c = seen[label]++; c > 0) label += "#" + std::to_string(c + 1);

        PreparedSystem prep = prepare_system(s, m, dt);
        const auto t0 = Clock::now();
        Trajectory traj = integrate(prep.system, m.config(dt), s.t_end);
        const double secs = seconds_since(t0);
        out.push_back({std::move(label), std::move(traj), secs, prep.build_seconds});
    }
    return out;
}

const MethodConvergence& ConvergenceReport::at(const std::string& label) const {
    for (const auto& m : methods)
        if (m.label == label) return m;
    throw std::out_of_range("no such method in convergence report: " + label);
}

ConvergenceReport convergence_study(const Scenario& s) {
    if (s.dts.size() < 4)
        throw IntegrationError("convergence study needs at least 4 dt values");

    ConvergenceReport report;
    for (const auto& m : s.methods) {
        MethodConvergence mc;
        mc.label = m.label.empty() ? default_label(m, s.compensation) : m.label;
        for (double dt : s.dts) {
            step_count(dt, s.t_eval);  // reject misaligned schedules early
            PreparedSystem prep = prepare_system(s, m, dt);
            Trajectory traj = integrate(prep.system, m.config(dt), s.t_eval);
            Trajectory ref = reference_solution(s.system, dt, s.t_eval);
            ConvergenceRow row;
            row.dt = dt;
            row.error_q = (traj.back().q - ref.back().q).norm();
            row.error_v = (traj.back().v - ref.back().v).norm();
            mc.rows.push_back(row);
        }
        // floor detection: once the error stops decreasing under halving,
        // this and every later row is excluded from the fit
        std::vector<std::pair<double, double>> fit_q, fit_v;
        bool fl = false;
        for (size_t i = 0; i < mc.rows.size(); ++i) {
            const double err = std::max(mc.rows[i].error_q, mc.rows[i].error_v);
            const double prev = i == 0 ? std::numeric_limits<double>::infinity()
                                       : std::max(mc.rows[i - 1].error_q,
                                                  mc.rows[i - 1].error_v);
            if (i > 0 && err >= prev) fl = true;
            mc.rows[i].floor = fl;
            if (!fl) {
                fit_q.emplace_back(mc.rows[i].dt, mc.rows[i].error_q);
                fit_v.emplace_back(mc.rows[i].dt, mc.rows[i].error_v);
            }
        }
        mc.slope_q = observed_order(fit_q);
        mc.slope_v = observed_order(fit_v);
        report.methods.push_back(std::move(mc));
    }
    return report;
}

double observed_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 2)
        throw std::invalid_argument("observed_order: need at least 2 points");
    std::vector<double> h, e;
    for (auto [dt, err] : errors) {
        if (!(err > 0.0))
            throw std::invalid_argument("observed_order: errors must be positive");
        h.push_back(dt);
        e.push_back(err);
    }
    return log_log_slope(h, e);
}

std::vector<std::pair<double, double>> energy_trace(const Trajectory& traj,
                                                    const SecondOrderSystem& sys) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states)
        out.emplace_back(s.t, total_energy(sys, s.q, s.v));
    return out;
}

double fitted_exponential_rate(const std::vector<std::pair<double, double>>& trace) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (auto [t, e] : trace) {
        if (!(e > 0.0)) continue;
        const double y = std::log(e);
        sx += t; sy += y; sxx += t * t; sxy += t * y;
        ++m;
    }
    if (m < 2) throw std::invalid_argument("fitted_exponential_rate: trace too short");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<BenchRow> accuracy_runtime_benchmark(const Scenario& s) {
    if (s.dts.empty()) throw IntegrationError("benchmark has no dt schedule");

    // one shared reference, at the coarsest step's fine grid
    Trajectory ref = reference_solution(s.system, s.dts.front(), s.t_end);
    const auto ref_at = [&](double t) -> const State& {
        for (const auto& st : ref.states)
            if (std::abs(st.t - t) < 1e-9 * std::max(1.0, t)) return st;
        throw IntegrationError("benchmark t_eval is not on the reference grid");
    };
    const State& ref_state = ref_at(s.t_eval);

    std::vector<BenchRow> rows;
    for (const auto& m : s.methods) {
        const std::string label =
            m.label.empty() ? default_label(m, s.compensation) : m.label;
        for (double dt : s.dts) {
            BenchRow row;
            row.label = label;
            row.dt = dt;
            row.steps = step_count(dt, s.t_end);

            PreparedSystem prep = prepare_system(s, m, dt);
            row.build_seconds = prep.build_seconds;
            double max_secs = 0.0;
            FinalState fin;
            for (int r = 0; r < std::max(1, s.bench_repeats); ++r) {
                fin = run_to_final(prep.system, m.config(dt), s.t_end);
                max_secs = std::max(max_secs, fin.seconds);
            }
            row.seconds = max_secs;
            row.error = std::sqrt((fin.q - ref_state.q).squaredNorm() +
                                  (fin.v - ref_state.v).squaredNorm());
            rows.push_back(row);
            if (s.bench_error_target > 0.0 && row.error <= s.bench_error_target) break;
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// bundled systems
// ---------------------------------------------------------------------------

namespace {

Mat paper_3dof_mass() {
    Mat m(3, 3);
    m << 4.6965, 1.4187, 1.6038,
         1.4187, 4.7195, 1.5540,
         1.6038, 1.5540, 4.4809;
    return m;
}

Mat paper_3dof_stiffness() {
    Mat k(3, 3);
    k << 4.5316, 1.6906, 1.6784,
         1.6906, 4.7245, 1.4670,
         1.6784, 1.4670, 4.3618;
    return k;
}

Mat paper_3dof_damping() {
    Mat c(3, 3);
    c << 0.033921, 0.003909, 0.007335,
         0.003909, 0.030597, 0.002903,
         0.007335, 0.002903, 0.031755;
    return c;
}

Vec paper_3dof_amplitudes() {
    Vec a(3);
    a << -0.040790, -0.006630, -0.006914;
    return a;
}

Vec paper_3dof_frequencies() {
    Vec w(3);
    w << 0.2457, 0.2587, 0.3262;
    return w;
}

}  // namespace

SecondOrderSystem paper_3dof(bool damped, Builtin3DofForcing forcing) {
    Forcing f = Forcing::zero(3);
    switch (forcing) {
        case Builtin3DofForcing::sinusoid:
            f = Forcing::sinusoid_bank(paper_3dof_amplitudes(), paper_3dof_frequencies());
            break;
        case Builtin3DofForcing::zero:
            break;
        case Builtin3DofForcing::square_wave:
            f = Forcing::square_wave_bank(paper_3dof_amplitudes(),
                                          paper_3dof_frequencies());
            break;
        case Builtin3DofForcing::pulse: {
            Vec amp = Vec::Zero(3);
            amp[0] = 1.0;
            f = Forcing::pulse(amp, 0.2, 14.0);
            break;
        }
    }
    Vec q0(3), v0 = Vec::Zero(3);
    q0 << 0.1, 0.0, 0.0;
    return SecondOrderSystem(SquareMat(paper_3dof_mass()),
                             damped ? SquareMat(paper_3dof_damping())
                                    : SquareMat(Mat(Mat::Zero(3, 3))),
                             SquareMat(paper_3dof_stiffness()), std::move(f),
                             std::move(q0), std::move(v0));
}

SecondOrderSystem oscillator_1dof() {
    const double m = 1.0, xi = 0.02, omega = 2.0 * M_PI;
    Mat M(1, 1), C(1, 1), K(1, 1);
    M << m;
    C << 2.0 * xi * omega;
    K << m * omega * omega;
    // 0.8 cos(10 omega t) as a quarter-phase sinusoid, so the analytic
    // derivatives come for free
    Vec amp(1), w(1), ph(1);
    amp << 0.8;
    w << 10.0 * omega;
    ph << M_PI / 2.0;
    Vec q0(1), v0(1);
    q0 << 1.0;
    v0 << 1.0;
    return SecondOrderSystem(SquareMat(M), SquareMat(C), SquareMat(K),
                             Forcing::sinusoid_bank(amp, w, ph), q0, v0);
}

SecondOrderSystem unit_oscillator(double x0, double v0) {
    Mat one(1, 1);
    one << 1.0;
    Vec q(1), v(1);
    q << x0;
    v << v0;
    return SecondOrderSystem(SquareMat(one), SquareMat(Mat(Mat::Zero(1, 1))),
                             SquareMat(one), Forcing::zero(1), q, v);
}

SecondOrderSystem fe_beam_synthetic(int n, double stiffness, double mass, double pluck) {
    if (n < 2) throw DimensionError("fe_beam_synthetic: need at least 2 DoF");
    std::vector<Eigen::Triplet<double>> tk, tm;
    auto add = [](auto& trip, int i, int j, double v) { trip.emplace_back(i, j, v); };
    for (int e = 0; e < n - 1; ++e) {
        add(tk, e, e, stiffness);
        add(tk, e + 1, e + 1, stiffness);
        add(tk, e, e + 1, -stiffness);
        add(tk, e + 1, e, -stiffness);
        add(tm, e, e, mass / 3.0);
        add(tm, e + 1, e + 1, mass / 3.0);
        add(tm, e, e + 1, mass / 6.0);
        add(tm, e + 1, e, mass / 6.0);
    }
    add(tk, 0, 0, stiffness);  // anchor the left end
    add(tm, 0, 0, mass / 3.0);
    SpMat K(n, n), M(n, n);
    K.setFromTriplets(tk.begin(), tk.end());
    M.setFromTriplets(tm.begin(), tm.end());
    Vec q0 = Vec::Zero(n), v0 = Vec::Zero(n);
    q0[n - 1] = pluck;
    return SecondOrderSystem(SquareMat(M), SquareMat(SpMat(n, n)), SquareMat(K),
                             Forcing::zero(n), q0, v0);
}

SecondOrderSystem builtin_system(const std::string& name) {
    if (name == "paper-3dof") return paper_3dof();
    if (name == "oscillator-1dof") return oscillator_1dof();
    if (name == "fe-beam-synthetic") return fe_beam_synthetic();
    throw std::invalid_argument("unknown builtin system: " + name);
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

namespace {

MethodSpec newmark_spec(double gamma, double beta, std::string label = "") {
    MethodSpec m;
    m.method = Method::newmark;
    m.gamma = gamma;
    m.beta = beta;
    m.label = std::move(label);
    return m;
}

MethodSpec compensated_newmark_spec(double gamma, double beta, std::string label = "") {
    MethodSpec m = newmark_spec(gamma, beta, std::move(label));
    m.compensated = true;
    return m;
}

MethodSpec genalpha_spec(double rho, std::string label = "") {
    MethodSpec m;
    m.method = Method::generalized_alpha;
    m.rho_inf = rho;
    const auto p = generalized_alpha_params(rho);
    m.gamma = p.gamma;
    m.beta = p.beta;
    m.label = std::move(label);
    return m;
}

MethodSpec plain_spec(Method method, std::string label = "") {
    MethodSpec m;
    m.method = method;
    m.label = std::move(label);
    return m;
}

Scenario make(std::string name, SecondOrderSystem sys) {
    Scenario s{std::move(name), std::move(sys), {}, ScenarioCompensation::none,
               1.0, 1.0, {}, 0.0, 5, {}};
    return s;
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
    if (name == "dvf-convergence") {
        Scenario s = make(name, paper_3dof());
        s.methods = {newmark_spec(0.55, 0.28)};
        s.t_end = s.t_eval = 0.4;
        s.dts = Scenario::halving_schedule(0.1, 4);
        return s;
    }
    if (name == "dvf-time-trace") {
        Scenario s = make(name, paper_3dof());
        s.methods = {newmark_spec(0.55, 0.28), plain_spec(Method::rk4)};
        s.t_end = 100.0;
        s.t_eval = 100.0;
        s.dts = {0.7};
        return s;
    }
    if (name == "order-map") {
        Scenario s = make(name, oscillator_1dof());
        s.methods = {newmark_spec(0.55, 0.28, "newmark-g055"),
                     newmark_spec(0.5, 0.25, "newmark-g05"), plain_spec(Method::rk4)};
        s.t_end = s.t_eval = 0.75;
        s.dts = Scenario::halving_schedule(0.09375, 4);
        s.assertions = {{"newmark-g055", "q", 1.7, 2.3}, {"newmark-g055", "v", 0.7, 1.3}};
        return s;
    }
    if (name == "damping-comp-undamped" || name == "damping-comp-damped") {
        const bool damped = name == "damping-comp-damped";
        Scenario s = make(name, paper_3dof(damped, Builtin3DofForcing::zero));
        s.compensation = ScenarioCompensation::damping;
        s.methods = {compensated_newmark_spec(0.55, 0.28, "newmark-damping-compensated"),
                     newmark_spec(0.55, 0.28, "newmark"), genalpha_spec(0.9),
                     plain_spec(Method::rk4)};
        s.t_end = s.t_eval = 100.0;
        s.dts = {0.7};
        return s;
    }
    if (name == "fourth-order-convergence" || name == "fourth-order-numeric") {
        SecondOrderSystem sys = oscillator_1dof();
        if (name == "fourth-order-numeric")
            sys = sys.with_forcing(
                sys.forcing().with_derivative_mode(DerivativeMode::central_difference));
        Scenario s = make(name, std::move(sys));
        s.compensation = ScenarioCompensation::fourth_order;
        s.methods = {compensated_newmark_spec(0.5, 1.0 / 6.0, "newmark-fourth-order"),
                     newmark_spec(0.5, 1.0 / 6.0, "newmark"), genalpha_spec(1.0),
                     plain_spec(Method::rk4)};
        s.t_end = s.t_eval = 0.4;
        s.dts = Scenario::halving_schedule(0.05, 6);
        s.assertions = {{"newmark-fourth-order", "q", 3.6, 4.4},
                        {"newmark-fourth-order", "v", 3.6, 4.4},
                        {"newmark", "q", 1.7, 2.3},
                        {"rk4", "q", 3.7, 4.3}};
        return s;
    }
    if (name == "fourth-order-3dof") {
        Scenario s = make(name, paper_3dof());
        s.compensation = ScenarioCompensation::fourth_order;
        s.methods = {compensated_newmark_spec(0.5, 1.0 / 6.0, "newmark-fourth-order"),
                     newmark_spec(0.5, 1.0 / 6.0, "newmark"), genalpha_spec(1.0),
                     plain_spec(Method::rk4)};
        s.t_end = s.t_eval = 100.0;
        s.dts = {0.7};
        return s;
    }
    if (name == "square-wave") {
        Scenario s = make(name, paper_3dof(true, Builtin3DofForcing::square_wave));
        s.compensation = ScenarioCompensation::fourth_order;
        s.methods = {compensated_newmark_spec(0.5, 1.0 / 6.0, "newmark-fourth-order"),
                     newmark_spec(0.5, 1.0 / 6.0, "newmark"), genalpha_spec(1.0),
                     plain_spec(Method::rk4)};
        s.t_end = s.t_eval = 100.0;
        s.dts = {0.7};
        return s;
    }
    if (name == "pulse") {
        Scenario s = make(name, paper_3dof(false, Builtin3DofForcing::pulse));
        s.compensation = ScenarioCompensation::fourth_order;
        s.methods = {compensated_newmark_spec(0.5, 1.0 / 6.0, "newmark-fourth-order"),
                     newmark_spec(0.5, 1.0 / 6.0, "newmark"), genalpha_spec(1.0),
                     plain_spec(Method::rk4)};
        s.t_end = s.t_eval = 100.0;
        s.dts = {0.7};
        return s;
    }
    if (name == "euler-demo") {
        Scenario s = make(name, unit_oscillator());
        s.methods = {plain_spec(Method::explicit_euler)};
        s.t_end = s.t_eval = 10.0;
        s.dts = {0.1};
        return s;
    }
    if (name == "fe-benchmark") {
        Scenario s = make(name, fe_beam_synthetic());
        s.compensation = ScenarioCompensation::fourth_order;
        s.methods = {compensated_newmark_spec(0.5, 1.0 / 6.0, "newmark-fourth-order"),
                     genalpha_spec(1.0)};
        s.t_end = s.t_eval = 1.0;
        s.dts = Scenario::halving_schedule(0.02, 12);
        s.bench_error_target = 1e-6;
        return s;
    }
    throw std::invalid_argument("unknown preset scenario: " + name);
}

std::vector<std::string> list_presets() {
    return {"dvf-convergence",  "dvf-time-trace",      "order-map",
            "damping-comp-undamped", "damping-comp-damped", "fourth-order-convergence",
            "fourth-order-numeric",  "fourth-order-3dof",   "square-wave",
            "pulse",            "euler-demo",          "fe-benchmark"};
}

}  // namespace sdyn
