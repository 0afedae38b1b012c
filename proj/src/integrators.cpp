#include "sdyn/integrators.hpp"

#include <cmath>

namespace sdyn {

std::string method_name(Method m) {
    switch (m) {
        case Method::newmark: return "newmark";
        case Method::generalized_alpha: return "generalized-alpha";
        case Method::rk4: return "rk4";
        case Method::explicit_euler: return "explicit-euler";
    }
    return "?";
}

GeneralizedAlphaParams generalized_alpha_params(double rho_inf) {
    if (!(rho_inf >= 0.0 && rho_inf <= 1.0))
        throw IntegrationError("generalized-alpha: rho_inf must be in [0, 1]");
    GeneralizedAlphaParams p{};
    p.alpha_m = (2.0 * rho_inf - 1.0) / (rho_inf + 1.0);
    p.alpha_f = rho_inf / (rho_inf + 1.0);
    p.gamma = 0.5 - p.alpha_m + p.alpha_f;
    p.beta = 0.25 * (1.0 - p.alpha_m + p.alpha_f) * (1.0 - p.alpha_m + p.alpha_f);
    return p;
}

Vec initial_acceleration(const SecondOrderSystem& sys, const Vec& q0, const Vec& v0) {
    return sys.acceleration(0.0, q0, v0);
}

long step_count(double dt, double t_end) {
    if (!(dt > 0.0)) throw IntegrationError("dt must be positive");
    if (t_end < 0.0) throw IntegrationError("t_end must be nonnegative");
    const double ratio = t_end / dt;
    const long j = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(j)) > 1e-9 * std::max(1.0, ratio))
        throw IntegrationError("t_end is not an integer multiple of dt");
    return j;
}

NewmarkFamilyStepper::NewmarkFamilyStepper(SecondOrderSystem sys, double dt,
                                           double gamma, double beta, double alpha_m,
                                           double alpha_f)
    : sys_(std::move(sys)),
      dt_(dt),
      gamma_(gamma),
      beta_(beta),
      alpha_m_(alpha_m),
      alpha_f_(alpha_f),
      has_damping_(!sys_.damping().is_zero()) {
    if (!(dt > 0.0)) throw IntegrationError("NewmarkFamilyStepper: dt must be positive");
    const double cm = 1.0 - alpha_m_;
    const double cf = 1.0 - alpha_f_;
    try {
        if (sys_.storage() == Storage::sparse) {
            SpMat eff = cm * sys_.mass().sparse() +
                        (cf * gamma_ * dt_) * sys_.damping().sparse() +
                        (cf * beta_ * dt_ * dt_) * sys_.stiffness().sparse();
            effective_ = LuFactor(SquareMat(std::move(eff)), "effective matrix");
        } else {
            Mat eff = cm * sys_.mass().to_dense() +
                      (cf * gamma_ * dt_) * sys_.damping().to_dense() +
                      (cf * beta_ * dt_ * dt_) * sys_.stiffness().to_dense();
            effective_ = LuFactor(SquareMat(std::move(eff)), "effective matrix");
        }
    } catch (const SingularMatrixError& e) {
        throw IntegrationError(std::string("step failure: ") + e.what());
    }
}

State NewmarkFamilyStepper::step(const State& s) const {
    const double t_next = s.t + dt_;
    const double t_mid = s.t + (1.0 - alpha_f_) * dt_;  // load evaluation time
    const double cf = 1.0 - alpha_f_;

    // predictors from the current state
    Vec q_pred = s.q + dt_ * s.v + ((1.0 - 2.0 * beta_) * dt_ * dt_ / 2.0) * s.a;
    Vec v_pred = s.v + ((1.0 - gamma_) * dt_) * s.a;

    Vec rhs = sys_.forcing()(t_mid);
    if (alpha_m_ != 0.0) rhs -= alpha_m_ * sys_.mass().apply(s.a);
    if (has_damping_) rhs -= sys_.damping().apply(Vec(cf * v_pred + alpha_f_ * s.v));
    rhs -= sys_.stiffness().apply(Vec(cf * q_pred + alpha_f_ * s.q));

    Vec a_next = effective_.solve(rhs);

    State out;
    out.t = t_next;
    out.q = q_pred + (beta_ * dt_ * dt_) * a_next;
    out.v = v_pred + (gamma_ * dt_) * a_next;
    out.a = std::move(a_next);
    return out;
}

State newmark_step(const SecondOrderSystem& sys, const State& state,
                   const StepperConfig& cfg) {
    return NewmarkFamilyStepper(sys, cfg.dt, cfg.gamma, cfg.beta).step(state);
}

State generalized_alpha_step(const SecondOrderSystem& sys, const State& state,
                             const StepperConfig& cfg) {
    if (cfg.rho_inf) {
        const auto p = generalized_alpha_params(*cfg.rho_inf);
        return NewmarkFamilyStepper(sys, cfg.dt, p.gamma, p.beta, p.alpha_m, p.alpha_f)
            .step(state);
    }
    return NewmarkFamilyStepper(sys, cfg.dt, cfg.gamma, cfg.beta, 0.0, 0.0).step(state);
}

Vec rk4_step(const FirstOrderView& view, const Vec& y, double t, double dt) {
    const Vec k1 = view.field(t, y);
    const Vec k2 = view.field(t + dt / 2.0, y + (dt / 2.0) * k1);
    const Vec k3 = view.field(t + dt / 2.0, y + (dt / 2.0) * k2);
    const Vec k4 = view.field(t + dt, y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec explicit_euler_step(const FirstOrderView& view, const Vec& y, double t, double dt) {
    return y + dt * view.field(t, y);
}

namespace {

Trajectory integrate_first_order(const SecondOrderSystem& sys, const StepperConfig& cfg,
                                 double t_end) {
    const long steps = step_count(cfg.dt, t_end);
    const FirstOrderView view = first_order_view(sys, false);
    const int n = sys.dof();

    Trajectory traj;
    traj.method = method_name(cfg.method);
    traj.config = cfg;
    traj.system_digest = sys.digest();
    traj.states.reserve(steps + 1);

    Vec y = view.initial_state();
    for (long j = 0; j <= steps; ++j) {
        const double t = j * cfg.dt;
        State s;
        s.t = t;
        s.q = y.head(n);
        s.v = y.tail(n);
        s.a = sys.acceleration(t, s.q, s.v);
        traj.states.push_back(std::move(s));
        if (j < steps) {
            y = cfg.method == Method::rk4 ? rk4_step(view, y, t, cfg.dt)
                                          : explicit_euler_step(view, y, t, cfg.dt);
        }
    }
    return traj;
}

}  // namespace

Trajectory integrate(const SecondOrderSystem& sys, const StepperConfig& cfg,
                     double t_end) {
    if (cfg.method == Method::rk4 || cfg.method == Method::explicit_euler)
        return integrate_first_order(sys, cfg, t_end);

    const long steps = step_count(cfg.dt, t_end);

    double gamma = cfg.gamma, beta = cfg.beta, am = 0.0, af = 0.0;
    if (cfg.method == Method::generalized_alpha && cfg.rho_inf) {
        const auto p = generalized_alpha_params(*cfg.rho_inf);
        gamma = p.gamma; beta = p.beta; am = p.alpha_m; af = p.alpha_f;
    }
    NewmarkFamilyStepper stepper(sys, cfg.dt, gamma, beta, am, af);

    Trajectory traj;
    traj.method = method_name(cfg.method);
    traj.config = cfg;
    traj.system_digest = sys.digest();
    traj.states.reserve(steps + 1);

    State s;
    s.t = 0.0;
    s.q = sys.q0();
    s.v = sys.v0();
    s.a = initial_acceleration(sys, s.q, s.v);
    traj.states.push_back(s);
    for (long j = 0; j < steps; ++j) {
        s = stepper.step(s);
        s.t = (j + 1) * cfg.dt;  // keep grid times exact
        traj.states.push_back(s);
    }
    return traj;
}

Trajectory reference_solution(const SecondOrderSystem& sys, double dt, double t_end) {
    const long steps = step_count(dt, t_end);
    const double fine = dt / 100.0;
    const FirstOrderView view = first_order_view(sys, false);
    const int n = sys.dof();

    Trajectory traj;
    traj.method = "reference-rk4";
    traj.config.dt = dt;
    traj.config.method = Method::rk4;
    traj.system_digest = sys.digest();
    traj.states.reserve(steps + 1);

    Vec y = view.initial_state();
    for (long j = 0; j <= steps; ++j) {
        const double t = j * dt;
        State s;
        s.t = t;
        s.q = y.head(n);
        s.v = y.tail(n);
        s.a = sys.acceleration(t, s.q, s.v);
        traj.states.push_back(std::move(s));
        if (j < steps)
            for (int k = 0; k < 100; ++k) y = rk4_step(view, y, t + k * fine, fine);
    }
    return traj;
}

}  // namespace sdyn
