#include "sdyn/bea.hpp"

#include <cmath>

namespace sdyn {

DistortionCoefficients::DistortionCoefficients(SecondOrderSystem sys, double dt,
                                               double gamma, double beta)
    : sys_(std::move(sys)),
      dt_(dt),
      gamma_(gamma),
      beta_(beta),
      eta_(0.5 * gamma - beta - 1.0 / 12.0) {}

Vec DistortionCoefficients::B(const Vec& x) const {
    const double g2 = gamma_ - 0.5;
    Vec out = (dt_ * g2) * x;
    if (!sys_.damping().is_zero())
        out -= (dt_ * dt_ * (g2 * g2 + 1.0 / 12.0)) *
               sys_.damping().apply(sys_.solve_mass(x));
    return out;
}

Mat DistortionCoefficients::B(const Mat& x) const {
    const double g2 = gamma_ - 0.5;
    Mat out = (dt_ * g2) * x;
    if (!sys_.damping().is_zero())
        out -= (dt_ * dt_ * (g2 * g2 + 1.0 / 12.0)) *
               sys_.damping().apply(sys_.solve_mass(x));
    return out;
}

Vec a_field(const SecondOrderSystem& sys, double tau, const Vec& q, const Vec& v,
            double deriv_dt) {
    const Vec f = sys.forcing()(tau);
    const Vec fp = sys.forcing().derivative(tau, 1, deriv_dt);
    const Vec Hq = sys.solve_mass(sys.stiffness().apply(q));
    const Vec Hv = sys.solve_mass(sys.stiffness().apply(v));
    const Vec minv_f = sys.solve_mass(f);
    Vec a = Hv - sys.solve_mass(fp);
    if (!sys.damping().is_zero()) {
        auto G = [&](const Vec& x) { return sys.solve_mass(sys.damping().apply(x)); };
        a += -G(Hq) - G(G(v)) + G(minv_f);
    }
    return a;
}

DvfValue dvf_eval(const SecondOrderSystem& sys, const StepperConfig& cfg, double tau,
                  const Vec& q, const Vec& v) {
    const double dt = cfg.dt;
    const double gamma = cfg.gamma;
    const double eta = 0.5 * gamma - cfg.beta - 1.0 / 12.0;

    const ForcingSamples f = sys.forcing().samples(tau, dt);
    const Vec minv_f = sys.solve_mass(f.value);
    const Vec Hq = sys.solve_mass(sys.stiffness().apply(q));
    const Vec Hv = sys.solve_mass(sys.stiffness().apply(v));
    const bool damped = !sys.damping().is_zero();
    auto G = [&](const Vec& x) { return sys.solve_mass(sys.damping().apply(x)); };
    auto H = [&](const Vec& x) { return sys.solve_mass(sys.stiffness().apply(x)); };

    Vec a = Hv - sys.solve_mass(f.first);
    if (damped) a += -G(Hq) - G(G(v)) + G(minv_f);

    Vec f_v0 = minv_f - Hq;
    if (damped) f_v0 -= G(v);

    Vec inner = Hq - minv_f;
    if (damped) inner += G(v);
    Vec f_v2 = (1.0 / 12.0) * (H(inner) + sys.solve_mass(f.second));
    const double c2 = (gamma - 0.5) * (gamma - 0.5) + 1.0 / 12.0;
    if (damped) f_v2 += c2 * G(a);

    DvfValue out;
    out.tau_dot = 1.0;
    out.q_dot = v + (dt * dt * eta) * a;
    out.v_dot = f_v0 + (dt * (0.5 - gamma)) * a + (dt * dt) * f_v2;
    return out;
}

DistortedSystem distorted_system(const SecondOrderSystem& sys, const StepperConfig& cfg) {
    const double dt = cfg.dt;
    const double gamma = cfg.gamma;
    const double eta = 0.5 * gamma - cfg.beta - 1.0 / 12.0;
    const double em = eta - 1.0 / 12.0;
    DistortionCoefficients coeff(sys, dt, gamma, cfg.beta);

    const Mat C = sys.damping().to_dense();
    const Mat K = sys.stiffness().to_dense();
    const Mat minv_C = sys.solve_mass(C);   // M^{-1} C, column solves
    const Mat minv_K = sys.solve_mass(K);   // M^{-1} K
    const Mat K_minvC = sys.stiffness().apply(minv_C);
    const Mat K_minvK = sys.stiffness().apply(minv_K);
    const Mat C_minvC = sys.damping().apply(minv_C);
    const Mat C_minvK = sys.damping().apply(minv_K);

    DistortedSystem out(sys);
    out.dt_ = dt;
    out.Ct_ = C + coeff.B(Mat(K - C_minvC)) + (dt * dt * em) * K_minvC;
    out.Kt_ = K - coeff.B(C_minvK) + (dt * dt * em) * K_minvK;
    out.qdot0_corr_ = (dt * dt * eta) * a_field(sys, 0.0, sys.q0(), sys.v0(), dt);

    out.forcing_ = [sys, coeff, dt, em](double t) {
        const ForcingSamples f = sys.forcing().samples(t, dt);
        const Vec s = sys.solve_mass(f.value);
        Vec ft = f.value - coeff.B(Vec(sys.damping().apply(s) - f.first));
        ft += (dt * dt * em) * (sys.stiffness().apply(s) - f.second);
        return ft;
    };
    return out;
}

SecondOrderSystem DistortedSystem::to_system() const {
    auto fn = forcing_;
    return SecondOrderSystem(base_.mass(), SquareMat(Ct_), SquareMat(Kt_),
                             Forcing::analytic(base_.dof(), fn),
                             base_.q0(), Vec(base_.v0() + qdot0_corr_));
}

EulerOscillatorDistortion euler_oscillator_distortion(double m, double k, double dt) {
    if (!(m > 0.0) || !(k > 0.0))
        throw std::invalid_argument("euler_oscillator_distortion: m, k must be positive");
    EulerOscillatorDistortion d{};
    d.dt = dt;
    d.omega = std::sqrt(k / m);
    d.m_tilde = m * (1.0 + dt * dt * k / (3.0 * m));
    d.c_tilde = -dt * k + dt * dt * dt * k * k / (6.0 * m);
    d.k_tilde = k * (1.0 - dt * dt * k / (12.0 * m));
    d.envelope_rate = 0.5 * dt * d.omega * d.omega;
    d.frequency = d.omega - (dt * dt / 3.0) * d.omega * d.omega * d.omega;
    return d;
}

double EulerOscillatorDistortion::position(double t, double x0, double v0) const {
    // C1, C2 fixed by x(0) = x0 and the truncated distorted q-equation
    // x'(0) = rate x0 + (1 - dt^2 omega^2 / 3) v0.
    const double c1 = x0;
    const double c2 = v0 * (1.0 - dt * dt * omega * omega / 3.0) / frequency;
    return std::exp(envelope_rate * t) *
           (c1 * std::cos(frequency * t) + c2 * std::sin(frequency * t));
}

}  // namespace sdyn
