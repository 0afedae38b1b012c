#pragma once

/**
 * @file bea.hpp
 * @brief Backward-error-analysis quantities for the Newmark family: the
 *        distorted vector field truncated at second order in the step size,
 *        the equivalent distorted second-order system (C~, K~, F~) with its
 *        shifted velocity initial condition, and the closed-form distortion
 *        of the explicit Euler method on a harmonic oscillator.
 */

#include "sdyn/integrators.hpp"
#include "sdyn/model.hpp"

#include <functional>

namespace sdyn {

/**
 * Derived operators of the Newmark distortion:
 *   eta = gamma/2 - beta - 1/12,
 *   G x = M^{-1} C x,  H x = M^{-1} K x,
 *   B x = dt (gamma - 1/2) x - dt^2 ((gamma - 1/2)^2 + 1/12) C M^{-1} x.
 * All applications are solve-backed; M^{-1} is never formed.
 */
class DistortionCoefficients {
  public:
    DistortionCoefficients(SecondOrderSystem sys, double dt, double gamma, double beta);

    double eta() const { return eta_; }
    double dt() const { return dt_; }
    double gamma() const { return gamma_; }
    double beta() const { return beta_; }

    Vec G(const Vec& x) const { return sys_.solve_mass(sys_.damping().apply(x)); }
    Vec H(const Vec& x) const { return sys_.solve_mass(sys_.stiffness().apply(x)); }
    Vec B(const Vec& x) const;
    Mat B(const Mat& x) const;

    const SecondOrderSystem& system() const { return sys_; }

  private:
    SecondOrderSystem sys_;
    double dt_, gamma_, beta_, eta_;
};

/**
 * The bracket combination entering every first- and second-order distortion
 * term:
 *   A(tau, q, v) = -G H q + (H - G^2) v + G M^{-1} F(tau) - M^{-1} F'(tau).
 * `deriv_dt` is the stencil spacing used when the forcing is in
 * central-difference mode.
 */
Vec a_field(const SecondOrderSystem& sys, double tau, const Vec& q, const Vec& v,
            double deriv_dt = 0.0);

struct DvfValue {
    double tau_dot;  // always 1
    Vec q_dot;
    Vec v_dot;
};

/**
 * Distorted vector field of the Newmark method truncated after dt^2:
 *   q' = v + dt^2 eta A,
 *   v' = -M^{-1}(K q + C v - F) + dt (1/2 - gamma) A + dt^2 f_v2,
 * with
 *   f_v2 = 1/12 [H (H q + G v - M^{-1} F) + M^{-1} F'']
 *          + ((gamma - 1/2)^2 + 1/12) G A.
 * cfg.dt doubles as the stencil spacing for numeric forcing derivatives.
 */
DvfValue dvf_eval(const SecondOrderSystem& sys, const StepperConfig& cfg, double tau,
                  const Vec& q, const Vec& v);

/**
 * Second-order rewriting of the distorted dynamics,
 *   M q'' + C~ q' + K~ q = F~(t),
 * valid through dt^2, with the velocity initial condition shifted by
 * dt^2 eta A(0, q0, v0).
 */
class DistortedSystem {
  public:
    const Mat& damping() const { return Ct_; }
    const Mat& stiffness() const { return Kt_; }
    Vec forcing(double t) const { return forcing_(t); }
    const Vec& qdot0_correction() const { return qdot0_corr_; }
    double dt() const { return dt_; }

    /// Materialize as an integrable system (original M and q0; v0 shifted).
    SecondOrderSystem to_system() const;

  private:
    friend DistortedSystem distorted_system(const SecondOrderSystem&,
                                            const StepperConfig&);
    explicit DistortedSystem(SecondOrderSystem base) : base_(std::move(base)) {}
    SecondOrderSystem base_;
    Mat Ct_, Kt_;
    std::function<Vec(double)> forcing_;
    Vec qdot0_corr_;
    double dt_ = 0.0;
};

DistortedSystem distorted_system(const SecondOrderSystem& sys, const StepperConfig& cfg);

/**
 * Closed-form distortion of explicit Euler on the oscillator
 * m x'' + k x = 0: the coefficients of the equivalent distorted equation
 * m~ x'' + c~ x' + k~ x = 0 and the envelope/frequency pair of its solution
 *   x(t) = e^{rate t} [C1 cos(freq t) + C2 sin(freq t)].
 */
struct EulerOscillatorDistortion {
    double m_tilde, c_tilde, k_tilde;
    double envelope_rate;  // (dt/2) omega^2
    double frequency;      // omega - (dt^2/3) omega^3
    double dt, omega;

    /// Solution of the truncated distorted equation for x(0)=x0, v(0)=v0.
    double position(double t, double x0, double v0) const;
};

EulerOscillatorDistortion euler_oscillator_distortion(double m, double k, double dt);

}  // namespace sdyn
