#pragma once

/**
 * @file forcing.hpp
 * @brief Time-dependent load vectors with exact or finite-difference
 *        first/second derivatives.
 */

#include "sdyn/linalg.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sdyn {

enum class ForcingKind {
    zero,
    sinusoid_bank,
    square_wave_bank,
    pulse,
    analytic,
    sampled,
};

enum class DerivativeMode { analytic, central_difference };

struct ForcingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// First and second time derivative of a load, bundled with its value so a
/// central-difference evaluation can share the three samples F(t-dt), F(t),
/// F(t+dt) between both stencils.
struct ForcingSamples {
    Vec value;
    Vec first;
    Vec second;
};

/**
 * Time-dependent external load F(t) for an n-DoF system.
 *
 * Kinds:
 *  - zero
 *  - sinusoid bank:     F_i(t) = amp_i * sin(omega_i t + phase_i)
 *  - square-wave bank:  F_i(t) = amp_i * sign(sin(omega_i t))
 *  - pulse:             F(t) = amp * exp(t/(mu t*)) (1 - t/t*)^3 for t <= t*,
 *                       exactly zero for t > t*
 *  - analytic:          user closures for F and (optionally) F', F''
 *  - sampled:           values on a time grid, Lagrange-interpolated
 *
 * Square-wave and sampled loads are restricted to central-difference
 * derivative mode; the remaining kinds default to analytic derivatives.
 */
class Forcing {
  public:
    using Fn = std::function<Vec(double)>;

    static Forcing zero(int n);
    static Forcing sinusoid_bank(Vec amplitude, Vec omega, Vec phase = Vec());
    static Forcing square_wave_bank(Vec amplitude, Vec omega);
    static Forcing pulse(Vec amplitude, double shape_mu, double cutoff_time);
    static Forcing analytic(int n, Fn value, Fn first = nullptr, Fn second = nullptr);
    /// `values` is n x m for m grid points; interpolation order 1 or 3.
    static Forcing sampled(Vec times, Mat values, int interpolation_order);

    int dim() const { return n_; }
    ForcingKind kind() const { return kind_; }
    DerivativeMode derivative_mode() const { return mode_; }

    /// Switch the derivative mode; square-wave and sampled loads cannot
    /// leave central-difference mode.
    Forcing with_derivative_mode(DerivativeMode mode) const;

    /// Evaluate F(t). Defined for all t >= 0 except for sampled loads
    /// queried outside their grid, which is an error.
    Vec operator()(double t) const { return evaluate(t); }
    Vec evaluate(double t) const;

    /**
     * F'(t) (order 1) or F''(t) (order 2).
     *
     * Analytic mode returns the exact derivative and throws if no closure is
     * available. Central-difference mode applies the second-order stencils
     * with spacing `dt`, switching to one-sided second-order stencils when
     * t - dt < 0.
     */
    Vec derivative(double t, int order, double dt = 0.0) const;

    /// F, F' and F'' together. In central-difference mode at an interior
    /// point this costs exactly three evaluations of F.
    ForcingSamples samples(double t, double dt) const;

  private:
    Forcing() = default;
    Vec analytic_first(double t) const;
    Vec analytic_second(double t) const;

    int n_ = 0;
    ForcingKind kind_ = ForcingKind::zero;
    DerivativeMode mode_ = DerivativeMode::analytic;

    // sinusoid / square-wave banks
    Vec amp_, omega_, phase_;
    // pulse
    double mu_ = 0.0, tstar_ = 0.0;
    // analytic closures
    Fn value_, first_, second_;
    // sampled data
    Vec times_;
    Mat values_;
    int interp_order_ = 1;
};

}  // namespace sdyn
