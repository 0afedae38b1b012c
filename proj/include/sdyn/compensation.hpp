#pragma once

/**
 * @file compensation.hpp
 * @brief Pre-distortion of system parameters so that the Newmark scheme's
 *        own distortion cancels through a chosen order of the time step.
 *
 * Two constructions:
 *  - damping compensation: a modified damping matrix C^ that removes the
 *    scheme's numerical damping through second order, for any (gamma, beta);
 *  - fourth-order compensation: modified (C^, K^, F^) that raise the scheme
 *    to fourth order, valid only for gamma = 1/2, beta = 1/6.
 *
 * Compensated matrices are built for one specific time step and must not be
 * reused with another.
 */

#include "sdyn/integrators.hpp"
#include "sdyn/model.hpp"

#include <optional>

namespace sdyn {

enum class CompensationKind { damping, fourth_order };

struct CompensationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * A system with compensated parameters, ready to hand to any stepper.
 * The realized system keeps the original M, q0 and v0; only C, K and the
 * forcing differ. Fourth-order compensation records the (1/2, 1/6)
 * parameter requirement, which callers check with `require_parameters`.
 */
class CompensatedSystem {
  public:
    CompensationKind kind() const { return kind_; }
    double dt() const { return dt_; }
    const SecondOrderSystem& system() const { return system_; }
    const SecondOrderSystem& base() const { return base_; }

    const SquareMat& damping() const { return system_.damping(); }
    const SquareMat& stiffness() const { return system_.stiffness(); }

    /// Throws unless (gamma, beta) match the kind's requirement exactly.
    void require_parameters(double gamma, double beta) const;

  private:
    friend CompensatedSystem damping_compensation(const SecondOrderSystem&,
                                                  const StepperConfig&);
    friend CompensatedSystem fourth_order_compensation(const SecondOrderSystem&, double);
    CompensatedSystem(CompensationKind kind, double dt, SecondOrderSystem base,
                      SecondOrderSystem realized)
        : kind_(kind), dt_(dt), base_(std::move(base)), system_(std::move(realized)) {}

    CompensationKind kind_;
    double dt_;
    SecondOrderSystem base_;
    SecondOrderSystem system_;
};

/**
 * Numerical-damping-eliminating compensation
 *   C^ = C + dt C1 + dt^2 C2,
 *   C1 = (g - 1/2)(C M^{-1} C - K),
 *   C2 = ((g - 1/2)^2 - 1/12) C M^{-1} C M^{-1} C
 *        - (g^2 - g/2 - b + 1/12) K M^{-1} C + 1/12 C M^{-1} K.
 * K and F are unchanged.
 */
CompensatedSystem damping_compensation(const SecondOrderSystem& sys,
                                       const StepperConfig& cfg);

/**
 * Fourth-order compensation for gamma = 1/2, beta = 1/6:
 *   C^ = C + dt^2/12 (C M^{-1} K + K M^{-1} C - C M^{-1} C M^{-1} C),
 *   K^ = K + dt^2/12 (K M^{-1} K - C M^{-1} C M^{-1} K),
 *   F^ = F + dt^2/12 (K M^{-1} F + C M^{-1} F' - C M^{-1} C M^{-1} F - F'').
 * Forcing derivatives are analytic or central-difference according to the
 * forcing's mode; central stencils use this dt.
 */
CompensatedSystem fourth_order_compensation(const SecondOrderSystem& sys, double dt);

/// Evaluate the compensated forcing F^(t). In central-difference mode this
/// costs exactly three evaluations of the base forcing at an interior t.
Vec compensated_forcing_eval(const CompensatedSystem& comp, double t, double dt);

}  // namespace sdyn
