#pragma once

/**
 * @file integrators.hpp
 * @brief Fixed-step one-step integrators: the Newmark family (including
 *        generalized-alpha), classical RK4 and explicit Euler on the
 *        first-order view, and the fine-step reference solver.
 */

#include "sdyn/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sdyn {

enum class Method { newmark, generalized_alpha, rk4, explicit_euler };

std::string method_name(Method m);

struct StepperConfig {
    double dt = 0.0;
    double gamma = 0.5;
    double beta = 0.25;
    std::optional<double> rho_inf;  // generalized-alpha spectral radius
    Method method = Method::newmark;
};

/// Optimal-family generalized-alpha parameters derived from rho_inf:
/// alpha_m = (2r-1)/(r+1), alpha_f = r/(r+1), gamma = 1/2 - alpha_m + alpha_f,
/// beta = 1/4 (1 - alpha_m + alpha_f)^2.
struct GeneralizedAlphaParams {
    double alpha_m, alpha_f, gamma, beta;
};
GeneralizedAlphaParams generalized_alpha_params(double rho_inf);

struct State {
    double t = 0.0;
    Vec q, v, a;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniformly spaced sequence of states plus run metadata.
struct Trajectory {
    std::vector<State> states;
    std::string method;
    StepperConfig config;
    std::uint64_t system_digest = 0;

    const State& back() const { return states.back(); }
    size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// a0 = M^{-1}(F(0) - C v0 - K q0).
Vec initial_acceleration(const SecondOrderSystem& sys, const Vec& q0, const Vec& v0);

/**
 * One-step integrator for the Newmark update, in the alpha-weighted form
 *
 *   [(1-am) M + (1-af) g dt C + (1-af) b dt^2 K] a_{j+1} = rhs,
 *
 * followed by the displacement/velocity updates with parameters (g, b).
 * Plain Newmark is exactly (am, af) = (0, 0) on the same code path, so the
 * two methods are bit-identical there. The effective matrix is factorized
 * once at construction and reused across steps.
 */
class NewmarkFamilyStepper {
  public:
    NewmarkFamilyStepper(SecondOrderSystem sys, double dt, double gamma, double beta,
                         double alpha_m = 0.0, double alpha_f = 0.0);

    State step(const State& s) const;
    const SecondOrderSystem& system() const { return sys_; }
    double dt() const { return dt_; }

  private:
    SecondOrderSystem sys_;
    double dt_, gamma_, beta_, alpha_m_, alpha_f_;
    bool has_damping_;
    LuFactor effective_;
};

/// Single Newmark step; state.a must satisfy M a = F(t) - C v - K q.
State newmark_step(const SecondOrderSystem& sys, const State& state,
                   const StepperConfig& cfg);

/// Single generalized-alpha step with parameters from cfg.rho_inf (or from
/// cfg.gamma/cfg.beta with alpha_m = alpha_f = 0 when rho_inf is unset).
State generalized_alpha_step(const SecondOrderSystem& sys, const State& state,
                             const StepperConfig& cfg);

/// Classical four-stage RK4 on a first-order view.
Vec rk4_step(const FirstOrderView& view, const Vec& y, double t, double dt);

/// y + dt f(y, t).
Vec explicit_euler_step(const FirstOrderView& view, const Vec& y, double t, double dt);

/**
 * Integrate from the system's initial conditions to t_end on the uniform
 * grid t_j = j dt, recording every step. t_end must be an integer multiple
 * of cfg.dt.
 */
Trajectory integrate(const SecondOrderSystem& sys, const StepperConfig& cfg,
                     double t_end);

/// RK4 at dt/100 on the first-order view, subsampled onto the coarse grid.
Trajectory reference_solution(const SecondOrderSystem& sys, double dt, double t_end);

/// Number of dt-steps to reach t_end; throws unless t_end is an integer
/// multiple of dt (within a tight relative tolerance).
long step_count(double dt, double t_end);

}  // namespace sdyn
