#include "sdyn/compensation.hpp"

namespace sdyn {

namespace {

// Dense product helpers built from column solves; M^{-1} itself is never
// materialized, so sparse mass matrices stay factorization-backed.
struct SolveProducts {
    Mat minv_C;  // M^{-1} C
    Mat minv_K;  // M^{-1} K

    SolveProducts(const SecondOrderSystem& sys)
        : minv_C(sys.solve_mass(sys.damping().to_dense())),
          minv_K(sys.solve_mass(sys.stiffness().to_dense())) {}
};

}  // namespace

void CompensatedSystem::require_parameters(double gamma, double beta) const {
    if (kind_ != CompensationKind::fourth_order) return;
    // exact comparison on the configured values, not a floating tolerance
    if (gamma != 0.5 || beta != 1.0 / 6.0)
        throw CompensationError(
            "fourth-order compensation requires gamma = 1/2 and beta = 1/6 exactly");
}

CompensatedSystem damping_compensation(const SecondOrderSystem& sys,
                                       const StepperConfig& cfg) {
    const double dt = cfg.dt;
    const double g = cfg.gamma;
    const double b = cfg.beta;
    const Mat C = sys.damping().to_dense();
    const Mat K = sys.stiffness().to_dense();
    SolveProducts p(sys);

    const Mat C_minvC = C * p.minv_C;
    const Mat C1 = (g - 0.5) * (C_minvC - K);
    const Mat C2 = ((g - 0.5) * (g - 0.5) - 1.0 / 12.0) * (C_minvC * p.minv_C) -
                   (g * g - 0.5 * g - b + 1.0 / 12.0) * (K * p.minv_C) +
                   (1.0 / 12.0) * (C * p.minv_K);
    Mat C_hat = C + dt * C1 + dt * dt * C2;

    SecondOrderSystem realized(sys.mass(), SquareMat(std::move(C_hat)), sys.stiffness(),
                               sys.forcing(), sys.q0(), sys.v0());
    return CompensatedSystem(CompensationKind::damping, dt, sys, std::move(realized));
}

CompensatedSystem fourth_order_compensation(const SecondOrderSystem& sys, double dt) {
    const Mat C = sys.damping().to_dense();
    const Mat K = sys.stiffness().to_dense();
    SolveProducts p(sys);
    const double c = dt * dt / 12.0;

    Mat C_hat = C + c * (C * p.minv_K + K * p.minv_C - C * (p.minv_C * p.minv_C));
    Mat K_hat = K + c * (K * p.minv_K - C * (p.minv_C * p.minv_K));

    const bool damped = !sys.damping().is_zero();
    auto f_hat = [sys, dt, c, damped](double t) {
        const ForcingSamples f = sys.forcing().samples(t, dt);
        const Vec s = sys.solve_mass(f.value);
        Vec out = f.value + c * (sys.stiffness().apply(s) - f.second);
        if (damped) {
            out += c * sys.damping().apply(Vec(sys.solve_mass(f.first)));
            out -= c * sys.damping().apply(
                       Vec(sys.solve_mass(Vec(sys.damping().apply(s)))));
        }
        return out;
    };

    SecondOrderSystem realized(sys.mass(), SquareMat(std::move(C_hat)),
                               SquareMat(std::move(K_hat)),
                               Forcing::analytic(sys.dof(), f_hat), sys.q0(), sys.v0());
    return CompensatedSystem(CompensationKind::fourth_order, dt, sys,
                             std::move(realized));
}

Vec compensated_forcing_eval(const CompensatedSystem& comp, double t, double dt) {
    if (comp.kind() != CompensationKind::fourth_order)
        return comp.base().forcing()(t);
    if (dt != comp.dt())
        throw CompensationError(
            "compensated forcing queried with a different dt than it was built for");
    return comp.system().forcing()(t);
}

}  // namespace sdyn
