#include "sdyn/bea.hpp"

#include "sdyn/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdyn;

namespace {

SecondOrderSystem random_damped_system(std::mt19937& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randn = [&](int r, int c) {
        Mat m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
        return m;
    };
    Mat A = randn(n, n);
    Mat M = A * A.transpose() + n * Mat::Identity(n, n);
    A = randn(n, n);
    Mat K = A * A.transpose() + n * Mat::Identity(n, n);
    A = randn(n, n);
    Mat C = 0.1 * (A * A.transpose()) + 0.05 * Mat::Identity(n, n);
    Vec amp(n), omega(n);
    for (int i = 0; i < n; ++i) {
        amp[i] = gauss(rng);
        omega[i] = 0.5 + 2.5 * std::abs(gauss(rng));
    }
    Vec q0(n), v0(n);
    for (int i = 0; i < n; ++i) {
        q0[i] = gauss(rng);
        v0[i] = gauss(rng);
    }
    return SecondOrderSystem(SquareMat(M), SquareMat(C), SquareMat(K),
                             Forcing::sinusoid_bank(amp, omega), q0, v0);
}

Vec dvf_state_derivative(const SecondOrderSystem& sys, const StepperConfig& cfg,
                         double tau, const Vec& y) {
    const int n = sys.dof();
    const DvfValue d = dvf_eval(sys, cfg, tau, y.head(n), y.tail(n));
    Vec out(2 * n);
    out.head(n) = d.q_dot;
    out.tail(n) = d.v_dot;
    return out;
}

// exact-flow step of the truncated distorted field via RK4 at dt/100
Vec dvf_flow_step(const SecondOrderSystem& sys, const StepperConfig& cfg, double t0,
                  Vec y) {
    const double fine = cfg.dt / 100.0;
    for (int k = 0; k < 100; ++k) {
        const double t = t0 + k * fine;
        const Vec k1 = dvf_state_derivative(sys, cfg, t, y);
        const Vec k2 = dvf_state_derivative(sys, cfg, t + fine / 2, y + (fine / 2) * k1);
        const Vec k3 = dvf_state_derivative(sys, cfg, t + fine / 2, y + (fine / 2) * k2);
        const Vec k4 = dvf_state_derivative(sys, cfg, t + fine, y + fine * k3);
        y += (fine / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
}

}  // namespace

TEST_CASE("distortion operators agree with explicit dense computation") {
    std::mt19937 rng(11);
    const SecondOrderSystem sys = random_damped_system(rng, 3);
    DistortionCoefficients coeff(sys, 0.1, 0.55, 0.28);
    CHECK(coeff.eta() == doctest::Approx(0.5 * 0.55 - 0.28 - 1.0 / 12.0).epsilon(1e-15));

    const Mat minv = sys.mass().to_dense().inverse();
    const Mat G = minv * sys.damping().to_dense();
    const Mat H = minv * sys.stiffness().to_dense();
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = gauss(rng);
    CHECK((coeff.G(x) - G * x).norm() <= 1e-12 * (G * x).norm());
    CHECK((coeff.H(x) - H * x).norm() <= 1e-12 * (H * x).norm());

    const double g2 = 0.55 - 0.5;
    const Mat B = 0.1 * g2 * Mat::Identity(3, 3) -
                  0.01 * (g2 * g2 + 1.0 / 12.0) * sys.damping().to_dense() * minv;
    CHECK((coeff.B(x) - B * x).norm() <= 1e-12 * (B * x).norm());
}

TEST_CASE("a_field reduces to -Hv for undamped free systems") {
    const SecondOrderSystem sys = paper_3dof(false, Builtin3DofForcing::zero);
    Vec q(3), v(3);
    q << 0.1, -0.2, 0.3;
    v << 1.0, 0.5, -0.7;
    const Vec a = a_field(sys, 0.0, q, v);
    const Vec hv = sys.solve_mass(sys.stiffness().apply(v));
    CHECK((a - hv).norm() <= 1e-14 * hv.norm());
}

TEST_CASE("a_field at rest under constant forcing keeps only the G M^-1 F term") {
    std::mt19937 rng(21);
    const SecondOrderSystem base = random_damped_system(rng, 2);
    Vec f0(2);
    f0 << 1.5, -0.25;
    const SecondOrderSystem sys = base.with_forcing(Forcing::analytic(
        2, [f0](double) { return f0; }, [](double) { return Vec(Vec::Zero(2)); },
        [](double) { return Vec(Vec::Zero(2)); }));
    const Vec a = a_field(sys, 0.3, Vec::Zero(2), Vec::Zero(2));
    const Vec expected = sys.solve_mass(sys.damping().apply(sys.solve_mass(f0)));
    CHECK((a - expected).norm() <= 1e-13 * expected.norm());
}

TEST_CASE("a_field agrees with a dense explicit-inverse oracle") {
    const SecondOrderSystem sys = paper_3dof();
    const Mat minv = sys.mass().to_dense().inverse();
    const Mat G = minv * sys.damping().to_dense();
    const Mat H = minv * sys.stiffness().to_dense();
    const Vec q = sys.q0(), v = sys.v0();
    const Vec f = sys.forcing()(0.0);
    const Vec fp = sys.forcing().derivative(0.0, 1);
    const Vec expected = -G * H * q + (H - G * G) * v + G * (minv * f) - minv * fp;
    const Vec got = a_field(sys, 0.0, q, v);
    CHECK((got - expected).norm() <= 1e-10 * std::max(1.0, expected.norm()));
}

TEST_CASE("dvf at dt = 0 is exactly the original field") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const SecondOrderSystem sys = random_damped_system(rng, 2);
        StepperConfig cfg{0.0, 0.55, 0.28, std::nullopt, Method::newmark};
        cfg.dt = 0.0;
        Vec q(2), v(2);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < 2; ++i) {
            q[i] = gauss(rng);
            v[i] = gauss(rng);
        }
        const DvfValue d = dvf_eval(sys, cfg, 0.7, q, v);
        CHECK(d.tau_dot == 1.0);
        CHECK((d.q_dot - v).norm() == 0.0);
        const Vec acc = sys.acceleration(0.7, q, v);
        CHECK((d.v_dot - acc).norm() <= 1e-14 * acc.norm());
    }
}

TEST_CASE("gamma = 1/2 removes the first-order correction when C = 0") {
    const SecondOrderSystem sys = paper_3dof(false);
    StepperConfig cfg{0.2, 0.5, 0.28, std::nullopt, Method::newmark};
    Vec q(3), v1(3), v2(3);
    q << 0.1, 0.2, -0.3;
    v1 << 1.0, -2.0, 0.5;
    v2 << -0.4, 0.9, 2.0;
    // the dt^2 correction of the v-block must not depend on v when C = 0
    const Vec r1 = dvf_eval(sys, cfg, 1.0, q, v1).v_dot - sys.acceleration(1.0, q, v1);
    const Vec r2 = dvf_eval(sys, cfg, 1.0, q, v2).v_dot - sys.acceleration(1.0, q, v2);
    CHECK((r1 - r2).norm() <= 1e-13);

    // with damping present the same probe must detect v-dependence
    const SecondOrderSystem damped = paper_3dof(true);
    const Vec s1 =
        dvf_eval(damped, cfg, 1.0, q, v1).v_dot - damped.acceleration(1.0, q, v1);
    const Vec s2 =
        dvf_eval(damped, cfg, 1.0, q, v2).v_dot - damped.acceleration(1.0, q, v2);
    CHECK((s1 - s2).norm() > 1e-8);
}

TEST_CASE("q-block correction carries no first-order term") {
    const SecondOrderSystem sys = paper_3dof();
    Vec q(3), v(3);
    q << 0.1, -0.05, 0.2;
    v << 0.3, 0.1, -0.2;
    std::vector<double> dts, gaps;
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
        StepperConfig cfg{dt, 0.55, 0.28, std::nullopt, Method::newmark};
        const Vec qdot = dvf_eval(sys, cfg, 0.5, q, v).q_dot;
        dts.push_back(dt);
        gaps.push_back((qdot - v).norm());
    }
    const double slope = log_log_slope(dts, gaps);
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
}

TEST_CASE("one newmark step matches the exact flow of the truncated field to third order") {
    std::mt19937 rng(41);
    const SecondOrderSystem sys = random_damped_system(rng, 2);
    std::vector<double> dts, errs;
    for (double dt : {0.05, 0.025, 0.0125, 0.00625, 0.003125}) {
        StepperConfig cfg{dt, 0.55, 0.28, std::nullopt, Method::newmark};
        State s{0.0, sys.q0(), sys.v0(), initial_acceleration(sys, sys.q0(), sys.v0())};
        const State stepped = newmark_step(sys, s, cfg);
        Vec y0(4);
        y0 << sys.q0(), sys.v0();
        const Vec flowed = dvf_flow_step(sys, cfg, 0.0, y0);
        Vec ys(4);
        ys << stepped.q, stepped.v;
        dts.push_back(dt);
        errs.push_back((ys - flowed).norm());
    }
    const double slope = log_log_slope(dts, errs);
    CHECK(slope > 2.7);
    CHECK(slope < 3.3);
}

TEST_CASE("distorted system at dt = 0 returns the original matrices") {
    std::mt19937 rng(51);
    const SecondOrderSystem sys = random_damped_system(rng, 3);
    StepperConfig cfg{0.0, 0.55, 0.28, std::nullopt, Method::newmark};
    const DistortedSystem dist = distorted_system(sys, cfg);
    CHECK((dist.damping() - sys.damping().to_dense()).norm() == 0.0);
    CHECK((dist.stiffness() - sys.stiffness().to_dense()).norm() == 0.0);
    CHECK(dist.qdot0_correction().norm() == 0.0);
    const Vec f = dist.forcing(0.4);
    CHECK((f - sys.forcing()(0.4)).norm() == 0.0);
}

TEST_CASE("gamma = 1/2 distorted damping matches its reduced closed form") {
    std::mt19937 rng(61);
    const SecondOrderSystem sys = random_damped_system(rng, 3);
    const double beta = 0.2, dt = 0.15;
    StepperConfig cfg{dt, 0.5, beta, std::nullopt, Method::newmark};
    const DistortedSystem dist = distorted_system(sys, cfg);

    const Mat C = sys.damping().to_dense();
    const Mat K = sys.stiffness().to_dense();
    const Mat minv = sys.mass().to_dense().inverse();
    const Mat reduced =
        C + (dt * dt / 12.0) * ((1.0 - 12.0 * beta) * K * minv * C -
                                C * minv * (K - C * minv * C));
    CHECK((dist.damping() - reduced).norm() <= 1e-11 * reduced.norm());
}

TEST_CASE("undamped gamma = 1/2 distorted system keeps C~ = 0") {
    const SecondOrderSystem sys = paper_3dof(false);
    StepperConfig cfg{0.3, 0.5, 0.2, std::nullopt, Method::newmark};
    const DistortedSystem dist = distorted_system(sys, cfg);
    CHECK(dist.damping().norm() <= 1e-14);
    const double eta = 0.25 - 0.2 - 1.0 / 12.0;
    const Mat expected_K =
        sys.stiffness().to_dense() +
        (0.09 * (eta - 1.0 / 12.0)) * sys.stiffness().to_dense() *
            sys.mass().to_dense().inverse() * sys.stiffness().to_dense();
    CHECK((dist.stiffness() - expected_K).norm() <= 1e-11 * expected_K.norm());
}

TEST_CASE("euler oscillator distortion closed forms") {
    const auto d0 = euler_oscillator_distortion(1.0, 1.0, 0.0);
    CHECK(d0.m_tilde == 1.0);
    CHECK(d0.c_tilde == 0.0);
    CHECK(d0.k_tilde == 1.0);

    const auto d = euler_oscillator_distortion(1.0, 1.0, 0.1);
    CHECK(d.c_tilde == doctest::Approx(-0.1 + 0.001 / 6.0).epsilon(1e-15));
    CHECK(d.m_tilde == doctest::Approx(1.0 + 0.01 / 3.0).epsilon(1e-15));
    CHECK(d.k_tilde == doctest::Approx(1.0 - 0.01 / 12.0).epsilon(1e-15));
    CHECK(d.envelope_rate == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(d.frequency == doctest::Approx(1.0 - 0.01 / 3.0).epsilon(1e-15));
}

TEST_CASE("explicit euler iterates track the distorted closed form") {
    const SecondOrderSystem sys = unit_oscillator();
    StepperConfig cfg{0.1, 0.5, 0.25, std::nullopt, Method::explicit_euler};
    const Trajectory traj = integrate(sys, cfg, 10.0);
    const auto d = euler_oscillator_distortion(1.0, 1.0, 0.1);

    double gap_model = 0.0, gap_exact = 0.0;
    for (const auto& s : traj.states) {
        gap_model = std::max(gap_model, std::abs(s.q[0] - d.position(s.t, 1.0, 0.0)));
        gap_exact = std::max(gap_exact, std::abs(s.q[0] - std::cos(s.t)));
    }
    CHECK(gap_model * 10.0 < gap_exact);
}
