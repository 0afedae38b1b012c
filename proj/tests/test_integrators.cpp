#include "sdyn/integrators.hpp"

#include "sdyn/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <thread>

using namespace sdyn;

namespace {

SecondOrderSystem oscillator(double omega, double q0 = 1.0, double v0 = 0.0) {
    Mat M(1, 1), K(1, 1);
    M << 1.0;
    K << omega * omega;
    Vec q(1), v(1);
    q << q0;
    v << v0;
    return SecondOrderSystem(SquareMat(M), SquareMat(Mat(Mat::Zero(1, 1))), SquareMat(K),
                             Forcing::zero(1), q, v);
}

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

}  // namespace

TEST_CASE("initial acceleration at static equilibrium is zero") {
    const double f0 = 0.8;
    Mat M(1, 1), K(1, 1);
    M << 2.0;
    K << 5.0;
    Vec q0(1), v0 = Vec::Zero(1);
    q0 << f0 / 5.0;
    auto constant = Forcing::analytic(
        1, [f0](double) { Vec v(1); v << f0; return v; },
        [](double) { return Vec(Vec::Zero(1)); },
        [](double) { return Vec(Vec::Zero(1)); });
    SecondOrderSystem sys(SquareMat(M), SquareMat(Mat(Mat::Zero(1, 1))), SquareMat(K),
                          constant, q0, v0);
    CHECK(initial_acceleration(sys, q0, v0).norm() < 1e-15);
}

TEST_CASE("initial acceleration of a displaced unit system") {
    Mat I = Mat::Identity(2, 2);
    Vec e1(2);
    e1 << 1.0, 0.0;
    SecondOrderSystem sys(SquareMat(I), SquareMat(Mat(Mat::Zero(2, 2))), SquareMat(I),
                          Forcing::zero(2), e1, Vec::Zero(2));
    const Vec a0 = initial_acceleration(sys, e1, Vec::Zero(2));
    CHECK((a0 + e1).norm() < 1e-15);
}

TEST_CASE("initial acceleration of the bundled 3-DoF system closes the residual") {
    const SecondOrderSystem sys = paper_3dof();
    const Vec a0 = initial_acceleration(sys, sys.q0(), sys.v0());
    const Vec residual = sys.mass().apply(a0) + sys.damping().apply(sys.v0()) +
                         sys.stiffness().apply(sys.q0()) - sys.forcing()(0.0);
    CHECK(residual.norm() < 1e-12);
}

TEST_CASE("newmark step on a free particle is exact") {
    Mat I = Mat::Identity(2, 2);
    SecondOrderSystem sys(SquareMat(I), SquareMat(Mat(Mat::Zero(2, 2))),
                          SquareMat(Mat(Mat::Zero(2, 2))), Forcing::zero(2),
                          Vec::Zero(2), Vec::Ones(2));
    State s{0.0, sys.q0(), sys.v0(), initial_acceleration(sys, sys.q0(), sys.v0())};
    for (auto [gamma, beta] : {std::pair{0.5, 0.25}, {0.7, 0.1}, {0.55, 0.28}}) {
        StepperConfig cfg{0.3, gamma, beta, std::nullopt, Method::newmark};
        const State next = newmark_step(sys, s, cfg);
        CHECK((next.q - (s.q + 0.3 * s.v)).norm() < 1e-15);
        CHECK((next.v - s.v).norm() < 1e-15);
        CHECK(next.a.norm() < 1e-15);
    }
}

TEST_CASE("static equilibrium is a fixed point of the newmark step") {
    const double f0 = 2.0;
    Mat M(1, 1), C(1, 1), K(1, 1);
    M << 1.5;
    C << 0.3;
    K << 4.0;
    auto constant = Forcing::analytic(
        1, [f0](double) { Vec v(1); v << f0; return v; },
        [](double) { return Vec(Vec::Zero(1)); },
        [](double) { return Vec(Vec::Zero(1)); });
    Vec q0(1);
    q0 << f0 / 4.0;
    SecondOrderSystem sys(SquareMat(M), SquareMat(C), SquareMat(K), constant, q0,
                          Vec::Zero(1));
    State s{0.0, q0, Vec::Zero(1), Vec::Zero(1)};
    StepperConfig cfg{0.25, 0.55, 0.28, std::nullopt, Method::newmark};
    const State next = newmark_step(sys, s, cfg);
    CHECK(next.t == doctest::Approx(0.25));
    CHECK((next.q - q0).norm() < 1e-14);
    CHECK(next.v.norm() < 1e-14);
    CHECK(next.a.norm() < 1e-14);
}

TEST_CASE("newmark step matches the closed-form scalar solve") {
    // independent oracle: solve the three scalar update equations directly
    const double omega = 2.0 * M_PI;
    const double dt = 0.1, gamma = 0.5, beta = 0.25;
    const double k = omega * omega;
    const double q = 1.0, v = 0.0;
    const double a = -k * q;
    // (1 + beta dt^2 k) a1 = -k (q + dt v + (1 - 2 beta) dt^2/2 a)
    const double a1 =
        -k * (q + dt * v + (1 - 2 * beta) * dt * dt / 2.0 * a) / (1.0 + beta * dt * dt * k);
    const double q1 = q + dt * v + dt * dt / 2.0 * ((1 - 2 * beta) * a + 2 * beta * a1);
    const double v1 = v + dt * ((1 - gamma) * a + gamma * a1);

    const SecondOrderSystem sys = oscillator(omega);
    State s{0.0, sys.q0(), sys.v0(), initial_acceleration(sys, sys.q0(), sys.v0())};
    StepperConfig cfg{dt, gamma, beta, std::nullopt, Method::newmark};
    const State next = newmark_step(sys, s, cfg);
    CHECK(next.q[0] == doctest::Approx(q1).epsilon(1e-12));
    CHECK(next.v[0] == doctest::Approx(v1).epsilon(1e-12));
    CHECK(next.a[0] == doctest::Approx(a1).epsilon(1e-12));
}

TEST_CASE("newmark discrete equilibrium holds after every step") {
    std::mt19937 rng(99);
    const SecondOrderSystem sys = random_damped_system(rng, 3);
    StepperConfig cfg{0.05, 0.6, 0.3, std::nullopt, Method::newmark};
    const Trajectory traj = integrate(sys, cfg, 1.0);
    for (const auto& s : traj.states) {
        const Vec residual = sys.mass().apply(s.a) + sys.damping().apply(s.v) +
                             sys.stiffness().apply(s.q) - sys.forcing()(s.t);
        const double scale = sys.mass().apply(s.a).norm() +
                             sys.stiffness().apply(s.q).norm() + sys.forcing()(s.t).norm();
        CHECK(residual.norm() <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("generalized-alpha optimal parameters") {
    const auto p1 = generalized_alpha_params(1.0);
    CHECK(p1.alpha_m == doctest::Approx(0.5));
    CHECK(p1.alpha_f == doctest::Approx(0.5));
    CHECK(p1.gamma == doctest::Approx(0.5));
    CHECK(p1.beta == doctest::Approx(0.25));

    const auto p = generalized_alpha_params(0.9);
    CHECK(p.gamma == doctest::Approx(0.55263157894736836).epsilon(1e-12));
    CHECK(p.beta == doctest::Approx(0.27700831024930744).epsilon(1e-12));
}

TEST_CASE("generalized-alpha with alpha_f = alpha_m = 0 is bit-identical to newmark") {
    std::mt19937 rng(7);
    const SecondOrderSystem sys = random_damped_system(rng, 2);
    State s{0.0, sys.q0(), sys.v0(), initial_acceleration(sys, sys.q0(), sys.v0())};
    StepperConfig cfg{0.07, 0.55, 0.28, std::nullopt, Method::newmark};
    for (int j = 0; j < 5; ++j) {
        const State a = newmark_step(sys, s, cfg);
        const State b = generalized_alpha_step(sys, s, cfg);  // rho_inf unset -> (0,0)
        CHECK(a.q == b.q);
        CHECK(a.v == b.v);
        CHECK(a.a == b.a);
        s = a;
    }
}

TEST_CASE("rk4 oscillator step matches the degree-4 Taylor of the rotation") {
    const SecondOrderSystem sys = oscillator(1.0);
    const FirstOrderView view = first_order_view(sys);
    // oscillator step: compare against the degree-4 Taylor of the rotation
    Vec y(2);
    y << 1.0, 0.0;
    const double dt = 0.1;
    const Vec stepped = rk4_step(view, y, 0.0, dt);
    Mat A(2, 2);
    A << 0, 1, -1, 0;
    Mat T = Mat::Identity(2, 2);
    Mat P = Mat::Identity(2, 2);
    for (int k = 1; k <= 4; ++k) {
        P = Mat(P * (dt * A)) / k;
        T += P;
    }
    const Vec expected = T * y;
    CHECK((stepped - expected).norm() < 1e-14);
}

TEST_CASE("rk4 scalar exponential value") {
    // q'' = q with q(0) = 1, q'(0) = 1 makes both components evolve as e^t
    Mat M(1, 1), K(1, 1);
    M << 1.0;
    K << -1.0;
    SecondOrderSystem sys(SquareMat(M), SquareMat(Mat(Mat::Zero(1, 1))), SquareMat(K),
                          Forcing::zero(1), Vec::Ones(1), Vec::Ones(1));
    const FirstOrderView view = first_order_view(sys);
    Vec y(2);
    y << 1.0, 1.0;
    const Vec stepped = rk4_step(view, y, 0.0, 0.1);
    CHECK(stepped[0] == doctest::Approx(1.1051708333333333).epsilon(1e-15));
}

TEST_CASE("explicit euler step on the unit oscillator") {
    const SecondOrderSystem sys = unit_oscillator();
    const FirstOrderView view = first_order_view(sys);
    Vec y(2);
    y << 1.0, 0.0;
    const Vec stepped = explicit_euler_step(view, y, 0.0, 0.1);
    CHECK(stepped[0] == doctest::Approx(1.0));
    CHECK(stepped[1] == doctest::Approx(-0.1));
}

TEST_CASE("explicit euler amplitude growth follows the distorted envelope") {
    const SecondOrderSystem sys = unit_oscillator();
    StepperConfig cfg{0.1, 0.5, 0.25, std::nullopt, Method::explicit_euler};
    const Trajectory traj = integrate(sys, cfg, 10.0);
    const auto& last = traj.back();
    const double amplitude = std::hypot(last.q[0], last.v[0]);
    const double envelope = std::exp(0.5 * 0.1 * 1.0 * 10.0);
    CHECK(std::abs(amplitude - envelope) / envelope < 0.05);
}

TEST_CASE("integrate rejects t_end that is not a multiple of dt") {
    const SecondOrderSystem sys = unit_oscillator();
    StepperConfig cfg{0.3, 0.5, 0.25, std::nullopt, Method::newmark};
    CHECK_THROWS_AS(integrate(sys, cfg, 1.0), IntegrationError);
}

TEST_CASE("zero-step integration returns only the initial state") {
    const SecondOrderSystem sys = unit_oscillator();
    StepperConfig cfg{0.5, 0.5, 0.25, std::nullopt, Method::newmark};
    const Trajectory traj = integrate(sys, cfg, 0.0);
    REQUIRE(traj.states.size() == 1);
    CHECK(traj.states[0].q == sys.q0());
    CHECK(traj.states[0].v == sys.v0());
}

TEST_CASE("free particle trajectory is linear in t with uniform grid") {
    Mat I = Mat::Identity(1, 1);
    SecondOrderSystem sys(SquareMat(I), SquareMat(Mat(Mat::Zero(1, 1))),
                          SquareMat(Mat(Mat::Zero(1, 1))), Forcing::zero(1),
                          Vec::Zero(1), Vec::Ones(1));
    StepperConfig cfg{0.125, 0.5, 0.25, std::nullopt, Method::newmark};
    const Trajectory traj = integrate(sys, cfg, 1.0);
    REQUIRE(traj.states.size() == 9);
    for (size_t j = 0; j < traj.states.size(); ++j) {
        CHECK(traj.states[j].t == doctest::Approx(0.125 * j).epsilon(1e-15));
        CHECK(traj.states[j].q[0] == doctest::Approx(0.125 * j).epsilon(1e-12));
    }
}

TEST_CASE("reference solution matches the closed form of the damped driven 1-DoF") {
    const SecondOrderSystem sys = oscillator_1dof();
    const double m = 1.0, xi = 0.02, omega = 2.0 * M_PI;
    const double c = 2.0 * xi * omega, k = omega * omega;
    const double f0 = 0.8, w = 10.0 * omega;

    // particular solution via the complex transfer function, homogeneous
    // part matched to the initial conditions
    const std::complex<double> den(k - m * w * w, c * w);
    const std::complex<double> amp = f0 / den;
    auto qp = [&](double t) { return (amp * std::exp(std::complex<double>(0, w * t))).real(); };
    auto vp = [&](double t) {
        return (amp * std::complex<double>(0, w) * std::exp(std::complex<double>(0, w * t)))
            .real();
    };
    const double omd = omega * std::sqrt(1.0 - xi * xi);
    const double A = 1.0 - qp(0.0);
    const double B = (1.0 - vp(0.0) + xi * omega * A) / omd;
    auto exact_q = [&](double t) {
        return std::exp(-xi * omega * t) * (A * std::cos(omd * t) + B * std::sin(omd * t)) +
               qp(t);
    };
    auto exact_v = [&](double t) {
        const double e = std::exp(-xi * omega * t);
        return e * (-xi * omega * (A * std::cos(omd * t) + B * std::sin(omd * t)) +
                    omd * (-A * std::sin(omd * t) + B * std::cos(omd * t))) +
               vp(t);
    };

    const Trajectory ref = reference_solution(sys, 0.1, 0.4);
    const auto& last = ref.back();
    const double scale = std::hypot(exact_q(0.4), exact_v(0.4));
    const double err =
        std::hypot(last.q[0] - exact_q(0.4), last.v[0] - exact_v(0.4)) / scale;
    CHECK(err < 1e-8);
}

TEST_CASE("reference solution is self-consistent under fine-step halving") {
    const SecondOrderSystem sys = oscillator_1dof();
    const Trajectory ref = reference_solution(sys, 0.05, 0.4);
    // integrate once more with the fine step halved (dt/200)
    const FirstOrderView view = first_order_view(sys);
    Vec y = view.initial_state();
    const double fine = 0.05 / 200.0;
    for (int j = 0; j < 8 * 200; ++j) y = rk4_step(view, y, j * fine, fine);
    const double diff =
        std::hypot(ref.back().q[0] - y[0], ref.back().v[0] - y[1]);
    CHECK(diff < 1e-10);
}

TEST_CASE("concurrent integration on a shared system is deterministic") {
    const SecondOrderSystem sys = paper_3dof();
    StepperConfig cfg{0.1, 0.55, 0.28, std::nullopt, Method::newmark};
    Trajectory a, b;
    std::thread ta([&] { a = integrate(sys, cfg, 10.0); });
    std::thread tb([&] { b = integrate(sys, cfg, 10.0); });
    ta.join();
    tb.join();
    REQUIRE(a.states.size() == b.states.size());
    for (size_t j = 0; j < a.states.size(); ++j) {
        CHECK(a.states[j].q == b.states[j].q);
        CHECK(a.states[j].v == b.states[j].v);
    }
}
