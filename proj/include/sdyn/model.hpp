#pragma once

/**
 * @file model.hpp
 * @brief Linear second-order system M q'' + C q' + K q = F(t) with initial
 *        conditions, its first-order views, and the mechanical energy.
 */

#include "sdyn/forcing.hpp"
#include "sdyn/linalg.hpp"

#include <cstdint>
#include <memory>

namespace sdyn {

/**
 * Immutable linear structural system.
 *
 * The mass matrix is factorized once at construction (a singular M is a
 * constructor error); every M^{-1}x afterwards is a solve against that
 * factorization. Instances share their payload and are safe to copy and to
 * use concurrently.
 */
class SecondOrderSystem {
  public:
    SecondOrderSystem(SquareMat M, SquareMat C, SquareMat K, Forcing forcing,
                      Vec q0, Vec v0);

    int dof() const { return p_->n; }
    Storage storage() const { return p_->storage; }

    const SquareMat& mass() const { return p_->M; }
    const SquareMat& damping() const { return p_->C; }
    const SquareMat& stiffness() const { return p_->K; }
    const Forcing& forcing() const { return p_->forcing; }
    const Vec& q0() const { return p_->q0; }
    const Vec& v0() const { return p_->v0; }

    /// M^{-1} b through the stored factorization.
    Vec solve_mass(const Vec& b) const { return p_->m_lu.solve(b); }
    /// Column-wise M^{-1} B (never materializes M^{-1} itself).
    Mat solve_mass(const Mat& b) const { return p_->m_lu.solve(b); }

    /// Acceleration M^{-1}(F(t) - C v - K q) of the continuous equation.
    Vec acceleration(double t, const Vec& q, const Vec& v) const;

    /// Same system with a different forcing (matrices and factorization shared
    /// state are rebuilt cheaply from the same storage).
    SecondOrderSystem with_forcing(Forcing f) const;

    /// FNV-1a digest over dimensions and matrix entries, for trajectory
    /// metadata.
    std::uint64_t digest() const { return p_->digest; }

  private:
    struct Payload {
        int n;
        Storage storage;
        SquareMat M, C, K;
        Forcing forcing;
        Vec q0, v0;
        LuFactor m_lu;
        std::uint64_t digest;
    };
    std::shared_ptr<const Payload> p_;
};

/// Total mechanical energy E = 1/2 v^T M v + 1/2 q^T K q.
double total_energy(const SecondOrderSystem& sys, const Vec& q, const Vec& v);

/**
 * First-order form of a SecondOrderSystem.
 *
 * Non-autonomous layout: y = (q; v), field evaluated at explicit time t.
 * Autonomous layout: y = (tau; q; v) with clock variable tau, tau' = 1 and
 * tau(0) = 0; the explicit time argument is ignored.
 */
class FirstOrderView {
  public:
    FirstOrderView(SecondOrderSystem sys, bool autonomous)
        : sys_(std::move(sys)), autonomous_(autonomous) {}

    int dim() const { return autonomous_ ? 2 * sys_.dof() + 1 : 2 * sys_.dof(); }
    bool autonomous() const { return autonomous_; }
    const SecondOrderSystem& system() const { return sys_; }

    Vec field(double t, const Vec& y) const;
    Vec initial_state() const;

    Vec q_block(const Vec& y) const;
    Vec v_block(const Vec& y) const;

  private:
    SecondOrderSystem sys_;
    bool autonomous_;
};

FirstOrderView first_order_view(const SecondOrderSystem& sys, bool autonomous = false);

}  // namespace sdyn
