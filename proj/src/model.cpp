#include "sdyn/model.hpp"

#include <cstring>

namespace sdyn {

namespace {

void fnv_mix(std::uint64_t& h, const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void fnv_mix_double(std::uint64_t& h, double x) { fnv_mix(h, &x, sizeof x); }

void fnv_mix_mat(std::uint64_t& h, const SquareMat& m) {
    if (m.storage() == Storage::dense) {
        const Mat& d = m.dense();
        fnv_mix(h, d.data(), sizeof(double) * d.size());
    } else {
        const SpMat& s = m.sparse();
        for (int k = 0; k < s.outerSize(); ++k)
            for (SpMat::InnerIterator it(s, k); it; ++it) {
                fnv_mix_double(h, static_cast<double>(it.row()));
                fnv_mix_double(h, static_cast<double>(it.col()));
                fnv_mix_double(h, it.value());
            }
    }
}

}  // namespace

SecondOrderSystem::SecondOrderSystem(SquareMat M, SquareMat C, SquareMat K,
                                     Forcing forcing, Vec q0, Vec v0) {
    const int n = M.rows();
    if (C.rows() != n || K.rows() != n)
        throw DimensionError("SecondOrderSystem: M, C, K dimensions differ");
    if (q0.size() != n || v0.size() != n)
        throw DimensionError("SecondOrderSystem: initial conditions have wrong length");
    if (forcing.dim() != n)
        throw DimensionError("SecondOrderSystem: forcing dimension mismatch");

    auto p = std::make_shared<Payload>(Payload{
        n,
        (M.storage() == Storage::sparse && C.storage() == Storage::sparse &&
         K.storage() == Storage::sparse)
            ? Storage::sparse
            : Storage::dense,
        std::move(M), std::move(C), std::move(K), std::move(forcing),
        std::move(q0), std::move(v0), LuFactor(), 0});
    p->m_lu = LuFactor(p->M, "mass matrix");

    std::uint64_t h = 1469598103934665603ull;
    fnv_mix_double(h, n);
    fnv_mix_mat(h, p->M);
    fnv_mix_mat(h, p->C);
    fnv_mix_mat(h, p->K);
    fnv_mix(h, p->q0.data(), sizeof(double) * p->q0.size());
    fnv_mix(h, p->v0.data(), sizeof(double) * p->v0.size());
    p->digest = h;

    p_ = std::move(p);
}

Vec SecondOrderSystem::acceleration(double t, const Vec& q, const Vec& v) const {
    Vec rhs = p_->forcing(t);
    if (!p_->C.is_zero()) rhs -= p_->C.apply(v);
    rhs -= p_->K.apply(q);
    return p_->m_lu.solve(rhs);
}

SecondOrderSystem SecondOrderSystem::with_forcing(Forcing f) const {
    return SecondOrderSystem(p_->M, p_->C, p_->K, std::move(f), p_->q0, p_->v0);
}

double total_energy(const SecondOrderSystem& sys, const Vec& q, const Vec& v) {
    if (q.size() != sys.dof() || v.size() != sys.dof())
        throw DimensionError("total_energy: state dimension mismatch");
    return 0.5 * v.dot(sys.mass().apply(v)) + 0.5 * q.dot(sys.stiffness().apply(q));
}

Vec FirstOrderView::field(double t, const Vec& y) const {
    const int n = sys_.dof();
    if (y.size() != dim()) throw DimensionError("FirstOrderView: state size mismatch");
    Vec out(dim());
    if (autonomous_) {
        const double tau = y[0];
        out[0] = 1.0;
        out.segment(1, n) = y.segment(1 + n, n);
        out.segment(1 + n, n) = sys_.acceleration(tau, y.segment(1, n), y.segment(1 + n, n));
    } else {
        out.head(n) = y.tail(n);
        out.tail(n) = sys_.acceleration(t, y.head(n), y.tail(n));
    }
    return out;
}

Vec FirstOrderView::initial_state() const {
    const int n = sys_.dof();
    Vec y(dim());
    if (autonomous_) {
        y[0] = 0.0;
        y.segment(1, n) = sys_.q0();
        y.segment(1 + n, n) = sys_.v0();
    } else {
        y.head(n) = sys_.q0();
        y.tail(n) = sys_.v0();
    }
    return y;
}

Vec FirstOrderView::q_block(const Vec& y) const {
    const int n = sys_.dof();
    return autonomous_ ? y.segment(1, n) : y.head(n);
}

Vec FirstOrderView::v_block(const Vec& y) const {
    const int n = sys_.dof();
    return autonomous_ ? y.segment(1 + n, n) : y.tail(n);
}

FirstOrderView first_order_view(const SecondOrderSystem& sys, bool autonomous) {
    return FirstOrderView(sys, autonomous);
}

}  // namespace sdyn
