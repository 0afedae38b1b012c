#include "sdyn/forcing.hpp"

#include <cmath>

namespace sdyn {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

Forcing Forcing::zero(int n) {
    Forcing f;
    f.n_ = n;
    f.kind_ = ForcingKind::zero;
    return f;
}

Forcing Forcing::sinusoid_bank(Vec amplitude, Vec omega, Vec phase) {
    if (phase.size() == 0) phase = Vec::Zero(amplitude.size());
    if (amplitude.size() != omega.size() || amplitude.size() != phase.size())
        throw DimensionError("sinusoid_bank: amplitude/omega/phase sizes differ");
    Forcing f;
    f.n_ = static_cast<int>(amplitude.size());
    f.kind_ = ForcingKind::sinusoid_bank;
    f.amp_ = std::move(amplitude);
    f.omega_ = std::move(omega);
    f.phase_ = std::move(phase);
    return f;
}

Forcing Forcing::square_wave_bank(Vec amplitude, Vec omega) {
    if (amplitude.size() != omega.size())
        throw DimensionError("square_wave_bank: amplitude/omega sizes differ");
    Forcing f;
    f.n_ = static_cast<int>(amplitude.size());
    f.kind_ = ForcingKind::square_wave_bank;
    f.mode_ = DerivativeMode::central_difference;
    f.amp_ = std::move(amplitude);
    f.omega_ = std::move(omega);
    return f;
}

Forcing Forcing::pulse(Vec amplitude, double shape_mu, double cutoff_time) {
    if (shape_mu <= 0.0 || cutoff_time <= 0.0)
        throw ForcingError("pulse: shape and cutoff must be positive");
    Forcing f;
    f.n_ = static_cast<int>(amplitude.size());
    f.kind_ = ForcingKind::pulse;
    f.amp_ = std::move(amplitude);
    f.mu_ = shape_mu;
    f.tstar_ = cutoff_time;
    return f;
}

Forcing Forcing::analytic(int n, Fn value, Fn first, Fn second) {
    if (!value) throw ForcingError("analytic: value closure required");
    Forcing f;
    f.n_ = n;
    f.kind_ = ForcingKind::analytic;
    f.value_ = std::move(value);
    f.first_ = std::move(first);
    f.second_ = std::move(second);
    return f;
}

Forcing Forcing::sampled(Vec times, Mat values, int interpolation_order) {
    if (times.size() < 2) throw ForcingError("sampled: need at least two grid points");
    if (values.cols() != times.size())
        throw DimensionError("sampled: values must have one column per grid time");
    if (interpolation_order != 1 && interpolation_order != 3)
        throw ForcingError("sampled: interpolation order must be 1 or 3");
    for (Eigen::Index i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ForcingError("sampled: time grid must be strictly increasing");
    Forcing f;
    f.n_ = static_cast<int>(values.rows());
    f.kind_ = ForcingKind::sampled;
    f.mode_ = DerivativeMode::central_difference;
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    f.interp_order_ = interpolation_order;
    return f;
}

Forcing Forcing::with_derivative_mode(DerivativeMode mode) const {
    if (mode == DerivativeMode::analytic &&
        (kind_ == ForcingKind::square_wave_bank || kind_ == ForcingKind::sampled))
        throw ForcingError("this forcing kind only supports central-difference derivatives");
    Forcing f = *this;
    f.mode_ = mode;
    return f;
}

Vec Forcing::evaluate(double t) const {
    switch (kind_) {
        case ForcingKind::zero:
            return Vec::Zero(n_);
        case ForcingKind::sinusoid_bank:
            return amp_.array() * (omega_.array() * t + phase_.array()).sin();
        case ForcingKind::square_wave_bank: {
            Vec out(n_);
            for (int i = 0; i < n_; ++i)
                out[i] = amp_[i] * sign(std::sin(omega_[i] * t));
            return out;
        }
        case ForcingKind::pulse: {
            if (t > tstar_) return Vec::Zero(n_);
            const double u = 1.0 - t / tstar_;
            return amp_ * (std::exp(t / (mu_ * tstar_)) * u * u * u);
        }
        case ForcingKind::analytic:
            return value_(t);
        case ForcingKind::sampled: {
            if (t < times_[0] || t > times_[times_.size() - 1])
                throw ForcingError("sampled forcing queried outside its time grid");
            // locate the interval and build a local Lagrange stencil
            Eigen::Index lo = 0, hi = times_.size() - 1;
            while (hi - lo > 1) {
                Eigen::Index mid = (lo + hi) / 2;
                (times_[mid] <= t ? lo : hi) = mid;
            }
            const int npts = interp_order_ + 1;
            Eigen::Index start = lo - (npts / 2 - 1);
            start = std::max<Eigen::Index>(0, std::min(start, times_.size() - npts));
            Vec out = Vec::Zero(n_);
            for (int i = 0; i < npts; ++i) {
                double w = 1.0;
                for (int j = 0; j < npts; ++j)
                    if (j != i)
                        w *= (t - times_[start + j]) / (times_[start + i] - times_[start + j]);
                out += w * values_.col(start + i);
            }
            return out;
        }
    }
    throw ForcingError("unreachable forcing kind");
}

Vec Forcing::analytic_first(double t) const {
    switch (kind_) {
        case ForcingKind::zero:
            return Vec::Zero(n_);
        case ForcingKind::sinusoid_bank:
            return amp_.array() * omega_.array() *
                   (omega_.array() * t + phase_.array()).cos();
        case ForcingKind::pulse: {
            if (t > tstar_) return Vec::Zero(n_);
            const double a = 1.0 / (mu_ * tstar_);
            const double u = 1.0 - t / tstar_;
            const double up = -1.0 / tstar_;
            return amp_ * (std::exp(a * t) * (a * u * u * u + 3.0 * u * u * up));
        }
        case ForcingKind::analytic:
            if (!first_)
                throw ForcingError("analytic forcing has no first-derivative closure");
            return first_(t);
        default:
            throw ForcingError("forcing kind has no analytic derivative");
    }
}

Vec Forcing::analytic_second(double t) const {
    switch (kind_) {
        case ForcingKind::zero:
            return Vec::Zero(n_);
        case ForcingKind::sinusoid_bank:
            return -(amp_.array() * omega_.array().square() *
                     (omega_.array() * t + phase_.array()).sin())
                        .matrix();
        case ForcingKind::pulse: {
            // piecewise form; at t = t* this is the left-sided limit
            if (t > tstar_) return Vec::Zero(n_);
            const double a = 1.0 / (mu_ * tstar_);
            const double u = 1.0 - t / tstar_;
            const double up = -1.0 / tstar_;
            return amp_ * (std::exp(a * t) *
                           (a * a * u * u * u + 6.0 * a * u * u * up + 6.0 * u * up * up));
        }
        case ForcingKind::analytic:
            if (!second_)
                throw ForcingError("analytic forcing has no second-derivative closure");
            return second_(t);
        default:
            throw ForcingError("forcing kind has no analytic derivative");
    }
}

Vec Forcing::derivative(double t, int order, double dt) const {
    if (order != 1 && order != 2)
        throw ForcingError("derivative order must be 1 or 2");
    if (mode_ == DerivativeMode::analytic)
        return order == 1 ? analytic_first(t) : analytic_second(t);

    if (!(dt > 0.0))
        throw ForcingError("central-difference derivatives need a positive step");
    if (t - dt < 0.0) {
        // one-sided second-order stencils at the left boundary
        if (order == 1)
            return (-3.0 * evaluate(t) + 4.0 * evaluate(t + dt) - evaluate(t + 2 * dt)) /
                   (2.0 * dt);
        return (2.0 * evaluate(t) - 5.0 * evaluate(t + dt) + 4.0 * evaluate(t + 2 * dt) -
                evaluate(t + 3 * dt)) /
               (dt * dt);
    }
    if (order == 1) return (evaluate(t + dt) - evaluate(t - dt)) / (2.0 * dt);
    return (evaluate(t + dt) - 2.0 * evaluate(t) + evaluate(t - dt)) / (dt * dt);
}

ForcingSamples Forcing::samples(double t, double dt) const {
    if (mode_ == DerivativeMode::analytic)
        return {evaluate(t), analytic_first(t), analytic_second(t)};

    if (!(dt > 0.0))
        throw ForcingError("central-difference derivatives need a positive step");
    if (t - dt < 0.0) {
        const Vec f0 = evaluate(t);
        const Vec f1 = evaluate(t + dt);
        const Vec f2 = evaluate(t + 2 * dt);
        const Vec f3 = evaluate(t + 3 * dt);
        return {f0, (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * dt),
                (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (dt * dt)};
    }
    // interior point: the two stencils share three samples
    const Vec fm = evaluate(t - dt);
    const Vec f0 = evaluate(t);
    const Vec fp = evaluate(t + dt);
    return {f0, (fp - fm) / (2.0 * dt), (fp - 2.0 * f0 + fm) / (dt * dt)};
}

}  // namespace sdyn

namespace sdyn {

double log_log_slope(const std::vector<double>& h, const std::vector<double>& e) {
    if (h.size() != e.size() || h.size() < 2)
        throw std::invalid_argument("log_log_slope: need >= 2 matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(h.size());
    for (size_t i = 0; i < h.size(); ++i) {
        if (!(e[i] > 0.0) || !(h[i] > 0.0))
            throw std::invalid_argument("log_log_slope: values must be positive");
        const double x = std::log(h[i]);
        const double y = std::log(e[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace sdyn
