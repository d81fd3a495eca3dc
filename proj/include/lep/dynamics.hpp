#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "lep/core.hpp"
#include "lep/liouvillian.hpp"

namespace lep {

enum class SegmentKind { IsoDecayRamp, IsochoricStage };

/// One piece of a schedule: Delta is affine in local time, gamma and Omega
/// are constant. `stroke` is the 1-based stroke number within a loop (0 if
/// the schedule is not a loop).
template <typename Real>
struct BasicSegment {
    Real duration{0};
    Real delta_start{0};
    Real delta_end{0};
    Real gamma{0};
    Real omega{0};
    SegmentKind kind{SegmentKind::IsochoricStage};
    int stroke{0};

    Real delta_at(Real tau) const { return delta_start + (delta_end - delta_start) * (tau / duration); }
    BasicSystemParams<Real> params_at(Real tau) const { return {omega, delta_at(tau), gamma}; }
};

template <typename Real>
struct BasicParamSchedule {
    std::vector<BasicSegment<Real>> segments;

    Real total_duration() const
    {
        Real t = 0;
        for (const auto& s : segments)
            t += s.duration;
        return t;
    }

    void validate() const
    {
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const auto& s = segments[k];
            if (!(s.duration > 0) || !std::isfinite(s.duration))
                throw InvalidArgument("segment " + std::to_string(k) + " has non-positive duration");
            BasicSystemParams<Real>{s.omega, s.delta_start, s.gamma}.validate();
            BasicSystemParams<Real>{s.omega, s.delta_end, s.gamma}.validate();
        }
    }

    /// Parameters at absolute time t (clamped to the schedule).
    BasicSystemParams<Real> params_at(Real t) const
    {
        if (segments.empty())
            throw InvalidArgument("empty schedule has no parameters");
        Real start = 0;
        for (const auto& s : segments) {
            if (t <= start + s.duration)
                return s.params_at(std::max(Real(0), t - start));
            start += s.duration;
        }
        return segments.back().params_at(segments.back().duration);
    }
};

struct EvolveOptions {
    double dt_max{1e-3};         ///< us
    std::size_t record_stride{1}; ///< keep every n-th step; segment ends are always kept
    double positivity_tol{1e-6};
};

/// States are kept as raw vectorized matrices so that Hermiticity and trace
/// drift stay observable.
template <typename Real>
struct BasicTrajectory {
    std::vector<Real> times;
    std::vector<Vector4c<Real>> states;
    std::vector<BasicSystemParams<Real>> params;
    std::vector<int> strokes;
    /// Record index of the last point of each segment.
    std::vector<std::size_t> segment_ends;
    bool jumps{true};

    std::size_t size() const { return times.size(); }
    BasicQubitDensity<Real> state(std::size_t k) const { return BasicQubitDensity<Real>::from_vec(states[k]); }
    BasicQubitDensity<Real> final_state() const { return state(size() - 1); }

    void push(Real t, const Vector4c<Real>& v, const BasicSystemParams<Real>& p, int stroke)
    {
        times.push_back(t);
        states.push_back(v);
        params.push_back(p);
        strokes.push_back(stroke);
    }
};

namespace detail {

/// Delta enters L only through the coherence diagonal.
template <typename Real>
inline Vector4c<Real> apply_generator(const Matrix4c<Real>& base, Real delta, const Vector4c<Real>& v)
{
    Vector4c<Real> out = base * v;
    out(1) += Complex<Real>(0, -delta) * v(1);
    out(2) += Complex<Real>(0, delta) * v(2);
    return out;
}

template <typename Real>
void check_positivity(const Vector4c<Real>& v, Real t, double tol)
{
    const auto rho = BasicQubitDensity<Real>::from_vec(v);
    if (!std::isfinite(rho.rho_ee) || !std::isfinite(rho.rho_gg) || !std::isfinite(std::abs(rho.rho_eg)))
        throw NumericalError("non-finite state at t = " + std::to_string(double(t)) + " us");
    const Real worst = std::min({rho.rho_ee, rho.rho_gg, rho.psd_margin()});
    if (worst < -Real(tol))
        throw NumericalError("positivity violated by " + std::to_string(double(-worst)) +
                             " at t = " + std::to_string(double(t)) + " us");
}

} // namespace detail

/// Fixed-step classical RK4 on d vec(rho)/dt = L(t) vec(rho). Each segment is
/// split into ceil(duration / dt_max) equal steps so boundaries are hit
/// exactly; L is re-evaluated at the substage times. No renormalization.
template <typename Real>
BasicTrajectory<Real> evolve(const BasicQubitDensity<Real>& rho0, const BasicParamSchedule<Real>& sched, bool jumps,
                             const EvolveOptions& opts = {})
{
    if (!(opts.dt_max > 0) || !std::isfinite(opts.dt_max))
        throw InvalidArgument("dt_max must be positive");
    if (opts.record_stride == 0)
        throw InvalidArgument("record_stride must be at least 1");
    sched.validate();

    BasicTrajectory<Real> traj;
    traj.jumps = jumps;
    Vector4c<Real> v = rho0.vec();
    const int first_stroke = sched.segments.empty() ? 0 : sched.segments.front().stroke;
    traj.push(Real(0), v, sched.segments.empty() ? BasicSystemParams<Real>{} : sched.segments.front().params_at(0),
              first_stroke);

    Real seg_start = 0;
    for (const auto& seg : sched.segments) {
        const Matrix4c<Real> base = liouvillian_matrix(seg.omega, Real(0), seg.gamma, jumps);
        const auto steps = static_cast<std::size_t>(std::ceil(double(seg.duration) / opts.dt_max - 1e-9));
        const std::size_t n = std::max<std::size_t>(steps, 1);
        const Real h = seg.duration / Real(n);
        const Real slope = (seg.delta_end - seg.delta_start) / seg.duration;
        for (std::size_t k = 0; k < n; ++k) {
            const Real tau = h * Real(k);
            const Real d0 = seg.delta_start + slope * tau;
            const Real dm = seg.delta_start + slope * (tau + h / 2);
            const Real d1 = k + 1 == n ? seg.delta_end : seg.delta_start + slope * (tau + h);
            const Vector4c<Real> k1 = detail::apply_generator(base, d0, v);
            const Vector4c<Real> k2 = detail::apply_generator<Real>(base, dm, v + (h / 2) * k1);
            const Vector4c<Real> k3 = detail::apply_generator<Real>(base, dm, v + (h / 2) * k2);
            const Vector4c<Real> k4 = detail::apply_generator<Real>(base, d1, v + h * k3);
            v += (h / 6) * (k1 + Real(2) * k2 + Real(2) * k3 + k4);

            const bool last = k + 1 == n;
            const Real t = last ? seg_start + seg.duration : seg_start + h * Real(k + 1);
            detail::check_positivity(v, t, opts.positivity_tol);
            if (last || (k + 1) % opts.record_stride == 0)
                traj.push(t, v, BasicSystemParams<Real>{seg.omega, d1, seg.gamma}, seg.stroke);
        }
        seg_start += seg.duration;
        traj.segment_ends.push_back(traj.size() - 1);
    }
    return traj;
}

/// exp(L t) vec(rho0) by scaling and squaring; the oracle for evolve().
template <typename Real>
Vector4c<Real> propagate_const_vec(const Vector4c<Real>& v0, const BasicSystemParams<Real>& p, Real t, bool jumps)
{
    if (!(t >= 0))
        throw InvalidArgument("propagation time must be non-negative");
    if (t == 0)
        return v0;
    const Matrix4c<Real> L = build_liouvillian(p, jumps).entries;
    const Matrix4c<Real> U = (L * Complex<Real>(t)).exp();
    return U * v0;
}

template <typename Real>
BasicQubitDensity<Real> propagate_const(const BasicQubitDensity<Real>& rho0, const BasicSystemParams<Real>& p, Real t,
                                        bool jumps)
{
    return BasicQubitDensity<Real>::from_vec(propagate_const_vec(rho0.vec(), p, t, jumps));
}

/// Unit-trace null vector of the with-jumps Liouvillian.
template <typename Real>
BasicQubitDensity<Real> steady_state(const BasicSystemParams<Real>& p)
{
    p.validate();
    if (!(p.gamma > 0))
        throw InvalidArgument("steady state requires gamma > 0");
    const Matrix4c<Real> L = build_liouvillian(p, true).entries;
    Eigen::JacobiSVD<Matrix4c<Real>> svd(L, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Real tol = Real(1e-12) * std::max(sv(0), std::numeric_limits<Real>::min());
    int null_dim = 0;
    for (int k = 0; k < 4; ++k)
        null_dim += sv(k) <= tol ? 1 : 0;
    if (null_dim != 1)
        throw NumericalError("Liouvillian null space has dimension " + std::to_string(null_dim));
    Vector4c<Real> v = svd.matrixV().col(3);
    const Complex<Real> tr = v(0) + v(3);
    if (std::abs(tr) <= std::numeric_limits<Real>::epsilon())
        throw NumericalError("steady-state null vector has zero trace");
    return BasicQubitDensity<Real>::from_vec(v / tr);
}

using Segment = BasicSegment<double>;
using ParamSchedule = BasicParamSchedule<double>;
using Trajectory = BasicTrajectory<double>;

/// CSV columns: t_us,rho_ee,re_rho_eg,im_rho_eg,rho_gg,delta,gamma,fidelity_plus,fidelity_minus
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace lep
