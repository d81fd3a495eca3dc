#pragma once

#include <algorithm>
#include <cmath>
#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lep/core.hpp"

namespace lep {

/// 4x4 superoperator on vec(rho) = (rho_ee, rho_eg, rho_ge, rho_gg).
template <typename Real>
struct BasicLiouvillian {
    Matrix4c<Real> entries;
    BasicSystemParams<Real> params;
    bool jumps{true};
};

/// Raw generator matrix; no validation, used in integrator inner loops.
///
/// With jumps the ee -> gg recycling entry is gamma and the columns of the
/// ee and gg rows sum to zero, so trace is conserved. Without jumps that
/// entry is zero and the generator is -i(H_nh rho - rho H_nh^dagger).
template <typename Real>
Matrix4c<Real> liouvillian_matrix(Real omega, Real delta, Real gamma, bool jumps)
{
    using C = Complex<Real>;
    const C i(0, 1);
    const C r = i * (omega / Real(2));
    const C coh = C(-gamma / Real(2), -delta);
    Matrix4c<Real> m;
    // clang-format off
    m << C(-gamma),             r,             -r, C(0),
                 r,           coh,           C(0),   -r,
                -r,          C(0),  std::conj(coh),    r,
         C(jumps ? gamma : 0),  -r,              r, C(0);
    // clang-format on
    return m;
}

template <typename Real>
BasicLiouvillian<Real> build_liouvillian(const BasicSystemParams<Real>& p, bool jumps)
{
    p.validate();
    return {liouvillian_matrix(p.omega, p.delta, p.gamma, jumps), p, jumps};
}

/// Eigenpairs with branch labels: values[k] is lambda_{k+1}.
template <typename Real>
struct BasicSpectrum {
    std::array<Complex<Real>, 4> values{};
    std::array<Vector4c<Real>, 4> vectors{};
    Real max_residual{0};
};

/// Closed-form spectrum at Delta = 0, principal complex square root:
///   jumps:    {0, -g/2, (-3g - xi)/4, (-3g + xi)/4},  xi   = sqrt(g^2 - 16 W^2)
///   no jumps: {-g/2, -g/2, (-g - zeta)/2, (-g + zeta)/2}, zeta = sqrt(g^2 - 4 W^2)
template <typename Real>
std::array<Complex<Real>, 4> closed_form_spectrum(BasicAngularFreq<Real> omega, BasicAngularFreq<Real> gamma,
                                                  bool jumps)
{
    using C = Complex<Real>;
    const Real w = omega.value;
    const Real g = gamma.value;
    if (jumps) {
        const C xi = std::sqrt(C(g * g - Real(16) * w * w, Real(0)));
        return {C(0), C(-g / Real(2)), (C(-Real(3) * g) - xi) / Real(4), (C(-Real(3) * g) + xi) / Real(4)};
    }
    const C zeta = std::sqrt(C(g * g - Real(4) * w * w, Real(0)));
    return {C(-g / Real(2)), C(-g / Real(2)), (C(-g) - zeta) / Real(2), (C(-g) + zeta) / Real(2)};
}

namespace detail {

/// Permutation p minimizing sum_k |candidates[p[k]] - reference[k]|.
template <typename Real>
std::array<int, 4> best_matching(const std::array<Complex<Real>, 4>& reference,
                                 const std::array<Complex<Real>, 4>& candidates)
{
    std::array<int, 4> perm{0, 1, 2, 3};
    std::array<int, 4> best = perm;
    Real best_cost = std::numeric_limits<Real>::infinity();
    do {
        Real cost = 0;
        for (int k = 0; k < 4; ++k)
            cost += std::abs(candidates[perm[k]] - reference[k]);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Within an EP neighbourhood lambda_3 takes the lower imaginary part
/// (ties: the lower real part), matching the closed-form branch choice.
template <typename Real>
void order_ep_pair(std::array<Complex<Real>, 4>& values, std::array<Vector4c<Real>, 4>* vectors)
{
    const auto& a = values[2];
    const auto& b = values[3];
    const Real tie = Real(64) * std::numeric_limits<Real>::epsilon() * (std::abs(a) + std::abs(b) + Real(1));
    bool swap = false;
    if (std::abs(a.imag() - b.imag()) > tie)
        swap = a.imag() > b.imag();
    else
        swap = a.real() > b.real();
    if (swap) {
        std::swap(values[2], values[3]);
        if (vectors)
            std::swap((*vectors)[2], (*vectors)[3]);
    }
}

template <typename Real>
Real ep_scale(Real omega, Real delta, Real gamma)
{
    return std::max({omega, std::abs(delta), gamma, std::numeric_limits<Real>::min()});
}

} // namespace detail

/// Unlabeled eigenpairs in solver order. Each pair is checked post hoc:
/// ||L v - lambda v|| <= 1e-9 ||L||.
template <typename Real>
BasicSpectrum<Real> eigenpairs(const Matrix4c<Real>& m)
{
    Eigen::ComplexEigenSolver<Matrix4c<Real>> solver(m, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("complex eigensolver failed to converge");
    BasicSpectrum<Real> s;
    const Real scale = std::max(m.norm(), std::numeric_limits<Real>::min());
    for (int k = 0; k < 4; ++k) {
        s.values[k] = solver.eigenvalues()(k);
        Vector4c<Real> v = solver.eigenvectors().col(k);
        const Real n = v.norm();
        if (n > 0)
            v /= n;
        s.vectors[k] = v;
        const Real res = (m * v - s.values[k] * v).norm();
        s.max_residual = std::max(s.max_residual, res);
    }
    if (s.max_residual > Real(1e-9) * scale)
        throw NumericalError("eigenpair residual " + std::to_string(double(s.max_residual)) +
                             " exceeds 1e-9 * ||L||");
    return s;
}

/// Reorders an unlabeled spectrum to follow `reference` (nearest matching).
template <typename Real>
BasicSpectrum<Real> relabel(const BasicSpectrum<Real>& raw, const std::array<Complex<Real>, 4>& reference)
{
    const auto p = detail::best_matching(reference, raw.values);
    BasicSpectrum<Real> out;
    out.max_residual = raw.max_residual;
    for (int k = 0; k < 4; ++k) {
        out.values[k] = raw.values[p[k]];
        out.vectors[k] = raw.vectors[p[k]];
    }
    return out;
}

namespace detail {

/// Walks the branch labels from the closed-form anchor at Delta = 0 out to
/// |Delta| on one side. Lattice points are fixed by (Omega, gamma) alone: a
/// uniform step of scale/64 up to 8 scale, then geometric with ratio 1 + 1/64.
/// Labels at a given Delta therefore do not depend on how it was reached.
template <typename Real>
class DeltaContinuation {
public:
    DeltaContinuation(Real omega, Real gamma, bool jumps, int sign)
        : omega_(omega), gamma_(gamma), jumps_(jumps), sign_(sign),
          h_(ep_scale(omega, Real(0), gamma) / Real(64)),
          ref_(closed_form_spectrum(BasicAngularFreq<Real>(omega), BasicAngularFreq<Real>(gamma), jumps))
    {
    }

    /// Reference labels at the last lattice point not beyond |delta|.
    const std::array<Complex<Real>, 4>& advance(Real abs_delta)
    {
        while (lattice(m_ + 1) <= abs_delta) {
            ++m_;
            const auto raw = eigenpairs<Real>(liouvillian_matrix(omega_, sign_ * lattice(m_), gamma_, jumps_));
            ref_ = relabel(raw, ref_).values;
        }
        return ref_;
    }

private:
    static constexpr long kUniform = 512;

    Real lattice(long m) const
    {
        if (m <= kUniform)
            return h_ * Real(m);
        return h_ * Real(kUniform) * std::pow(Real(1) + Real(1) / Real(64), Real(m - kUniform));
    }

    Real omega_, gamma_;
    bool jumps_;
    int sign_;
    Real h_;
    std::array<Complex<Real>, 4> ref_;
    long m_{0};
};

} // namespace detail

/// Labeled spectrum. At Delta = 0 labels come from the closed-form branches;
/// otherwise the branches are continued along Delta from 0 at fixed
/// (Omega, gamma).
template <typename Real>
BasicSpectrum<Real> spectrum(const BasicLiouvillian<Real>& L)
{
    const auto& p = L.params;
    detail::DeltaContinuation<Real> walk(p.omega, p.gamma, L.jumps, p.delta < 0 ? -1 : 1);
    auto out = relabel(eigenpairs(L.entries), walk.advance(std::abs(p.delta)));
    if (std::abs(out.values[2] - out.values[3]) < Real(1e-6) * detail::ep_scale(p.omega, p.delta, p.gamma))
        detail::order_ep_pair(out.values, &out.vectors);
    return out;
}

/// Exact phase test at Delta = 0: lambda_3, lambda_4 form a complex pair.
template <typename Real>
bool in_exact_phase(Real omega, Real gamma, bool jumps)
{
    const auto s = eigenpairs<Real>(liouvillian_matrix(omega, Real(0), gamma, jumps));
    const Real tau = Real(1e-7) * std::max(omega, gamma);
    int complex_count = 0;
    for (const auto& v : s.values)
        complex_count += std::abs(v.imag()) > tau ? 1 : 0;
    return complex_count >= 2;
}

/// Exceptional point of the Delta = 0 line: gamma = 4 Omega with jumps (LEP),
/// gamma = 2 Omega without (HEP). Located numerically by bisecting the
/// exact/broken phase boundary on [0, 8 Omega] down to 1e-8 rad/us.
template <typename Real>
BasicAngularFreq<Real> find_ep(BasicAngularFreq<Real> omega, bool jumps, Real tol = Real(1e-8))
{
    const Real w = omega.value;
    if (!(w > 0) || !std::isfinite(w))
        throw InvalidArgument("find_ep requires omega > 0");
    Real lo = 0;
    Real hi = Real(8) * w;
    if (!in_exact_phase(w, std::max(lo, Real(1e-12) * w), jumps) || in_exact_phase(w, hi, jumps))
        throw NumericalError("exceptional point not bracketed by [0, 8 omega]");
    while (hi - lo > tol) {
        const Real mid = lo + (hi - lo) / Real(2);
        if (in_exact_phase(w, mid, jumps))
            lo = mid;
        else
            hi = mid;
    }
    return BasicAngularFreq<Real>(lo + (hi - lo) / Real(2));
}

/// Analytic EP location, for comparison with find_ep.
template <typename Real>
BasicAngularFreq<Real> ep_closed_form(BasicAngularFreq<Real> omega, bool jumps)
{
    return BasicAngularFreq<Real>((jumps ? Real(4) : Real(2)) * omega.value);
}

using Liouvillian = BasicLiouvillian<double>;
using Spectrum = BasicSpectrum<double>;

struct AxisRange {
    double lo{0};
    double hi{0};
};

/// Branch-continued eigenvalue sheets over a rectangular (Delta, gamma) grid.
struct RiemannSurface {
    double omega{0};
    bool jumps{true};
    std::vector<double> deltas;  ///< rad/us, ascending
    std::vector<double> gammas;  ///< rad/us, ascending
    /// sheets[j * deltas.size() + i][k] is lambda_{k+1} at (deltas[i], gammas[j]).
    std::vector<std::array<std::complex<double>, 4>> sheets;
    /// Grid points (i, j) where |lambda_3 - lambda_4| is a local minimum below
    /// the degeneracy threshold.
    std::vector<std::pair<std::size_t, std::size_t>> lep_locus;
    /// Per-point flag: within one lattice cell of lep_locus.
    std::vector<std::uint8_t> near_ep;
    double gap_threshold{0};

    std::size_t index(std::size_t i, std::size_t j) const { return j * deltas.size() + i; }
    const std::array<std::complex<double>, 4>& at(std::size_t i, std::size_t j) const { return sheets[index(i, j)]; }
    double gap(std::size_t i, std::size_t j) const { return std::abs(at(i, j)[2] - at(i, j)[3]); }
};

struct SurfaceOptions {
    bool jumps{true};
    unsigned threads{1};
};

/// Grids the plane with `resolution` points per axis (>= 2, nonzero extents).
/// Eigenvalues at each point are computed independently (in parallel when
/// threads > 1); labels are then continued row by row outward from the
/// closed-form anchor at Delta = 0.
RiemannSurface riemann_surface(AngularFreq omega, AxisRange delta_range, AxisRange gamma_range,
                               std::size_t resolution, const SurfaceOptions& opts = {});

/// CSV columns: delta,gamma,branch,re_lambda,im_lambda (one row per branch).
void write_surface_csv(std::ostream& os, const RiemannSurface& s);
void write_surface_json(std::ostream& os, const RiemannSurface& s);

} // namespace lep
