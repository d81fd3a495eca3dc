#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lep {

template <typename Real> using Complex = std::complex<Real>;
template <typename Real> using Matrix2c = Eigen::Matrix<Complex<Real>, 2, 2>;
template <typename Real> using Vector2c = Eigen::Matrix<Complex<Real>, 2, 1>;
template <typename Real> using Matrix4c = Eigen::Matrix<Complex<Real>, 4, 4>;
template <typename Real> using Vector4c = Eigen::Matrix<Complex<Real>, 4, 1>;

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigensolver breakdown, positivity loss, degenerate null space.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed input: invalid parameters, bad config keys, empty sweeps.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

template <typename Real> inline constexpr Real two_pi = Real(2) * std::numbers::pi_v<Real>;

/// Angular frequency in rad/us. A value of 1 is what the experiment
/// literature calls "1 MHz" for decay rates; detunings and Rabi frequencies
/// are usually quoted as f = value / 2pi in kHz.
template <typename Real>
struct BasicAngularFreq {
    Real value{0};

    constexpr BasicAngularFreq() = default;
    constexpr explicit BasicAngularFreq(Real v) : value(v) {}

    /// From an ordinary frequency in kHz (multiplied by 2pi, scaled to rad/us).
    static constexpr BasicAngularFreq from_khz(Real khz) { return BasicAngularFreq(two_pi<Real> * khz / Real(1000)); }
    constexpr Real khz() const { return value * Real(1000) / two_pi<Real>; }

    friend constexpr auto operator<=>(const BasicAngularFreq&, const BasicAngularFreq&) = default;
};

/// Instantaneous control point (Omega, Delta, gamma_eff), all in rad/us.
template <typename Real>
struct BasicSystemParams {
    Real omega{0};  ///< Rabi frequency, >= 0
    Real delta{0};  ///< detuning, any sign
    Real gamma{0};  ///< effective decay rate, >= 0

    bool valid() const
    {
        return std::isfinite(omega) && std::isfinite(delta) && std::isfinite(gamma) && omega >= 0 && gamma >= 0;
    }

    void validate() const
    {
        if (!valid())
            throw InvalidArgument("system parameters must be finite with omega >= 0 and gamma >= 0");
    }
};

/// Normalized qubit amplitudes in the (|e>, |g>) basis.
template <typename Real>
struct BasicPureState {
    Complex<Real> amp_e{1};
    Complex<Real> amp_g{0};

    Vector2c<Real> ket() const { return Vector2c<Real>(amp_e, amp_g); }

    Real norm() const { return std::sqrt(std::norm(amp_e) + std::norm(amp_g)); }

    /// The state orthogonal to this one (unique up to phase).
    BasicPureState orthogonal() const { return {-std::conj(amp_g), std::conj(amp_e)}; }

    static BasicPureState from_ket(const Vector2c<Real>& v)
    {
        const Real n = v.norm();
        if (!(n > 0))
            throw InvalidArgument("cannot normalize a zero ket");
        return {v(0) / n, v(1) / n};
    }
};

/// 2x2 density matrix of the working substance, stored as its independent
/// entries so that Hermiticity holds by construction.
template <typename Real>
struct BasicQubitDensity {
    Real rho_ee{0};
    Real rho_gg{1};
    Complex<Real> rho_eg{0};

    Real trace() const { return rho_ee + rho_gg; }

    /// rho_ee * rho_gg - |rho_eg|^2; negative means the matrix is not PSD.
    Real psd_margin() const { return rho_ee * rho_gg - std::norm(rho_eg); }

    bool is_physical(Real tol = Real(1e-9)) const
    {
        return std::abs(trace() - Real(1)) <= tol && psd_margin() >= -tol && rho_ee >= -tol && rho_gg >= -tol;
    }

    Matrix2c<Real> matrix() const
    {
        Matrix2c<Real> m;
        m << rho_ee, rho_eg, std::conj(rho_eg), rho_gg;
        return m;
    }

    /// Vectorized in the Liouvillian ordering (rho_ee, rho_eg, rho_ge, rho_gg).
    Vector4c<Real> vec() const { return Vector4c<Real>(rho_ee, rho_eg, std::conj(rho_eg), rho_gg); }

    /// Inverse of vec(). The off-diagonal pair is symmetrized; use
    /// hermiticity_error() on the raw vector to see what was discarded.
    static BasicQubitDensity from_vec(const Vector4c<Real>& v)
    {
        return {v(0).real(), v(3).real(), (v(1) + std::conj(v(2))) / Real(2)};
    }

    static BasicQubitDensity from_matrix(const Matrix2c<Real>& m)
    {
        return {m(0, 0).real(), m(1, 1).real(), (m(0, 1) + std::conj(m(1, 0))) / Real(2)};
    }

    static BasicQubitDensity projector(const BasicPureState<Real>& psi)
    {
        return {std::norm(psi.amp_e), std::norm(psi.amp_g), psi.amp_e * std::conj(psi.amp_g)};
    }

    static BasicQubitDensity maximally_mixed() { return {Real(0.5), Real(0.5), Complex<Real>(0)}; }
};

/// Largest element-wise deviation of a vectorized rho from Hermiticity,
/// including imaginary parts on the diagonal.
template <typename Real>
Real hermiticity_error(const Vector4c<Real>& v)
{
    using std::abs;
    Real err = abs(v(1) - std::conj(v(2)));
    err = std::max(err, abs(v(0).imag()));
    err = std::max(err, abs(v(3).imag()));
    return err;
}

/// State preparation: ideal projector, or a depolarized projector whose
/// overlap with the target equals the given fidelity.
struct PrepMode {
    std::optional<double> fidelity;

    static PrepMode ideal() { return {}; }

    static PrepMode experimental(double f)
    {
        if (!(f > 0.5 && f <= 1.0))
            throw InvalidArgument("preparation fidelity must lie in (0.5, 1], got " + std::to_string(f));
        return {f};
    }

    bool is_ideal() const { return !fidelity.has_value(); }
};

template <typename Real = double>
BasicPureState<Real> make_psi_plus()
{
    const Real a = Real(1) / std::sqrt(Real(2));
    return {a, a};
}

template <typename Real = double>
BasicPureState<Real> make_psi_minus()
{
    const Real a = Real(1) / std::sqrt(Real(2));
    return {a, -a};
}

/// <psi|rho|psi>. Not normalized by trace(rho).
template <typename Real>
Real fidelity(const BasicQubitDensity<Real>& rho, const BasicPureState<Real>& psi)
{
    const Vector2c<Real> k = psi.ket();
    return (k.adjoint() * rho.matrix() * k)(0, 0).real();
}

/// (1 - eps)|psi><psi| + eps I/2 with eps = 2(1 - f); the overlap with psi is f.
template <typename Real>
BasicQubitDensity<Real> prepare_state(const BasicPureState<Real>& target, const PrepMode& mode)
{
    if (std::abs(target.norm() - Real(1)) > Real(1e-12))
        throw InvalidArgument("target state is not normalized");
    auto pure = BasicQubitDensity<Real>::projector(target);
    if (mode.is_ideal())
        return pure;
    const double f = *mode.fidelity;
    if (!(f > 0.5 && f <= 1.0))
        throw InvalidArgument("preparation fidelity must lie in (0.5, 1]");
    const Real eps = Real(2) * (Real(1) - Real(f));
    const Real keep = Real(1) - eps;
    return {keep * pure.rho_ee + eps / Real(2), keep * pure.rho_gg + eps / Real(2), keep * pure.rho_eg};
}

using AngularFreq = BasicAngularFreq<double>;
using SystemParams = BasicSystemParams<double>;
using PureState = BasicPureState<double>;
using QubitDensity = BasicQubitDensity<double>;
using Vec4 = Vector4c<double>;
using Mat4 = Matrix4c<double>;

} // namespace lep
