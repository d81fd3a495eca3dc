#include <doctest.h>

#include <random>

#include "lep/core.hpp"

using namespace lep;

TEST_CASE("psi states are normalized and orthogonal")
{
    const auto p = make_psi_plus();
    const auto m = make_psi_minus();
    CHECK(p.amp_e.real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(p.amp_g.real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(m.amp_g.real() == doctest::Approx(-1 / std::sqrt(2.0)));
    CHECK(std::abs(p.norm() - 1) < 1e-12);
    CHECK(std::abs((p.ket().adjoint() * m.ket())(0, 0)) < 1e-15);
}

TEST_CASE("ideal preparation is the projector")
{
    const auto rho = prepare_state(make_psi_plus(), PrepMode::ideal());
    CHECK(rho.rho_ee == doctest::Approx(0.5));
    CHECK(rho.rho_gg == doctest::Approx(0.5));
    CHECK(rho.rho_eg.real() == doctest::Approx(0.5));
    CHECK(fidelity(rho, make_psi_plus()) == doctest::Approx(1.0));
}

TEST_CASE("depolarized preparation")
{
    const auto plus = prepare_state(make_psi_plus(), PrepMode::experimental(0.985));
    CHECK(fidelity(plus, make_psi_plus()) == doctest::Approx(0.985).epsilon(1e-12));
    CHECK(plus.trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(plus, make_psi_minus()) == doctest::Approx(0.015).epsilon(1e-12));

    // (1 - eps)/2 * (-1) with eps = 0.03
    const auto minus = prepare_state(make_psi_minus(), PrepMode::experimental(0.985));
    CHECK(minus.rho_eg.real() == doctest::Approx(-0.485).epsilon(1e-12));
}

TEST_CASE("preparation fidelity must exceed one half")
{
    CHECK_THROWS_AS(PrepMode::experimental(0.5), InvalidArgument);
    CHECK_THROWS_AS(PrepMode::experimental(0.2), InvalidArgument);
    CHECK_THROWS_AS(PrepMode::experimental(1.01), InvalidArgument);
    CHECK_NOTHROW(PrepMode::experimental(1.0));
}

TEST_CASE("maximally mixed state has fidelity one half")
{
    CHECK(fidelity(QubitDensity::maximally_mixed(), make_psi_minus()) == doctest::Approx(0.5));
}

TEST_CASE("random preparations are physical and fidelities are complementary")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 500; ++k) {
        const double theta = std::acos(1 - 2 * u(rng));
        const double phi = 2 * std::numbers::pi * u(rng);
        const PureState psi{std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
        const double f = 0.5 + 0.5 * std::max(u(rng), 1e-9);
        const auto rho = prepare_state(psi, PrepMode::experimental(f));
        REQUIRE(rho.is_physical(1e-9));
        CHECK(fidelity(rho, psi) == doctest::Approx(f).epsilon(1e-12));
        CHECK(fidelity(rho, psi) + fidelity(rho, psi.orthogonal()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(hermiticity_error<double>(rho.vec()) == 0.0);
    }
}

TEST_CASE("unit conventions")
{
    const auto omega = AngularFreq::from_khz(120.0);
    CHECK(omega.value == doctest::Approx(2 * std::numbers::pi * 0.12));
    CHECK(4 * omega.value == doctest::Approx(3.02).epsilon(0.005));
    CHECK(2 * omega.value == doctest::Approx(1.51).epsilon(0.005));
    CHECK(omega.khz() == doctest::Approx(120.0));
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS((SystemParams{1.0, 0.0, -0.1}.validate()), InvalidArgument);
    CHECK_THROWS_AS((SystemParams{-1.0, 0.0, 0.1}.validate()), InvalidArgument);
    CHECK_THROWS_AS((SystemParams{1.0, std::nan(""), 0.1}.validate()), InvalidArgument);
    CHECK_NOTHROW((SystemParams{1.0, -3.0, 0.0}.validate()));
}

TEST_CASE("vectorization round trip")
{
    const QubitDensity rho{0.3, 0.7, {0.1, -0.2}};
    const auto v = rho.vec();
    CHECK(v(2) == std::conj(v(1)));
    const auto back = QubitDensity::from_vec(v);
    CHECK(back.rho_ee == rho.rho_ee);
    CHECK(back.rho_eg == rho.rho_eg);
    CHECK(QubitDensity::from_matrix(rho.matrix()).rho_eg == rho.rho_eg);
}

TEST_CASE("scalar-generic types work in long double")
{
    const auto p = make_psi_plus<long double>();
    const auto rho = prepare_state(p, PrepMode::experimental(0.9));
    CHECK(static_cast<double>(fidelity(rho, p)) == doctest::Approx(0.9).epsilon(1e-15));
}
