#include <doctest.h>

#include <random>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "lep/analysis.hpp"
#include "lep/dynamics.hpp"
#include "lep/protocol.hpp"

using namespace lep;
using C = std::complex<double>;

namespace {

ParamSchedule hold(double omega, double delta, double gamma, double duration)
{
    ParamSchedule s;
    s.segments.push_back(Segment{duration, delta, delta, gamma, omega, SegmentKind::IsochoricStage, 1});
    return s;
}

QubitDensity ground() { return {0.0, 1.0, 0.0}; }
QubitDensity excited() { return {1.0, 0.0, 0.0}; }

} // namespace

TEST_CASE("resonant Rabi flopping")
{
    const double w = 0.9;
    const auto traj = evolve(ground(), hold(w, 0, 0, 10.0), true, {1e-3, 100});
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        CHECK(std::abs(traj.state(k).rho_ee - std::pow(std::sin(w * t / 2), 2)) < 1e-6);
    }
}

TEST_CASE("spontaneous decay")
{
    const double g = 0.7;
    const auto traj = evolve(excited(), hold(0, 0.3, g, 8.0), true, {1e-3, 50});
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(std::abs(traj.state(k).rho_ee - std::exp(-g * traj.times[k])) < 1e-6);
        CHECK(traj.state(k).trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("integrator agrees with the matrix exponential for constant parameters")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 20; ++k) {
        const SystemParams p{2 * u(rng), 4 * u(rng) - 2, 1.5 * u(rng)};
        const double t = 1 + 5 * u(rng);
        const auto rho0 = prepare_state(make_psi_plus(), PrepMode::experimental(0.9));
        for (bool jumps : {true, false}) {
            const auto traj = evolve(rho0, hold(p.omega, p.delta, p.gamma, t), jumps);
            const auto exact = propagate_const_vec(rho0.vec(), p, t, jumps);
            CHECK((traj.states.back() - exact).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("linear detuning ramp against a fine piecewise-constant product")
{
    const double w = 0.75, g = 0.4, t = 6.0, d0 = -2.5, d1 = 0.0;
    ParamSchedule s;
    s.segments.push_back(Segment{t, d0, d1, g, w, SegmentKind::IsoDecayRamp, 1});
    const auto rho0 = prepare_state(make_psi_minus(), PrepMode::ideal());
    const auto traj = evolve(rho0, s, true);

    const int n = 4000;
    Vector4c<double> v = rho0.vec();
    for (int k = 0; k < n; ++k) {
        const double mid = d0 + (d1 - d0) * (k + 0.5) / n;
        const Mat4 L = liouvillian_matrix(w, mid, g, true);
        v = (L * C(t / n)).exp() * v;
    }
    CHECK((traj.states.back() - v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("propagation over zero time is the identity")
{
    const auto rho0 = prepare_state(make_psi_plus(), PrepMode::ideal());
    const auto v = propagate_const_vec(rho0.vec(), SystemParams{1, 1, 1}, 0.0, true);
    CHECK((v - rho0.vec()).norm() == 0.0);
}

TEST_CASE("steady state matches the driven two-level formula")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 200; ++k) {
        const double w = 0.05 + 2 * u(rng), d = 4 * u(rng) - 2, g = 0.01 + 2 * u(rng);
        const auto ss = steady_state(SystemParams{w, d, g});
        const double expected = (w * w / 4) / (d * d + g * g / 4 + w * w / 2);
        CHECK(ss.rho_ee == doctest::Approx(expected).epsilon(1e-10));
        if (d == 0.0)
            CHECK(ss.rho_ee == doctest::Approx(w * w / (g * g + 2 * w * w)));

        // kernel via LU as an independent route
        const Mat4 L = liouvillian_matrix(w, d, g, true);
        Eigen::FullPivLU<Mat4> lu(L);
        lu.setThreshold(1e-10);
        REQUIRE(lu.dimensionOfKernel() == 1);
        Vector4c<double> ker = lu.kernel().col(0);
        ker /= ker(0) + ker(3);
        CHECK((ker - ss.vec()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("steady state limits")
{
    CHECK(steady_state(SystemParams{0.5, 0, 1e-3}).rho_ee == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(steady_state(SystemParams{0.5, 10.0, 0.5}).rho_ee < 0.05);
    CHECK(steady_state(SystemParams{1e-9, 0, 0.5}).rho_ee < 1e-15);
    CHECK_THROWS_AS(steady_state(SystemParams{1.0, 0, 0}), InvalidArgument);
}

TEST_CASE("undriven qubit stays in the ground state")
{
    const auto traj = evolve(ground(), hold(0, 1.0, 0.5, 5.0), true, {1e-2, 1});
    CHECK(traj.final_state().rho_gg == 1.0);
}

TEST_CASE("without jumps the trace never increases")
{
    LoopConfig cfg;
    const auto sched = build_loop(cfg);
    const auto traj = evolve(prepare_state(make_psi_plus(), PrepMode::ideal()), sched, false, {1e-3, 200});
    for (std::size_t k = 1; k < traj.size(); ++k)
        CHECK(traj.state(k).trace() <= traj.state(k - 1).trace() + 1e-15);
    CHECK(traj.final_state().trace() < 0.5);
}

TEST_CASE("halving the step barely moves the loop outcome")
{
    LoopConfig cfg;
    OutcomeOptions a, b;
    b.evolve.dt_max = a.evolve.dt_max / 2;
    const auto ra = run_loop_outcome(cfg, a);
    const auto rb = run_loop_outcome(cfg, b);
    CHECK(std::abs(ra.f_plus_final - rb.f_plus_final) < 1e-5);
    CHECK(std::abs(ra.f_minus_final - rb.f_minus_final) < 1e-5);
}

TEST_CASE("recording keeps segment ends and the time grid")
{
    LoopConfig cfg;
    const auto sched = build_loop(cfg);
    const auto traj = evolve(prepare_state(make_psi_plus(), PrepMode::ideal()), sched, true, {1e-3, 997});
    REQUIRE(traj.segment_ends.size() == sched.segments.size());
    double t = 0;
    for (std::size_t s = 0; s < sched.segments.size(); ++s) {
        t += sched.segments[s].duration;
        CHECK(traj.times[traj.segment_ends[s]] == doctest::Approx(t).epsilon(1e-12));
    }
    CHECK(traj.times.back() == doctest::Approx(sched.total_duration()));
    for (std::size_t k = 1; k < traj.size(); ++k)
        CHECK(traj.times[k] > traj.times[k - 1]);
    for (std::size_t k = 0; k < traj.size(); ++k)
        CHECK(traj.state(k).is_physical(1e-6));
}

TEST_CASE("invalid inputs")
{
    const auto rho0 = prepare_state(make_psi_plus(), PrepMode::ideal());
    CHECK_THROWS_AS(evolve(rho0, hold(1, 0, 0.1, 1.0), true, {0.0, 1}), InvalidArgument);
    CHECK_THROWS_AS(evolve(rho0, hold(1, 0, 0.1, 1.0), true, {1e-3, 0}), InvalidArgument);
    CHECK_THROWS_AS(evolve(rho0, hold(1, 0, 0.1, -1.0), true), InvalidArgument);
    CHECK_THROWS_AS(evolve(rho0, hold(1, 0, -0.1, 1.0), true), InvalidArgument);

    const QubitDensity bad{1.5, -0.5, 0.0};
    try {
        evolve(bad, hold(0, 0, 0.1, 1.0), true);
        FAIL("expected a positivity failure");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("t = ") != std::string::npos);
    }
}

TEST_CASE("empty schedule returns the initial state")
{
    const auto rho0 = prepare_state(make_psi_minus(), PrepMode::ideal());
    const auto traj = evolve(rho0, ParamSchedule{}, true);
    CHECK(traj.size() == 1);
    CHECK(traj.final_state().rho_eg == rho0.rho_eg);
}
