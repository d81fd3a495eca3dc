#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "lep/analysis.hpp"
#include "lep/thermo.hpp"

using namespace lep;

namespace {

Trajectory default_trajectory(Direction dir, double dt = 1e-3)
{
    LoopConfig cfg;
    cfg.direction = dir;
    return evolve(prepare_state(make_psi_plus(), PrepMode::experimental(0.985)), build_loop(cfg), true,
                  {dt, 1});
}

} // namespace

TEST_CASE("frozen state does no net work over a closed loop")
{
    LoopConfig cfg;
    const auto sched = build_loop(cfg);
    Trajectory traj;
    const Vector4c<double> v = QubitDensity{0.3, 0.7, 0.0}.vec();
    const int n = 3240;
    for (int k = 0; k <= n; ++k) {
        const double t = sched.total_duration() * k / n;
        traj.push(t, v, sched.params_at(t), 1);
    }
    const auto l = accumulate(traj);
    CHECK(std::abs(l.w_net) < 1e-12);
    CHECK(l.w_in == doctest::Approx(-l.w_out));
    CHECK(l.q == 0.0);
    CHECK(classify_engine(l) == EngineClass::Neutral);
}

TEST_CASE("isochoric strokes do no work and the first law holds")
{
    const auto traj = default_trajectory(Direction::CW);
    const auto l = accumulate(traj);
    CHECK(l.stroke_work[2] == 0.0);
    CHECK(l.stroke_work[4] == 0.0);
    CHECK(first_law_residual(l) < 1e-6);
    CHECK(l.w_net == doctest::Approx(l.w_in + l.w_out));
    CHECK(l.running_work.size() == traj.size());
    double sum = 0;
    for (int s = 0; s < 6; ++s)
        sum += l.stroke_work[s];
    CHECK(sum == doctest::Approx(l.w_net).epsilon(1e-12));
}

TEST_CASE("half-energy convention halves every work and heat")
{
    const auto traj = default_trajectory(Direction::CCW);
    const auto a = accumulate(traj, HConvention::Supplement);
    const auto b = accumulate(traj, HConvention::MainText);
    CHECK(b.w_net == doctest::Approx(a.w_net / 2).epsilon(1e-12));
    CHECK(b.w_in == doctest::Approx(a.w_in / 2).epsilon(1e-12));
    CHECK(b.q == doctest::Approx(a.q / 2).epsilon(1e-12));
    CHECK(classify_engine(a) == classify_engine(b));
}

TEST_CASE("work converges under grid refinement")
{
    const auto a = accumulate(default_trajectory(Direction::CW, 1e-3));
    const auto b = accumulate(default_trajectory(Direction::CW, 5e-4));
    CHECK(std::abs(a.w_net - b.w_net) / std::abs(b.w_net) < 1e-4);
}

TEST_CASE("work sign flips with the cycling direction")
{
    const auto cw = accumulate(default_trajectory(Direction::CW));
    const auto ccw = accumulate(default_trajectory(Direction::CCW));
    CHECK(cw.w_net * ccw.w_net < 0);
    CHECK(classify_engine(cw) != classify_engine(ccw));
}

TEST_CASE("classification thresholds")
{
    ThermoLedger l;
    l.w_net = 0.3;
    CHECK(classify_engine(l) == EngineClass::QHE);
    l.w_net = -0.3;
    CHECK(classify_engine(l) == EngineClass::QR);
    l.w_net = 5e-5;
    CHECK(classify_engine(l) == EngineClass::Neutral);
}

TEST_CASE("energy conventions")
{
    CHECK(h_ee(2.0, HConvention::Supplement) == 2.0);
    CHECK(h_ee(2.0, HConvention::MainText) == 1.0);
    CHECK(parse_convention("main-text") == HConvention::MainText);
    CHECK_THROWS_AS(parse_convention("other"), InvalidArgument);
}

TEST_CASE("ledger json fields")
{
    ThermoLedger l;
    l.w_in = -1;
    l.w_out = 1.5;
    l.w_net = 0.5;
    l.q = 0.5;
    std::ostringstream os;
    write_ledger_json(os, l);
    const auto doc = nlohmann::json::parse(os.str());
    for (const char* key : {"w_in", "w_out", "w_net", "q_total", "classification", "convention"})
        CHECK(doc.contains(key));
    CHECK(doc["classification"] == "QHE");
}
