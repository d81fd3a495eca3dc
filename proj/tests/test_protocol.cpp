#include <doctest.h>

#include "lep/protocol.hpp"

using namespace lep;

namespace {

std::array<double, 6> stroke_durations(const ParamSchedule& s)
{
    std::array<double, 6> d{};
    for (const auto& seg : s.segments)
        d[seg.stroke] += seg.duration;
    return d;
}

} // namespace

TEST_CASE("default loop stroke durations")
{
    for (auto dir : {Direction::CW, Direction::CCW}) {
        LoopConfig cfg;
        cfg.direction = dir;
        const auto s = build_loop(cfg);
        const auto d = stroke_durations(s);
        CHECK(d[1] == doctest::Approx(6));
        CHECK(d[2] == doctest::Approx(150));
        CHECK(d[3] == doctest::Approx(12));
        CHECK(d[4] == doctest::Approx(150));
        CHECK(d[5] == doctest::Approx(6));
        CHECK(s.total_duration() == doctest::Approx(324));
        CHECK(s.segments.size() == 13);
    }
}

TEST_CASE("isochoric stage values")
{
    LoopConfig cfg;
    const auto up = ascending_stages(cfg);
    const auto down = descending_stages(cfg);
    REQUIRE(up.size() == 5);
    REQUIRE(down.size() == 5);
    const double step = 1.45 / 5;
    for (int k = 0; k < 5; ++k) {
        CHECK(up[k] == doctest::Approx(k * step));
        CHECK(down[k] == doctest::Approx(1.45 - k * step));
    }
    CHECK(up[1] == doctest::Approx(0.29));
}

TEST_CASE("loops close and ramps are continuous")
{
    for (auto dir : {Direction::CW, Direction::CCW}) {
        LoopConfig cfg;
        cfg.direction = dir;
        const auto s = build_loop(cfg);
        CHECK(s.segments.front().delta_start == 0.0);
        CHECK(s.segments.back().delta_end == 0.0);
        CHECK(s.segments.front().gamma == cfg.gamma_min.value);
        CHECK(s.segments.back().gamma == cfg.gamma_min.value);
        for (std::size_t k = 1; k < s.segments.size(); ++k)
            CHECK(s.segments[k].delta_start == s.segments[k - 1].delta_end);
        for (const auto& seg : s.segments)
            if (seg.kind == SegmentKind::IsochoricStage)
                CHECK(seg.delta_start == seg.delta_end);
    }
}

TEST_CASE("direction decides which side is visited first")
{
    LoopConfig cw, ccw;
    ccw.direction = Direction::CCW;
    CHECK(build_loop(cw).segments.front().delta_end == cw.delta_min.value);
    CHECK(build_loop(ccw).segments.front().delta_end == ccw.delta_max.value);
    const auto a = loop_corners(cw);
    const auto b = loop_corners(ccw);
    CHECK(a[1].delta == b[4].delta);
    CHECK(a[4].delta == b[1].delta);
}

TEST_CASE("detuning path of one direction is the reversed path of the other")
{
    LoopConfig cw, ccw;
    ccw.direction = Direction::CCW;
    const auto a = build_loop(cw);
    const auto b = build_loop(ccw);
    const double T = a.total_duration();
    for (int k = 0; k <= 648; ++k) {
        const double t = T * k / 648.0;
        CHECK(a.params_at(t).delta == doctest::Approx(b.params_at(T - t).delta).epsilon(1e-12));
    }
}

TEST_CASE("linear ramp isochoric mode")
{
    LoopConfig cfg;
    cfg.isochoric = LinearRamp{150};
    const auto s = build_loop(cfg);
    const auto d = stroke_durations(s);
    CHECK(d[2] == doctest::Approx(150));
    CHECK(d[4] == doctest::Approx(150));
    CHECK(isochoric_total(cfg.isochoric) == 150);
    CHECK(isochoric_total(IsochoricMode{Stepped{5, 10}}) == 50);
}

TEST_CASE("half loops")
{
    LoopConfig cfg;
    cfg.delta_max = AngularFreq(0.0);
    cfg.t1 = cfg.t3 = cfg.t5 = 6;
    const auto s = build_half_loop(cfg, Sheet::NegativeDelta);
    for (const auto& seg : s.segments) {
        CHECK(seg.delta_start <= 0.0);
        CHECK(seg.delta_end <= 0.0);
    }
    CHECK(s.total_duration() == doctest::Approx(318));
    CHECK_THROWS_AS(build_half_loop(cfg, Sheet::PositiveDelta), InvalidArgument);

    LoopConfig straddle;
    CHECK_THROWS_AS(build_half_loop(straddle, Sheet::NegativeDelta), InvalidArgument);

    LoopConfig empty;
    empty.delta_min = AngularFreq(0.0);
    empty.delta_max = AngularFreq(0.0);
    CHECK_THROWS_AS(build_half_loop(empty, Sheet::PositiveDelta), InvalidArgument);
}

TEST_CASE("configuration validation")
{
    LoopConfig bad_gamma;
    bad_gamma.gamma_max = AngularFreq(-0.1);
    CHECK_THROWS_AS(build_loop(bad_gamma), InvalidArgument);

    LoopConfig one_sided;
    one_sided.delta_min = AngularFreq(0.1);
    CHECK_THROWS_AS(build_loop(one_sided), InvalidArgument);

    LoopConfig zero_time;
    zero_time.t3 = 0;
    CHECK_THROWS_AS(build_loop(zero_time), InvalidArgument);

    LoopConfig no_steps;
    no_steps.isochoric = Stepped{0, 30};
    CHECK_THROWS_AS(build_loop(no_steps), InvalidArgument);
}

TEST_CASE("name parsing")
{
    CHECK(parse_direction("CCW") == Direction::CCW);
    CHECK(parse_start("minus") == StartLabel::Minus);
    CHECK(parse_sheet("positive") == Sheet::PositiveDelta);
    CHECK_THROWS_AS(parse_direction("up"), InvalidArgument);
    CHECK(to_string(Direction::CW) == "cw");
}
