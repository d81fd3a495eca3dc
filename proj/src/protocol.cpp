#include "lep/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace lep {

namespace {

// Number of constant stages used to approximate a continuous gamma sweep.
constexpr int kRampStages = 1000;

void require_positive(double v, const char* name)
{
    if (!(v > 0) || !std::isfinite(v))
        throw InvalidArgument(std::string(name) + " must be positive");
}

Segment ramp(const LoopConfig& cfg, double d0, double d1, double gamma, double duration, int stroke)
{
    return {duration, d0, d1, gamma, cfg.omega.value, SegmentKind::IsoDecayRamp, stroke};
}

void append_isochoric(std::vector<Segment>& out, const LoopConfig& cfg, double delta, bool rising, int stroke)
{
    const double lo = cfg.gamma_min.value;
    const double hi = cfg.gamma_max.value;
    if (const auto* s = std::get_if<Stepped>(&cfg.isochoric)) {
        const auto gammas = rising ? ascending_stages(cfg) : descending_stages(cfg);
        for (double g : gammas)
            out.push_back({s->step_duration, delta, delta, g, cfg.omega.value, SegmentKind::IsochoricStage, stroke});
        return;
    }
    const auto& r = std::get<LinearRamp>(cfg.isochoric);
    const double dt = r.duration / kRampStages;
    for (int k = 0; k < kRampStages; ++k) {
        // stage midpoints
        const double x = (k + 0.5) / kRampStages;
        const double g = rising ? lo + (hi - lo) * x : hi - (hi - lo) * x;
        out.push_back({dt, delta, delta, g, cfg.omega.value, SegmentKind::IsochoricStage, stroke});
    }
}

void validate_common(const LoopConfig& cfg)
{
    SystemParams{cfg.omega.value, cfg.delta_min.value, cfg.gamma_min.value}.validate();
    SystemParams{cfg.omega.value, cfg.delta_max.value, cfg.gamma_max.value}.validate();
    if (!(cfg.gamma_min < cfg.gamma_max))
        throw InvalidArgument("gamma_min must be below gamma_max");
    require_positive(cfg.t1, "t1");
    require_positive(cfg.t3, "t3");
    require_positive(cfg.t5, "t5");
    if (const auto* s = std::get_if<Stepped>(&cfg.isochoric)) {
        if (s->n_steps < 1)
            throw InvalidArgument("stepped isochoric stroke needs at least one step");
        require_positive(s->step_duration, "step_duration");
    } else {
        require_positive(std::get<LinearRamp>(cfg.isochoric).duration, "isochoric ramp duration");
    }
    if (std::abs(cfg.start.norm() - 1.0) > 1e-12)
        throw InvalidArgument("start state is not normalized");
}

// Rectangle traversal shared by full and half loops. `first` is the Delta
// edge reached by stroke 1 and `second` the one reached by stroke 3.
ParamSchedule compile(const LoopConfig& cfg, double first, double second)
{
    const double glo = cfg.gamma_min.value;
    const double ghi = cfg.gamma_max.value;
    ParamSchedule s;
    s.segments.push_back(ramp(cfg, 0.0, first, glo, cfg.t1, 1));
    append_isochoric(s.segments, cfg, first, true, 2);
    s.segments.push_back(ramp(cfg, first, second, ghi, cfg.t3, 3));
    append_isochoric(s.segments, cfg, second, false, 4);
    s.segments.push_back(ramp(cfg, second, 0.0, glo, cfg.t5, 5));
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

double isochoric_total(const IsochoricMode& mode)
{
    if (const auto* s = std::get_if<Stepped>(&mode))
        return s->n_steps * s->step_duration;
    return std::get<LinearRamp>(mode).duration;
}

void LoopConfig::validate() const
{
    validate_common(*this);
    if (!(delta_min.value < 0 && delta_max.value > 0))
        throw InvalidArgument("full loops need delta_min < 0 < delta_max");
}

std::vector<double> ascending_stages(const LoopConfig& cfg)
{
    const auto& s = std::get<Stepped>(cfg.isochoric);
    const double lo = cfg.gamma_min.value;
    const double step = (cfg.gamma_max.value - lo) / s.n_steps;
    std::vector<double> out;
    for (int k = 0; k < s.n_steps; ++k)
        out.push_back(lo + k * step);
    return out;
}

std::vector<double> descending_stages(const LoopConfig& cfg)
{
    const auto& s = std::get<Stepped>(cfg.isochoric);
    const double hi = cfg.gamma_max.value;
    const double step = (hi - cfg.gamma_min.value) / s.n_steps;
    std::vector<double> out;
    for (int k = 0; k < s.n_steps; ++k)
        out.push_back(hi - k * step);
    return out;
}

ParamSchedule build_loop(const LoopConfig& cfg)
{
    cfg.validate();
    const double dmin = cfg.delta_min.value;
    const double dmax = cfg.delta_max.value;
    return cfg.direction == Direction::CCW ? compile(cfg, dmax, dmin) : compile(cfg, dmin, dmax);
}

ParamSchedule build_half_loop(const LoopConfig& cfg, Sheet sheet)
{
    validate_common(cfg);
    const double dmin = cfg.delta_min.value;
    const double dmax = cfg.delta_max.value;
    if (!(dmax > dmin))
        throw InvalidArgument("half loop needs a non-empty detuning range");
    if (sheet == Sheet::NegativeDelta && !(dmax == 0 && dmin < 0))
        throw InvalidArgument("negative-detuning half loop needs delta_min < 0 = delta_max");
    if (sheet == Sheet::PositiveDelta && !(dmin == 0 && dmax > 0))
        throw InvalidArgument("positive-detuning half loop needs delta_min = 0 < delta_max");
    return cfg.direction == Direction::CCW ? compile(cfg, dmax, dmin) : compile(cfg, dmin, dmax);
}

std::vector<Corner> loop_corners(const LoopConfig& cfg)
{
    const double glo = cfg.gamma_min.value;
    const double ghi = cfg.gamma_max.value;
    const double first = cfg.direction == Direction::CCW ? cfg.delta_max.value : cfg.delta_min.value;
    const double second = cfg.direction == Direction::CCW ? cfg.delta_min.value : cfg.delta_max.value;
    return {{'A', 0.0, glo}, {'B', first, glo}, {'C', first, ghi}, {'D', second, ghi}, {'E', second, glo},
            {'A', 0.0, glo}};
}

std::string to_string(Direction d) { return d == Direction::CW ? "cw" : "ccw"; }
std::string to_string(StartLabel s) { return s == StartLabel::Plus ? "plus" : "minus"; }
std::string to_string(Sheet s) { return s == Sheet::NegativeDelta ? "negative" : "positive"; }

Direction parse_direction(std::string_view s)
{
    const auto v = lower(s);
    if (v == "cw")
        return Direction::CW;
    if (v == "ccw")
        return Direction::CCW;
    throw InvalidArgument("unknown direction '" + std::string(s) + "' (expected cw or ccw)");
}

StartLabel parse_start(std::string_view s)
{
    const auto v = lower(s);
    if (v == "plus" || v == "+")
        return StartLabel::Plus;
    if (v == "minus" || v == "-")
        return StartLabel::Minus;
    throw InvalidArgument("unknown start state '" + std::string(s) + "' (expected plus or minus)");
}

Sheet parse_sheet(std::string_view s)
{
    const auto v = lower(s);
    if (v == "negative")
        return Sheet::NegativeDelta;
    if (v == "positive")
        return Sheet::PositiveDelta;
    throw InvalidArgument("unknown sheet '" + std::string(s) + "' (expected negative or positive)");
}

PureState start_state(StartLabel s) { return s == StartLabel::Plus ? make_psi_plus() : make_psi_minus(); }

} // namespace lep
