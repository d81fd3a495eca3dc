#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lep/core.hpp"
#include "lep/dynamics.hpp"

namespace lep {

enum class Direction { CW, CCW };
enum class StartLabel { Plus, Minus };
enum class Sheet { NegativeDelta, PositiveDelta };

/// Isochoric stroke as n constant-gamma stages.
struct Stepped {
    int n_steps{5};
    double step_duration{30.0};
};

/// Isochoric stroke with gamma swept continuously (idealized schematic).
struct LinearRamp {
    double duration{150.0};
};

using IsochoricMode = std::variant<Stepped, LinearRamp>;

double isochoric_total(const IsochoricMode& mode);

struct LoopConfig {
    AngularFreq omega{AngularFreq::from_khz(120.0)};
    AngularFreq delta_min{AngularFreq::from_khz(-400.0)};
    AngularFreq delta_max{AngularFreq::from_khz(400.0)};
    AngularFreq gamma_min{0.0};
    AngularFreq gamma_max{1.45};
    double t1{6.0};
    double t3{12.0};
    double t5{6.0};
    IsochoricMode isochoric{Stepped{}};
    Direction direction{Direction::CW};
    PureState start{make_psi_plus()};

    /// Checks the full-loop rectangle (delta_min < 0 < delta_max).
    void validate() const;
};

/// gamma values of the ascending isochoric stages, gamma_min + k (gamma_max -
/// gamma_min) / n for k = 0..n-1. Descending stages are gamma_max - k (...)/n.
std::vector<double> ascending_stages(const LoopConfig& cfg);
std::vector<double> descending_stages(const LoopConfig& cfg);

/// Five strokes from corner (0, gamma_min). CCW visits Delta_max first, CW
/// visits Delta_min first. In both directions stroke 2 raises gamma and
/// stroke 4 lowers it.
ParamSchedule build_loop(const LoopConfig& cfg);

/// Same grammar over [Delta_min, 0] or [0, Delta_max]; the iso-decay ramp
/// that would run 0 -> 0 becomes a hold at Delta = 0 for its duration.
ParamSchedule build_half_loop(const LoopConfig& cfg, Sheet sheet);

/// Corner parameters (Delta, gamma) visited by a loop, in traversal order,
/// starting and ending at A.
struct Corner {
    char label;
    double delta;
    double gamma;
};
std::vector<Corner> loop_corners(const LoopConfig& cfg);

std::string to_string(Direction d);
std::string to_string(StartLabel s);
std::string to_string(Sheet s);
Direction parse_direction(std::string_view s);
StartLabel parse_start(std::string_view s);
Sheet parse_sheet(std::string_view s);

PureState start_state(StartLabel s);

} // namespace lep
