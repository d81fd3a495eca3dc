#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lep/dynamics.hpp"
#include "lep/protocol.hpp"

namespace lep {

enum class Verdict { Returned, Converted, Indeterminate };

std::string to_string(Verdict v);

struct OutcomeOptions {
    bool jumps{true};
    PrepMode prep{PrepMode::ideal()};
    double threshold{0.9};
    EvolveOptions evolve{};
    /// Set for single-sheet loops.
    std::optional<Sheet> sheet;
    unsigned threads{1};
};

/// Final fidelities are normalized by trace(rho). With jumps the trace is 1
/// to integration accuracy; without jumps this is the post-selected state.
struct LoopOutcome {
    StartLabel start{StartLabel::Plus};
    Direction direction{Direction::CW};
    double f_plus_final{0};
    double f_minus_final{0};
    double trace_final{1};
    Verdict verdict{Verdict::Indeterminate};
    QubitDensity final_state{};

    double f_start() const { return start == StartLabel::Plus ? f_plus_final : f_minus_final; }
    double f_other() const { return start == StartLabel::Plus ? f_minus_final : f_plus_final; }
};

Verdict classify_outcome(StartLabel start, double f_plus, double f_minus, double threshold);

StartLabel start_label_of(const PureState& psi);

/// prepare_state -> build_loop (or build_half_loop) -> evolve -> fidelity.
LoopOutcome run_loop_outcome(const LoopConfig& cfg, const OutcomeOptions& opts = {});

/// Same, also returning the trajectory for inspection.
LoopOutcome run_loop_outcome(const LoopConfig& cfg, const OutcomeOptions& opts, Trajectory& traj_out);

/// The four (start, direction) combinations in a fixed order:
/// (plus, cw), (plus, ccw), (minus, cw), (minus, ccw).
constexpr std::array<std::pair<StartLabel, Direction>, 4> kCombinations{{
    {StartLabel::Plus, Direction::CW},
    {StartLabel::Plus, Direction::CCW},
    {StartLabel::Minus, Direction::CW},
    {StartLabel::Minus, Direction::CCW},
}};

struct SweepSample {
    double value{0};
    std::array<LoopOutcome, 4> outcomes{};  ///< indexed like kCombinations

    const LoopOutcome& get(StartLabel s, Direction d) const;
};

struct SweepResult {
    std::string axis;
    /// Extra fixed parameter for families of sweeps (gamma_min for t5 sweeps).
    std::optional<double> family_value;
    std::vector<SweepSample> samples;
};

/// All four combinations per gamma_max; values must be strictly ascending.
SweepResult sweep_gamma_max(const LoopConfig& base, const std::vector<double>& gamma_values,
                            const OutcomeOptions& opts = {});

/// Strokes 1-4 of the base loop are run once per combination; stroke 5 is
/// then rerun for each T5 with the given residual decay gamma_min. Returns
/// one SweepResult per gamma_min value.
std::vector<SweepResult> sweep_t5(const LoopConfig& base, const std::vector<double>& t5_values,
                                  const std::vector<double>& gamma_min_values, const OutcomeOptions& opts = {});

/// CSV columns: axis_value,start,direction,f_plus_final,f_minus_final,verdict
/// (plus gamma_min_family when the sweep has a family value).
void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& sweeps);

struct BranchPoint {
    double t{0};
    double p_upper{0};
    double p_lower{0};
    std::complex<double> e_upper{};
    std::complex<double> e_lower{};
    bool near_degeneracy{false};
};

/// Projections of rho onto the unit-normalized right eigenvectors of
/// H_eff = (Delta - i gamma)|e><e| + Omega/2 sigma_x. Labels start with
/// upper = larger real part and are continued by nearest matching.
std::vector<BranchPoint> branch_projection(const Trajectory& traj);

/// Density matrix at the end of each stroke 1..5 (the corners B, C, D, E
/// and the final state).
std::vector<QubitDensity> stroke_end_states(const Trajectory& traj);

} // namespace lep
