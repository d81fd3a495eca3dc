#include "lep/analysis.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "lep/io.hpp"
#include "lep/parallel.hpp"

namespace lep {

namespace {

// Keep only segment ends when the caller does not want the trajectory.
constexpr std::size_t kSparseStride = std::size_t{1} << 40;

LoopOutcome finish(StartLabel start, Direction dir, const Vec4& v, double threshold)
{
    LoopOutcome o;
    o.start = start;
    o.direction = dir;
    o.final_state = QubitDensity::from_vec(v);
    o.trace_final = o.final_state.trace();
    if (!(o.trace_final > 0))
        throw NumericalError("final state has non-positive trace");
    o.f_plus_final = fidelity(o.final_state, make_psi_plus()) / o.trace_final;
    o.f_minus_final = fidelity(o.final_state, make_psi_minus()) / o.trace_final;
    o.verdict = classify_outcome(start, o.f_plus_final, o.f_minus_final, threshold);
    return o;
}

void require_ascending(const std::vector<double>& v, const char* what)
{
    if (v.empty())
        throw InvalidArgument(std::string(what) + " list is empty");
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] > v[k - 1]))
            throw InvalidArgument(std::string(what) + " values must be strictly ascending");
}

LoopConfig with_combination(LoopConfig cfg, StartLabel s, Direction d)
{
    cfg.start = start_state(s);
    cfg.direction = d;
    return cfg;
}

} // namespace

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Returned:
        return "Returned";
    case Verdict::Converted:
        return "Converted";
    case Verdict::Indeterminate:
        break;
    }
    return "Indeterminate";
}

Verdict classify_outcome(StartLabel start, double f_plus, double f_minus, double threshold)
{
    const double f_start = start == StartLabel::Plus ? f_plus : f_minus;
    const double f_other = start == StartLabel::Plus ? f_minus : f_plus;
    if (f_start >= threshold)
        return Verdict::Returned;
    if (f_other >= threshold)
        return Verdict::Converted;
    return Verdict::Indeterminate;
}

StartLabel start_label_of(const PureState& psi)
{
    const double overlap = fidelity(QubitDensity::projector(psi), make_psi_plus());
    return overlap >= 0.5 ? StartLabel::Plus : StartLabel::Minus;
}

LoopOutcome run_loop_outcome(const LoopConfig& cfg, const OutcomeOptions& opts, Trajectory& traj_out)
{
    const auto sched = opts.sheet ? build_half_loop(cfg, *opts.sheet) : build_loop(cfg);
    const auto rho0 = prepare_state(cfg.start, opts.prep);
    traj_out = evolve(rho0, sched, opts.jumps, opts.evolve);
    return finish(start_label_of(cfg.start), cfg.direction, traj_out.states.back(), opts.threshold);
}

LoopOutcome run_loop_outcome(const LoopConfig& cfg, const OutcomeOptions& opts)
{
    OutcomeOptions sparse = opts;
    sparse.evolve.record_stride = kSparseStride;
    Trajectory traj;
    return run_loop_outcome(cfg, sparse, traj);
}

const LoopOutcome& SweepSample::get(StartLabel s, Direction d) const
{
    for (std::size_t k = 0; k < kCombinations.size(); ++k)
        if (kCombinations[k].first == s && kCombinations[k].second == d)
            return outcomes[k];
    throw InvalidArgument("no such combination");
}

SweepResult sweep_gamma_max(const LoopConfig& base, const std::vector<double>& gamma_values,
                            const OutcomeOptions& opts)
{
    require_ascending(gamma_values, "gamma_max");
    SweepResult r;
    r.axis = "gamma_max";
    r.samples.resize(gamma_values.size());
    parallel_for(gamma_values.size() * 4, opts.threads, [&](std::size_t task) {
        const std::size_t i = task / 4;
        const auto [s, d] = kCombinations[task % 4];
        LoopConfig cfg = with_combination(base, s, d);
        cfg.gamma_max = AngularFreq(gamma_values[i]);
        r.samples[i].outcomes[task % 4] = run_loop_outcome(cfg, opts);
    });
    for (std::size_t i = 0; i < gamma_values.size(); ++i)
        r.samples[i].value = gamma_values[i];
    return r;
}

std::vector<SweepResult> sweep_t5(const LoopConfig& base, const std::vector<double>& t5_values,
                                  const std::vector<double>& gamma_min_values, const OutcomeOptions& opts)
{
    require_ascending(t5_values, "t5");
    if (gamma_min_values.empty())
        throw InvalidArgument("gamma_min list is empty");
    for (double g : gamma_min_values)
        if (!(g >= 0) || !std::isfinite(g))
            throw InvalidArgument("gamma_min values must be finite and non-negative");

    // Strokes 1-4 are independent of T5 and of the stroke-5 decay.
    std::array<Vec4, 4> prefix;
    std::array<double, 4> edge{};
    EvolveOptions sparse = opts.evolve;
    sparse.record_stride = kSparseStride;
    parallel_for(4, opts.threads, [&](std::size_t c) {
        const auto [s, d] = kCombinations[c];
        const LoopConfig cfg = with_combination(base, s, d);
        ParamSchedule sched = build_loop(cfg);
        edge[c] = sched.segments.back().delta_start;
        sched.segments.pop_back();
        prefix[c] = evolve(prepare_state(cfg.start, opts.prep), sched, opts.jumps, sparse).states.back();
    });

    std::vector<SweepResult> out(gamma_min_values.size());
    for (std::size_t g = 0; g < out.size(); ++g) {
        out[g].axis = "t5";
        out[g].family_value = gamma_min_values[g];
        out[g].samples.resize(t5_values.size());
        for (std::size_t i = 0; i < t5_values.size(); ++i)
            out[g].samples[i].value = t5_values[i];
    }
    const std::size_t per_family = t5_values.size() * 4;
    parallel_for(out.size() * per_family, opts.threads, [&](std::size_t task) {
        const std::size_t g = task / per_family;
        const std::size_t i = (task % per_family) / 4;
        const std::size_t c = task % 4;
        ParamSchedule last;
        last.segments.push_back({t5_values[i], edge[c], 0.0, gamma_min_values[g], base.omega.value,
                                 SegmentKind::IsoDecayRamp, 5});
        const auto v = evolve(QubitDensity::from_vec(prefix[c]), last, opts.jumps, sparse).states.back();
        out[g].samples[i].outcomes[c] = finish(kCombinations[c].first, kCombinations[c].second, v, opts.threshold);
    });
    return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& sweeps)
{
    const bool family = std::any_of(sweeps.begin(), sweeps.end(), [](const auto& s) { return s.family_value; });
    os << "axis_value,start,direction,f_plus_final,f_minus_final,verdict" << (family ? ",gamma_min" : "") << '\n';
    for (const auto& sweep : sweeps) {
        for (const auto& sample : sweep.samples) {
            for (const auto& o : sample.outcomes) {
                os << format_real(sample.value) << ',' << to_string(o.start) << ',' << to_string(o.direction) << ','
                   << format_real(o.f_plus_final) << ',' << format_real(o.f_minus_final) << ','
                   << to_string(o.verdict);
                if (family)
                    os << ',' << format_real(sweep.family_value.value_or(0.0));
                os << '\n';
            }
        }
    }
}

std::vector<BranchPoint> branch_projection(const Trajectory& traj)
{
    using C = std::complex<double>;
    std::vector<BranchPoint> out;
    out.reserve(traj.size());
    C prev_upper{}, prev_lower{};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& p = traj.params[k];
        Matrix2c<double> h;
        h << C(p.delta, -p.gamma), C(p.omega / 2), C(p.omega / 2), C(0);
        Eigen::ComplexEigenSolver<Matrix2c<double>> es(h, true);
        if (es.info() != Eigen::Success)
            throw NumericalError("H_eff diagonalization failed at t = " + std::to_string(traj.times[k]) + " us");
        C e0 = es.eigenvalues()(0), e1 = es.eigenvalues()(1);
        Vector2c<double> v0 = es.eigenvectors().col(0).normalized();
        Vector2c<double> v1 = es.eigenvectors().col(1).normalized();
        bool swap;
        if (k == 0)
            swap = e1.real() > e0.real() || (e1.real() == e0.real() && e1.imag() > e0.imag());
        else
            swap = std::abs(e1 - prev_upper) + std::abs(e0 - prev_lower) <
                   std::abs(e0 - prev_upper) + std::abs(e1 - prev_lower);
        if (swap) {
            std::swap(e0, e1);
            std::swap(v0, v1);
        }
        const Matrix2c<double> rho = traj.state(k).matrix();
        BranchPoint b;
        b.t = traj.times[k];
        b.e_upper = e0;
        b.e_lower = e1;
        b.p_upper = (v0.adjoint() * rho * v0)(0, 0).real();
        b.p_lower = (v1.adjoint() * rho * v1)(0, 0).real();
        const double scale = std::max({p.omega, std::abs(p.delta), p.gamma, std::numeric_limits<double>::min()});
        b.near_degeneracy = std::abs(e0 - e1) < 1e-6 * scale;
        out.push_back(b);
        prev_upper = e0;
        prev_lower = e1;
    }
    return out;
}

std::vector<QubitDensity> stroke_end_states(const Trajectory& traj)
{
    std::vector<QubitDensity> out;
    for (int s = 1; s <= 5; ++s) {
        std::optional<std::size_t> last;
        for (std::size_t k = 0; k < traj.size(); ++k)
            if (traj.strokes[k] == s)
                last = k;
        if (last)
            out.push_back(traj.state(*last));
    }
    return out;
}

} // namespace lep
