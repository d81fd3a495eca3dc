#include "lep/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "lep/analysis.hpp"
#include "lep/config.hpp"
#include "lep/io.hpp"
#include "lep/parallel.hpp"
#include "lep/thermo.hpp"

namespace lep {

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string g6(double v) { return fmt("%.6g", v); }

CriterionResult result(int id, const std::string& name, bool ok, std::string detail)
{
    return {id, name, ok, std::move(detail)};
}

// Experimental preparation quoted for the main loops.
const PrepMode kFixturePrep = PrepMode::experimental(0.985);

LoopConfig default_loop(StartLabel s, Direction d)
{
    LoopConfig cfg;
    cfg.start = start_state(s);
    cfg.direction = d;
    return cfg;
}

// Final state each direction is expected to select (CW -> psi+, CCW -> psi-).
StartLabel selected_by(Direction d) { return d == Direction::CW ? StartLabel::Plus : StartLabel::Minus; }

double fidelity_to(const LoopOutcome& o, StartLabel s) { return s == StartLabel::Plus ? o.f_plus_final : o.f_minus_final; }

bool chiral_quadruple(const SweepSample& sample)
{
    return sample.get(StartLabel::Plus, Direction::CW).verdict == Verdict::Returned &&
           sample.get(StartLabel::Minus, Direction::CW).verdict == Verdict::Converted &&
           sample.get(StartLabel::Minus, Direction::CCW).verdict == Verdict::Returned &&
           sample.get(StartLabel::Plus, Direction::CCW).verdict == Verdict::Converted;
}

bool all_returned(const SweepSample& sample)
{
    return std::all_of(sample.outcomes.begin(), sample.outcomes.end(),
                       [](const LoopOutcome& o) { return o.verdict == Verdict::Returned; });
}

std::string outcome_row(const std::string& tag, const LoopOutcome& o)
{
    return tag + ',' + to_string(o.start) + ',' + to_string(o.direction) + ',' + format_real(o.f_plus_final) + ',' +
           format_real(o.f_minus_final) + ',' + to_string(o.verdict) + '\n';
}

CriterionResult spectral_closed_forms(unsigned, ArtifactMap&)
{
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> omega_dist(0.05, 2.0);
    std::uniform_real_distribution<double> ratio_dist(0.0, 10.0);
    double worst = 0;
    for (bool jumps : {true, false}) {
        for (int k = 0; k < 1000; ++k) {
            const double w = omega_dist(rng);
            const double g = ratio_dist(rng) * w;
            const auto raw = eigenpairs<double>(liouvillian_matrix(w, 0.0, g, jumps));
            const auto exact = closed_form_spectrum(AngularFreq(w), AngularFreq(g), jumps);
            const auto p = detail::best_matching(exact, raw.values);
            for (int i = 0; i < 4; ++i)
                worst = std::max(worst, std::abs(raw.values[p[i]] - exact[i]) / std::max(w, g));
        }
    }
    const AngularFreq omega = AngularFreq::from_khz(120.0);
    const double lep = find_ep(omega, true).value;
    const double hep = find_ep(omega, false).value;
    const double lep_err = std::abs(lep / (4 * omega.value) - 1);
    const double hep_err = std::abs(hep / (2 * omega.value) - 1);
    const bool ok = worst <= 1e-9 && lep_err <= 1e-6 && hep_err <= 1e-6;
    return result(1, "spectral closed forms", ok,
                  "max rel eigenvalue error " + g6(worst) + " (<= 1e-9); LEP " + fmt("%.6f", lep) + " rel err " +
                      g6(lep_err) + "; HEP " + fmt("%.6f", hep) + " rel err " + g6(hep_err));
}

CriterionResult oracle_equivalence(unsigned, ArtifactMap&)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> nseg(1, 4);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const bool jumps = trial % 2 == 0;
        ParamSchedule sched;
        const int n = nseg(rng);
        for (int k = 0; k < n; ++k) {
            const double d = -3 + 6 * unit(rng);
            sched.segments.push_back({0.1 + 4.9 * unit(rng), d, d, 2 * unit(rng), 2 * unit(rng),
                                      SegmentKind::IsochoricStage, 0});
        }
        const double theta = std::numbers::pi * unit(rng);
        const double phi = 2 * std::numbers::pi * unit(rng);
        const PureState psi{std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
        const auto rho0 = prepare_state(psi, PrepMode::experimental(0.5 + 0.5 * std::max(unit(rng), 1e-3)));

        const auto traj = evolve(rho0, sched, jumps);
        Vec4 v = rho0.vec();
        for (std::size_t k = 0; k < sched.segments.size(); ++k) {
            const auto& s = sched.segments[k];
            v = propagate_const_vec(v, s.params_at(0), s.duration, jumps);
            worst = std::max(worst, (traj.states[traj.segment_ends[k]] - v).cwiseAbs().maxCoeff());
        }
    }
    return result(2, "oracle equivalence", worst <= 1e-7,
                  "max element-wise |RK4 - expm| over 100 schedules " + g6(worst) + " (<= 1e-7)");
}

CriterionResult conservation(unsigned threads, ArtifactMap&)
{
    std::array<double, 4> drift{}, herm{}, slack{};
    parallel_for(4, threads, [&](std::size_t c) {
        const auto [s, d] = kCombinations[c];
        const auto traj = evolve(prepare_state(start_state(s), PrepMode::ideal()), build_loop(default_loop(s, d)), true);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const auto& v = traj.states[k];
            drift[c] = std::max(drift[c], std::abs((v(0) + v(3)).real() - 1));
            herm[c] = std::max(herm[c], hermiticity_error<double>(v));
            const auto rho = traj.state(k);
            slack[c] = std::max(slack[c], -std::min({rho.rho_ee, rho.rho_gg, rho.psd_margin(), 0.0}));
        }
    });
    const double dt = *std::max_element(drift.begin(), drift.end());
    const double dh = *std::max_element(herm.begin(), herm.end());
    const double dp = *std::max_element(slack.begin(), slack.end());
    return result(3, "conservation suite", dt <= 1e-7 && dh <= 1e-9 && dp <= 1e-6,
                  "trace drift " + g6(dt) + " (<= 1e-7), hermiticity " + g6(dh) + " (<= 1e-9), positivity slack " +
                      g6(dp) + " (<= 1e-6)");
}

struct QuadrupleExpectation {
    StartLabel start;
    Direction dir;
    Verdict verdict;
    double f_start;
};

CriterionResult chirality_quadruple(unsigned threads, ArtifactMap& art)
{
    const std::array<QuadrupleExpectation, 4> expect{{
        {StartLabel::Plus, Direction::CW, Verdict::Returned, 0.957},
        {StartLabel::Minus, Direction::CCW, Verdict::Returned, 0.957},
        {StartLabel::Minus, Direction::CW, Verdict::Converted, 0.0487},
        {StartLabel::Plus, Direction::CCW, Verdict::Converted, 0.039},
    }};
    std::array<LoopOutcome, 4> got;
    OutcomeOptions opts;
    opts.prep = kFixturePrep;
    parallel_for(4, threads, [&](std::size_t k) {
        got[k] = run_loop_outcome(default_loop(expect[k].start, expect[k].dir), opts);
    });
    bool ok = true;
    std::string detail;
    std::string csv = "case,start,direction,f_plus_final,f_minus_final,verdict\n";
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& e = expect[k];
        const auto& o = got[k];
        const bool pass = o.verdict == e.verdict && std::abs(o.f_start() - e.f_start) <= 0.02;
        ok = ok && pass;
        detail += (detail.empty() ? "" : "; ") + to_string(e.dir) + "/" + to_string(e.start) + " f_start " +
                  fmt("%.4f", o.f_start()) + " (want " + fmt("%.4g", e.f_start) + "+-0.02, " + to_string(e.verdict) +
                  ") got " + to_string(o.verdict);
        csv += outcome_row("paper-default", o);
    }
    art["c4_quadruple.csv"] = csv;
    return result(4, "chirality quadruple", ok, detail);
}

CriterionResult corner_states(unsigned, ArtifactMap& art)
{
    struct Golden {
        char label;
        double ee, gg;
        std::complex<double> eg;
    };
    const std::array<Golden, 4> expected_corners{{
        {'B', 0.668, 0.317, {0.444, -0.122}},
        {'C', 0.021, 0.964, {-0.107, -0.089}},
        {'D', 0.104, 0.88, {0.284, -0.008}},
        {'E', 0.021, 0.964, {-0.036, -0.137}},
    }};
    OutcomeOptions opts;
    opts.prep = kFixturePrep;
    Trajectory traj;
    run_loop_outcome(default_loop(StartLabel::Plus, Direction::CW), opts, traj);
    const auto ends = stroke_end_states(traj);
    bool ok = ends.size() >= 4;
    double worst = 0;
    std::string csv = "corner,source,rho_ee,re_rho_eg,im_rho_eg,rho_gg\n";
    std::string detail;
    for (std::size_t k = 0; k < 4 && k < ends.size(); ++k) {
        const auto& p = expected_corners[k];
        const auto& s = ends[k];
        const double err = std::max({std::abs(s.rho_ee - p.ee), std::abs(s.rho_gg - p.gg),
                                     std::abs(s.rho_eg.real() - p.eg.real()), std::abs(s.rho_eg.imag() - p.eg.imag())});
        worst = std::max(worst, err);
        detail += (detail.empty() ? "" : "; ") + std::string(1, p.label) + " max err " + fmt("%.3f", err);
        csv += std::string(1, p.label) + ",expected," + format_real(p.ee) + ',' + format_real(p.eg.real()) + ',' +
               format_real(p.eg.imag()) + ',' + format_real(p.gg) + '\n';
        csv += std::string(1, p.label) + ",simulated," + format_real(s.rho_ee) + ',' + format_real(s.rho_eg.real()) +
               ',' + format_real(s.rho_eg.imag()) + ',' + format_real(s.rho_gg) + '\n';
    }
    ok = ok && worst <= 0.02;
    art["c5_corners.csv"] = csv;
    return result(5, "corner-state golden values", ok, detail + " (each <= 0.02)");
}

CriterionResult thermo_signs(unsigned threads, ArtifactMap& art)
{
    const std::array<std::pair<StartLabel, Direction>, 2> runs{{
        {StartLabel::Plus, Direction::CW},
        {StartLabel::Minus, Direction::CCW},
    }};
    std::array<ThermoLedger, 2> ledgers;
    std::array<ThermoLedger, 2> halves;
    OutcomeOptions opts;
    opts.prep = kFixturePrep;
    parallel_for(2, threads, [&](std::size_t k) {
        Trajectory traj;
        run_loop_outcome(default_loop(runs[k].first, runs[k].second), opts, traj);
        ledgers[k] = accumulate(traj, HConvention::Supplement);
        halves[k] = accumulate(traj, HConvention::MainText);
    });
    const bool signs = classify_engine(ledgers[0]) == EngineClass::QHE && classify_engine(ledgers[1]) == EngineClass::QR;
    const bool iso = ledgers[0].stroke_work[2] == 0 && ledgers[0].stroke_work[4] == 0 &&
                     ledgers[1].stroke_work[2] == 0 && ledgers[1].stroke_work[4] == 0;
    const bool invariant = classify_engine(halves[0]) == classify_engine(ledgers[0]) &&
                           classify_engine(halves[1]) == classify_engine(ledgers[1]);
    std::string csv = "start,direction,convention,w_in,w_out,w_net,q_total,classification\n";
    for (std::size_t k = 0; k < 2; ++k)
        for (const auto* l : {&ledgers[k], &halves[k]})
            csv += to_string(runs[k].first) + ',' + to_string(runs[k].second) + ',' + to_string(l->convention) + ',' +
                   format_real(l->w_in) + ',' + format_real(l->w_out) + ',' + format_real(l->w_net) + ',' +
                   format_real(l->q) + ',' + to_string(classify_engine(*l)) + '\n';
    art["c6_work.csv"] = csv;
    return result(6, "thermodynamic signs", signs && iso && invariant,
                  "cw/plus W_net " + fmt("%+.4f", ledgers[0].w_net) + " " + to_string(classify_engine(ledgers[0])) +
                      "; ccw/minus W_net " + fmt("%+.4f", ledgers[1].w_net) + " " +
                      to_string(classify_engine(ledgers[1])) + "; isochoric work " + (iso ? "exactly 0" : "nonzero"));
}

CriterionResult chirality_transition(unsigned threads, ArtifactMap& art)
{
    auto base = make_preset("figS4");
    const double four_omega = 4 * base.loop.omega.value;
    const std::vector<double> ratios{0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.2, 0.5};
    std::vector<double> gammas;
    for (double r : ratios)
        gammas.push_back(r * four_omega);
    const auto sweep = sweep_gamma_max(base.loop_config(), gammas, base.outcome_options(threads));

    bool low_ok = true, high_ok = true;
    std::optional<double> onset;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const auto& s = sweep.samples[i];
        if (ratios[i] <= 0.01 + 1e-12)
            low_ok = low_ok && all_returned(s);
        if (ratios[i] >= 0.10 - 1e-12)
            high_ok = high_ok && chiral_quadruple(s);
        if (!onset && chiral_quadruple(s))
            onset = ratios[i];
    }
    const bool onset_ok = onset && *onset >= 0.02 - 1e-12 && *onset <= 0.10 + 1e-12;

    std::ostringstream csv;
    write_sweep_csv(csv, {sweep});
    art["c7_gamma_max_sweep.csv"] = csv.str();

    const auto& first = sweep.samples.front();
    const auto& last = sweep.samples.back();
    std::string detail = "ratio 0.005 start fidelities";
    for (const auto& o : first.outcomes)
        detail += " " + fmt("%.3f", o.f_start());
    detail += "; ratio 0.5 cw/plus f+ " + fmt("%.3f", last.get(StartLabel::Plus, Direction::CW).f_plus_final) +
              " ccw/minus f- " + fmt("%.3f", last.get(StartLabel::Minus, Direction::CCW).f_minus_final) +
              "; onset " + (onset ? fmt("%.3g", *onset) : std::string("none"));
    return result(7, "chirality transition", low_ok && high_ok && onset_ok, detail);
}

CriterionResult single_sheet(unsigned threads, ArtifactMap& art)
{
    struct Case {
        const char* preset;
        Direction chiral;
        StartLabel attractor;
    };
    const std::array<Case, 2> cases{{{"figS5", Direction::CCW, StartLabel::Plus}, {"figS6", Direction::CW, StartLabel::Minus}}};
    bool ok = true;
    std::string detail;
    std::string csv = "case,start,direction,f_plus_final,f_minus_final,verdict\n";
    for (const auto& c : cases) {
        auto cfg = make_preset(c.preset);
        std::array<LoopOutcome, 4> got;
        parallel_for(4, threads, [&](std::size_t k) {
            LoopConfig l = cfg.loop_config();
            l.start = start_state(kCombinations[k].first);
            l.direction = kCombinations[k].second;
            got[k] = run_loop_outcome(l, cfg.outcome_options(1));
        });
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& o = got[k];
            csv += outcome_row(c.preset, o);
            bool pass;
            if (o.direction == c.chiral)
                pass = o.start == c.attractor ? o.verdict == Verdict::Returned : o.verdict == Verdict::Converted;
            else
                pass = std::max(o.f_plus_final, o.f_minus_final) < 0.75;
            ok = ok && pass;
            detail += (detail.empty() ? "" : "; ") + std::string(c.preset) + " " + to_string(o.direction) + "/" +
                      to_string(o.start) + " f+ " + fmt("%.3f", o.f_plus_final) + " f- " +
                      fmt("%.3f", o.f_minus_final) + (pass ? "" : " FAIL");
        }
    }
    art["c8_single_sheet.csv"] = csv;
    return result(8, "single-sheet nonreciprocity", ok, detail);
}

CriterionResult no_jump_limit(unsigned threads, ArtifactMap& art)
{
    auto cfg = make_preset("figS9");
    const std::vector<double> t5{50, 100, 200};
    const auto sweeps = sweep_t5(cfg.loop_config(), t5, {0.0, 0.05}, cfg.outcome_options(threads));
    double min_sel = 1, min_mirror = 1;
    bool ok = true;
    for (std::size_t i = 0; i < t5.size(); ++i) {
        for (std::size_t c = 0; c < 4; ++c) {
            const auto dir = kCombinations[c].second;
            const auto sel = selected_by(dir);
            const auto other = sel == StartLabel::Plus ? StartLabel::Minus : StartLabel::Plus;
            const double f0 = fidelity_to(sweeps[0].samples[i].outcomes[c], sel);
            const double f1 = fidelity_to(sweeps[1].samples[i].outcomes[c], sel);
            min_sel = std::min(min_sel, f0);
            min_mirror = std::min(min_mirror, fidelity_to(sweeps[0].samples[i].outcomes[c], other));
            ok = ok && f0 >= 0.99 && f1 < f0;
        }
    }
    std::ostringstream csv;
    write_sweep_csv(csv, sweeps);
    art["c9_t5_sweep.csv"] = csv.str();
    return result(9, "no-jump limit", ok,
                  "min direction-selected fidelity at gamma_min 0, T5 in {50,100,200}: " + fmt("%.4f", min_sel) +
                      " (>= 0.99); opposite-state minimum " + fmt("%.4f", min_mirror));
}

// Small end-to-end pipeline whose CSV output must not depend on run or thread count.
ArtifactMap determinism_pipeline(unsigned threads)
{
    ArtifactMap out;
    std::ostringstream surface;
    write_surface_csv(surface, riemann_surface(AngularFreq::from_khz(120.0), {-2.5, 2.5}, {0.1, 4.0}, 21,
                                               SurfaceOptions{true, threads}));
    out["surface.csv"] = surface.str();

    LoopConfig loop = default_loop(StartLabel::Plus, Direction::CW);
    OutcomeOptions opts;
    opts.threads = threads;
    std::ostringstream sweep;
    write_sweep_csv(sweep, {sweep_gamma_max(loop, {0.5, 1.45}, opts)});
    out["sweep.csv"] = sweep.str();

    EvolveOptions eo;
    eo.record_stride = 500;
    std::ostringstream traj;
    write_trajectory_csv(traj, evolve(prepare_state(loop.start, kFixturePrep), build_loop(loop), true, eo));
    out["trajectory.csv"] = traj.str();
    return out;
}

bool round_trips(const std::string& csv)
{
    std::istringstream in(csv);
    const auto table = read_csv(in);
    std::ostringstream again;
    for (std::size_t k = 0; k < table.header.size(); ++k)
        again << (k ? "," : "") << table.header[k];
    again << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            std::string cell = row[k];
            double v;
            try {
                v = parse_real(cell);
                cell = format_real(v);
            } catch (const InvalidArgument&) {
            }
            again << (k ? "," : "") << cell;
        }
        again << '\n';
    }
    return again.str() == csv;
}

CriterionResult determinism(unsigned threads, ArtifactMap& art)
{
    const auto a = determinism_pipeline(1);
    const auto b = determinism_pipeline(std::max(2u, threads));
    const auto c = determinism_pipeline(1);
    bool same = a == b && a == c;
    bool lossless = true;
    for (const auto& [name, body] : a) {
        lossless = lossless && round_trips(body);
        art["c10_" + name] = body;
    }
    return result(10, "determinism", same && lossless,
                  std::string("three runs (1 and ") + std::to_string(std::max(2u, threads)) + " threads) " +
                      (same ? "byte-identical" : "DIFFER") + "; CSV round-trip " + (lossless ? "lossless" : "LOSSY"));
}

} // namespace

const std::vector<Criterion>& acceptance_criteria()
{
    static const std::vector<Criterion> all{
        {1, "spectral closed forms", spectral_closed_forms},
        {2, "oracle equivalence", oracle_equivalence},
        {3, "conservation suite", conservation},
        {4, "chirality quadruple", chirality_quadruple},
        {5, "corner-state golden values", corner_states},
        {6, "thermodynamic signs", thermo_signs},
        {7, "chirality transition", chirality_transition},
        {8, "single-sheet nonreciprocity", single_sheet},
        {9, "no-jump limit", no_jump_limit},
        {10, "determinism", determinism},
    };
    return all;
}

std::vector<CriterionResult> run_acceptance(unsigned threads, ArtifactMap& artifacts)
{
    std::vector<CriterionResult> out;
    for (const auto& c : acceptance_criteria()) {
        try {
            out.push_back(c.check(threads, artifacts));
        } catch (const std::exception& e) {
            out.push_back({c.id, c.name, false, std::string("error: ") + e.what()});
        }
    }
    artifacts["criteria.csv"] = results_csv(out);
    return out;
}

std::string format_result_line(const CriterionResult& r)
{
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %2d %-28s ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
    return head + r.detail;
}

std::string results_csv(const std::vector<CriterionResult>& results)
{
    std::string csv = "id,name,passed,detail\n";
    for (const auto& r : results) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        csv += std::to_string(r.id) + ',' + r.name + ',' + (r.passed ? "true" : "false") + ',' + detail + '\n';
    }
    return csv;
}

} // namespace lep
