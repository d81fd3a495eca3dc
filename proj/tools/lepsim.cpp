// lepsim: spectra, Riemann surfaces, loops and sweeps for the driven
// dissipative qubit, plus the embedded acceptance suite.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lep/acceptance.hpp"
#include "lep/analysis.hpp"
#include "lep/config.hpp"
#include "lep/io.hpp"
#include "lep/parallel.hpp"
#include "lep/svg.hpp"
#include "lep/thermo.hpp"

namespace fs = std::filesystem;
using namespace lep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptance = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct ConfigFlags {
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;
    std::string output_dir;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f)
{
    cmd->add_option("--config", f.config_path, "JSON run configuration");
    cmd->add_option("--preset", f.preset, "named preset (paper-default, figS4, figS5, figS6, figS8, figS9)");
    cmd->add_option("--set", f.overrides, "override a config key, key=value (repeatable)");
    cmd->add_option("--output-dir,-o", f.output_dir, "directory for emitted files");
}

// Precedence: --preset (else the file's own preset), then config keys, then --set.
RunConfig resolve(const ConfigFlags& f)
{
    nlohmann::json doc = nlohmann::json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in)
            throw InvalidArgument("cannot open config " + f.config_path);
        doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded())
            throw InvalidArgument("config " + f.config_path + " is not valid JSON");
    }
    if (!f.preset.empty())
        doc["preset"] = f.preset;
    RunConfig cfg = parse_run_config(doc);
    for (const auto& o : f.overrides)
        apply_override(cfg, o);
    if (!f.output_dir.empty())
        cfg.output_dir = f.output_dir;
    return cfg;
}

// All file output goes through here, from the main thread only.
class Writer {
public:
    explicit Writer(const RunConfig& cfg) : cfg_(cfg)
    {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec)
            throw Error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
    }

    void emit(const std::string& format, const std::string& name, const std::string& body)
    {
        if (!cfg_.emit.count(format))
            return;
        const auto path = cfg_.output_dir / name;
        write_text_file(path, body);
        std::printf("wrote %s\n", path.string().c_str());
    }

private:
    const RunConfig& cfg_;
};

std::string complex_text(std::complex<double> z)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.9f %+.9fi", z.real(), z.imag());
    return buf;
}

nlohmann::ordered_json metadata(const RunConfig& cfg)
{
    nlohmann::ordered_json j;
    j["config"] = to_json(cfg);
    j["notes"] = cfg.notes;
    return j;
}

int cmd_spectrum(double omega_khz, double gamma, double delta_khz, bool no_jumps, const std::string& json_path)
{
    const SystemParams p{AngularFreq::from_khz(omega_khz).value, AngularFreq::from_khz(delta_khz).value, gamma};
    const auto L = build_liouvillian(p, !no_jumps);
    const auto s = spectrum(L);
    std::printf("omega = %.9f rad/us, delta = %.9f rad/us, gamma = %.9f rad/us, jumps = %s\n", p.omega, p.delta,
                p.gamma, no_jumps ? "no" : "yes");
    for (int k = 0; k < 4; ++k)
        std::printf("lambda%d = %s\n", k + 1, complex_text(s.values[k]).c_str());
    const double gap = std::abs(s.values[2] - s.values[3]);
    std::printf("|lambda3 - lambda4| = %.3e\n", gap);
    if (!json_path.empty()) {
        nlohmann::ordered_json j;
        j["omega"] = p.omega;
        j["delta"] = p.delta;
        j["gamma"] = p.gamma;
        j["jumps"] = !no_jumps;
        j["gap_34"] = gap;
        nlohmann::ordered_json values = nlohmann::ordered_json::array();
        for (int k = 0; k < 4; ++k)
            values.push_back({{"branch", k + 1}, {"re", s.values[k].real()}, {"im", s.values[k].imag()}});
        j["eigenvalues"] = values;
        write_text_file(json_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_surface(const RunConfig& cfg, unsigned threads)
{
    const auto surf = riemann_surface(cfg.loop.omega, cfg.surface_delta, cfg.surface_gamma, cfg.surface_resolution,
                                      SurfaceOptions{cfg.jumps, threads});
    Writer w(cfg);
    std::ostringstream csv;
    write_surface_csv(csv, surf);
    w.emit("csv", "surface.csv", csv.str());
    std::ostringstream json;
    write_surface_json(json, surf);
    w.emit("json", "surface.json", json.str());

    std::vector<double> dk;
    for (double d : surf.deltas)
        dk.push_back(AngularFreq(d).khz());
    std::vector<double> re, im;
    for (const auto& v : surf.sheets) {
        re.push_back(v[3].real());
        im.push_back(v[3].imag());
    }
    const double ep = ep_closed_form(cfg.loop.omega, cfg.jumps).value;
    svg::HeatmapOptions h;
    h.xlabel = "detuning / 2pi (kHz)";
    h.ylabel = "gamma (rad/us)";
    h.markers.push_back({0.0, ep, cfg.jumps ? "LEP" : "HEP"});
    for (const auto& [i, j] : surf.lep_locus)
        h.markers.push_back({dk[i], surf.gammas[j], "gap min"});
    h.rect = svg::Rect{cfg.loop.delta_min.khz(), cfg.loop.gamma_min.value, cfg.loop.delta_max.khz(),
                       cfg.loop.gamma_max.value};
    h.title = "Re lambda4";
    auto re_panel = svg::heatmap(dk, surf.gammas, re, h);
    h.title = "Im lambda4";
    auto im_panel = svg::heatmap(dk, surf.gammas, im, h);
    w.emit("svg", "surface.svg", svg::compose({re_panel, im_panel}, 2));

    const bool inside = ep >= cfg.loop.gamma_min.value && ep <= cfg.loop.gamma_max.value;
    std::printf("grid %zux%zu, %zu degeneracy cells, exceptional point at gamma = %.6f (%s the loop rectangle)\n",
                surf.deltas.size(), surf.gammas.size(), surf.lep_locus.size(), ep, inside ? "inside" : "outside");
    return kExitOk;
}

int cmd_loop(const RunConfig& cfg)
{
    const LoopConfig loop = cfg.loop_config();
    OutcomeOptions opts = cfg.outcome_options(1);
    Trajectory traj;
    const auto outcome = run_loop_outcome(loop, opts, traj);
    const auto ledger = accumulate(traj, cfg.convention);

    Writer w(cfg);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    w.emit("csv", "trajectory.csv", csv.str());

    const auto branches = branch_projection(traj);
    std::string bcsv = "t_us,p_upper,p_lower,near_degeneracy\n";
    for (const auto& b : branches)
        bcsv += format_real(b.t) + ',' + format_real(b.p_upper) + ',' + format_real(b.p_lower) + ',' +
                (b.near_degeneracy ? "1" : "0") + '\n';
    w.emit("csv", "branches.csv", bcsv);

    auto j = metadata(cfg);
    j["outcome"] = {{"start", to_string(outcome.start)},
                    {"direction", to_string(outcome.direction)},
                    {"f_plus_final", outcome.f_plus_final},
                    {"f_minus_final", outcome.f_minus_final},
                    {"trace_final", outcome.trace_final},
                    {"verdict", to_string(outcome.verdict)}};
    std::ostringstream ledger_json;
    write_ledger_json(ledger_json, ledger);
    j["thermo"] = nlohmann::ordered_json::parse(ledger_json.str());
    w.emit("json", "loop.json", j.dump(2) + "\n");

    svg::Series fp{"fidelity psi+", {}, {}, "#d62728"};
    svg::Series fm{"fidelity psi-", {}, {}, "#1f77b4"};
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 2000);
    for (std::size_t k = 0; k < traj.size(); k += stride) {
        const auto rho = traj.state(k);
        const double tr = rho.trace();
        fp.x.push_back(traj.times[k]);
        fp.y.push_back(fidelity(rho, make_psi_plus()) / tr);
        fm.x.push_back(traj.times[k]);
        fm.y.push_back(fidelity(rho, make_psi_minus()) / tr);
    }
    svg::LineOptions lo;
    lo.title = to_string(outcome.direction) + " loop from psi" + (outcome.start == StartLabel::Plus ? "+" : "-");
    lo.xlabel = "t (us)";
    lo.ylabel = "fidelity";
    lo.ymin = 0.0;
    lo.ymax = 1.0;
    for (std::size_t k = 0; k + 1 < traj.segment_ends.size(); ++k)
        if (traj.strokes[traj.segment_ends[k]] != traj.strokes[traj.segment_ends[k] + 1])
            lo.vlines.push_back(traj.times[traj.segment_ends[k]]);
    w.emit("svg", "fidelity.svg", svg::compose({svg::line_plot({fp, fm}, lo)}, 1));

    std::printf("start %s, direction %s: f+ = %.4f, f- = %.4f, verdict %s\n", to_string(outcome.start).c_str(),
                to_string(outcome.direction).c_str(), outcome.f_plus_final, outcome.f_minus_final,
                to_string(outcome.verdict).c_str());
    std::printf("w_in = %.6f, w_out = %.6f, w_net = %.6f, q = %.6f (%s), %s\n", ledger.w_in, ledger.w_out,
                ledger.w_net, ledger.q, to_string(cfg.convention).c_str(),
                to_string(classify_engine(ledger)).c_str());
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, unsigned threads)
{
    if (cfg.sweep_axis == SweepAxis::None)
        throw InvalidArgument("no sweep axis configured (set sweep_axis to gamma_max or t5)");
    if (cfg.sweep_values.empty())
        throw InvalidArgument("sweep axis list is empty");
    const LoopConfig loop = cfg.loop_config();
    const auto opts = cfg.outcome_options(threads);
    std::vector<SweepResult> sweeps;
    if (cfg.sweep_axis == SweepAxis::GammaMax)
        sweeps.push_back(sweep_gamma_max(loop, cfg.sweep_values, opts));
    else
        sweeps = sweep_t5(loop, cfg.sweep_values,
                          cfg.sweep_gamma_min_values.empty() ? std::vector<double>{loop.gamma_min.value}
                                                             : cfg.sweep_gamma_min_values,
                          opts);

    Writer w(cfg);
    std::ostringstream csv;
    write_sweep_csv(csv, sweeps);
    w.emit("csv", "sweep.csv", csv.str());
    w.emit("json", "sweep.json", metadata(cfg).dump(2) + "\n");

    const bool gamma_axis = cfg.sweep_axis == SweepAxis::GammaMax;
    const double four_omega = 4 * loop.omega.value;
    const char* colors[] = {"#d62728", "#7f7f7f", "#000000", "#2ca02c"};
    std::vector<svg::Panel> panels;
    for (std::size_t c = 0; c < kCombinations.size(); ++c) {
        std::vector<svg::Series> series;
        for (std::size_t s = 0; s < sweeps.size(); ++s) {
            std::string tag = sweeps[s].family_value ? " gamma_min " + format_real(*sweeps[s].family_value) : "";
            svg::Series fp{"psi+" + tag, {}, {}, gamma_axis ? "#d62728" : colors[s % 4], false};
            svg::Series fm{"psi-" + tag, {}, {}, gamma_axis ? "#1f77b4" : colors[s % 4], true};
            for (const auto& sample : sweeps[s].samples) {
                const double x = gamma_axis ? sample.value / four_omega : sample.value;
                fp.x.push_back(x);
                fm.x.push_back(x);
                fp.y.push_back(sample.outcomes[c].f_plus_final);
                fm.y.push_back(sample.outcomes[c].f_minus_final);
            }
            series.push_back(fp);
            series.push_back(fm);
        }
        svg::LineOptions lo;
        lo.title = to_string(kCombinations[c].second) + " from psi" +
                   (kCombinations[c].first == StartLabel::Plus ? "+" : "-");
        lo.xlabel = gamma_axis ? "gamma_max / 4 omega" : "T5 (us)";
        lo.ylabel = "final population";
        lo.ymin = 0.0;
        lo.ymax = 1.0;
        if (gamma_axis)
            lo.vlines.push_back(1.0);
        panels.push_back(svg::line_plot(series, lo));
    }
    w.emit("svg", "sweep.svg", svg::compose(panels, 2));
    std::printf("%zu samples x 4 combinations x %zu families\n", cfg.sweep_values.size(), sweeps.size());
    return kExitOk;
}

int cmd_validate(const std::string& output_dir, unsigned threads)
{
    ArtifactMap artifacts;
    const auto results = run_acceptance(threads, artifacts);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s\n", format_result_line(r).c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed,
                failed);
    if (!output_dir.empty()) {
        std::error_code ec;
        fs::create_directories(output_dir, ec);
        if (ec)
            throw Error("cannot create " + output_dir + ": " + ec.message());
        for (const auto& [name, body] : artifacts)
            write_text_file(fs::path(output_dir) / name, body);
        std::printf("wrote %zu files to %s\n", artifacts.size(), output_dir.c_str());
    }
    return failed == 0 ? kExitOk : kExitAcceptance;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Driven dissipative qubit: Liouvillian spectra, exceptional points and chiral heat-engine loops"};
    app.require_subcommand(1);

    double omega_khz = 0, gamma = 0, delta_khz = 0;
    bool no_jumps = false;
    std::string spectrum_json;
    auto* spec = app.add_subcommand("spectrum", "eigenvalues of the Liouvillian at one parameter point");
    spec->add_option("--omega-khz", omega_khz, "Rabi frequency Omega/2pi in kHz")->required();
    spec->add_option("--gamma", gamma, "effective decay rate in rad/us")->required();
    spec->add_option("--delta-khz", delta_khz, "detuning Delta/2pi in kHz")->capture_default_str();
    spec->add_flag("--no-jumps", no_jumps, "drop the quantum-jump term");
    spec->add_option("--json", spectrum_json, "also write the eigenvalues to this JSON file");

    ConfigFlags surface_flags, loop_flags, sweep_flags;
    auto* surface = app.add_subcommand("surface", "branch-continued eigenvalue sheets over (Delta, gamma)");
    add_config_flags(surface, surface_flags);

    std::string direction, start;
    auto* loop = app.add_subcommand("loop", "run one five-stroke loop");
    add_config_flags(loop, loop_flags);
    loop->add_option("--direction", direction, "cw or ccw");
    loop->add_option("--start", start, "plus or minus");

    auto* sweep = app.add_subcommand("sweep", "gamma_max or T5 sweep over all start/direction combinations");
    add_config_flags(sweep, sweep_flags);

    std::string validate_dir;
    auto* validate = app.add_subcommand("validate", "run the acceptance suite");
    validate->add_option("--output-dir,-o", validate_dir, "write criterion artifacts here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const unsigned threads = default_threads();
    try {
        if (*spec)
            return cmd_spectrum(omega_khz, gamma, delta_khz, no_jumps, spectrum_json);
        if (*surface)
            return cmd_surface(resolve(surface_flags), threads);
        if (*loop) {
            auto flags = loop_flags;
            if (!direction.empty())
                flags.overrides.push_back("direction=" + direction);
            if (!start.empty())
                flags.overrides.push_back("start=" + start);
            return cmd_loop(resolve(flags));
        }
        if (*sweep)
            return cmd_sweep(resolve(sweep_flags), threads);
        if (*validate)
            return cmd_validate(validate_dir, threads);
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
