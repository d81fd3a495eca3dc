#include "lep/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace lep {

namespace {

using nlohmann::json;

Stepped& stepped_of(LoopConfig& l)
{
    if (!std::holds_alternative<Stepped>(l.isochoric))
        throw InvalidArgument("n_steps/step_duration require isochoric = \"stepped\"");
    return std::get<Stepped>(l.isochoric);
}

LinearRamp& ramp_of(LoopConfig& l)
{
    if (!std::holds_alternative<LinearRamp>(l.isochoric))
        throw InvalidArgument("ramp_duration requires isochoric = \"ramp\"");
    return std::get<LinearRamp>(l.isochoric);
}

double number(const json& v, std::string_view key)
{
    if (!v.is_number())
        throw InvalidArgument("config key '" + std::string(key) + "' expects a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        throw InvalidArgument("config key '" + std::string(key) + "' must be finite");
    return d;
}

std::string text(const json& v, std::string_view key)
{
    if (!v.is_string())
        throw InvalidArgument("config key '" + std::string(key) + "' expects a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, std::string_view key)
{
    if (!v.is_array())
        throw InvalidArgument("config key '" + std::string(key) + "' expects an array of numbers");
    std::vector<double> out;
    for (const auto& x : v)
        out.push_back(number(x, key));
    return out;
}

std::size_t count(const json& v, std::string_view key)
{
    const double d = number(v, key);
    if (d < 1 || d != std::floor(d))
        throw InvalidArgument("config key '" + std::string(key) + "' expects a positive integer");
    return static_cast<std::size_t>(d);
}

SweepAxis parse_axis(const std::string& s)
{
    if (s == "none")
        return SweepAxis::None;
    if (s == "gamma_max")
        return SweepAxis::GammaMax;
    if (s == "t5")
        return SweepAxis::T5;
    throw InvalidArgument("unknown sweep axis '" + s + "' (expected none, gamma_max or t5)");
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"omega_khz", [](RunConfig& c, const json& v) { c.loop.omega = AngularFreq::from_khz(number(v, "omega_khz")); }},
        {"delta_min_khz",
         [](RunConfig& c, const json& v) { c.loop.delta_min = AngularFreq::from_khz(number(v, "delta_min_khz")); }},
        {"delta_max_khz",
         [](RunConfig& c, const json& v) { c.loop.delta_max = AngularFreq::from_khz(number(v, "delta_max_khz")); }},
        {"gamma_min", [](RunConfig& c, const json& v) { c.loop.gamma_min = AngularFreq(number(v, "gamma_min")); }},
        {"gamma_max", [](RunConfig& c, const json& v) { c.loop.gamma_max = AngularFreq(number(v, "gamma_max")); }},
        {"t1", [](RunConfig& c, const json& v) { c.loop.t1 = number(v, "t1"); }},
        {"t3", [](RunConfig& c, const json& v) { c.loop.t3 = number(v, "t3"); }},
        {"t5", [](RunConfig& c, const json& v) { c.loop.t5 = number(v, "t5"); }},
        {"isochoric",
         [](RunConfig& c, const json& v) {
             const auto s = text(v, "isochoric");
             if (s == "stepped") {
                 if (!std::holds_alternative<Stepped>(c.loop.isochoric))
                     c.loop.isochoric = Stepped{};
             } else if (s == "ramp") {
                 if (!std::holds_alternative<LinearRamp>(c.loop.isochoric))
                     c.loop.isochoric = LinearRamp{};
             } else {
                 throw InvalidArgument("unknown isochoric mode '" + s + "' (expected stepped or ramp)");
             }
         }},
        {"n_steps", [](RunConfig& c, const json& v) { stepped_of(c.loop).n_steps = static_cast<int>(count(v, "n_steps")); }},
        {"step_duration", [](RunConfig& c, const json& v) { stepped_of(c.loop).step_duration = number(v, "step_duration"); }},
        {"ramp_duration", [](RunConfig& c, const json& v) { ramp_of(c.loop).duration = number(v, "ramp_duration"); }},
        {"direction", [](RunConfig& c, const json& v) { c.loop.direction = parse_direction(text(v, "direction")); }},
        {"start", [](RunConfig& c, const json& v) { c.start = parse_start(text(v, "start")); }},
        {"sheet",
         [](RunConfig& c, const json& v) {
             if (v.is_null())
                 c.sheet.reset();
             else
                 c.sheet = parse_sheet(text(v, "sheet"));
         }},
        {"jumps",
         [](RunConfig& c, const json& v) {
             if (!v.is_boolean())
                 throw InvalidArgument("config key 'jumps' expects true or false");
             c.jumps = v.get<bool>();
         }},
        {"prep_fidelity",
         [](RunConfig& c, const json& v) {
             c.prep = v.is_null() ? PrepMode::ideal() : PrepMode::experimental(number(v, "prep_fidelity"));
         }},
        {"convention", [](RunConfig& c, const json& v) { c.convention = parse_convention(text(v, "convention")); }},
        {"threshold", [](RunConfig& c, const json& v) { c.threshold = number(v, "threshold"); }},
        {"dt_max", [](RunConfig& c, const json& v) { c.dt_max = number(v, "dt_max"); }},
        {"record_stride", [](RunConfig& c, const json& v) { c.record_stride = count(v, "record_stride"); }},
        {"surface_delta_min_khz",
         [](RunConfig& c, const json& v) {
             c.surface_delta.lo = AngularFreq::from_khz(number(v, "surface_delta_min_khz")).value;
         }},
        {"surface_delta_max_khz",
         [](RunConfig& c, const json& v) {
             c.surface_delta.hi = AngularFreq::from_khz(number(v, "surface_delta_max_khz")).value;
         }},
        {"surface_gamma_min", [](RunConfig& c, const json& v) { c.surface_gamma.lo = number(v, "surface_gamma_min"); }},
        {"surface_gamma_max", [](RunConfig& c, const json& v) { c.surface_gamma.hi = number(v, "surface_gamma_max"); }},
        {"surface_resolution",
         [](RunConfig& c, const json& v) { c.surface_resolution = count(v, "surface_resolution"); }},
        {"sweep_axis", [](RunConfig& c, const json& v) { c.sweep_axis = parse_axis(text(v, "sweep_axis")); }},
        {"sweep_values", [](RunConfig& c, const json& v) { c.sweep_values = numbers(v, "sweep_values"); }},
        {"sweep_gamma_min_values",
         [](RunConfig& c, const json& v) { c.sweep_gamma_min_values = numbers(v, "sweep_gamma_min_values"); }},
        {"output_dir", [](RunConfig& c, const json& v) { c.output_dir = text(v, "output_dir"); }},
        {"emit",
         [](RunConfig& c, const json& v) {
             if (!v.is_array())
                 throw InvalidArgument("config key 'emit' expects an array of strings");
             std::set<std::string> out;
             for (const auto& x : v) {
                 const auto s = text(x, "emit");
                 if (s != "csv" && s != "json" && s != "svg")
                     throw InvalidArgument("unknown emit format '" + s + "' (expected csv, json or svg)");
                 out.insert(s);
             }
             c.emit = std::move(out);
         }},
    };
    return table;
}

void apply_key(RunConfig& cfg, const std::string& key, const json& value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw InvalidArgument("unknown config key '" + key + "'");
    it->second(cfg, value);
}

std::vector<double> gamma_ratio_grid(double omega)
{
    std::vector<double> out;
    for (int k = 1; k <= 40; ++k)
        out.push_back(0.005 * k * 4 * omega);
    for (int k = 5; k <= 30; ++k)
        out.push_back(0.05 * k * 4 * omega);
    return out;
}

} // namespace

OutcomeOptions RunConfig::outcome_options(unsigned threads) const
{
    OutcomeOptions o;
    o.jumps = jumps;
    o.prep = prep;
    o.threshold = threshold;
    o.evolve.dt_max = dt_max;
    o.evolve.record_stride = record_stride;
    o.sheet = sheet;
    o.threads = threads;
    return o;
}

LoopConfig RunConfig::loop_config() const
{
    LoopConfig l = loop;
    l.start = start_state(start);
    return l;
}

std::vector<std::string> preset_names() { return {"paper-default", "figS4", "figS5", "figS6", "figS8", "figS9"}; }

RunConfig make_preset(std::string_view name)
{
    RunConfig c;
    c.preset = std::string(name);
    if (name == "paper-default")
        return c;
    if (name == "figS4") {
        c.loop.isochoric = Stepped{5, 10.0};
        c.sweep_axis = SweepAxis::GammaMax;
        c.sweep_values = gamma_ratio_grid(c.loop.omega.value);
        return c;
    }
    if (name == "figS5" || name == "figS6") {
        const bool negative = name == "figS5";
        c.loop.delta_min = AngularFreq::from_khz(negative ? -400.0 : 0.0);
        c.loop.delta_max = AngularFreq::from_khz(negative ? 0.0 : 400.0);
        c.loop.t1 = c.loop.t3 = c.loop.t5 = 6.0;
        c.sheet = negative ? Sheet::NegativeDelta : Sheet::PositiveDelta;
        c.loop.direction = negative ? Direction::CCW : Direction::CW;
        return c;
    }
    if (name == "figS8" || name == "figS9") {
        c.loop.delta_min = AngularFreq::from_khz(-1000.0);
        c.loop.delta_max = AngularFreq::from_khz(1000.0);
        c.surface_delta = {c.loop.delta_min.value, c.loop.delta_max.value};
        c.jumps = name == "figS8";
        c.sweep_axis = SweepAxis::T5;
        c.sweep_values = {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30, 40, 50, 60, 80, 100, 150, 200};
        c.sweep_gamma_min_values = {0.0, 0.025, 0.05};
        c.notes.push_back("detuning range read as -2pi*1.0 MHz .. +2pi*1.0 MHz (caption lists 1.0 MHz for both ends)");
        return c;
    }
    std::string known;
    for (const auto& n : preset_names())
        known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

RunConfig parse_run_config(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw InvalidArgument("config document must be a JSON object");
    RunConfig cfg;
    if (const auto it = doc.find("preset"); it != doc.end() && !it->is_null())
        cfg = make_preset(text(*it, "preset"));
    for (const auto& [key, value] : doc.items()) {
        if (key == "preset")
            continue;
        apply_key(cfg, key, value);
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("config " + path.string() + ": " + e.what());
    }
    return parse_run_config(doc);
}

void apply_override(RunConfig& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw InvalidArgument("override '" + std::string(assignment) + "' is not of the form key=value");
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    if (key == "preset") {
        cfg = make_preset(raw);
        return;
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded())
        value = raw;
    apply_key(cfg, key, value);
}

nlohmann::ordered_json to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["preset"] = c.preset ? json(*c.preset) : json(nullptr);
    j["omega_khz"] = c.loop.omega.khz();
    j["delta_min_khz"] = c.loop.delta_min.khz();
    j["delta_max_khz"] = c.loop.delta_max.khz();
    j["gamma_min"] = c.loop.gamma_min.value;
    j["gamma_max"] = c.loop.gamma_max.value;
    j["t1"] = c.loop.t1;
    j["t3"] = c.loop.t3;
    j["t5"] = c.loop.t5;
    if (const auto* s = std::get_if<Stepped>(&c.loop.isochoric)) {
        j["isochoric"] = "stepped";
        j["n_steps"] = s->n_steps;
        j["step_duration"] = s->step_duration;
    } else {
        j["isochoric"] = "ramp";
        j["ramp_duration"] = std::get<LinearRamp>(c.loop.isochoric).duration;
    }
    j["direction"] = to_string(c.loop.direction);
    j["start"] = to_string(c.start);
    j["sheet"] = c.sheet ? json(to_string(*c.sheet)) : json(nullptr);
    j["jumps"] = c.jumps;
    j["prep_fidelity"] = c.prep.fidelity ? json(*c.prep.fidelity) : json(nullptr);
    j["convention"] = to_string(c.convention);
    j["threshold"] = c.threshold;
    j["dt_max"] = c.dt_max;
    j["record_stride"] = c.record_stride;
    j["surface_delta_min_khz"] = AngularFreq(c.surface_delta.lo).khz();
    j["surface_delta_max_khz"] = AngularFreq(c.surface_delta.hi).khz();
    j["surface_gamma_min"] = c.surface_gamma.lo;
    j["surface_gamma_max"] = c.surface_gamma.hi;
    j["surface_resolution"] = c.surface_resolution;
    j["sweep_axis"] = to_string(c.sweep_axis);
    j["sweep_values"] = c.sweep_values;
    j["sweep_gamma_min_values"] = c.sweep_gamma_min_values;
    j["output_dir"] = c.output_dir.string();
    j["emit"] = std::vector<std::string>(c.emit.begin(), c.emit.end());
    return j;
}

std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::GammaMax:
        return "gamma_max";
    case SweepAxis::T5:
        return "t5";
    case SweepAxis::None:
        break;
    }
    return "none";
}

} // namespace lep
