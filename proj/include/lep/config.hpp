#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lep/analysis.hpp"
#include "lep/liouvillian.hpp"
#include "lep/protocol.hpp"
#include "lep/thermo.hpp"

namespace lep {

enum class SweepAxis { None, GammaMax, T5 };

/// Everything a CLI run needs. Frequencies quoted in kHz in the JSON
/// document are ordinary frequencies (multiplied by 2pi on ingest); gamma
/// values are taken in rad/us as they are.
struct RunConfig {
    std::optional<std::string> preset;
    LoopConfig loop{};
    StartLabel start{StartLabel::Plus};
    std::optional<Sheet> sheet;
    bool jumps{true};
    PrepMode prep{PrepMode::ideal()};
    HConvention convention{HConvention::Supplement};
    double threshold{0.9};
    double dt_max{1e-3};
    std::size_t record_stride{1};

    AxisRange surface_delta{AngularFreq::from_khz(-400).value, AngularFreq::from_khz(400).value};
    AxisRange surface_gamma{0.1, 1.45};
    std::size_t surface_resolution{81};

    SweepAxis sweep_axis{SweepAxis::None};
    std::vector<double> sweep_values;
    std::vector<double> sweep_gamma_min_values;

    std::filesystem::path output_dir{"out"};
    std::set<std::string> emit{"csv", "json", "svg"};

    /// Interpretation notes carried into output metadata.
    std::vector<std::string> notes;

    OutcomeOptions outcome_options(unsigned threads) const;
    LoopConfig loop_config() const;
};

std::vector<std::string> preset_names();

/// Throws InvalidArgument naming the preset if it does not exist.
RunConfig make_preset(std::string_view name);

/// Starts from the named preset (if the document has "preset") or defaults,
/// then applies every other key. Unknown keys are rejected by name.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies one key=value override; the value is read as JSON when it parses,
/// otherwise as a plain string.
void apply_override(RunConfig& cfg, std::string_view assignment);

nlohmann::ordered_json to_json(const RunConfig& cfg);

std::string to_string(SweepAxis a);

} // namespace lep
