#include "lep/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace lep {

double h_ee(double delta, HConvention c) { return c == HConvention::Supplement ? delta : delta / 2.0; }

ThermoLedger accumulate(const Trajectory& traj, HConvention convention)
{
    if (traj.size() == 0)
        throw InvalidArgument("cannot accumulate thermodynamics over an empty trajectory");
    ThermoLedger l;
    l.convention = convention;
    l.running_work.reserve(traj.size());
    l.running_work.push_back(0.0);

    auto pop = [&](std::size_t k) { return traj.states[k](0).real(); };
    auto h = [&](std::size_t k) { return h_ee(traj.params[k].delta, convention); };

    l.u_initial = pop(0) * h(0);
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const double dh = h(k + 1) - h(k);
        const double dw = pop(k) * dh;
        if (dh > 0)
            l.w_in -= dw;
        else if (dh < 0)
            l.w_out -= dw;
        l.q += h(k + 1) * (pop(k + 1) - pop(k));
        const int stroke = traj.strokes[k + 1];
        l.stroke_work[static_cast<std::size_t>(std::clamp(stroke, 0, 5))] -= dw;
        l.running_work.push_back(l.w_in + l.w_out);
    }
    l.w_net = l.w_in + l.w_out;
    l.u_final = pop(traj.size() - 1) * h(traj.size() - 1);
    return l;
}

double first_law_residual(const ThermoLedger& l)
{
    const double du = l.delta_u();
    const double scale = std::max({std::abs(l.w_net), std::abs(l.q), std::abs(du), 1e-12});
    return std::abs(du - (l.q - l.w_net)) / scale;
}

EngineClass classify_engine(const ThermoLedger& l, double tol)
{
    if (l.w_net > tol)
        return EngineClass::QHE;
    if (l.w_net < -tol)
        return EngineClass::QR;
    return EngineClass::Neutral;
}

std::string to_string(EngineClass c)
{
    switch (c) {
    case EngineClass::QHE:
        return "QHE";
    case EngineClass::QR:
        return "QR";
    case EngineClass::Neutral:
        break;
    }
    return "Neutral";
}

std::string to_string(HConvention c) { return c == HConvention::Supplement ? "supplement" : "main-text"; }

HConvention parse_convention(const std::string& s)
{
    if (s == "supplement")
        return HConvention::Supplement;
    if (s == "main-text" || s == "maintext")
        return HConvention::MainText;
    throw InvalidArgument("unknown energy convention '" + s + "' (expected supplement or main-text)");
}

void write_ledger_json(std::ostream& os, const ThermoLedger& l)
{
    nlohmann::ordered_json strokes = nlohmann::ordered_json::array();
    for (std::size_t k = 1; k < l.stroke_work.size(); ++k)
        strokes.push_back(l.stroke_work[k]);
    nlohmann::ordered_json doc{{"w_in", l.w_in},
                               {"w_out", l.w_out},
                               {"w_net", l.w_net},
                               {"q_total", l.q},
                               {"delta_u", l.delta_u()},
                               {"classification", to_string(classify_engine(l))},
                               {"convention", to_string(l.convention)},
                               {"stroke_work", strokes}};
    os << doc.dump(2) << '\n';
}

} // namespace lep
