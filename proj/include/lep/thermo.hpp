#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "lep/dynamics.hpp"

namespace lep {

/// Supplement: H = Delta |e><e|. MainText: H = Delta |e><e| / 2.
enum class HConvention { Supplement, MainText };

enum class EngineClass { QHE, QR, Neutral };

struct ThermoLedger {
    double w_in{0};
    double w_out{0};
    double w_net{0};  ///< w_in + w_out
    double q{0};
    double u_initial{0};
    double u_final{0};
    HConvention convention{HConvention::Supplement};
    /// Net work per stroke 1..5 (index 0 collects segments without a stroke tag).
    std::array<double, 6> stroke_work{};
    /// Running net work at every recorded time.
    std::vector<double> running_work;

    double delta_u() const { return u_final - u_initial; }
};

double h_ee(double delta, HConvention c);

/// Stieltjes sums on the recorded grid:
///   dW_i = rho_ee(t_i) (H(t_{i+1}) - H(t_i)), w_in = -sum over dH > 0,
///   w_out = -sum over dH < 0, so w_net = -sum dW_i.
///   dQ_i = H(t_{i+1}) (rho_ee(t_{i+1}) - rho_ee(t_i)).
/// With this pairing U_N - U_0 = -w_net + q holds exactly on any grid.
ThermoLedger accumulate(const Trajectory& traj, HConvention convention = HConvention::Supplement);

/// First-law residual |dU - (q - w_net)| scaled by max(|W|, |Q|, |dU|, eps).
double first_law_residual(const ThermoLedger& l);

EngineClass classify_engine(const ThermoLedger& l, double tol = 1e-4);

std::string to_string(EngineClass c);
std::string to_string(HConvention c);
HConvention parse_convention(const std::string& s);

/// {w_in, w_out, w_net, q_total, classification, convention}
void write_ledger_json(std::ostream& os, const ThermoLedger& l);

} // namespace lep
