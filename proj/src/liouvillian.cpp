#include "lep/liouvillian.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "lep/io.hpp"
#include "lep/parallel.hpp"

namespace lep {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

using Values = std::array<std::complex<double>, 4>;

Values apply_matching(const Values& reference, const Values& raw)
{
    const auto p = detail::best_matching(reference, raw);
    Values out;
    for (int k = 0; k < 4; ++k)
        out[k] = raw[p[k]];
    return out;
}

} // namespace

RiemannSurface riemann_surface(AngularFreq omega, AxisRange delta_range, AxisRange gamma_range, std::size_t resolution,
                               const SurfaceOptions& opts)
{
    if (resolution < 2)
        throw InvalidArgument("surface resolution must be at least 2 points per axis");
    if (!(delta_range.hi > delta_range.lo))
        throw InvalidArgument("delta range has zero extent");
    if (!(gamma_range.hi > gamma_range.lo))
        throw InvalidArgument("gamma range has zero extent");
    if (gamma_range.lo < 0)
        throw InvalidArgument("gamma range must be non-negative");
    if (!(omega.value >= 0) || !std::isfinite(omega.value))
        throw InvalidArgument("omega must be finite and non-negative");

    RiemannSurface s;
    s.omega = omega.value;
    s.jumps = opts.jumps;
    s.deltas = linspace(delta_range.lo, delta_range.hi, resolution);
    s.gammas = linspace(gamma_range.lo, gamma_range.hi, resolution);
    const std::size_t nd = s.deltas.size();
    const std::size_t ng = s.gammas.size();

    // Pass 1: independent eigenvalue solves.
    std::vector<Values> raw(nd * ng);
    parallel_for(raw.size(), opts.threads, [&](std::size_t idx) {
        const std::size_t i = idx % nd;
        const std::size_t j = idx / nd;
        raw[idx] = eigenpairs<double>(liouvillian_matrix(s.omega, s.deltas[i], s.gammas[j], s.jumps)).values;
    });

    // Pass 2: continuation outward from Delta = 0 along each row, on the
    // same lattice as spectrum(), so labels do not depend on grid spacing.
    s.sheets.assign(raw.size(), Values{});
    parallel_for(ng, opts.threads, [&](std::size_t j) {
        const double g = s.gammas[j];
        const double scale = detail::ep_scale(s.omega, 0.0, g);
        auto walk = [&](std::ptrdiff_t start, std::ptrdiff_t step) {
            detail::DeltaContinuation<double> cont(s.omega, g, s.jumps, step > 0 ? 1 : -1);
            for (std::ptrdiff_t i = start; i >= 0 && i < static_cast<std::ptrdiff_t>(nd); i += step) {
                const auto iu = static_cast<std::size_t>(i);
                const double d = s.deltas[iu];
                Values v = apply_matching(cont.advance(std::abs(d)), raw[s.index(iu, j)]);
                if (std::abs(v[2] - v[3]) < 1e-6 * std::max(scale, std::abs(d)))
                    detail::order_ep_pair<double>(v, nullptr);
                s.sheets[s.index(iu, j)] = v;
            }
        };
        // Columns with delta >= 0 walk right, the rest walk left.
        std::size_t split = 0;
        while (split < nd && s.deltas[split] < 0)
            ++split;
        if (split < nd)
            walk(static_cast<std::ptrdiff_t>(split), +1);
        if (split > 0)
            walk(static_cast<std::ptrdiff_t>(split) - 1, -1);
    });

    // Degeneracy locus: local minima of the lambda_3/lambda_4 gap under a
    // threshold that scales like the gap one cell away from a square-root EP.
    const double h = std::max(s.deltas[1] - s.deltas[0], s.gammas[1] - s.gammas[0]);
    s.gap_threshold = 2.0 * std::sqrt(std::max(s.omega, 1e-12) * h);
    s.near_ep.assign(raw.size(), 0);
    for (std::size_t j = 0; j < ng; ++j) {
        for (std::size_t i = 0; i < nd; ++i) {
            const double g = s.gap(i, j);
            if (!(g < s.gap_threshold))
                continue;
            bool minimum = true;
            for (int dj = -1; dj <= 1 && minimum; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(nd) ||
                        jj >= static_cast<std::ptrdiff_t>(ng))
                        continue;
                    if (s.gap(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) < g) {
                        minimum = false;
                        break;
                    }
                }
            }
            if (minimum)
                s.lep_locus.emplace_back(i, j);
        }
    }
    for (const auto& [i, j] : s.lep_locus) {
        for (std::size_t jj = j > 0 ? j - 1 : 0; jj <= std::min(j + 1, ng - 1); ++jj)
            for (std::size_t ii = i > 0 ? i - 1 : 0; ii <= std::min(i + 1, nd - 1); ++ii)
                s.near_ep[s.index(ii, jj)] = 1;
    }
    return s;
}

void write_surface_csv(std::ostream& os, const RiemannSurface& s)
{
    os << "delta,gamma,branch,re_lambda,im_lambda\n";
    for (std::size_t j = 0; j < s.gammas.size(); ++j)
        for (std::size_t i = 0; i < s.deltas.size(); ++i)
            for (int k = 0; k < 4; ++k) {
                const auto& v = s.at(i, j)[k];
                os << format_real(s.deltas[i]) << ',' << format_real(s.gammas[j]) << ',' << (k + 1) << ','
                   << format_real(v.real()) << ',' << format_real(v.imag()) << '\n';
            }
}

void write_surface_json(std::ostream& os, const RiemannSurface& s)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < s.gammas.size(); ++j)
        for (std::size_t i = 0; i < s.deltas.size(); ++i)
            for (int k = 0; k < 4; ++k) {
                const auto& v = s.at(i, j)[k];
                rows.push_back({{"delta", s.deltas[i]},
                                {"gamma", s.gammas[j]},
                                {"branch", k + 1},
                                {"re_lambda", v.real()},
                                {"im_lambda", v.imag()}});
            }
    nlohmann::ordered_json locus = nlohmann::ordered_json::array();
    for (const auto& [i, j] : s.lep_locus)
        locus.push_back({{"delta", s.deltas[i]}, {"gamma", s.gammas[j]}});
    nlohmann::ordered_json doc{{"omega", s.omega}, {"jumps", s.jumps}, {"lep_locus", locus}, {"points", rows}};
    os << doc.dump(1) << '\n';
}

} // namespace lep
