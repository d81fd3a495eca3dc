#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "lep/io.hpp"
#include "lep/liouvillian.hpp"

using namespace lep;
using C = std::complex<double>;

namespace {

// Row-major vectorization: vec(A rho B) = (A kron B^T) vec(rho), which with
// the basis (e, g) yields the ordering (ee, eg, ge, gg).
Mat4 kron(const Matrix2c<double>& a, const Matrix2c<double>& b)
{
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

Mat4 lindblad_oracle(double omega, double delta, double gamma, bool jumps)
{
    Matrix2c<double> h, lower, id = Matrix2c<double>::Identity();
    h << C(delta), C(omega / 2), C(omega / 2), C(0);
    lower << C(0), C(0), C(1), C(0); // |g><e|
    const Matrix2c<double> n = lower.adjoint() * lower;
    const C i(0, 1);
    Mat4 L = -i * (kron(h, id) - kron(id, h.transpose()));
    L += -gamma / 2 * (kron(n, id) + kron(id, n.transpose()));
    if (jumps)
        L += gamma * kron(lower, lower.conjugate());
    return L;
}

bool same_multiset(std::array<C, 4> a, const std::array<C, 4>& b, double tol)
{
    const auto p = detail::best_matching(a, b);
    for (int k = 0; k < 4; ++k)
        if (std::abs(a[k] - b[p[k]]) > tol)
            return false;
    return true;
}

} // namespace

TEST_CASE("zero parameters give the zero matrix")
{
    const auto L = build_liouvillian(SystemParams{0, 0, 0}, true);
    CHECK(L.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generator matches an independently assembled Lindblad superoperator")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 200; ++k) {
        const double w = 2 * std::abs(u(rng)), d = 3 * u(rng), g = 2 * std::abs(u(rng));
        for (bool jumps : {true, false}) {
            const auto L = liouvillian_matrix(w, d, g, jumps);
            CHECK((L - lindblad_oracle(w, d, g, jumps)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("named entries")
{
    const double w = 0.7, d = -1.3, g = 0.4;
    const auto L = build_liouvillian(SystemParams{w, d, g}, true).entries;
    CHECK(L(0, 0) == C(-g));
    CHECK(L(3, 0) == C(g));
    CHECK(L(1, 1) == C(-g / 2, -d));
    const auto H = build_liouvillian(SystemParams{w, d, g}, false).entries;
    CHECK(H(3, 0) == C(0));
    Mat4 diff = L - H;
    diff(3, 0) = 0;
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace preservation: row identity and zero eigenvalue")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 200; ++k) {
        const auto L = liouvillian_matrix(2 * u(rng), 4 * u(rng) - 2, 3 * u(rng), true);
        CHECK((L.row(0) + L.row(3)).cwiseAbs().maxCoeff() == 0.0);
        const auto s = eigenpairs<double>(L);
        double nearest = 1e300;
        for (const auto& v : s.values)
            nearest = std::min(nearest, std::abs(v));
        CHECK(nearest < 1e-10);
    }
}

TEST_CASE("closed forms at zero detuning over random samples")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (bool jumps : {true, false}) {
        for (int k = 0; k < 1000; ++k) {
            const double w = 0.01 + 3 * u(rng);
            const double g = 12 * w * u(rng);
            const auto s = eigenpairs<double>(liouvillian_matrix(w, 0.0, g, jumps));
            const auto exact = closed_form_spectrum(AngularFreq(w), AngularFreq(g), jumps);
            CHECK(same_multiset(exact, s.values, 1e-9 * std::max(w, g)));
        }
    }
}

TEST_CASE("phase classification")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 500; ++k) {
        const double w = 0.05 + u(rng);
        double g = 8 * w * u(rng);
        if (std::abs(g - 4 * w) < 1e-3 * w)
            continue;
        const auto s = eigenpairs<double>(liouvillian_matrix(w, 0.0, g, true));
        int complex_count = 0;
        for (const auto& v : s.values)
            complex_count += std::abs(v.imag()) > 1e-9 * w ? 1 : 0;
        if (g > 4 * w)
            CHECK(complex_count == 0);
        else
            CHECK(complex_count == 2);
    }
}

TEST_CASE("labeled spectrum examples")
{
    const double w = AngularFreq::from_khz(120).value;

    SUBCASE("coalescence at gamma = 4 omega")
    {
        const auto s = spectrum(build_liouvillian(SystemParams{w, 0, 4 * w}, true));
        CHECK(std::abs(s.values[2] - C(-3 * w)) < 1e-6);
        CHECK(std::abs(s.values[3] - C(-3 * w)) < 1e-6);
    }
    SUBCASE("closed system")
    {
        const auto s = spectrum(build_liouvillian(SystemParams{w, 0, 0}, true));
        CHECK(std::abs(s.values[0]) < 1e-12);
        CHECK(std::abs(s.values[1]) < 1e-12);
        CHECK(std::abs(s.values[2] - C(0, -w)) < 1e-12);
        CHECK(std::abs(s.values[3] - C(0, w)) < 1e-12);
    }
    SUBCASE("pure decay")
    {
        const double g = 0.8;
        const auto s = spectrum(build_liouvillian(SystemParams{0, 0, g}, true));
        CHECK(std::abs(s.values[0]) < 1e-12);
        CHECK(std::abs(s.values[1] - C(-g / 2)) < 1e-12);
        CHECK(std::abs(s.values[2] - C(-g)) < 1e-12);
        CHECK(std::abs(s.values[3] - C(-g / 2)) < 1e-12);
    }
    SUBCASE("exact phase ordering")
    {
        const auto s = spectrum(build_liouvillian(SystemParams{w, 0, 1.45}, true));
        CHECK(s.values[2].imag() < 0);
        CHECK(s.values[3].imag() > 0);
        CHECK(std::abs(s.values[2].imag()) == doctest::Approx(std::sqrt(16 * w * w - 1.45 * 1.45) / 4));
    }
    SUBCASE("continuation away from zero detuning stays close to the anchor for small detuning")
    {
        const auto s0 = spectrum(build_liouvillian(SystemParams{w, 0, 1.0}, true));
        const auto s1 = spectrum(build_liouvillian(SystemParams{w, 1e-4, 1.0}, true));
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(s0.values[k] - s1.values[k]) < 1e-3);
    }
}

TEST_CASE("closed-form branch coalescence")
{
    const double w = 1.3;
    const auto lep = closed_form_spectrum(AngularFreq(w), AngularFreq(4 * w), true);
    CHECK(std::abs(lep[2] - C(-3 * w)) < 1e-12);
    CHECK(std::abs(lep[3] - C(-3 * w)) < 1e-12);
    const auto hep = closed_form_spectrum(AngularFreq(w), AngularFreq(2 * w), false);
    CHECK(std::abs(hep[2] - C(-w)) < 1e-12);
    CHECK(std::abs(hep[3] - C(-w)) < 1e-12);
}

TEST_CASE("eigenpair residuals are small")
{
    const auto s = spectrum(build_liouvillian(SystemParams{0.75, 2.1, 0.9}, true));
    const auto L = liouvillian_matrix(0.75, 2.1, 0.9, true);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(s.vectors[k].norm() - 1) < 1e-12);
        CHECK((L * s.vectors[k] - s.values[k] * s.vectors[k]).norm() <= 1e-9 * L.norm());
    }
}

TEST_CASE("exceptional point search")
{
    const auto w = AngularFreq::from_khz(120);
    CHECK(find_ep(w, true).value == doctest::Approx(4 * w.value).epsilon(1e-6));
    CHECK(find_ep(w, false).value == doctest::Approx(2 * w.value).epsilon(1e-6));
    CHECK(find_ep(w, true).value == doctest::Approx(3.02).epsilon(0.005));
    CHECK(find_ep(w, false).value == doctest::Approx(1.51).epsilon(0.005));
    CHECK(find_ep(AngularFreq(1.0), true).value == doctest::Approx(4.0).epsilon(1e-8));
    CHECK_THROWS_AS(find_ep(AngularFreq(0.0), true), InvalidArgument);
}

TEST_CASE("surface grid validation")
{
    const auto w = AngularFreq::from_khz(120);
    CHECK_THROWS_AS(riemann_surface(w, {0, 0}, {0.1, 1}, 10), InvalidArgument);
    CHECK_THROWS_AS(riemann_surface(w, {-1, 1}, {1, 1}, 10), InvalidArgument);
    CHECK_THROWS_AS(riemann_surface(w, {-1, 1}, {0.1, 1}, 1), InvalidArgument);
}

TEST_CASE("surface over the loop region has no degeneracy")
{
    const auto w = AngularFreq::from_khz(120);
    const double d = AngularFreq::from_khz(400).value;
    const auto s = riemann_surface(w, {-d, d}, {0.1, 1.45}, 41);
    CHECK(s.lep_locus.empty());
}

TEST_CASE("surface containing the exceptional point marks it")
{
    const double w = 0.5;
    const auto s = riemann_surface(AngularFreq(w), {-1, 1}, {1.0, 3.0}, 21); // gamma grid hits 2.0 = 4w
    const auto it = std::find(s.lep_locus.begin(), s.lep_locus.end(), std::pair<std::size_t, std::size_t>{10, 10});
    CHECK(it != s.lep_locus.end());
    CHECK(s.near_ep[s.index(10, 10)] == 1);
    CHECK(s.near_ep[s.index(11, 9)] == 1);
}

TEST_CASE("surface eigenvalues match independent solves point by point")
{
    const double w = AngularFreq::from_khz(120).value;
    const auto s = riemann_surface(AngularFreq(w), {-3, 3}, {0.1, 4.0}, 17, SurfaceOptions{true, 2});
    for (std::size_t j = 0; j < s.gammas.size(); ++j)
        for (std::size_t i = 0; i < s.deltas.size(); ++i) {
            const auto raw = eigenpairs<double>(liouvillian_matrix(w, s.deltas[i], s.gammas[j], true));
            CHECK(same_multiset(s.at(i, j), raw.values, 1e-12));
        }
}

TEST_CASE("surface labels agree with the pointwise labeled spectrum")
{
    const double w = AngularFreq::from_khz(120).value;
    const auto s = riemann_surface(AngularFreq(w), {-3, 3}, {0.1, 4.0}, 23);
    for (std::size_t j = 0; j < s.gammas.size(); ++j)
        for (std::size_t i = 0; i < s.deltas.size(); ++i) {
            if (s.near_ep[s.index(i, j)])
                continue;
            const auto p = spectrum(build_liouvillian(SystemParams{w, s.deltas[i], s.gammas[j]}, true));
            for (int k = 0; k < 4; ++k)
                CHECK(std::abs(p.values[k] - s.at(i, j)[k]) < 1e-12);
        }
}

TEST_CASE("doubling the resolution keeps labels on shared points")
{
    const double w = AngularFreq::from_khz(120).value;
    const auto coarse = riemann_surface(AngularFreq(w), {-2.4, 2.4}, {0.2, 4.2}, 21);
    const auto fine = riemann_surface(AngularFreq(w), {-2.4, 2.4}, {0.2, 4.2}, 41);
    int compared = 0;
    for (std::size_t j = 0; j < coarse.gammas.size(); ++j)
        for (std::size_t i = 0; i < coarse.deltas.size(); ++i) {
            if (coarse.near_ep[coarse.index(i, j)] || fine.near_ep[fine.index(2 * i, 2 * j)])
                continue;
            for (int k = 0; k < 4; ++k)
                CHECK(std::abs(coarse.at(i, j)[k] - fine.at(2 * i, 2 * j)[k]) < 1e-9);
            ++compared;
        }
    CHECK(compared > 300);
}

TEST_CASE("surface csv schema")
{
    const auto s = riemann_surface(AngularFreq(0.5), {-1, 1}, {0.1, 1}, 7);
    std::ostringstream os;
    write_surface_csv(os, s);
    std::istringstream in(os.str());
    const auto t = read_csv(in);
    CHECK(t.header == std::vector<std::string>{"delta", "gamma", "branch", "re_lambda", "im_lambda"});
    CHECK(t.rows.size() == 7 * 7 * 4);
    CHECK(t.real(5, "re_lambda") == s.at(1, 0)[1].real());
}
