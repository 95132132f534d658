#include <doctest.h>

#include <cmath>
#include <vector>

#include "hsheat/selfsim.hpp"
#include "hsheat/solver.hpp"
#include "sample_fields.hpp"

using namespace hsheat;
using namespace hsheat::testing;

namespace {

const ProblemParams& params() {
    static const auto p = ProblemParams::make(3, 0.5, 3.0, 0.75);
    return p;
}

const RadialField& profile() {
    static const RadialField v = [] {
        auto g = default_grid(3);
        return ground_state(params(), default_initial_guess(g, params())).minimizer;
    }();
    return v;
}

std::vector<double> time_grid(double t1, double step) {
    std::vector<double> ts;
    for (double t = 1.0 + step; t <= t1 + 1e-12; t += step) {
        ts.push_back(t);
    }
    return ts;
}

double max_cell(const RadialGrid& g) {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        h = std::max(h, g.cell_width(i));
    }
    return h;
}

}  // namespace

TEST_CASE("heat kernel without reaction") {
    auto g = make_physical_grid(3, 30.0, 2000, 2.0);
    const auto u0 = RadialField::sample(g, [](double r) { return std::exp(-0.25 * r * r); });
    EvolveOptions opt;
    opt.reaction = false;
    const auto s = evolve(u0, params(), 1.0, 2.0, 1e-3, opt);
    CHECK(s.t == 2.0);
    // σ = 1 after one time unit: (1/2)^{N/2} e^{-r²/8}.
    const double amp = std::pow(0.5, 1.5);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double r = g->r(i);
        err = std::max(err, std::abs(s.field[i] - amp * std::exp(-r * r / 8.0)));
    }
    CHECK(err / amp <= 1e-3);

    // ∫u² ∝ t^{-N/2} for this start.
    opt.mass_exponent = 2.0;
    const auto ts = time_grid(10.0, 1.0);
    const auto states = evolve_series(u0, params(), 1.0, ts, 1e-3, opt);
    const auto fit = decay_fit(states, params());
    CHECK(fit.fitted_exponent == doctest::Approx(-1.5).epsilon(1e-3));
}

TEST_CASE("zero data stays zero") {
    auto g = make_physical_grid(3, 20.0, 400, 2.0);
    const auto s = evolve(RadialField::zeros(g), params(), 1.0, 2.0, 1e-2);
    CHECK(s.field.max_abs() == 0.0);
    CHECK(s.mass_q == 0.0);
    CHECK_FALSE(s.blew_up);

    const std::vector<double> ts{2, 3, 4, 6, 8, 10};
    const auto states = evolve_series(RadialField::zeros(g), params(), 1.0, ts, 1e-2);
    CHECK_THROWS_AS(decay_fit(states, params()), ConfigError);
}

TEST_CASE("evolution preconditions") {
    auto g = make_physical_grid(3, 20.0, 400, 2.0);
    const auto u0 = RadialField::zeros(g);
    CHECK_THROWS_AS(evolve(u0, params(), 1.0, 1.0, 1e-2), ConfigError);
    CHECK_THROWS_AS(evolve(u0, params(), 0.0, 1.0, 1e-2), ConfigError);
    CHECK_THROWS_AS(evolve(u0, params(), 1.0, 2.0, 0.0), ConfigError);
    const std::vector<double> bad{3.0, 2.0};
    CHECK_THROWS_AS(evolve_series(u0, params(), 1.0, bad, 1e-2), ConfigError);
}

TEST_CASE("self-similar consistency") {
    const auto& p = params();
    const auto& v = profile();
    auto pg = make_physical_grid(3, physical_radius(16.0, 10.0), 2000, 2.0);
    const auto u0 = self_similar_profile(v, pg, 1.0, p.alpha_ss);
    const auto states = evolve_series(u0, p, 1.0, time_grid(10.0, 0.5), 1e-3);

    CHECK(selfsim_error(v, states.front(), p) <= 1e-8);
    const auto& at2 = states[2];
    REQUIRE(at2.t == 2.0);
    CHECK(selfsim_error(v, at2, p) <= 2e-2);
    CHECK(selfsim_error(v.scaled(0.0), at2, p) == doctest::Approx(1.0));

    const auto fit = decay_fit(states, p);
    const double expected = -(p.alpha_ss * p.q - 0.5 * p.N);
    CHECK(std::abs(fit.fitted_exponent - expected) <= 0.05 * std::abs(expected));
    CHECK(fit.r2 > 0.999);

    for (const auto& s : states) {
        double lowest = 0.0;
        for (double x : s.field.values()) {
            lowest = std::min(lowest, x);
        }
        CHECK(lowest >= -1e-10 * s.sup_u);
        CHECK_FALSE(s.blew_up);
    }
}

TEST_CASE("self-similar error under refinement") {
    const auto& p = params();
    const auto& v = profile();
    const double rho = weak_residual(v, p).norm;
    std::vector<double> err, C;
    for (int M : {500, 1000, 2000}) {
        auto pg = make_physical_grid(3, physical_radius(16.0, 2.0), M, 2.0);
        const auto s = evolve(self_similar_profile(v, pg, 1.0, p.alpha_ss), p, 1.0, 2.0, 1e-3);
        err.push_back(selfsim_error(v, s, p));
        const double h = max_cell(*pg);
        C.push_back(err.back() / (rho + h * h));
    }
    for (std::size_t k = 1; k < err.size(); ++k) {
        CHECK(err[k] * 2.0 <= err[k - 1]);
        CHECK(C[k] / C[0] == doctest::Approx(1.0).epsilon(0.5));
    }
}

TEST_CASE("blow-up is reported with a bracket") {
    auto g = make_physical_grid(3, 10.0, 400, 2.0);
    const auto u0 = RadialField::sample(g, [](double r) { return 50.0 * std::exp(-r * r); });
    const auto s = evolve(u0, params(), 1.0, 2.0, 1e-3);
    CHECK(s.blew_up);
    CHECK(s.blowup_lo < s.blowup_hi);
    CHECK(s.blowup_hi < 2.0);
    CHECK(s.rejected > 0);
}

TEST_CASE("evolution json") {
    EvolutionState s;
    s.t = 2.0;
    const auto j = to_json(s);
    CHECK(j.at("t") == 2.0);
    CHECK(j.contains("mass_q"));
    CHECK(to_json(DecayFit{-0.75, 1.0, 5}).at("used") == 5);
}
