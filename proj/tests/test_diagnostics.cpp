#include <catch2/catch.hpp>

#include "anlq/diagnostics.hpp"

#include <cmath>
#include <random>

using namespace anlq;

namespace {

GridSpec spec_n(int n) {
    GridSpec g;
    g.n = n;
    return g;
}

} // namespace

TEST_CASE("coupling constant M") {
    CHECK(coupling_constant_M(PhysParams::reduced(1, 1, 1, 1, 1, 1, 1)) == Approx(4.0));
    CHECK(coupling_constant_M(PhysParams::reduced(1, 1, 1, 0.1, 1, 1, 1)) == Approx(1.0));
    CHECK_THROWS_AS(coupling_constant_M(PhysParams::reduced(-1, 1, 1, 1, 1, 1, 1)),
                    std::invalid_argument);
}

TEST_CASE("energy functionals: hand value and zero state") {
    Grid grid(spec_n(16));
    const PhysParams p = PhysParams::reduced(1, 1, 1, 1, 1, 1, 1); // M = 4

    SpectralState st(grid.spec());
    {
        RealField q(grid.spec(), 5);
        const int n = grid.n();
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz)
                    q.comp(0)[(std::size_t(ix) * n + iy) * n + iz] =
                        0.1 * std::cos(two_pi * ix / n);
        st.qhat = grid.forward(q);
    }
    const EnergyReport rep = energy_functionals(st, 2, p, grid);
    const double X = 0.01 * std::pow(two_pi, 3) / 2.0;
    CHECK(rep.M == Approx(4.0));
    CHECK(rep.E == Approx((3.0 * 4.0 + 3.0) * X).epsilon(1e-12));
    CHECK(rep.E == Approx(18.604).epsilon(1e-4));
    // D = mu*0 + a M Gamma ||Q||_{H2}^2 + (a+M) Gamma ||grad Q||_{H2}^2 + Gamma ||lap Q||_{H2}^2
    CHECK(rep.D == Approx((4.0 * 3.0 + 5.0 * 3.0 + 3.0) * X).epsilon(1e-12));
    CHECK(rep.q_norms[0] == Approx(std::sqrt(X * 100.0) * 0.1).epsilon(1e-12));
    CHECK(rep.max_q == Approx(0.1).epsilon(1e-12));
    CHECK(rep.trace_res == 0.0); // closed-trace expansion
    CHECK(rep.mean_u[0] == 0.0);

    SpectralState zero(grid.spec());
    const EnergyReport rz = energy_functionals(zero, 2, p, grid);
    CHECK(rz.E == 0.0);
    CHECK(rz.D == 0.0);
    CHECK(rz.Hq == 0.0);
}

TEST_CASE("energy functionals: E and D are nonnegative and finite on random states") {
    Grid grid(spec_n(16));
    const PhysParams p = PhysParams::reduced(0.7, 1.0, 2.0, 1.3, 0.5, 1.1, 0.9);
    for (int seed = 0; seed < 5; ++seed) {
        SpectralState st(grid.spec());
        st.qhat = random_band_limited(grid, 5, 4, 70 + seed, 0.3);
        st.uhat = random_band_limited(grid, 3, 4, 170 + seed, 0.3);
        grid.leray_project(st.uhat);
        st.t = 0.37 * seed;
        const EnergyReport rep = energy_functionals(st, 3, p, grid);
        CHECK(rep.E >= 0.0);
        CHECK(rep.D >= 0.0);
        CHECK(rep.N >= rep.E); // k = 0 term of N is E
        CHECK(std::isfinite(rep.Hq));
        CHECK(rep.div_res < 1e-12);
        CHECK(rep.trace_res == 0.0);
    }
}

TEST_CASE("fit_decay: exact recovery inside the model span") {
    std::vector<double> t, y;
    for (int i = 0; i <= 50; ++i) {
        t.push_back(double(i));
        y.push_back(2.0 * std::pow(1.0 + i, -0.75) * std::exp(-0.5 * i));
    }
    const DecayFit f = fit_decay(t, y, 0.0, 50.0);
    CHECK(f.logC == Approx(std::log(2.0)).margin(1e-10));
    CHECK(f.alpha == Approx(0.75).margin(1e-10));
    CHECK(f.beta == Approx(0.5).margin(1e-10));
    CHECK(f.rss < 1e-18);

    std::vector<double> y2;
    for (double ti : t) y2.push_back(std::pow(1.0 + ti, -1.25));
    const DecayFit f2 = fit_decay(t, y2, 0.0, 50.0);
    CHECK(f2.alpha == Approx(1.25).margin(1e-10));
    CHECK(f2.beta == Approx(0.0).margin(1e-12));
}

TEST_CASE("fit_decay: scaling invariance, window, and error paths") {
    std::vector<double> t, y;
    for (int i = 1; i <= 40; ++i) {
        t.push_back(0.5 * i);
        y.push_back(3.0 * std::pow(1.0 + 0.5 * i, -1.1) * std::exp(-0.2 * i * 0.5));
    }
    const DecayFit base = fit_decay(t, y, 0.0, 100.0);
    std::vector<double> ys;
    for (double v : y) ys.push_back(7.0 * v);
    const DecayFit scaled = fit_decay(t, ys, 0.0, 100.0);
    CHECK(scaled.alpha == Approx(base.alpha).margin(1e-11));
    CHECK(scaled.beta == Approx(base.beta).margin(1e-11));
    CHECK(scaled.logC - base.logC == Approx(std::log(7.0)).margin(1e-11));

    // window restricts the sample set
    const DecayFit windowed = fit_decay(t, y, 10.0, 20.0);
    CHECK(windowed.t_lo == 10.0);
    CHECK(windowed.t_hi == 20.0);

    CHECK_THROWS_AS(fit_decay(t, y, 19.9, 20.0), std::invalid_argument); // < 4 samples
    std::vector<double> bad_y = y;
    bad_y[3] = -1.0;
    CHECK_THROWS_AS(fit_decay(t, bad_y, 0.0, 100.0), std::invalid_argument);
    const std::vector<double> t_deg(10, 1.0), y_deg(10, 0.5);
    CHECK_THROWS_AS(fit_decay(t_deg, y_deg, 0.0, 2.0), std::invalid_argument);
}

TEST_CASE("fit_decay: Monte-Carlo noise robustness") {
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double alpha0 = 0.75, beta0 = 0.5, logc0 = std::log(2.0);
    for (int seed = 0; seed < 20; ++seed) {
        std::vector<double> t, y;
        for (int i = 0; i < 200; ++i) {
            const double ti = 0.1 * (i + 1);
            t.push_back(ti);
            const double clean = std::exp(logc0) * std::pow(1.0 + ti, -alpha0) *
                                 std::exp(-beta0 * ti);
            y.push_back(clean * (1.0 + 0.01 * gauss(rng)));
        }
        const DecayFit f = fit_decay(t, y, 0.0, 100.0);
        CHECK(std::abs(f.alpha - alpha0) < 0.05);
        CHECK(std::abs(f.beta - beta0) < 0.01);
    }
}

TEST_CASE("lower_bound_check on synthetic series") {
    std::vector<double> t, y;
    for (int i = 0; i <= 30; ++i) {
        t.push_back(i);
        y.push_back(std::pow(1.0 + i, -0.75));
    }
    const auto [lo, hi] = lower_bound_check(t, y, 0);
    CHECK(lo == Approx(1.0).epsilon(1e-14));
    CHECK(hi == Approx(1.0).epsilon(1e-14));

    std::vector<double> y0(t.size(), 0.0);
    CHECK_THROWS_AS(lower_bound_check(t, y0, 0), std::invalid_argument);
    CHECK_THROWS_AS(lower_bound_check({}, {}, 0), std::invalid_argument);

    // log-domain variant agrees
    std::vector<double> ly;
    for (double v : y) ly.push_back(std::log(v));
    const auto [llo, lhi] = lower_bound_check_log(t, ly, 0);
    CHECK(llo == Approx(lo).epsilon(1e-12));
    CHECK(lhi == Approx(hi).epsilon(1e-12));
}

TEST_CASE("commutator ratios: zero field, k = 0, and a bounded suite") {
    Grid grid(spec_n(16));
    SpectralField zero(grid.spec(), 1);
    const SpectralField phi = random_band_limited(grid, 1, 4, 31, 1.0);
    const SpectralField Phi = random_band_limited(grid, 1, 4, 32, 1.0);
    const CommutatorRatios rz = commutator_ratio(grid, zero, phi, Phi, 2, 2);
    CHECK(rz.r_a == 0.0);
    CHECK(rz.r_b == 0.0);

    const SpectralField psi = random_band_limited(grid, 1, 4, 33, 1.0);
    const CommutatorRatios r0 = commutator_ratio(grid, psi, phi, Phi, 0, 2);
    CHECK(r0.r_a == 0.0); // empty commutator
    CHECK(r0.r_c == 0.0);

    double worst = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
        const SpectralField ps = random_band_limited(grid, 1, 4, 300 + seed, 1.0);
        const SpectralField ph = random_band_limited(grid, 1, 4, 400 + seed, 1.0);
        const SpectralField Ph = random_band_limited(grid, 1, 4, 500 + seed, 1.0);
        const CommutatorRatios r = commutator_ratio(grid, ps, ph, Ph, 2, 2);
        worst = std::max({worst, r.r_a, r.r_b, r.r_c});
        CHECK(std::isfinite(r.r_a));
        CHECK(std::isfinite(r.r_b));
        CHECK(std::isfinite(r.r_c));
    }
    INFO("worst commutator ratio " << worst);
    CHECK(worst < 50.0);
    CHECK(worst > 0.0);

    CHECK_THROWS_AS(commutator_ratio(grid, psi, phi, Phi, 3, 2), std::invalid_argument);
}

TEST_CASE("modq_sobolev_ratio: homogeneity and bounded suite") {
    Grid grid(spec_n(16));
    // uniform uniaxial background keeps |Q| smooth
    const QTensor base = uniaxial(0.5, 0, 0, 1);
    auto make_q = [&](int seed) {
        SpectralField q = random_band_limited(grid, 5, 4, seed, 0.05);
        for (int i = 0; i < 5; ++i) q.comp(i)[grid.index(0, 0, 0)] += base.q[i];
        return q;
    };
    const SpectralField q = make_q(1);
    const double r1 = modq_sobolev_ratio(grid, q, 2);
    SpectralField q2x = q;
    for (auto& v : q2x.data) v *= 2.0;
    CHECK(modq_sobolev_ratio(grid, q2x, 2) == Approx(r1).epsilon(1e-12));

    double worst = 0.0;
    for (int seed = 0; seed < 10; ++seed) worst = std::max(worst, modq_sobolev_ratio(grid, make_q(600 + seed), 2));
    INFO("worst |Q| Sobolev ratio " << worst);
    CHECK(worst < 10.0);

    SpectralField zero(grid.spec(), 5);
    CHECK_THROWS_AS(modq_sobolev_ratio(grid, zero, 2), std::invalid_argument);
}

TEST_CASE("cancellation residuals: zero state, random states, negative control") {
    Grid grid(spec_n(32));
    SpectralState zero(grid.spec());
    const auto rz = cancellation_residuals(zero, grid);
    for (double v : rz) CHECK(v == 0.0);

    for (int seed = 0; seed < 5; ++seed) {
        SpectralState st(grid.spec());
        st.qhat = random_band_limited(grid, 5, 8, 700 + seed, 0.8);
        st.uhat = random_band_limited(grid, 3, 8, 800 + seed, 0.8);
        grid.leray_project(st.uhat);
        const auto r = cancellation_residuals(st, grid);
        for (double v : r) CHECK(v < 1e-10);
    }

    // deliberately non-solenoidal u: residual (1) departs from zero
    SpectralState bad(grid.spec());
    bad.qhat = random_band_limited(grid, 5, 8, 901, 0.8);
    bad.uhat = random_band_limited(grid, 3, 8, 902, 0.8); // no projection
    const auto rb = cancellation_residuals(bad, grid);
    CHECK(rb[0] > 1e-6);
}
