// SPDX-License-Identifier: Apache-2.0
//
// Runtime monitors mirroring the analysis-side functionals: kinetic and
// dissipation energies with the absorbed coupling constant M, time-weighted
// sums, the mixed-decay quantity, decay-rate fitting, and the numeric
// property suites (commutators, |Q| Sobolev control, cancellation rules).

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "anlq/dynamics.hpp"
#include "anlq/grid.hpp"
#include "anlq/qtensor.hpp"

namespace anlq {

// M := max{1, 4 kappa^2 / (a mu Gamma)}; requires a > 0.
inline double coupling_constant_M(const PhysParams& p) {
    p.require_positive_a("coupling_constant_M");
    return std::max(1.0, 4.0 * p.kappa * p.kappa / (p.a * p.mu * p.gamma));
}

struct EnergyReport {
    double t = 0.0;
    double E = 0.0;  // ||u||_{Hs}^2 + M ||Q||_{Hs}^2 + ||grad Q||_{Hs}^2
    double D = 0.0;  // mu ||grad u||_{Hs}^2 + a M Gamma ||Q||_{Hs}^2
                     //   + (a+M) Gamma ||grad Q||_{Hs}^2 + Gamma ||lap Q||_{Hs}^2
    double N = 0.0;  // sum_k (1+t)^k (||d^k u||_{H^{s-k}}^2 + M ||d^k Q||^2 + ||d^k grad Q||^2)
    double Mw = 0.0; // matching weighted dissipation sum
    double Hq = 0.0; // sum_k (1+t)^{3/4+k/2} (||d^k u|| + e^{a Gamma t/2} ||d^k Q||)
    double M = 1.0;
    std::vector<double> q_norms; // ||d^k Q||_L2, k = 0..s+1 (radial |xi|^k multiplier)
    std::vector<double> u_norms; // ||d^k u||_L2, k = 0..s
    double max_q = 0.0, max_u = 0.0; // grid-max norms (L-infinity proxies)
    double trace_res = 0.0;          // max over grid |Tr expand(Q)|
    double div_res = 0.0;            // max per-mode |xi . uhat| / |uhat|
    std::array<double, 3> mean_u{0.0, 0.0, 0.0}; // the xi = 0 velocity mode
};

// Reusable transform buffers for per-step reporting.
struct EnergyScratch {
    RealField q_r, u_r;
};

// One fused pass over the spectrum; the optional real-space pass adds the
// grid-max norms and the expanded-trace residual (two transforms).
inline EnergyReport energy_functionals(const SpectralState& st, int s, const PhysParams& p,
                                       const Grid& grid, bool real_space_extras = true,
                                       EnergyScratch* scratch = nullptr) {
    if (s < 2) throw std::invalid_argument("energy_functionals: s must be >= 2");
    EnergyReport rep;
    rep.t = st.t;
    rep.M = coupling_constant_M(p);
    const double vol = std::pow(grid.box_length(), 3);

    // weight tables for H^{s-k}, k = 0..s
    std::vector<const std::vector<double>*> w(s + 1);
    for (int k = 0; k <= s; ++k) w[k] = &grid.sobolev_weights(s - k, false);

    std::vector<double> qn(s + 2, 0.0), un(s + 1, 0.0);
    std::vector<double> nu(s + 1, 0.0), nq(s + 1, 0.0), ngq(s + 1, 0.0);
    std::vector<double> mu_gu(s + 1, 0.0), mq(s + 1, 0.0), mgq(s + 1, 0.0), mlq(s + 1, 0.0);

    grid.for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
        const auto xi = grid.mode_xi(ix, iy, iz);
        const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        const double wz = grid.mode_weight(iz);
        double q2 = 0.0, u2 = 0.0;
        for (int c = 0; c < 5; ++c) q2 += std::norm(st.qhat.comp(c)[idx]);
        for (int c = 0; c < 3; ++c) u2 += std::norm(st.uhat.comp(c)[idx]);
        q2 *= wz;
        u2 *= wz;
        double k2p = 1.0; // k2^k
        for (int k = 0; k <= s + 1; ++k) {
            qn[k] += k2p * q2;
            if (k < int(un.size())) un[k] += k2p * u2;
            if (k <= s) {
                const double ws = (*w[k])[idx];
                nu[k] += k2p * ws * u2;
                nq[k] += k2p * ws * q2;
                ngq[k] += k2p * k2 * ws * q2;
                mu_gu[k] += k2p * k2 * ws * u2;
                mq[k] += k2p * ws * q2;
                mgq[k] += k2p * k2 * ws * q2;
                mlq[k] += k2p * k2 * k2 * ws * q2;
            }
            k2p *= k2;
        }
    });

    rep.q_norms.resize(s + 2);
    rep.u_norms.resize(s + 1);
    for (int k = 0; k <= s + 1; ++k) rep.q_norms[k] = std::sqrt(vol * qn[k]);
    for (int k = 0; k <= s; ++k) rep.u_norms[k] = std::sqrt(vol * un[k]);

    const double M = rep.M;
    rep.E = vol * (nu[0] + M * nq[0] + ngq[0]);
    rep.D = vol * (p.mu * mu_gu[0] + p.a * M * p.gamma * mq[0] +
                   (p.a + M) * p.gamma * mgq[0] + p.gamma * mlq[0]);
    double N = 0.0, Mw = 0.0;
    for (int k = 0; k <= s; ++k) {
        const double tw = std::pow(1.0 + st.t, k);
        N += tw * (nu[k] + M * nq[k] + ngq[k]);
        Mw += tw * (0.5 * p.mu * mu_gu[k] + 0.5 * p.a * M * p.gamma * mq[k] +
                    (p.a + M) * p.gamma * mgq[k] + p.gamma * mlq[k]);
    }
    rep.N = vol * N;
    rep.Mw = vol * Mw;

    double Hq = 0.0;
    const double eg = std::exp(0.5 * p.a * p.gamma * st.t);
    for (int k = 0; k <= s - 2; ++k) Hq += std::pow(1.0 + st.t, 0.75 + 0.5 * k) * rep.u_norms[k];
    for (int k = 0; k <= s - 1; ++k)
        Hq += std::pow(1.0 + st.t, 0.75 + 0.5 * k) * eg * rep.q_norms[k];
    rep.Hq = Hq;

    rep.div_res = grid.divergence_residual(st.uhat);
    const std::size_t zero = grid.index(0, 0, 0);
    for (int c = 0; c < 3; ++c) rep.mean_u[c] = st.uhat.comp(c)[zero].real();

    if (real_space_extras) {
        EnergyScratch local;
        EnergyScratch& sc = scratch ? *scratch : local;
        grid.backward(st.qhat, sc.q_r);
        grid.backward(st.uhat, sc.u_r);
        const RealField& q_r = sc.q_r;
        const RealField& u_r = sc.u_r;
        double mq_max = 0.0, mu_max = 0.0, tr_max = 0.0;
        for (std::size_t x = 0; x < q_r.comp_size(); ++x) {
            double qv[5];
            for (int i = 0; i < 5; ++i) qv[i] = q_r.comp(i)[x];
            double t2 = 0.0;
            for (int i = 0; i < 5; ++i) t2 += qv[i] * qv[i];
            mq_max = std::max(mq_max, t2);
            double m[9];
            detail::expand5(qv, m);
            tr_max = std::max(tr_max, std::abs((m[0] + m[4]) + m[8]));
            double uu = 0.0;
            for (int c = 0; c < 3; ++c) uu += u_r.comp(c)[x] * u_r.comp(c)[x];
            mu_max = std::max(mu_max, uu);
        }
        rep.max_q = std::sqrt(mq_max);
        rep.max_u = std::sqrt(mu_max);
        rep.trace_res = tr_max;
    }
    if (!(std::isfinite(rep.E) && std::isfinite(rep.D)))
        throw std::runtime_error("energy_functionals: non-finite functional");
    return rep;
}

// ---------------------------------------------------------------------------
// Decay-rate fitting: least squares of log y = logC - alpha log(1+t) - beta t.
// ---------------------------------------------------------------------------
struct DecayFit {
    double logC = 0.0;
    double alpha = 0.0; // algebraic exponent
    double beta = 0.0;  // exponential rate
    double rss = 0.0;   // residual sum of squares, always reported
    double t_lo = 0.0, t_hi = 0.0;
};

inline DecayFit fit_decay_log(const std::vector<double>& t, const std::vector<double>& log_y,
                              double t_lo, double t_hi) {
    if (t.size() != log_y.size()) throw std::invalid_argument("fit_decay: size mismatch");
    std::vector<double> x1, x2, rhs;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        x1.push_back(std::log1p(t[i]));
        x2.push_back(t[i]);
        rhs.push_back(log_y[i]);
    }
    const std::size_t m = rhs.size();
    if (m < 4) throw std::invalid_argument("fit_decay: need at least 4 samples in the window");

    // normal equations for [logC, -alpha, -beta]
    double A[3][3] = {{double(m), 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (std::size_t i = 0; i < m; ++i) {
        A[0][1] += x1[i];
        A[0][2] += x2[i];
        A[1][1] += x1[i] * x1[i];
        A[1][2] += x1[i] * x2[i];
        A[2][2] += x2[i] * x2[i];
        b[0] += rhs[i];
        b[1] += rhs[i] * x1[i];
        b[2] += rhs[i] * x2[i];
    }
    A[1][0] = A[0][1];
    A[2][0] = A[0][2];
    A[2][1] = A[1][2];

    // Gaussian elimination with partial pivoting
    double M[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M[i][j] = A[i][j];
        M[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-12 * (1.0 + std::abs(A[col][col])))
            throw std::invalid_argument("fit_decay: singular design matrix (degenerate samples)");
        for (int j = 0; j < 4; ++j) std::swap(M[col][j], M[piv][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = M[r][col] / M[col][col];
            for (int j = 0; j < 4; ++j) M[r][j] -= f * M[col][j];
        }
    }
    DecayFit fit;
    fit.logC = M[0][3] / M[0][0];
    fit.alpha = -M[1][3] / M[1][1];
    fit.beta = -M[2][3] / M[2][2];
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    for (std::size_t i = 0; i < m; ++i) {
        const double pred = fit.logC - fit.alpha * x1[i] - fit.beta * x2[i];
        fit.rss += (rhs[i] - pred) * (rhs[i] - pred);
    }
    return fit;
}

inline DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double t_lo,
                          double t_hi) {
    std::vector<double> log_y(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0))
            throw std::invalid_argument("fit_decay: samples must be positive");
        log_y[i] = std::log(y[i]);
    }
    return fit_decay_log(t, log_y, t_lo, t_hi);
}

// default window: the last decade of the series
inline std::pair<double, double> default_fit_window(double t_max) {
    return {t_max / 10.0, t_max};
}

// Compensated series extrema: (inf, sup) of (1+t)^{3/4+k/2} y(t).
inline std::pair<double, double> lower_bound_check(const std::vector<double>& t,
                                                   const std::vector<double>& y, int k) {
    if (t.empty() || t.size() != y.size())
        throw std::invalid_argument("lower_bound_check: empty or mismatched series");
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > 0.0))
            throw std::invalid_argument("lower_bound_check: nonpositive sample (degenerate series)");
        const double comp = std::pow(1.0 + t[i], 0.75 + 0.5 * k) * y[i];
        if (first) {
            lo = hi = comp;
            first = false;
        } else {
            lo = std::min(lo, comp);
            hi = std::max(hi, comp);
        }
    }
    return {lo, hi};
}

// log-domain variant for series carried as log y
inline std::pair<double, double> lower_bound_check_log(const std::vector<double>& t,
                                                       const std::vector<double>& log_y, int k) {
    if (t.empty() || t.size() != log_y.size())
        throw std::invalid_argument("lower_bound_check: empty or mismatched series");
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double comp = (0.75 + 0.5 * k) * std::log1p(t[i]) + log_y[i];
        if (first) {
            lo = hi = comp;
            first = false;
        } else {
            lo = std::min(lo, comp);
            hi = std::max(hi, comp);
        }
    }
    return {std::exp(lo), std::exp(hi)};
}

// ---------------------------------------------------------------------------
// Commutator ratios (the refined product estimates), evaluated on scalar
// band-limited fields. d^k is taken along each axis separately and the worst
// axis is reported.
//   r_a: ||d^k(psi grad phi) - psi d^k grad phi|| / (||psi||_{Hs} ||phi||_{Hs+1})
//   r_b: ||d^k(phi grad psi) - phi d^k grad psi|| / (||psi||_{Hs} ||phi||_{Hs+1})
//   r_c: ||d^k(phi lap Phi) - phi d^k lap Phi|| / (||phi||_{Hs+1} ||Phi||_{Hs+1})
// ---------------------------------------------------------------------------
struct CommutatorRatios {
    double r_a = 0.0, r_b = 0.0, r_c = 0.0;
};

namespace detail {

inline double commutator_norm_sq(const Grid& grid, const RealField& outer_r,
                                 const SpectralField& inner_h, int k, int axis) {
    // || d^k(outer * inner) - outer * d^k inner ||_L2^2 for one scalar pair
    std::array<int, 3> alpha{0, 0, 0};
    alpha[axis] = k;
    RealField prod(grid.spec(), 1);
    const RealField inner_r = grid.backward(inner_h);
    for (std::size_t x = 0; x < prod.comp_size(); ++x)
        prod.comp(0)[x] = outer_r.comp(0)[x] * inner_r.comp(0)[x];
    const SpectralField t1 = grid.derivative(grid.forward(prod), alpha);

    const RealField dk_inner = grid.backward(grid.derivative(inner_h, alpha));
    RealField prod2(grid.spec(), 1);
    for (std::size_t x = 0; x < prod2.comp_size(); ++x)
        prod2.comp(0)[x] = outer_r.comp(0)[x] * dk_inner.comp(0)[x];
    const SpectralField t2 = grid.forward(prod2);

    double acc = 0.0;
    const double vol = std::pow(grid.box_length(), 3);
    grid.for_each_mode([&](int, int, int iz, std::size_t idx) {
        acc += grid.mode_weight(iz) * std::norm(t1.comp(0)[idx] - t2.comp(0)[idx]);
    });
    return vol * acc;
}

} // namespace detail

inline CommutatorRatios commutator_ratio(const Grid& grid, const SpectralField& psi,
                                         const SpectralField& phi, const SpectralField& Phi,
                                         int k, int s) {
    if (s < 2 || k < 0 || k > s)
        throw std::invalid_argument("commutator_ratio: need s >= 2 and 0 <= k <= s");
    CommutatorRatios out;
    const double npsi = grid.sobolev_norm(psi, s);
    const double nphi = grid.sobolev_norm(phi, s + 1);
    const double nPhi = grid.sobolev_norm(Phi, s + 1);
    if (npsi == 0.0 || nphi == 0.0) return out; // zero fields: ratios are zero
    if (k == 0) return out;                     // empty commutator

    const RealField psi_r = grid.backward(psi);
    const RealField phi_r = grid.backward(phi);

    for (int axis = 0; axis < 3; ++axis) {
        double a = 0.0, b = 0.0, c = 0.0;
        for (int d = 0; d < 3; ++d) {
            a += detail::commutator_norm_sq(grid, psi_r, grid.partial(phi, d), k, axis);
            b += detail::commutator_norm_sq(grid, phi_r, grid.partial(psi, d), k, axis);
        }
        c = detail::commutator_norm_sq(grid, phi_r, grid.laplacian(Phi), k, axis);
        out.r_a = std::max(out.r_a, std::sqrt(a) / (npsi * nphi));
        out.r_b = std::max(out.r_b, std::sqrt(b) / (npsi * nphi));
        if (nPhi > 0.0) out.r_c = std::max(out.r_c, std::sqrt(c) / (nphi * nPhi));
    }
    return out;
}

// || |Q| ||_{Hs} / ||Q||_{Hs} with |Q| evaluated pointwise then transformed.
inline double modq_sobolev_ratio(const Grid& grid, const SpectralField& qhat, int s) {
    if (s < 1) throw std::invalid_argument("modq_sobolev_ratio: s must be >= 1");
    const double denom = grid.sobolev_norm(qhat, s);
    if (denom == 0.0) throw std::invalid_argument("modq_sobolev_ratio: zero field");
    const RealField q_r = grid.backward(qhat);
    RealField mod(grid.spec(), 1);
    for (std::size_t x = 0; x < mod.comp_size(); ++x) {
        double t2 = 0.0;
        for (int i = 0; i < 5; ++i) t2 += q_r.comp(i)[x] * q_r.comp(i)[x];
        mod.comp(0)[x] = std::sqrt(t2);
    }
    return grid.sobolev_norm(grid.forward(mod), s) / denom;
}

// ---------------------------------------------------------------------------
// Cancellation residuals, cosine-normalized: each inner product (or identity
// pair difference) divided by the product of the factor L2 norms.
//   1. (u . grad u, u) and (u . grad Q, Q)     (worst of the two)
//   2. (Q Om - Om Q, Q)
//   3. (u . grad Q, lap Q) - (div(gradQ . gradQ), u)
//   4. (Q Om - Om Q, lap Q) - (Q lapQ - lapQ Q, grad u)
//   5. (|Q| lapQ, grad u) - (|Q| D, lap Q)
// ---------------------------------------------------------------------------
inline std::array<double, 5> cancellation_residuals(const SpectralState& st, const Grid& grid) {
    const RealField u = grid.backward(st.uhat);
    const RealField q = grid.backward(st.qhat);
    const RealField gu = grid.backward(grid.gradient(st.uhat)); // d*3+c
    const RealField gq = grid.backward(grid.gradient(st.qhat)); // d*5+i
    const RealField lq = grid.backward(grid.laplacian(st.qhat));

    // div(gradQ . gradQ) via an independent spectral pass
    RealField odot(grid.spec(), 9);
    for (std::size_t x = 0; x < odot.comp_size(); ++x)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double v = 0.0;
                for (int i = 0; i < 5; ++i) v += gq.comp(b * 5 + i)[x] * gq.comp(a * 5 + i)[x];
                odot.comp(a * 3 + b)[x] = v;
            }
    const SpectralField odot_h = grid.forward(odot);
    SpectralField div_odot_h(grid.spec(), 3);
    const std::complex<double> iunit(0.0, 1.0);
    grid.for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
        const auto xi = grid.mode_xi(ix, iy, iz);
        for (int b = 0; b < 3; ++b) {
            std::complex<double> acc(0.0);
            for (int a = 0; a < 3; ++a) acc += xi[a] * odot_h.comp(a * 3 + b)[idx];
            div_odot_h.comp(b)[idx] = iunit * acc;
        }
    });
    const RealField div_odot = grid.backward(div_odot_h);

    double ip1a = 0, ip1b = 0, ip2 = 0, ip3a = 0, ip3b = 0, ip4a = 0, ip4b = 0, ip5a = 0, ip5b = 0;
    double n_ugu = 0, n_u = 0, n_ugq = 0, n_q = 0, n_comm = 0, n_lq = 0, n_divo = 0;
    double n_qlc = 0, n_gu = 0, n_mlq = 0, n_md = 0;

    for (std::size_t x = 0; x < u.comp_size(); ++x) {
        double uv[3], G[9], qv[5], gqv[15], lv[5];
        for (int c = 0; c < 3; ++c) uv[c] = u.comp(c)[x];
        for (int c = 0; c < 9; ++c) G[c] = gu.comp(c)[x];
        for (int c = 0; c < 5; ++c) qv[c] = q.comp(c)[x];
        for (int c = 0; c < 15; ++c) gqv[c] = gq.comp(c)[x];
        for (int c = 0; c < 5; ++c) lv[c] = lq.comp(c)[x];

        // (u . grad u, u)
        double conv_u[3];
        for (int i = 0; i < 3; ++i)
            conv_u[i] = uv[0] * G[0 * 3 + i] + uv[1] * G[1 * 3 + i] + uv[2] * G[2 * 3 + i];
        for (int i = 0; i < 3; ++i) {
            ip1a += conv_u[i] * uv[i];
            n_ugu += conv_u[i] * conv_u[i];
            n_u += uv[i] * uv[i];
        }

        // (u . grad Q, Q) and (u . grad Q, lap Q), orthonormal 5-component form
        for (int i = 0; i < 5; ++i) {
            const double convq =
                uv[0] * gqv[0 * 5 + i] + uv[1] * gqv[1 * 5 + i] + uv[2] * gqv[2 * 5 + i];
            ip1b += convq * qv[i];
            ip3a += convq * lv[i];
            n_ugq += convq * convq;
            n_q += qv[i] * qv[i];
            n_lq += lv[i] * lv[i];
        }

        // (div(gradQ . gradQ), u)
        for (int b = 0; b < 3; ++b) {
            ip3b += div_odot.comp(b)[x] * uv[b];
            n_divo += div_odot.comp(b)[x] * div_odot.comp(b)[x];
        }

        double M[9], L[9], Om[9], D[9];
        detail::expand5(qv, M);
        detail::expand5(lv, L);
        for (int a3 = 0; a3 < 3; ++a3)
            for (int b3 = 0; b3 < 3; ++b3) {
                Om[3 * a3 + b3] = 0.5 * (G[3 * a3 + b3] - G[3 * b3 + a3]);
                D[3 * a3 + b3] = 0.5 * (G[3 * a3 + b3] + G[3 * b3 + a3]);
            }
        double QOm[9], OmQ[9], QL[9], LQ[9];
        detail::mul3(M, Om, QOm);
        detail::mul3(Om, M, OmQ);
        detail::mul3(M, L, QL);
        detail::mul3(L, M, LQ);
        const double modq = std::sqrt(qv[0] * qv[0] + qv[1] * qv[1] + qv[2] * qv[2] +
                                      qv[3] * qv[3] + qv[4] * qv[4]);
        for (int e = 0; e < 9; ++e) {
            const double comm = QOm[e] - OmQ[e];
            const double lcomm = QL[e] - LQ[e];
            ip2 += comm * M[e];
            ip4a += comm * L[e];
            ip4b += lcomm * G[e];
            ip5a += modq * L[e] * G[e];
            ip5b += modq * D[e] * L[e];
            n_comm += comm * comm;
            n_qlc += lcomm * lcomm;
            n_gu += G[e] * G[e];
            n_mlq += modq * L[e] * modq * L[e];
            n_md += modq * D[e] * modq * D[e];
        }
    }

    const double h3 = std::pow(grid.dx(), 3);
    auto nrm = [&](double s2) { return std::sqrt(s2 * h3); };
    auto safe = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

    std::array<double, 5> r{};
    r[0] = std::max(safe(std::abs(ip1a * h3), nrm(n_ugu) * nrm(n_u)),
                    safe(std::abs(ip1b * h3), nrm(n_ugq) * nrm(n_q)));
    r[1] = safe(std::abs(ip2 * h3), nrm(n_comm) * nrm(n_q));
    r[2] = safe(std::abs((ip3a - ip3b) * h3),
                nrm(n_ugq) * nrm(n_lq) + nrm(n_divo) * nrm(n_u));
    r[3] = safe(std::abs((ip4a - ip4b) * h3),
                nrm(n_comm) * nrm(n_lq) + nrm(n_qlc) * nrm(n_gu));
    r[4] = safe(std::abs((ip5a - ip5b) * h3), nrm(n_mlq) * nrm(n_gu) + nrm(n_md) * nrm(n_lq));
    return r;
}

} // namespace anlq
