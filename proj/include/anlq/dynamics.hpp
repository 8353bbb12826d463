// SPDX-License-Identifier: Apache-2.0
//
// Nonlinear term assembly for the coupled tensor/velocity system in its
// divergence form
//   q_t - Gamma lap q + a Gamma q = -div f1 + f2
//   u_t - mu lap u - kappa P div q = -P div f3
// with
//   f1 = u (x) Q
//   f2 = Om Q - Q Om + lambda |Q| D + b Gamma [Q^2 - Tr(Q^2)/3 I] - c Gamma Q Tr(Q^2)
//   f3 = u (x) u + gradQ . gradQ - Q lapQ + lapQ Q + lambda |Q| H[Q],
// and time integration by integrating-factor RK4 with the exact block
// propagator as the integrating factor (the linear part never constrains the
// step size and is integrated exactly).
//
// Divergences contract the first index: (div f)_b = d_a f_{ab}, so that
// div f1 = u . grad Q and div(u (x) u) = u . grad u for solenoidal u.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anlq/grid.hpp"
#include "anlq/kernels.hpp"
#include "anlq/qtensor.hpp"

namespace anlq {

struct NonlinearResidual {
    SpectralField gq; // 5 components, -div f1 + f2
    SpectralField gu; // 3 components, -P div f3
};

struct StepperConfig {
    double dt = 1e-2;
    enum class Scheme { if_rk4 } scheme = Scheme::if_rk4;
    int reproject_every = 1; // Leray hygiene cadence (steps)
    bool nonlinear = true;   // disabled: exact linear propagation only

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be > 0");
        if (reproject_every < 1)
            throw std::invalid_argument("StepperConfig: reproject_every must be >= 1");
    }
};

struct BlowUpError : std::runtime_error {
    int step;
    explicit BlowUpError(int s)
        : std::runtime_error("non-finite state detected at step " + std::to_string(s)), step(s) {}
};

// Precomputed per-mode kernel table for one propagation interval tau.
struct PropagatorTable {
    double tau = -1.0;
    std::vector<double> A, B, C;

    void build(const Grid& grid, const PhysParams& p, double t) {
        tau = t;
        A.resize(grid.n_spec());
        B.resize(grid.n_spec());
        C.resize(grid.n_spec());
        grid.for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = grid.mode_xi(ix, iy, iz);
            const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            const KernelPoint pt{t, k2, p};
            A[idx] = kernel_A(pt);
            B[idx] = kernel_B(pt);
            C[idx] = kernel_C(pt);
        });
    }

    // exact semigroup action on a (tensor, velocity) coefficient pair
    void apply(SpectralField& q5, SpectralField& u3, const Grid& grid) const {
        const std::complex<double> iunit(0.0, 1.0);
        const int n = grid.n();
        const int nz = n / 2 + 1;
#pragma omp parallel for schedule(static) num_threads(Grid::workers()) if (Grid::workers() > 1)
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < nz; ++iz) {
                    const std::size_t idx = grid.index(ix, iy, iz);
                    const auto xi = grid.mode_xi(ix, iy, iz);
                    const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                    std::array<std::complex<double>, 5> q;
                    for (int c = 0; c < 5; ++c) q[c] = q5.comp(c)[idx];
                    if (k2 > 0.0) {
                        const auto v = Grid::mode_q_times_xi(q, xi);
                        const std::complex<double> dot =
                            (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / k2;
                        for (int l = 0; l < 3; ++l) {
                            const std::complex<double> sigma0 = iunit * (v[l] - xi[l] * dot);
                            u3.comp(l)[idx] = B[idx] * sigma0 + C[idx] * u3.comp(l)[idx];
                        }
                    }
                    for (int c = 0; c < 5; ++c) q5.comp(c)[idx] = A[idx] * q[c];
                }
    }
};

// Scratch buffers reused across residual evaluations and RK stages; the
// stepping hot path performs no allocations.
class DynWorkspace {
  public:
    explicit DynWorkspace(const Grid& grid)
        : u_r(grid.spec(), 3), q_r(grid.spec(), 5), gradu_r(grid.spec(), 9),
          gradq_r(grid.spec(), 15), lapq_r(grid.spec(), 5), f1_r(grid.spec(), 15),
          f2_r(grid.spec(), 5), f3_r(grid.spec(), 9), f1_h(grid.spec(), 15),
          f2_h(grid.spec(), 5), f3_h(grid.spec(), 9), hU(grid.spec()), stage(grid.spec()),
          n1{SpectralField(grid.spec(), 5), SpectralField(grid.spec(), 3)},
          n2{SpectralField(grid.spec(), 5), SpectralField(grid.spec(), 3)},
          n3{SpectralField(grid.spec(), 5), SpectralField(grid.spec(), 3)},
          n4{SpectralField(grid.spec(), 5), SpectralField(grid.spec(), 3)} {}

    RealField u_r, q_r, gradu_r, gradq_r, lapq_r, f1_r, f2_r, f3_r;
    SpectralField f1_h, f2_h, f3_h;
    SpectralState hU, stage;
    NonlinearResidual n1, n2, n3, n4;
    PropagatorTable half, full;
    double table_dt = -1.0;

    void ensure_tables(const Grid& grid, const PhysParams& p, double dt) {
        if (table_dt == dt) return;
        half.build(grid, p, 0.5 * dt);
        full.build(grid, p, dt);
        table_dt = dt;
    }
};

namespace detail {

// pointwise 3x3 helpers on stack arrays, row-major
inline void expand5(const double q[5], double m[9]) {
    const double d0 = -q[0] * inv_sqrt6 + q[1] * inv_sqrt2;
    const double d1 = -q[0] * inv_sqrt6 - q[1] * inv_sqrt2;
    m[0] = d0;
    m[4] = d1;
    m[8] = -(d0 + d1);
    m[1] = m[3] = q[2] * inv_sqrt2;
    m[2] = m[6] = q[3] * inv_sqrt2;
    m[5] = m[7] = q[4] * inv_sqrt2;
}

inline void reduce5(const double m[9], double q[5]) {
    q[0] = inv_sqrt6 * (2.0 * m[8] - m[0] - m[4]);
    q[1] = inv_sqrt2 * (m[0] - m[4]);
    q[2] = inv_sqrt2 * (m[1] + m[3]);
    q[3] = inv_sqrt2 * (m[2] + m[6]);
    q[4] = inv_sqrt2 * (m[5] + m[7]);
}

inline void mul3(const double a[9], const double b[9], double r[9]) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[3 * i + j] =
                a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
}

} // namespace detail

// Real-space assembly of f1 = u (x) Q, component layout a*5 + i for u_a q_i.
inline void assemble_f1(const RealField& u, const RealField& q, RealField& f1) {
    const std::size_t npts = u.comp_size();
    for (int a = 0; a < 3; ++a) {
        const double* ua = u.comp(a);
        for (int i = 0; i < 5; ++i) {
            const double* qi = q.comp(i);
            double* out = f1.comp(a * 5 + i);
#pragma omp parallel for schedule(static) num_threads(Grid::workers()) if (Grid::workers() > 1)
            for (std::ptrdiff_t x = 0; x < std::ptrdiff_t(npts); ++x) out[x] = ua[x] * qi[x];
        }
    }
}

// Real-space assembly of f2 and f3 in one sweep over the grid; gradu layout
// d*3 + c = d_d u_c, gradq layout d*5 + i = d_d q_i.
inline void assemble_f2_f3(const RealField& u, const RealField& q, const RealField& gradu,
                           const RealField& gradq, const RealField& lapq, const PhysParams& p,
                           RealField& f2, RealField& f3) {
    const std::size_t npts = u.comp_size();
    const double *qp[5], *lp[5], *up[3], *gp[9], *gqp[15];
    double *f2p[5], *f3p[9];
    for (int i = 0; i < 5; ++i) qp[i] = q.comp(i);
    for (int i = 0; i < 5; ++i) lp[i] = lapq.comp(i);
    for (int a = 0; a < 3; ++a) up[a] = u.comp(a);
    for (int a = 0; a < 9; ++a) gp[a] = gradu.comp(a);
    for (int a = 0; a < 15; ++a) gqp[a] = gradq.comp(a);
    for (int i = 0; i < 5; ++i) f2p[i] = f2.comp(i);
    for (int a = 0; a < 9; ++a) f3p[a] = f3.comp(a);
#pragma omp parallel for schedule(static) num_threads(Grid::workers()) if (Grid::workers() > 1)
    for (std::ptrdiff_t x = 0; x < std::ptrdiff_t(npts); ++x) {
        double qv[5], lv[5], uv[3], G[9];
        for (int i = 0; i < 5; ++i) qv[i] = qp[i][x];
        for (int i = 0; i < 5; ++i) lv[i] = lp[i][x];
        for (int a = 0; a < 3; ++a) uv[a] = up[a][x];
        for (int a = 0; a < 9; ++a) G[a] = gp[a][x];

        double M[9], L[9];
        detail::expand5(qv, M);
        detail::expand5(lv, L);

        double t2 = 0.0;
        for (int i = 0; i < 5; ++i) t2 += qv[i] * qv[i];
        const double mod_q = std::sqrt(t2);

        // vorticity and strain, (grad u)_{ab} = d_a u_b
        double Om[9], D[9];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Om[3 * a + b] = 0.5 * (G[3 * a + b] - G[3 * b + a]);
                D[3 * a + b] = 0.5 * (G[3 * a + b] + G[3 * b + a]);
            }

        double OmM[9], MOm[9], MM[9];
        detail::mul3(Om, M, OmM);
        detail::mul3(M, Om, MOm);
        detail::mul3(M, M, MM);
        const double tr_mm3 = (MM[0] + MM[4] + MM[8]) / 3.0;

        // f2 = Om Q - Q Om + lambda |Q| D + b Gamma [Q^2 - tr/3 I] - c Gamma Q t2
        double F2[9];
        for (int a = 0; a < 9; ++a) {
            double v = OmM[a] - MOm[a] + p.lambda * mod_q * D[a] +
                       p.b * p.gamma * MM[a] - p.c * p.gamma * M[a] * t2;
            F2[a] = v;
        }
        F2[0] -= p.b * p.gamma * tr_mm3;
        F2[4] -= p.b * p.gamma * tr_mm3;
        F2[8] -= p.b * p.gamma * tr_mm3;
        double f2v[5];
        detail::reduce5(F2, f2v);
        for (int i = 0; i < 5; ++i) f2p[i][x] = f2v[i];

        // molecular field H = L - a M + b [M^2 - tr/3 I] - c M t2
        double H[9];
        for (int a = 0; a < 9; ++a) H[a] = L[a] - p.a * M[a] + p.b * MM[a] - p.c * M[a] * t2;
        H[0] -= p.b * tr_mm3;
        H[4] -= p.b * tr_mm3;
        H[8] -= p.b * tr_mm3;

        double ML[9], LM[9];
        detail::mul3(M, L, ML);
        detail::mul3(L, M, LM);

        // f3 = u (x) u + gradQ . gradQ - Q lapQ + lapQ Q + lambda |Q| H;
        // the basis is orthonormal, so (gradQ . gradQ)_{ab} = sum_i d_b q_i d_a q_i
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double odot = 0.0;
                for (int i = 0; i < 5; ++i) odot += gqp[b * 5 + i][x] * gqp[a * 5 + i][x];
                f3p[a * 3 + b][x] = uv[a] * uv[b] + odot - ML[3 * a + b] + LM[3 * a + b] +
                                    p.lambda * mod_q * H[3 * a + b];
            }
    }
}

// Full residual: transforms the state down, assembles f1..f3, transforms the
// sources up, applies -div / -P div and the dealias rule. Allocation-free
// when `out` and the workspace are already sized.
inline void nonlinear_residual_into(const SpectralState& st, const PhysParams& p,
                                    const Grid& grid, DynWorkspace& ws, NonlinearResidual& out) {
    grid.backward(st.uhat, ws.u_r);
    grid.backward(st.qhat, ws.q_r);
    grid.backward_gradient(st.uhat, ws.gradu_r);
    grid.backward_gradient(st.qhat, ws.gradq_r);
    grid.backward_laplacian(st.qhat, ws.lapq_r);

    assemble_f1(ws.u_r, ws.q_r, ws.f1_r);
    assemble_f2_f3(ws.u_r, ws.q_r, ws.gradu_r, ws.gradq_r, ws.lapq_r, p, ws.f2_r, ws.f3_r);

    grid.forward(ws.f1_r, ws.f1_h);
    grid.forward(ws.f2_r, ws.f2_h);
    grid.forward(ws.f3_r, ws.f3_h);

    if (out.gq.n != grid.n()) out.gq = SpectralField(grid.spec(), 5);
    if (out.gu.n != grid.n()) out.gu = SpectralField(grid.spec(), 3);
    const int n = grid.n();
    const int nz = n / 2 + 1;
#pragma omp parallel for schedule(static) num_threads(Grid::workers()) if (Grid::workers() > 1)
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < nz; ++iz) {
                const std::size_t idx = grid.index(ix, iy, iz);
                const auto xi = grid.mode_xi(ix, iy, iz);
                for (int i = 0; i < 5; ++i) {
                    std::complex<double> div(0.0, 0.0);
                    for (int a = 0; a < 3; ++a) div += xi[a] * ws.f1_h.comp(a * 5 + i)[idx];
                    out.gq.comp(i)[idx] =
                        std::complex<double>(div.imag(), -div.real()) + ws.f2_h.comp(i)[idx];
                }
                for (int b = 0; b < 3; ++b) {
                    std::complex<double> div(0.0, 0.0);
                    for (int a = 0; a < 3; ++a) div += xi[a] * ws.f3_h.comp(a * 3 + b)[idx];
                    out.gu.comp(b)[idx] = std::complex<double>(div.imag(), -div.real());
                }
            }
    grid.leray_project(out.gu);
    grid.dealias(out.gq);
    grid.dealias(out.gu);
}

inline NonlinearResidual nonlinear_residual(const SpectralState& st, const PhysParams& p,
                                            const Grid& grid, DynWorkspace& ws) {
    NonlinearResidual res{SpectralField(grid.spec(), 5), SpectralField(grid.spec(), 3)};
    nonlinear_residual_into(st, p, grid, ws, res);
    return res;
}

namespace detail {

inline void pair_axpy(SpectralField& yq, SpectralField& yu, double alpha,
                      const NonlinearResidual& x) {
    const std::ptrdiff_t nq = std::ptrdiff_t(yq.data.size());
#pragma omp parallel for schedule(static) num_threads(Grid::workers()) if (Grid::workers() > 1)
    for (std::ptrdiff_t i = 0; i < nq; ++i) yq.data[i] += alpha * x.gq.data[i];
    for (std::size_t i = 0; i < yu.data.size(); ++i) yu.data[i] += alpha * x.gu.data[i];
}

inline void pair_copy(SpectralState& dst, const SpectralState& src) {
    dst.qhat = src.qhat;
    dst.uhat = src.uhat;
    dst.t = src.t;
}

} // namespace detail

// One integrating-factor RK4 step. Writing S(t) for the exact propagator and
// N for the nonlinear residual:
//   N1 = N(w)
//   U2 = S(h/2) w + (h/2) S(h/2) N1,          N2 = N(U2)
//   U3 = S(h/2) w + (h/2) N2,                 N3 = N(U3)
//   U4 = S(h/2) [S(h/2) w + h N3],            N4 = N(U4)
//   w' = S(h/2) [S(h/2) w + (h/6)(S(h/2) N1 + 2 N2 + 2 N3)] + (h/6) N4
inline void step(SpectralState& st, const StepperConfig& cfg, const PhysParams& p,
                 const Grid& grid, DynWorkspace& ws, int step_index = 0) {
    cfg.validate();
    const double h = cfg.dt;
    ws.ensure_tables(grid, p, h);

    if (!cfg.nonlinear) {
        ws.full.apply(st.qhat, st.uhat, grid);
        st.t += h;
        return;
    }

    nonlinear_residual_into(st, p, grid, ws, ws.n1);

    // hU = S(h/2) w, hN1 = S(h/2) N1
    detail::pair_copy(ws.hU, st);
    ws.half.apply(ws.hU.qhat, ws.hU.uhat, grid);
    ws.half.apply(ws.n1.gq, ws.n1.gu, grid);

    detail::pair_copy(ws.stage, ws.hU);
    detail::pair_axpy(ws.stage.qhat, ws.stage.uhat, 0.5 * h, ws.n1);
    ws.stage.t = st.t + 0.5 * h;
    nonlinear_residual_into(ws.stage, p, grid, ws, ws.n2);

    ws.stage.qhat = ws.hU.qhat;
    ws.stage.uhat = ws.hU.uhat;
    detail::pair_axpy(ws.stage.qhat, ws.stage.uhat, 0.5 * h, ws.n2);
    nonlinear_residual_into(ws.stage, p, grid, ws, ws.n3);

    ws.stage.qhat = ws.hU.qhat;
    ws.stage.uhat = ws.hU.uhat;
    detail::pair_axpy(ws.stage.qhat, ws.stage.uhat, h, ws.n3);
    ws.half.apply(ws.stage.qhat, ws.stage.uhat, grid);
    ws.stage.t = st.t + h;
    nonlinear_residual_into(ws.stage, p, grid, ws, ws.n4);

    // accumulate hN1 + 2 N2 + 2 N3 into n1, then finish the step
    for (std::size_t i = 0; i < ws.n1.gq.data.size(); ++i)
        ws.n1.gq.data[i] += 2.0 * (ws.n2.gq.data[i] + ws.n3.gq.data[i]);
    for (std::size_t i = 0; i < ws.n1.gu.data.size(); ++i)
        ws.n1.gu.data[i] += 2.0 * (ws.n2.gu.data[i] + ws.n3.gu.data[i]);

    st.qhat = ws.hU.qhat;
    st.uhat = ws.hU.uhat;
    detail::pair_axpy(st.qhat, st.uhat, h / 6.0, ws.n1);
    ws.half.apply(st.qhat, st.uhat, grid);
    detail::pair_axpy(st.qhat, st.uhat, h / 6.0, ws.n4);
    st.t += h;

    grid.dealias(st.qhat);
    grid.dealias(st.uhat);
    if (cfg.reproject_every > 0 && (step_index + 1) % cfg.reproject_every == 0)
        grid.leray_project(st.uhat);
}

inline bool state_finite(const SpectralState& st) {
    double acc = 0.0;
    for (const auto& v : st.qhat.data) acc += std::norm(v);
    for (const auto& v : st.uhat.data) acc += std::norm(v);
    return std::isfinite(acc);
}

// Advance to the horizon, invoking the sample callback at step 0, every
// `cadence` steps, and on the final step. Aborts with BlowUpError on
// non-finite state.
inline SpectralState run(SpectralState st, const StepperConfig& cfg, double horizon,
                         const PhysParams& p, const Grid& grid, DynWorkspace& ws, int cadence,
                         const std::function<void(const SpectralState&, int)>& on_sample) {
    if (horizon < 0.0) throw std::invalid_argument("run: horizon must be >= 0");
    cfg.validate();
    if (cadence < 1) cadence = 1;
    const int nsteps = int(std::llround(horizon / cfg.dt));
    grid.dealias(st.qhat);
    grid.dealias(st.uhat);
    grid.leray_project(st.uhat);
    if (on_sample) on_sample(st, 0);
    for (int k = 0; k < nsteps; ++k) {
        step(st, cfg, p, grid, ws, k);
        if (!state_finite(st)) throw BlowUpError(k + 1);
        if (on_sample && ((k + 1) % cadence == 0 || k + 1 == nsteps)) on_sample(st, k + 1);
    }
    return st;
}

// ---------------------------------------------------------------------------
// Initial-data families.
// ---------------------------------------------------------------------------
enum class InitFamily { gaussian, random_band, single_mode };

inline const char* init_family_name(InitFamily f) {
    switch (f) {
        case InitFamily::gaussian: return "gaussian";
        case InitFamily::random_band: return "random_band";
        default: return "single_mode";
    }
}

struct InitConfig {
    InitFamily family = InitFamily::gaussian;
    double amplitude = 0.1;
    double sigma = 0.5; // bump width (gaussian family)
    std::uint64_t seed = 1;
};

inline SpectralState make_initial_state(const Grid& grid, const InitConfig& ic) {
    SpectralState st(grid.spec());
    switch (ic.family) {
        case InitFamily::gaussian: {
            // fixed unit directions so the state exercises every component
            const double qdir[5] = {0.55, -0.35, 0.45, 0.25, -0.55};
            const double vdir[3] = {0.40, -0.50, 0.76};
            RealField qb =
                gaussian_bump(grid, 5, ic.amplitude, ic.sigma, {{{0.5, 0.5, 0.5}}});
            RealField ub =
                gaussian_bump(grid, 3, ic.amplitude, ic.sigma, {{{0.4, 0.55, 0.5}}});
            for (int i = 0; i < 5; ++i) {
                double* c = qb.comp(i);
                for (std::size_t x = 0; x < qb.comp_size(); ++x) c[x] *= qdir[i];
            }
            for (int a = 0; a < 3; ++a) {
                double* c = ub.comp(a);
                for (std::size_t x = 0; x < ub.comp_size(); ++x) c[x] *= vdir[a];
            }
            st.qhat = grid.forward(qb);
            st.uhat = grid.forward(ub);
            break;
        }
        case InitFamily::random_band: {
            const int band = std::max(2, grid.n() / 4);
            st.qhat = random_band_limited(grid, 5, band, ic.seed, ic.amplitude);
            st.uhat = random_band_limited(grid, 3, band, ic.seed + 1, ic.amplitude);
            break;
        }
        case InitFamily::single_mode: {
            RealField f(grid.spec(), 5);
            const int n = grid.n();
            for (int ix = 0; ix < n; ++ix) {
                const double v = ic.amplitude * std::cos(two_pi * ix / n);
                for (int iy = 0; iy < n; ++iy)
                    for (int iz = 0; iz < n; ++iz)
                        f.comp(2)[(std::size_t(ix) * n + iy) * n + iz] = v;
            }
            st.qhat = grid.forward(f);
            break;
        }
    }
    grid.dealias(st.qhat);
    grid.dealias(st.uhat);
    grid.leray_project(st.uhat);
    return st;
}

// Rescale so the initial energy ||q||_{H^{s+1}}^2 + ||u||_{H^s}^2 hits the
// target exactly (the pairing is 2-homogeneous in the coefficients).
inline double scale_to_initial_energy(SpectralState& st, const Grid& grid, int s, double target) {
    const double e0 = grid.hs_pair_norm_sq(st, s);
    if (e0 <= 0.0) throw std::invalid_argument("scale_to_initial_energy: zero state");
    const double f = std::sqrt(target / e0);
    for (auto& v : st.qhat.data) v *= f;
    for (auto& v : st.uhat.data) v *= f;
    return f;
}

} // namespace anlq
