// SPDX-License-Identifier: Apache-2.0
//
// Algebra of symmetric traceless 3x3 tensors in a 5-component orthonormal
// basis, the molecular field driving their relaxation, the bulk free-energy
// density, and eigenvalue-based phase classification.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace anlq {

// ---------------------------------------------------------------------------
// Physical coefficients of the coupled tensor/velocity system.
//
// Either parameterization may be used to construct the set:
//   reduced:   (a, kappa) given directly,   c_star = c - 2a
//   physical:  (c, c_star, alpha2),         a = (c - c_star)/2, kappa = alpha2*c^2
// The elastic constant K is fixed to 1 throughout.
// ---------------------------------------------------------------------------
struct PhysParams {
    double a = 1.0;       // transition offset, a = (c - c_star)/2
    double b = 1.0;       // cubic coupling
    double c = 1.0;       // quartic coefficient / activity, > 0
    double c_star = -1.0; // critical concentration (= c - 2a)
    double kappa = 1.0;   // active stress strength, kappa = alpha2 * c^2
    double lambda = 1.0;  // alignment parameter
    double mu = 1.0;      // fluid viscosity, > 0
    double gamma = 1.0;   // rotational mobility, > 0

    static PhysParams reduced(double a, double b, double c, double kappa,
                              double lambda, double mu, double gamma) {
        PhysParams p;
        p.a = a; p.b = b; p.c = c; p.c_star = c - 2.0 * a;
        p.kappa = kappa; p.lambda = lambda; p.mu = mu; p.gamma = gamma;
        p.validate();
        return p;
    }

    static PhysParams physical(double c, double c_star, double alpha2, double b,
                               double lambda, double mu, double gamma) {
        PhysParams p;
        p.c = c; p.c_star = c_star; p.a = 0.5 * (c - c_star);
        p.kappa = alpha2 * c * c;
        p.b = b; p.lambda = lambda; p.mu = mu; p.gamma = gamma;
        p.validate();
        return p;
    }

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("PhysParams: mu must be > 0");
        if (!(gamma > 0.0)) throw std::invalid_argument("PhysParams: gamma must be > 0");
        if (!(c > 0.0)) throw std::invalid_argument("PhysParams: c must be > 0");
    }

    // Simulation scenarios additionally require a > 0 (damped tensor mode);
    // kernel evaluation does not.
    void require_positive_a(const std::string& who) const {
        if (!(a > 0.0))
            throw std::invalid_argument(who + ": requires a > 0 (got a = " + std::to_string(a) + ")");
    }
};

// Row-major 3x3 matrix, kept as a plain aggregate.
using Mat3 = std::array<double, 9>;

inline constexpr Mat3 mat3_zero() { return {0, 0, 0, 0, 0, 0, 0, 0, 0}; }

inline double mat3_trace(const Mat3& m) { return (m[0] + m[4]) + m[8]; }

inline Mat3 mat3_mul(const Mat3& x, const Mat3& y) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[3 * i + j] = x[3 * i + 0] * y[0 + j] + x[3 * i + 1] * y[3 + j] + x[3 * i + 2] * y[6 + j];
    return r;
}

inline Mat3 mat3_add(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r[i] = x[i] + y[i];
    return r;
}

inline Mat3 mat3_scale(double s, const Mat3& x) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r[i] = s * x[i];
    return r;
}

inline double mat3_frob(const Mat3& m) {
    double s = 0.0;
    for (double v : m) s += v * v;
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// 5-component coefficient vector in the fixed orthonormal basis of the
// symmetric traceless tensors (Frobenius inner product):
//
//   B0 = (1/sqrt6) diag(-1,-1,2)
//   B1 = (1/sqrt2) diag(1,-1,0)
//   B2 = (1/sqrt2) (e_xy + e_yx)
//   B3 = (1/sqrt2) (e_xz + e_zx)
//   B4 = (1/sqrt2) (e_yz + e_zy)
//
// Orthonormality makes |q|_2 equal the Frobenius norm of the expanded matrix,
// and Tr(Q^2) = |q|^2.
// ---------------------------------------------------------------------------
struct QTensor {
    std::array<double, 5> q{0, 0, 0, 0, 0};

    double& operator[](std::size_t i) { return q[i]; }
    double operator[](std::size_t i) const { return q[i]; }

    QTensor operator+(const QTensor& o) const {
        QTensor r;
        for (int i = 0; i < 5; ++i) r.q[i] = q[i] + o.q[i];
        return r;
    }
    QTensor operator-(const QTensor& o) const {
        QTensor r;
        for (int i = 0; i < 5; ++i) r.q[i] = q[i] - o.q[i];
        return r;
    }
    friend QTensor operator*(double s, const QTensor& t) {
        QTensor r;
        for (int i = 0; i < 5; ++i) r.q[i] = s * t.q[i];
        return r;
    }

    double norm() const {
        double s = 0.0;
        for (double v : q) s += v * v;
        return std::sqrt(s);
    }
};

namespace detail {
inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double inv_sqrt6 = 0.40824829046386301637;
} // namespace detail

// Expand coefficients into the 3x3 matrix. The (2,2) entry closes the trace,
// so Tr(basis_expand(q)) evaluates to exactly zero; symmetry holds by
// construction (shared off-diagonal values).
inline Mat3 basis_expand(const QTensor& t) {
    using detail::inv_sqrt2;
    using detail::inv_sqrt6;
    const double d0 = -t.q[0] * inv_sqrt6 + t.q[1] * inv_sqrt2;
    const double d1 = -t.q[0] * inv_sqrt6 - t.q[1] * inv_sqrt2;
    const double d2 = -(d0 + d1);
    const double oxy = t.q[2] * inv_sqrt2;
    const double oxz = t.q[3] * inv_sqrt2;
    const double oyz = t.q[4] * inv_sqrt2;
    return Mat3{d0, oxy, oxz,
                oxy, d1, oyz,
                oxz, oyz, d2};
}

// Project back onto the basis. Rejects matrices that are not symmetric
// traceless within a tight tolerance (signals representation corruption
// upstream, not a rounding problem).
inline QTensor basis_reduce(const Mat3& m) {
    using detail::inv_sqrt2;
    using detail::inv_sqrt6;
    const double scale = mat3_frob(m);
    const double sym_tol = 1e-12 * (scale > 1.0 ? scale : 1.0);
    if (std::abs(m[1] - m[3]) > sym_tol || std::abs(m[2] - m[6]) > sym_tol ||
        std::abs(m[5] - m[7]) > sym_tol)
        throw std::invalid_argument("basis_reduce: matrix not symmetric");
    if (std::abs(mat3_trace(m)) > 1e-12 * (scale > 1.0 ? scale : 1.0))
        throw std::invalid_argument("basis_reduce: matrix not traceless");
    QTensor t;
    t.q[0] = inv_sqrt6 * (2.0 * m[8] - m[0] - m[4]);
    t.q[1] = inv_sqrt2 * (m[0] - m[4]);
    t.q[2] = inv_sqrt2 * (m[1] + m[3]);
    t.q[3] = inv_sqrt2 * (m[2] + m[6]);
    t.q[4] = inv_sqrt2 * (m[5] + m[7]);
    return t;
}

// Symmetrize and remove the trace part: M -> (M + M^T)/2 - Tr(M)/3 * I.
// Idempotent; leaves symmetric traceless input unchanged.
inline Mat3 trace_free_project(const Mat3& m) {
    Mat3 s;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s[3 * i + j] = 0.5 * (m[3 * i + j] + m[3 * j + i]);
    const double tr3 = mat3_trace(s) / 3.0;
    s[0] -= tr3;
    s[4] -= tr3;
    s[8] -= tr3;
    return s;
}

// Molecular field H[Q] = lap(Q) - a Q + b [Q^2 - Tr(Q^2)/3 I] - c Q Tr(Q^2),
// with the Laplacian supplied pointwise by the caller (computed spectrally).
// Tracelessness of the output is automatic when Tr Q = 0.
inline QTensor molecular_field(const QTensor& q, const QTensor& lap_q, const PhysParams& p) {
    const Mat3 m = basis_expand(q);
    const Mat3 lap = basis_expand(lap_q);
    double tr_q2 = 0.0;
    for (int i = 0; i < 5; ++i) tr_q2 += q.q[i] * q.q[i];
    const Mat3 bterm = trace_free_project(mat3_mul(m, m));
    Mat3 h;
    for (int i = 0; i < 9; ++i)
        h[i] = lap[i] - p.a * m[i] + p.b * bterm[i] - p.c * m[i] * tr_q2;
    return basis_reduce(trace_free_project(h));
}

// Bulk free-energy density (K = 1):
//   ((c - c_star)/4) Tr(Q^2) - (b/3) Tr(Q^3) + (c/4) (Tr Q^2)^2.
// The elastic gradient part is contributed separately by the caller.
inline double free_energy_density(const QTensor& q, const PhysParams& p) {
    double t2 = 0.0;
    for (int i = 0; i < 5; ++i) t2 += q.q[i] * q.q[i];
    const Mat3 m = basis_expand(q);
    const Mat3 m2 = mat3_mul(m, m);
    const Mat3 m3 = mat3_mul(m2, m);
    const double t3 = mat3_trace(m3);
    return 0.25 * (p.c - p.c_star) * t2 - (p.b / 3.0) * t3 + 0.25 * p.c * t2 * t2;
}

// Eigenvalues of a symmetric traceless 3x3 matrix, ascending. Closed-form
// trigonometric roots of the characteristic cubic lambda^3 - J2 lambda - J3.
inline std::array<double, 3> traceless_eigenvalues(const Mat3& m) {
    double j2 = 0.0;
    for (double v : m) j2 += v * v;
    j2 *= 0.5; // (1/2) Tr(M^2)
    if (j2 < 1e-300) return {0.0, 0.0, 0.0};
    const double j3 = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                      m[1] * (m[3] * m[8] - m[5] * m[6]) +
                      m[2] * (m[3] * m[7] - m[4] * m[6]); // det
    double arg = 1.5 * std::sqrt(3.0) * j3 / (j2 * std::sqrt(j2));
    if (arg > 1.0) arg = 1.0;
    if (arg < -1.0) arg = -1.0;
    const double phi = std::acos(arg) / 3.0;
    const double amp = 2.0 * std::sqrt(j2 / 3.0);
    const double two_pi_3 = 2.0943951023931954923;
    std::array<double, 3> ev{amp * std::cos(phi - 2.0 * two_pi_3),
                             amp * std::cos(phi - two_pi_3),
                             amp * std::cos(phi)};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
}

enum class Phase { Isotropic, Uniaxial, Biaxial };

inline const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Isotropic: return "isotropic";
        case Phase::Uniaxial: return "uniaxial";
        default: return "biaxial";
    }
}

// Classify by the eigenvalue multiset: all below tol -> isotropic; exactly two
// agreeing within tol with both the common and the distinct value above tol
// -> uniaxial; anything else -> biaxial.
inline Phase classify_phase(const QTensor& q, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("classify_phase: tol must be > 0");
    const auto ev = traceless_eigenvalues(basis_expand(q));
    const bool iso = std::abs(ev[0]) < tol && std::abs(ev[1]) < tol && std::abs(ev[2]) < tol;
    if (iso) return Phase::Isotropic;
    const bool low_pair = std::abs(ev[1] - ev[0]) < tol;
    const bool high_pair = std::abs(ev[2] - ev[1]) < tol;
    if (low_pair != high_pair) {
        const double common = low_pair ? ev[0] : ev[2];
        const double distinct = low_pair ? ev[2] : ev[0];
        if (std::abs(common) > tol && std::abs(distinct) > tol) return Phase::Uniaxial;
    }
    return Phase::Biaxial;
}

// Default classification tolerance: 1e-8 scaled by the Frobenius norm,
// floored at 1.
inline double default_phase_tol(const QTensor& q) {
    const double n = q.norm();
    return 1e-8 * (n > 1.0 ? n : 1.0);
}

// Uniaxial tensor s (n x n - I/3) from a (not necessarily unit) axis.
inline QTensor uniaxial(double s, double nx, double ny, double nz) {
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (len == 0.0) throw std::invalid_argument("uniaxial: zero axis");
    nx /= len; ny /= len; nz /= len;
    Mat3 m{nx * nx, nx * ny, nx * nz,
           ny * nx, ny * ny, ny * nz,
           nz * nx, nz * ny, nz * nz};
    m[0] -= 1.0 / 3.0;
    m[4] -= 1.0 / 3.0;
    m[8] -= 1.0 / 3.0;
    return basis_reduce(mat3_scale(s, trace_free_project(m)));
}

} // namespace anlq
