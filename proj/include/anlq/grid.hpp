// SPDX-License-Identifier: Apache-2.0
//
// Periodic pseudo-spectral machinery on a cubic box: FFTW-backed transforms,
// derivative multipliers, Leray projection, dealiasing and Parseval norms.
//
// Conventions (fixed; every test value depends on them):
//   * Fourier-series coefficients: f(x) = sum_m c_m exp(i xi_m . x) with
//     xi = (2 pi / L) m, m_i in [-n/2, n/2). forward() divides the raw DFT
//     by n^3, backward() is the plain inverse DFT.
//   * ||f||_L2^2 = L^3 sum_m |c_m|^2, and H^s sums ||d^alpha f||_L2^2 over
//     all multi-indices |alpha| <= s (each multi-index once).
//   * The Nyquist plane (m = -n/2) is zeroed in every derivative multiplier;
//     its sign is ambiguous for odd derivatives.
//   * Storage is the r2c half-spectrum, component-major.

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "anlq/qtensor.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace anlq {

inline constexpr double two_pi = 6.283185307179586476925286766559;

enum class DealiasRule { two_thirds, half, none };

inline const char* dealias_name(DealiasRule r) {
    switch (r) {
        case DealiasRule::two_thirds: return "two_thirds";
        case DealiasRule::half: return "half";
        default: return "none";
    }
}

struct GridSpec {
    int n = 32;                   // points per axis, even, >= 8
    double box_length = two_pi;   // L
    DealiasRule dealias = DealiasRule::two_thirds;

    void validate() const {
        if (n < 8 || n % 2 != 0) throw std::invalid_argument("GridSpec: n must be even and >= 8");
        if (!(box_length > 0.0)) throw std::invalid_argument("GridSpec: box length must be > 0");
    }
    std::size_t n_real() const { return std::size_t(n) * n * n; }
    std::size_t n_spec() const { return std::size_t(n) * n * (n / 2 + 1); }
    bool operator==(const GridSpec& o) const {
        return n == o.n && box_length == o.box_length && dealias == o.dealias;
    }
};

// FFTW-aligned allocator so new-array execution sees the planned alignment.
template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t count) {
        void* p = fftw_malloc(count * sizeof(T));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { fftw_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
};

struct RealField {
    int n = 0;
    int ncomp = 0;
    std::vector<double, FftwAllocator<double>> data;

    RealField() = default;
    RealField(const GridSpec& g, int comps) : n(g.n), ncomp(comps), data(g.n_real() * comps, 0.0) {}
    std::size_t comp_size() const { return std::size_t(n) * n * n; }
    double* comp(int c) { return data.data() + comp_size() * c; }
    const double* comp(int c) const { return data.data() + comp_size() * c; }
};

struct SpectralField {
    int n = 0;
    int ncomp = 0;
    std::vector<std::complex<double>, FftwAllocator<std::complex<double>>> data;

    SpectralField() = default;
    SpectralField(const GridSpec& g, int comps) : n(g.n), ncomp(comps), data(g.n_spec() * comps) {}
    std::size_t comp_size() const { return std::size_t(n) * n * (n / 2 + 1); }
    std::complex<double>* comp(int c) { return data.data() + comp_size() * c; }
    const std::complex<double>* comp(int c) const { return data.data() + comp_size() * c; }
    void set_zero() { std::fill(data.begin(), data.end(), std::complex<double>(0.0)); }
};

// Paired spectral tensor/velocity state advancing in time.
struct SpectralState {
    GridSpec spec;
    SpectralField qhat; // 5 components
    SpectralField uhat; // 3 components
    double t = 0.0;

    explicit SpectralState(const GridSpec& g) : spec(g), qhat(g, 5), uhat(g, 3) {}
};

class Grid {
  public:
    explicit Grid(const GridSpec& spec) : spec_(spec) {
        spec_.validate();
        const int n = spec_.n;
        nz_ = n / 2 + 1;
        freq_full_.resize(n);
        freq_deriv_.resize(n);
        for (int i = 0; i < n; ++i) {
            const int m = (i <= n / 2 - 1) ? i : i - n;
            freq_full_[i] = m;
            freq_deriv_[i] = (i == n / 2) ? 0 : m;
        }
        k_scale_ = two_pi / spec_.box_length;
        scratch_real_.assign(spec_.n_real(), 0.0);
        scratch_spec_.assign(spec_.n_spec(), std::complex<double>(0.0));
        plan_r2c_ = fftw_plan_dft_r2c_3d(n, n, n, scratch_real_.data(),
                                         reinterpret_cast<fftw_complex*>(scratch_spec_.data()),
                                         FFTW_ESTIMATE);
        plan_c2r_ = fftw_plan_dft_c2r_3d(n, n, n,
                                         reinterpret_cast<fftw_complex*>(scratch_spec_.data()),
                                         scratch_real_.data(), FFTW_ESTIMATE);
        if (!plan_r2c_ || !plan_c2r_) throw std::runtime_error("Grid: FFTW planning failed");
    }

    ~Grid() {
        if (plan_r2c_) fftw_destroy_plan(plan_r2c_);
        if (plan_c2r_) fftw_destroy_plan(plan_c2r_);
    }
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    const GridSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    double box_length() const { return spec_.box_length; }
    double dx() const { return spec_.box_length / spec_.n; }
    std::size_t n_spec() const { return spec_.n_spec(); }

    static int workers() { return workers_; }
    static void set_workers(int w) { workers_ = std::max(1, w); }

    // ---- transforms -------------------------------------------------------

    void forward(const RealField& in, SpectralField& out) const {
        check_real(in);
        if (out.n != spec_.n || out.ncomp != in.ncomp) out = SpectralField(spec_, in.ncomp);
        const double inv = 1.0 / double(spec_.n_real());
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1 && in.ncomp > 1)
        for (int c = 0; c < in.ncomp; ++c) {
            fftw_execute_dft_r2c(plan_r2c_, const_cast<double*>(in.comp(c)),
                                 reinterpret_cast<fftw_complex*>(out.comp(c)));
            std::complex<double>* oc = out.comp(c);
            for (std::size_t i = 0; i < out.comp_size(); ++i) oc[i] *= inv;
        }
    }

    SpectralField forward(const RealField& in) const {
        SpectralField out(spec_, in.ncomp);
        forward(in, out);
        return out;
    }

    // The c2r transform destroys its input, so each component is staged
    // through a persistent scratch buffer (disjoint slice per component).
    void backward(const SpectralField& in, RealField& out) const {
        check_spec(in);
        if (out.n != spec_.n || out.ncomp != in.ncomp) out = RealField(spec_, in.ncomp);
        const std::size_t cs = in.comp_size();
        if (c2r_scratch_.size() < cs * in.ncomp) c2r_scratch_.resize(cs * in.ncomp);
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1 && in.ncomp > 1)
        for (int c = 0; c < in.ncomp; ++c) {
            std::complex<double>* tmp = c2r_scratch_.data() + cs * c;
            std::copy(in.comp(c), in.comp(c) + cs, tmp);
            fftw_execute_dft_c2r(plan_c2r_, reinterpret_cast<fftw_complex*>(tmp), out.comp(c));
        }
    }

    RealField backward(const SpectralField& in) const {
        RealField out(spec_, in.ncomp);
        backward(in, out);
        return out;
    }

    // real-space gradient of every component without materializing the
    // spectral derivative: the i xi_d multiplier is applied while staging
    // into the c2r scratch. Output layout matches gradient(): d * ncomp + c.
    void backward_gradient(const SpectralField& in, RealField& out) const {
        check_spec(in);
        const int nc = in.ncomp;
        if (out.n != spec_.n || out.ncomp != 3 * nc) out = RealField(spec_, 3 * nc);
        const std::size_t cs = in.comp_size();
        if (c2r_scratch_.size() < cs * 3 * nc) c2r_scratch_.resize(cs * 3 * nc);
        const int n = spec_.n;
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1)
        for (int j = 0; j < 3 * nc; ++j) {
            const int d = j / nc, c = j % nc;
            std::complex<double>* tmp = c2r_scratch_.data() + cs * j;
            const std::complex<double>* src = in.comp(c);
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy) {
                    const std::size_t row = (std::size_t(ix) * n + iy) * nz_;
                    double xi_row = 0.0;
                    if (d == 0) xi_row = k_scale_ * freq_deriv_[ix];
                    if (d == 1) xi_row = k_scale_ * freq_deriv_[iy];
                    for (int iz = 0; iz < nz_; ++iz) {
                        const double xi =
                            (d == 2) ? k_scale_ * ((iz == n / 2) ? 0 : iz) : xi_row;
                        const std::complex<double> v = src[row + iz];
                        tmp[row + iz] = std::complex<double>(-xi * v.imag(), xi * v.real());
                    }
                }
            fftw_execute_dft_c2r(plan_c2r_, reinterpret_cast<fftw_complex*>(tmp), out.comp(j));
        }
    }

    // real-space Laplacian, same staging trick
    void backward_laplacian(const SpectralField& in, RealField& out) const {
        check_spec(in);
        if (out.n != spec_.n || out.ncomp != in.ncomp) out = RealField(spec_, in.ncomp);
        const std::size_t cs = in.comp_size();
        if (c2r_scratch_.size() < cs * in.ncomp) c2r_scratch_.resize(cs * in.ncomp);
        const int n = spec_.n;
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1)
        for (int c = 0; c < in.ncomp; ++c) {
            std::complex<double>* tmp = c2r_scratch_.data() + cs * c;
            const std::complex<double>* src = in.comp(c);
            for (int ix = 0; ix < n; ++ix)
                for (int iy = 0; iy < n; ++iy) {
                    const std::size_t row = (std::size_t(ix) * n + iy) * nz_;
                    const double kx = k_scale_ * freq_deriv_[ix];
                    const double ky = k_scale_ * freq_deriv_[iy];
                    const double k2row = kx * kx + ky * ky;
                    for (int iz = 0; iz < nz_; ++iz) {
                        const double kz = k_scale_ * ((iz == n / 2) ? 0 : iz);
                        tmp[row + iz] = -(k2row + kz * kz) * src[row + iz];
                    }
                }
            fftw_execute_dft_c2r(plan_c2r_, reinterpret_cast<fftw_complex*>(tmp), out.comp(c));
        }
    }

    // ---- mode geometry ----------------------------------------------------

    std::size_t index(int ix, int iy, int iz) const {
        return (std::size_t(ix) * spec_.n + iy) * nz_ + iz;
    }
    // integer frequency vector (Nyquist kept) for mode index
    std::array<int, 3> mode_m(int ix, int iy, int iz) const {
        return {freq_full_[ix], freq_full_[iy], iz};
    }
    // wavevector used by derivative multipliers (Nyquist zeroed)
    std::array<double, 3> mode_xi(int ix, int iy, int iz) const {
        return {k_scale_ * freq_deriv_[ix], k_scale_ * freq_deriv_[iy],
                k_scale_ * ((iz == spec_.n / 2) ? 0 : iz)};
    }
    // Hermitian multiplicity of a stored mode
    double mode_weight(int iz) const { return (iz == 0 || iz == spec_.n / 2) ? 1.0 : 2.0; }

    template <class F>
    void for_each_mode(F&& f) const {
        const int n = spec_.n;
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < nz_; ++iz) f(ix, iy, iz, index(ix, iy, iz));
    }

    // ---- Fourier multipliers ----------------------------------------------

    // multi-index derivative: multiply by (i xi)^alpha
    SpectralField derivative(const SpectralField& in, const std::array<int, 3>& alpha) const {
        check_spec(in);
        SpectralField out(spec_, in.ncomp);
        const int order = alpha[0] + alpha[1] + alpha[2];
        // i^order cycles 1, i, -1, -i
        const std::complex<double> phase = std::pow(std::complex<double>(0.0, 1.0), order);
        std::vector<double> mult(spec_.n_spec());
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = mode_xi(ix, iy, iz);
            double m = 1.0;
            for (int d = 0; d < 3; ++d)
                for (int p = 0; p < alpha[d]; ++p) m *= xi[d];
            mult[idx] = m;
        });
        apply_scalar_multiplier(in, out, mult, phase);
        return out;
    }

    SpectralField partial(const SpectralField& in, int axis) const {
        std::array<int, 3> a{0, 0, 0};
        a[axis] = 1;
        return derivative(in, a);
    }

    SpectralField laplacian(const SpectralField& in) const {
        SpectralField out;
        laplacian_into(in, out);
        return out;
    }

    // gradient of every component: out has 3*ncomp components, derivative
    // axis major (axis d of component c at index d*ncomp + c).
    void gradient_into(const SpectralField& in, SpectralField& out) const {
        check_spec(in);
        if (out.n != spec_.n || out.ncomp != 3 * in.ncomp) out = SpectralField(spec_, 3 * in.ncomp);
        const int nc = in.ncomp;
        const int n = spec_.n;
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1)
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < nz_; ++iz) {
                    const std::size_t idx = index(ix, iy, iz);
                    const auto xi = mode_xi(ix, iy, iz);
                    for (int c = 0; c < nc; ++c) {
                        const std::complex<double> v = in.comp(c)[idx];
                        const std::complex<double> iv(-v.imag(), v.real()); // i * v
                        for (int d = 0; d < 3; ++d) out.comp(d * nc + c)[idx] = xi[d] * iv;
                    }
                }
    }

    SpectralField gradient(const SpectralField& in) const {
        SpectralField out;
        gradient_into(in, out);
        return out;
    }

    void laplacian_into(const SpectralField& in, SpectralField& out) const {
        check_spec(in);
        if (out.n != spec_.n || out.ncomp != in.ncomp) out = SpectralField(spec_, in.ncomp);
        const int n = spec_.n;
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1)
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < nz_; ++iz) {
                    const std::size_t idx = index(ix, iy, iz);
                    const auto xi = mode_xi(ix, iy, iz);
                    const double mk2 = -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
                    for (int c = 0; c < in.ncomp; ++c) out.comp(c)[idx] = mk2 * in.comp(c)[idx];
                }
    }

    // divergence of a 3-component vector field
    SpectralField divergence(const SpectralField& in) const {
        check_spec(in);
        if (in.ncomp != 3) throw std::invalid_argument("divergence: expects 3 components");
        SpectralField out(spec_, 1);
        const std::complex<double> iunit(0.0, 1.0);
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = mode_xi(ix, iy, iz);
            out.comp(0)[idx] = iunit * (xi[0] * in.comp(0)[idx] + xi[1] * in.comp(1)[idx] +
                                        xi[2] * in.comp(2)[idx]);
        });
        return out;
    }

    // Leray projection u -> (I - xi xi^T/|xi|^2) u per mode; the mean mode
    // passes through unchanged.
    void leray_project(SpectralField& u) const {
        check_spec(u);
        if (u.ncomp != 3) throw std::invalid_argument("leray_project: expects 3 components");
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = mode_xi(ix, iy, iz);
            const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if (k2 == 0.0) return;
            const std::complex<double> dot =
                (xi[0] * u.comp(0)[idx] + xi[1] * u.comp(1)[idx] + xi[2] * u.comp(2)[idx]) / k2;
            u.comp(0)[idx] -= xi[0] * dot;
            u.comp(1)[idx] -= xi[1] * dot;
            u.comp(2)[idx] -= xi[2] * dot;
        });
    }

    // sigma = P div Q in Fourier space: sigma_l = i (delta_lj - xi_l xi_j/|xi|^2) Q_jk xi_k.
    SpectralField sigma_from_q(const SpectralField& qhat) const {
        check_spec(qhat);
        if (qhat.ncomp != 5) throw std::invalid_argument("sigma_from_q: expects 5 components");
        SpectralField sig(spec_, 3);
        const std::complex<double> iunit(0.0, 1.0);
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = mode_xi(ix, iy, iz);
            const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if (k2 == 0.0) {
                sig.comp(0)[idx] = sig.comp(1)[idx] = sig.comp(2)[idx] = 0.0;
                return;
            }
            std::array<std::complex<double>, 5> q;
            for (int c = 0; c < 5; ++c) q[c] = qhat.comp(c)[idx];
            std::array<std::complex<double>, 3> v = mode_q_times_xi(q, xi);
            const std::complex<double> dot = (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / k2;
            for (int l = 0; l < 3; ++l) sig.comp(l)[idx] = iunit * (v[l] - xi[l] * dot);
        });
        return sig;
    }

    // expanded tensor contraction (Q xi)_j for one mode, in the qtensor basis
    static std::array<std::complex<double>, 3> mode_q_times_xi(
        const std::array<std::complex<double>, 5>& q, const std::array<double, 3>& xi) {
        using detail::inv_sqrt2;
        using detail::inv_sqrt6;
        const std::complex<double> d0 = -q[0] * inv_sqrt6 + q[1] * inv_sqrt2;
        const std::complex<double> d1 = -q[0] * inv_sqrt6 - q[1] * inv_sqrt2;
        const std::complex<double> d2 = -(d0 + d1);
        const std::complex<double> oxy = q[2] * inv_sqrt2;
        const std::complex<double> oxz = q[3] * inv_sqrt2;
        const std::complex<double> oyz = q[4] * inv_sqrt2;
        return {d0 * xi[0] + oxy * xi[1] + oxz * xi[2],
                oxy * xi[0] + d1 * xi[1] + oyz * xi[2],
                oxz * xi[0] + oyz * xi[1] + d2 * xi[2]};
    }

    int dealias_limit() const {
        switch (spec_.dealias) {
            case DealiasRule::two_thirds: return spec_.n / 3;
            case DealiasRule::half: return spec_.n / 4;
            default: return spec_.n; // keep everything
        }
    }

    void dealias(SpectralField& f) const {
        check_spec(f);
        if (spec_.dealias == DealiasRule::none) return;
        const int lim = dealias_limit();
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto m = mode_m(ix, iy, iz);
            if (std::abs(m[0]) > lim || std::abs(m[1]) > lim || std::abs(m[2]) > lim)
                for (int c = 0; c < f.ncomp; ++c) f.comp(c)[idx] = 0.0;
        });
    }

    // ---- norms (Parseval) --------------------------------------------------

    double l2_norm_sq(const SpectralField& f) const {
        check_spec(f);
        const double vol = std::pow(spec_.box_length, 3);
        double total = 0.0;
        for (int c = 0; c < f.ncomp; ++c) {
            double s = 0.0;
            const std::complex<double>* fc = f.comp(c);
            for_each_mode([&](int, int, int iz, std::size_t idx) {
                s += mode_weight(iz) * std::norm(fc[idx]);
            });
            total += s;
        }
        return vol * total;
    }
    double l2_norm(const SpectralField& f) const { return std::sqrt(l2_norm_sq(f)); }

    // H^s weight table: sum over multi-indices |alpha| <= s (or = s for the
    // homogeneous version) of xi^(2 alpha).
    const std::vector<double>& sobolev_weights(int s, bool homogeneous) const {
        if (s < 0) throw std::invalid_argument("sobolev_weights: s must be >= 0");
        auto key = std::make_pair(s, homogeneous);
        auto it = weight_cache_.find(key);
        if (it != weight_cache_.end()) return it->second;
        std::vector<double> w(spec_.n_spec());
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = mode_xi(ix, iy, iz);
            const double x = xi[0] * xi[0], y = xi[1] * xi[1], z = xi[2] * xi[2];
            // complete homogeneous symmetric sums h_j(x,y,z), j <= s
            std::vector<double> h1(s + 1), h2(s + 1), h3(s + 1);
            h1[0] = 1.0;
            for (int j = 1; j <= s; ++j) h1[j] = h1[j - 1] * x;
            for (int j = 0; j <= s; ++j) {
                double acc = 0.0, zp = 1.0;
                for (int aa = 0; aa <= j; ++aa) {
                    acc += zp * h1[j - aa];
                    zp *= y;
                }
                h2[j] = acc;
            }
            for (int j = 0; j <= s; ++j) {
                double acc = 0.0, zp = 1.0;
                for (int aa = 0; aa <= j; ++aa) {
                    acc += zp * h2[j - aa];
                    zp *= z;
                }
                h3[j] = acc;
            }
            double total = 0.0;
            if (homogeneous)
                total = h3[s];
            else
                for (int j = 0; j <= s; ++j) total += h3[j];
            w[idx] = total;
        });
        auto [ins, ok] = weight_cache_.emplace(key, std::move(w));
        (void)ok;
        return ins->second;
    }

    double sobolev_norm_sq(const SpectralField& f, int s, bool homogeneous = false) const {
        check_spec(f);
        const auto& w = sobolev_weights(s, homogeneous);
        const double vol = std::pow(spec_.box_length, 3);
        double total = 0.0;
        for (int c = 0; c < f.ncomp; ++c) {
            double sc = 0.0;
            const std::complex<double>* fc = f.comp(c);
            for_each_mode([&](int, int, int iz, std::size_t idx) {
                sc += mode_weight(iz) * w[idx] * std::norm(fc[idx]);
            });
            total += sc;
        }
        return vol * total;
    }
    double sobolev_norm(const SpectralField& f, int s, bool homogeneous = false) const {
        return std::sqrt(sobolev_norm_sq(f, s, homogeneous));
    }

    // radial d^k norm: |xi|^(2k) multiplier (the Fourier-splitting usage)
    double dk_norm_sq(const SpectralField& f, int k) const {
        check_spec(f);
        const double vol = std::pow(spec_.box_length, 3);
        double total = 0.0;
        for (int c = 0; c < f.ncomp; ++c) {
            double sc = 0.0;
            const std::complex<double>* fc = f.comp(c);
            for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
                const auto xi = mode_xi(ix, iy, iz);
                const double k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                double m = 1.0;
                for (int p = 0; p < k; ++p) m *= k2;
                sc += mode_weight(iz) * m * std::norm(fc[idx]);
            });
            total += sc;
        }
        return vol * total;
    }
    double dk_norm(const SpectralField& f, int k) const { return std::sqrt(dk_norm_sq(f, k)); }

    // initial-energy pairing ||q||_{H^{s+1}}^2 + ||u||_{H^s}^2
    double hs_pair_norm_sq(const SpectralState& st, int s) const {
        return sobolev_norm_sq(st.qhat, s + 1) + sobolev_norm_sq(st.uhat, s);
    }

    double max_abs(const RealField& f) const {
        double m = 0.0;
        for (double v : f.data) m = std::max(m, std::abs(v));
        return m;
    }

    // largest per-mode |xi . u|/|u| over modes with nonzero u (solenoidality)
    double divergence_residual(const SpectralField& u) const {
        check_spec(u);
        if (u.ncomp != 3) throw std::invalid_argument("divergence_residual: expects 3 components");
        double worst = 0.0;
        for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
            const auto xi = mode_xi(ix, iy, iz);
            const std::complex<double> u0 = u.comp(0)[idx], u1 = u.comp(1)[idx], u2 = u.comp(2)[idx];
            const double mag = std::sqrt(std::norm(u0) + std::norm(u1) + std::norm(u2));
            if (mag < 1e-300) return;
            const std::complex<double> dot = xi[0] * u0 + xi[1] * u1 + xi[2] * u2;
            worst = std::max(worst, std::abs(dot) / mag);
        });
        return worst;
    }

  private:
    void check_real(const RealField& f) const {
        if (f.n != spec_.n) throw std::invalid_argument("grid/field dimension mismatch");
    }
    void check_spec(const SpectralField& f) const {
        if (f.n != spec_.n) throw std::invalid_argument("grid/field dimension mismatch");
    }

    void apply_scalar_multiplier(const SpectralField& in, SpectralField& out,
                                 const std::vector<double>& mult,
                                 std::complex<double> phase) const {
#pragma omp parallel for schedule(static) num_threads(workers_) if (workers_ > 1 && in.ncomp > 1)
        for (int c = 0; c < in.ncomp; ++c) {
            const std::complex<double>* ic = in.comp(c);
            std::complex<double>* oc = out.comp(c);
            for (std::size_t i = 0; i < in.comp_size(); ++i) oc[i] = phase * mult[i] * ic[i];
        }
    }

    GridSpec spec_;
    int nz_ = 0;
    double k_scale_ = 1.0;
    std::vector<int> freq_full_, freq_deriv_;
    mutable std::vector<double, FftwAllocator<double>> scratch_real_;
    mutable std::vector<std::complex<double>, FftwAllocator<std::complex<double>>> scratch_spec_;
    mutable std::vector<std::complex<double>, FftwAllocator<std::complex<double>>> c2r_scratch_;
    fftw_plan plan_r2c_ = nullptr;
    fftw_plan plan_c2r_ = nullptr;
    mutable std::map<std::pair<int, bool>, std::vector<double>> weight_cache_;
    inline static int workers_ = 1;
};

// ---------------------------------------------------------------------------
// Seeded field constructors (the simulation initial-data families).
// ---------------------------------------------------------------------------

// Deterministic standard normals (Box-Muller over mt19937_64).
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}
    double operator()() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 1e-300);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        have_ = true;
        return r * std::cos(two_pi * u2);
    }

  private:
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_ = false;
};

// Band-limited random field: white noise filtered to |m_i| <= max_mode.
inline SpectralField random_band_limited(const Grid& grid, int ncomp, int max_mode,
                                         std::uint64_t seed, double amplitude = 1.0) {
    NormalSampler normal(seed);
    RealField noise(grid.spec(), ncomp);
    for (double& v : noise.data) v = normal();
    SpectralField f = grid.forward(noise);
    grid.for_each_mode([&](int ix, int iy, int iz, std::size_t idx) {
        const auto m = grid.mode_m(ix, iy, iz);
        const bool keep = std::abs(m[0]) <= max_mode && std::abs(m[1]) <= max_mode &&
                          std::abs(m[2]) <= max_mode;
        if (!keep)
            for (int c = 0; c < ncomp; ++c) f.comp(c)[idx] = 0.0;
    });
    double nrm = grid.l2_norm(f);
    if (nrm > 0.0) {
        const double s = amplitude / nrm;
        for (auto& v : f.data) v *= s;
    }
    return f;
}

// Gaussian bump centred in the box, one factor per component direction.
inline RealField gaussian_bump(const Grid& grid, int ncomp, double amplitude, double sigma,
                               const std::vector<std::array<double, 3>>& centers) {
    RealField f(grid.spec(), ncomp);
    const int n = grid.n();
    const double L = grid.box_length();
    for (int c = 0; c < ncomp; ++c) {
        const auto ctr = centers[c % centers.size()];
        double* fc = f.comp(c);
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy)
                for (int iz = 0; iz < n; ++iz) {
                    double r2 = 0.0;
                    const double xyz[3] = {ix * L / n, iy * L / n, iz * L / n};
                    for (int d = 0; d < 3; ++d) {
                        double dd = xyz[d] - ctr[d] * L;
                        // nearest periodic image
                        if (dd > 0.5 * L) dd -= L;
                        if (dd < -0.5 * L) dd += L;
                        r2 += dd * dd;
                    }
                    fc[(std::size_t(ix) * n + iy) * n + iz] =
                        amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
                }
    }
    return f;
}

} // namespace anlq
