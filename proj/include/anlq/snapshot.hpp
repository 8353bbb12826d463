// SPDX-License-Identifier: Apache-2.0
//
// Binary state snapshots. Layout (little-endian):
//   "ANLQ" | u16 version | u16 reserved | u32 n | u32 dealias | f64 L |
//   f64[8] phys (a,b,c,c_star,kappa,lambda,mu,gamma) | f64 t | u64 payload_bytes |
//   payload: qhat comps 0..4 then uhat comps 0..2, each mode as re,im f64 |
//   u64 FNV-1a checksum over everything before it.
// load(save(state)) is bitwise-identical.

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anlq/grid.hpp"
#include "anlq/qtensor.hpp"

namespace anlq {

struct SnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr std::uint16_t snapshot_version = 1;

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t len,
                             std::uint64_t h = 1469598103934665603ull) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <class T>
void put(std::vector<unsigned char>& buf, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

template <class T>
T take(const std::vector<unsigned char>& buf, std::size_t& off) {
    if (off + sizeof(T) > buf.size()) throw SnapshotError("snapshot: truncated file");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace detail

inline void save_snapshot(const SpectralState& st, const PhysParams& p, const std::string& path) {
    std::vector<unsigned char> buf;
    buf.reserve(128 + 16 * (st.qhat.data.size() + st.uhat.data.size()));
    buf.insert(buf.end(), {'A', 'N', 'L', 'Q'});
    detail::put<std::uint16_t>(buf, detail::snapshot_version);
    detail::put<std::uint16_t>(buf, 0);
    detail::put<std::uint32_t>(buf, std::uint32_t(st.spec.n));
    detail::put<std::uint32_t>(buf, std::uint32_t(st.spec.dealias));
    detail::put<double>(buf, st.spec.box_length);
    for (double v : {p.a, p.b, p.c, p.c_star, p.kappa, p.lambda, p.mu, p.gamma})
        detail::put<double>(buf, v);
    detail::put<double>(buf, st.t);
    const std::uint64_t payload =
        16ull * (st.qhat.data.size() + st.uhat.data.size());
    detail::put<std::uint64_t>(buf, payload);
    auto put_field = [&](const SpectralField& f) {
        for (const auto& z : f.data) {
            detail::put<double>(buf, z.real());
            detail::put<double>(buf, z.imag());
        }
    };
    put_field(st.qhat);
    put_field(st.uhat);
    const std::uint64_t sum = detail::fnv1a64(buf.data(), buf.size());
    detail::put<std::uint64_t>(buf, sum);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("snapshot: cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw SnapshotError("snapshot: short write to '" + path + "'");
}

inline std::pair<SpectralState, PhysParams> load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("snapshot: cannot open '" + path + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 112) throw SnapshotError("snapshot: truncated file");

    std::uint64_t tail;
    std::memcpy(&tail, buf.data() + buf.size() - 8, 8);
    if (detail::fnv1a64(buf.data(), buf.size() - 8) != tail)
        throw SnapshotError("snapshot: checksum mismatch (corrupt or truncated file)");

    std::size_t off = 0;
    if (!(buf[0] == 'A' && buf[1] == 'N' && buf[2] == 'L' && buf[3] == 'Q'))
        throw SnapshotError("snapshot: bad magic");
    off = 4;
    const auto version = detail::take<std::uint16_t>(buf, off);
    if (version != detail::snapshot_version)
        throw SnapshotError("snapshot: unsupported format version " + std::to_string(version) +
                            " (expected " + std::to_string(detail::snapshot_version) + ")");
    (void)detail::take<std::uint16_t>(buf, off);
    GridSpec spec;
    spec.n = int(detail::take<std::uint32_t>(buf, off));
    const auto rule = detail::take<std::uint32_t>(buf, off);
    if (rule > 2) throw SnapshotError("snapshot: bad dealias rule");
    spec.dealias = DealiasRule(rule);
    spec.box_length = detail::take<double>(buf, off);
    spec.validate();

    PhysParams p;
    p.a = detail::take<double>(buf, off);
    p.b = detail::take<double>(buf, off);
    p.c = detail::take<double>(buf, off);
    p.c_star = detail::take<double>(buf, off);
    p.kappa = detail::take<double>(buf, off);
    p.lambda = detail::take<double>(buf, off);
    p.mu = detail::take<double>(buf, off);
    p.gamma = detail::take<double>(buf, off);

    SpectralState st(spec);
    st.t = detail::take<double>(buf, off);
    const auto payload = detail::take<std::uint64_t>(buf, off);
    const std::uint64_t expect = 16ull * (st.qhat.data.size() + st.uhat.data.size());
    if (payload != expect) throw SnapshotError("snapshot: payload size mismatch");
    if (off + payload + 8 != buf.size()) throw SnapshotError("snapshot: truncated file");
    auto take_field = [&](SpectralField& f) {
        for (auto& z : f.data) {
            const double re = detail::take<double>(buf, off);
            const double im = detail::take<double>(buf, off);
            z = std::complex<double>(re, im);
        }
    };
    take_field(st.qhat);
    take_field(st.uhat);
    return {std::move(st), p};
}

} // namespace anlq
