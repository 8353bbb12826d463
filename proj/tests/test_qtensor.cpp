#include <catch2/catch.hpp>

#include "anlq/qtensor.hpp"

#include <cmath>
#include <random>

using namespace anlq;

namespace {

std::mt19937_64 rng(20260808ull);

QTensor random_qtensor(double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QTensor t;
    for (int i = 0; i < 5; ++i) t.q[i] = scale * u(rng);
    return t;
}

// Rodrigues rotation from a random axis/angle.
Mat3 random_rotation() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double ax = u(rng), ay = u(rng), az = u(rng);
    const double len = std::sqrt(ax * ax + ay * ay + az * az) + 1e-30;
    ax /= len; ay /= len; az /= len;
    const double th = 3.0 * u(rng);
    const double c = std::cos(th), s = std::sin(th), v = 1.0 - c;
    return Mat3{c + ax * ax * v,      ax * ay * v - az * s, ax * az * v + ay * s,
                ay * ax * v + az * s, c + ay * ay * v,      ay * az * v - ax * s,
                az * ax * v - ay * s, az * ay * v + ax * s, c + az * az * v};
}

Mat3 conjugate(const Mat3& r, const Mat3& m) {
    Mat3 rt;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rt[3 * i + j] = r[3 * j + i];
    return mat3_mul(r, mat3_mul(m, rt));
}

} // namespace

TEST_CASE("basis expansion is linear, symmetric, and exactly traceless") {
    CHECK(mat3_frob(basis_expand(QTensor{})) == 0.0);

    QTensor e1;
    e1.q[0] = 1.0;
    const Mat3 b0 = basis_expand(e1);
    CHECK(b0[0] == Approx(-1.0 / std::sqrt(6.0)));
    CHECK(b0[4] == Approx(-1.0 / std::sqrt(6.0)));
    CHECK(b0[8] == Approx(2.0 / std::sqrt(6.0)));
    CHECK(mat3_frob(b0) == Approx(1.0).epsilon(1e-14));

    for (int trial = 0; trial < 200; ++trial) {
        const QTensor t = random_qtensor(10.0);
        const Mat3 m = basis_expand(t);
        CHECK(mat3_trace(m) == 0.0); // closed trace, bitwise
        CHECK(m[1] == m[3]);
        CHECK(m[2] == m[6]);
        CHECK(m[5] == m[7]);
        CHECK(mat3_frob(m) == Approx(t.norm()).margin(1e-13));
    }
}

TEST_CASE("reduce(expand(q)) is the identity to machine precision") {
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const QTensor t = random_qtensor();
        const QTensor back = basis_reduce(basis_expand(t));
        for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(back.q[i] - t.q[i]));
    }
    CHECK(worst < 1e-14);
}

TEST_CASE("basis_reduce on known matrices and precondition violations") {
    CHECK(basis_reduce(mat3_zero()).norm() == 0.0);

    const Mat3 uz{-1.0 / 3.0, 0, 0, 0, -1.0 / 3.0, 0, 0, 0, 2.0 / 3.0};
    const QTensor t = basis_reduce(uz);
    CHECK(t.norm() == Approx(std::sqrt(6.0) / 3.0).epsilon(1e-14));

    Mat3 bad = uz;
    bad[0] += 0.1; // trace now 0.1
    CHECK_THROWS_AS(basis_reduce(bad), std::invalid_argument);

    Mat3 asym = mat3_zero();
    asym[1] = 1.0;
    asym[3] = -1.0;
    CHECK_THROWS_AS(basis_reduce(asym), std::invalid_argument);
}

TEST_CASE("trace_free_project") {
    const Mat3 ident{1, 0, 0, 0, 1, 0, 0, 0, 1};
    CHECK(mat3_frob(trace_free_project(ident)) == 0.0);

    const Mat3 ex{1, 0, 0, 0, 0, 0, 0, 0, 0};
    const Mat3 p = trace_free_project(ex);
    CHECK(p[0] == Approx(2.0 / 3.0));
    CHECK(p[4] == Approx(-1.0 / 3.0));
    CHECK(p[8] == Approx(-1.0 / 3.0));

    for (int trial = 0; trial < 50; ++trial) {
        const Mat3 m = basis_expand(random_qtensor());
        const Mat3 once = trace_free_project(m);
        for (int i = 0; i < 9; ++i) {
            CHECK(once[i] == Approx(m[i]).margin(1e-15));                      // fixes its range
            CHECK(trace_free_project(once)[i] == Approx(once[i]).margin(1e-15)); // idempotent
        }
    }
}

TEST_CASE("molecular field: constant uniaxial states against the scalar oracle") {
    const PhysParams p = PhysParams::reduced(1.0, 6.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    const QTensor zero;
    CHECK(molecular_field(zero, zero, p).norm() == 0.0);

    // For constant uniaxial Q with strength s: H = (-a + b s/3 - 2 c s^2/3) Q.
    // The stationary strength is the root of 2 c s^2 - b s + 3 a = 0.
    const double s_root = (p.b - std::sqrt(p.b * p.b - 24.0 * p.a * p.c)) / (4.0 * p.c);
    CHECK(s_root == Approx((6.0 - std::sqrt(12.0)) / 4.0).epsilon(1e-15));
    const QTensor q_star = uniaxial(s_root, 0, 0, 1);
    CHECK(molecular_field(q_star, zero, p).norm() < 1e-13 * q_star.norm());

    const QTensor q1 = uniaxial(1.0, 0, 0, 1);
    const QTensor h1 = molecular_field(q1, zero, p);
    for (int i = 0; i < 5; ++i) CHECK(h1.q[i] == Approx(q1.q[i] / 3.0).margin(1e-14));

    // random strengths against the same oracle
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double s = u(rng);
        if (std::abs(s) < 1e-3) continue;
        const QTensor q = uniaxial(s, 1, 2, -1);
        const double coef = -p.a + p.b * s / 3.0 - 2.0 * p.c * s * s / 3.0;
        const QTensor h = molecular_field(q, zero, p);
        for (int i = 0; i < 5; ++i) CHECK(h.q[i] == Approx(coef * q.q[i]).margin(1e-12));
    }
}

TEST_CASE("molecular field output stays traceless for random input") {
    const PhysParams p = PhysParams::reduced(0.7, 2.0, 3.0, 1.0, 0.5, 1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const QTensor q = random_qtensor();
        const QTensor lap = random_qtensor();
        const Mat3 h = basis_expand(molecular_field(q, lap, p));
        CHECK(std::abs(mat3_trace(h)) < 1e-13 * (1.0 + mat3_frob(h)));
    }
}

TEST_CASE("free energy density: uniaxial hand values") {
    const QTensor zero;
    PhysParams p = PhysParams::reduced(1.0, 6.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(free_energy_density(zero, p) == 0.0);

    const QTensor q1 = uniaxial(1.0, 0, 0, 1);
    // (c-c*) s^2/6 - 2 b s^3/27 + c s^4/9 with s = 1, c-c* = 2, b = 6, c = 1
    CHECK(free_energy_density(q1, p) == Approx(0.0).margin(1e-15));

    p = PhysParams::reduced(1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(free_energy_density(q1, p) == Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("free energy is invariant under orthogonal conjugation") {
    const PhysParams p = PhysParams::reduced(0.5, 2.0, 1.5, 1.0, 1.0, 1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const QTensor q = random_qtensor();
        const Mat3 rot = conjugate(random_rotation(), basis_expand(q));
        const QTensor qr = basis_reduce(trace_free_project(rot));
        CHECK(free_energy_density(qr, p) ==
              Approx(free_energy_density(q, p)).margin(1e-12).epsilon(1e-10));
    }
}

TEST_CASE("phase classification") {
    const double tol = 1e-8;
    CHECK(classify_phase(QTensor{}, tol) == Phase::Isotropic);

    const QTensor uni = basis_reduce(Mat3{-1.0 / 3, 0, 0, 0, -1.0 / 3, 0, 0, 0, 2.0 / 3});
    CHECK(classify_phase(uni, tol) == Phase::Uniaxial);

    const QTensor bi = basis_reduce(Mat3{0.01, 0, 0, 0, 0.02, 0, 0, 0, -0.03});
    CHECK(classify_phase(bi, tol) == Phase::Biaxial);

    CHECK_THROWS_AS(classify_phase(uni, 0.0), std::invalid_argument);
}

TEST_CASE("classification is invariant under orthogonal conjugation") {
    const double tol = 1e-8;
    const QTensor samples[3] = {
        QTensor{},
        uniaxial(0.8, 1, -1, 2),
        basis_reduce(Mat3{0.05, 0, 0, 0, 0.11, 0, 0, 0, -0.16}),
    };
    for (const QTensor& q : samples) {
        const Phase ref = classify_phase(q, tol);
        for (int trial = 0; trial < 30; ++trial) {
            const Mat3 rot = conjugate(random_rotation(), basis_expand(q));
            const QTensor qr = basis_reduce(trace_free_project(rot));
            CHECK(classify_phase(qr, tol) == ref);
        }
    }
}

TEST_CASE("eigenvalues of known matrices") {
    const auto ev = traceless_eigenvalues(Mat3{-1.0 / 3, 0, 0, 0, -1.0 / 3, 0, 0, 0, 2.0 / 3});
    CHECK(ev[0] == Approx(-1.0 / 3.0).epsilon(1e-13));
    CHECK(ev[1] == Approx(-1.0 / 3.0).epsilon(1e-13));
    CHECK(ev[2] == Approx(2.0 / 3.0).epsilon(1e-13));

    // eigenvalues sum to zero and match the invariants for random tensors
    for (int trial = 0; trial < 100; ++trial) {
        const QTensor q = random_qtensor();
        const Mat3 m = basis_expand(q);
        const auto e = traceless_eigenvalues(m);
        CHECK(e[0] + e[1] + e[2] == Approx(0.0).margin(1e-12));
        const double t2 = e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
        CHECK(t2 == Approx(q.norm() * q.norm()).epsilon(1e-10).margin(1e-12));
    }
}

TEST_CASE("parameter set construction and validation") {
    const PhysParams pr = PhysParams::reduced(1.0, 2.0, 3.0, 4.0, 0.5, 0.9, 1.1);
    CHECK(pr.c_star == Approx(1.0)); // c - 2a
    CHECK(pr.a == Approx(0.5 * (pr.c - pr.c_star)).epsilon(1e-15));

    const PhysParams pp = PhysParams::physical(3.0, 1.0, 0.25, 2.0, 0.5, 0.9, 1.1);
    CHECK(pp.a == Approx(1.0));
    CHECK(pp.kappa == Approx(0.25 * 9.0));

    CHECK_THROWS_AS(PhysParams::reduced(1, 1, 1, 1, 1, -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(PhysParams::reduced(1, 1, -1.0, 1, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(PhysParams::reduced(1, 1, 1, 1, 1, 1, 0.0), std::invalid_argument);

    const PhysParams neg_a = PhysParams::reduced(-0.5, 1, 1, 1, 1, 1, 1); // allowed for kernels
    CHECK_THROWS_AS(neg_a.require_positive_a("scenario"), std::invalid_argument);
}
