#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <jfan/streams.hpp>

using namespace jfan;

namespace {

double rel_diff(const ClassValue& got, const ClassValue& want) {
    return l2_norm(sub(got, want)) / std::max(1e-300, l2_norm(want));
}

// relative difference of two scaled coefficients with exponent alignment
double rel_scaled(const ScaledClass& a, const ScaledClass& b) {
    const ClassValue av = scal(std::ldexp(1.0, int(a.exp2 - b.exp2)), a.mantissa);
    return rel_diff(av, b.mantissa);
}

}  // namespace

TEST_CASE("every generator starts at the unit coefficient") {
    const RingPtr xr = x3_classical_ring();
    const CoeffStream streams[] = {
        projective_stream(1, 5),
        projective_stream(2, 5),
        projective_stream(3, 5),
        product_stream(projective_stream(1, 10), projective_stream(1, 10), 5),
        hypersurface_stream(projective_stream(3, 8), 2, 5),
        hypersurface_stream(projective_stream(3, 8), 3, 5),
        toric_stream(x3_toric_data(xr), xr, 5)};
    for (const CoeffStream& s : streams) {
        REQUIRE(rel_diff(s.coeffs[0].value(), unit_class(s.ring)) <= 1e-14);
        REQUIRE(s.M() == 5);
    }
}

TEST_CASE("projective degree-1 coefficient is the inverse binomial class") {
    const CoeffStream s = projective_stream(3, 3);
    const ClassValue want(s.ring, {1, -4, 10, -20});
    REQUIRE(rel_diff(s.coeffs[1].value(), want) <= 1e-13);
    REQUIRE(s.r == 4);
    REQUIRE(s.beta.c[0] == cplx(1.5, 0.0));
    REQUIRE(s.beta.c[1] == cplx(4.0, 0.0));
}

TEST_CASE("P1 coefficients carry inverse square factorials") {
    const CoeffStream s = projective_stream(1, 4);
    REQUIRE(std::abs(s.coeffs[2].value().c[0] - 0.25) <= 1e-14);
    REQUIRE(std::abs(s.coeffs[3].value().c[0] - 1.0 / 36.0) <= 1e-15);
}

TEST_CASE("P1 x P1 stream index bookkeeping") {
    const CoeffStream s =
        product_stream(projective_stream(1, 20), projective_stream(1, 20), 10);
    REQUIRE(s.r == 2);
    REQUIRE(s.ring->n() == 4);
    // three tensor pieces contribute at total degree 4
    REQUIRE(std::abs(s.coeffs[2].value().c[0] - 1.5) <= 1e-13);
    REQUIRE(s.beta.c[0] == cplx(1.0, 0.0));
}

TEST_CASE("product stream equals the brute-force tensor convolution") {
    struct Pair {
        CoeffStream sx, sy;
        int M;
    };
    const Pair pairs[] = {
        {projective_stream(1, 45), projective_stream(1, 45), 40},
        {projective_stream(1, 30), projective_stream(2, 20), 28},
        {projective_stream(2, 30), projective_stream(3, 25), 24}};
    for (const Pair& p : pairs) {
        const CoeffStream s = product_stream(p.sx, p.sy, p.M);
        const int nA = p.sx.ring->n(), nB = p.sy.ring->n();
        for (int m = 0; m <= p.M; ++m) {
            ClassValue want(s.ring);
            const long n_out = long(s.r) * m;
            for (long mx = 0; mx * p.sx.r <= n_out; ++mx) {
                const long rem = n_out - mx * p.sx.r;
                if (rem % p.sy.r != 0 || rem / p.sy.r > p.sy.M()) continue;
                const ClassValue ax =
                    embed_in_product(p.sx.coeffs[mx].value(), true, s.ring, nA, nB);
                const ClassValue ay = embed_in_product(
                    p.sy.coeffs[rem / p.sy.r].value(), false, s.ring, nA, nB);
                want = add(want, mul(ax, ay));
            }
            INFO("pair " << p.sx.provenance << " * " << p.sy.provenance << " m=" << m);
            REQUIRE(rel_diff(s.coeffs[m].value(), want) <= 1e-12);
        }
    }
}

TEST_CASE("product stream demands inputs deep enough for its truncation") {
    const CoeffStream a = projective_stream(1, 10);
    const CoeffStream b = projective_stream(1, 50);
    REQUIRE_THROWS_AS(product_stream(a, b, 30), std::length_error);
}

TEST_CASE("quadric pushforward carries no exponential correction") {
    const CoeffStream s = hypersurface_stream(projective_stream(3, 10), 2, 8);
    REQUIRE(s.r == 2);
    const ClassValue want(s.ring, {2, -2, 0});
    REQUIRE(rel_diff(s.coeffs[1].value(), want) <= 1e-13);
}

TEST_CASE("cubic pushforward cancels the degree-1 H0 component") {
    const CoeffStream s = hypersurface_stream(projective_stream(3, 10), 3, 8);
    REQUIRE(s.r == 1);
    const ClassValue j1 = s.coeffs[1].value();
    REQUIRE(std::abs(j1.c[0]) <= 1e-12 * l2_norm(j1));
    REQUIRE(s.beta.c[0] == cplx(1.0, 0.0));
    REQUIRE(s.beta.c[1] == cplx(1.0, 0.0));
}

TEST_CASE("toric generator reproduces the projective streams") {
    for (int N : {2, 3}) {
        const RingPtr ring = projective_ring(N);
        const CoeffStream toric = toric_stream(pn_toric_data(ring), ring, 50);
        const CoeffStream direct = projective_stream(N, 50);
        REQUIRE(toric.r == direct.r);
        REQUIRE(rel_diff(toric.beta, direct.beta) <= 1e-14);
        for (int m = 0; m <= 50; ++m) {
            INFO("N=" << N << " m=" << m);
            REQUIRE(rel_scaled(toric.coeffs[m], direct.coeffs[m]) <= 1e-12);
        }
    }
}

TEST_CASE("X3 low coefficients match the hand-computed lattice sums") {
    const RingPtr xr = x3_classical_ring();
    const CoeffStream s = toric_stream(x3_toric_data(xr), xr, 4);
    REQUIRE(s.r == 1);
    REQUIRE(s.beta.c[0] == cplx(2.0, 0.0));

    const ClassValue j1 = s.coeffs[1].value();
    const ClassValue want1(xr, {0, 2, -6, 1, -3, -7, 21, 14});
    REQUIRE(rel_diff(j1, want1) <= 1e-12);
    REQUIRE(std::abs(j1.c[0]) <= 1e-14 * l2_norm(j1));

    const ClassValue j2 = s.coeffs[2].value();
    const ClassValue want2(xr,
                           {1, -9.5, 25.5, -6.375, 28.125, 9.9375, -56.8125, -43.5});
    REQUIRE(rel_diff(j2, want2) <= 1e-12);
}

TEST_CASE("derivative stream multiplies by the exponent class") {
    const CoeffStream s = projective_stream(3, 20);
    const CoeffStream ds = derivative_stream(s);
    REQUIRE(ds.r == s.r);
    REQUIRE(ds.beta.c[0] == s.beta.c[0] - 1.0);
    for (int m = 0; m <= 20; ++m) {
        ClassValue w = s.beta;
        w.c[0] += double(s.r) * m;
        const ClassValue want = mul(s.coeffs[m].value(), w);
        REQUIRE(rel_diff(ds.coeffs[m].value(), want) <= 1e-12);
    }
}

TEST_CASE("derivative of a degree-zero constant stream vanishes") {
    CoeffStream s;
    s.ring = projective_ring(1);
    s.r = 1;
    s.beta = ClassValue(s.ring);
    s.coeffs.emplace_back(unit_class(s.ring));
    s.coeffs.emplace_back(ClassValue(s.ring), 0);
    const CoeffStream ds = derivative_stream(s);
    for (const ScaledClass& c : ds.coeffs) REQUIRE(max_abs_coord(c.mantissa) == 0.0);
}

TEST_CASE("generators validate their arguments") {
    REQUIRE_THROWS_AS(projective_stream(0, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(projective_stream(2, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(hypersurface_stream(projective_stream(3, 10), 4, 8),
                      std::invalid_argument);
}
