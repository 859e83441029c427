#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <jfan/evaluator.hpp>
#include <jfan/gamma_calculus.hpp>

using namespace jfan;

namespace {

double rel_diff(const ClassValue& got, const ClassValue& want) {
    return l2_norm(sub(got, want)) / std::max(1e-300, l2_norm(want));
}

const CoeffStream& p1_200() {
    static const CoeffStream s = projective_stream(1, 200);
    return s;
}
const CoeffStream& p3_600() {
    static const CoeffStream s = projective_stream(3, 600);
    return s;
}

AmlScaling fit1(const CoeffStream& s, int m0, int m1) {
    FitOptions opt;
    opt.component = 0;
    opt.aitken_passes = 1;
    return fit_scaling(s, m0, m1, opt);
}

}  // namespace

TEST_CASE("P1 series value at t=1 is the Bessel sum") {
    const ScaledClass v = eval_series(p1_200(), 1.0, 0.0, 60, 2.0);
    const cplx h0 = v.value().c[0];
    // sum_m 1/(m!)^2 = I_0(2); the internal damping must cancel out of the
    // returned value
    REQUIRE(std::abs(h0 - 2.2795853023360673) <= 1e-12);
}

TEST_CASE("series value tends to the pure power class as t -> 0") {
    const CoeffStream s = projective_stream(3, 30);
    const double t = 1e-4;
    const ScaledClass v = eval_series(s, t, 0.0, 30, 4.0);
    const ClassValue tb = power_t(s.beta, cplx(t, 0.0));
    REQUIRE(rel_diff(v.value(), tb) <= 1e-10);
}

TEST_CASE("series evaluation is truncation stable") {
    const ScaledClass a = eval_series(p3_600(), 20.0, 0.0, 300, 4.0);
    const ScaledClass b = eval_series(p3_600(), 20.0, 0.0, 600, 4.0);
    REQUIRE(a.exp2 == b.exp2);
    REQUIRE(rel_diff(a.mantissa, b.mantissa) <= 1e-10);
}

TEST_CASE("conjugate rays give conjugate values for real streams") {
    const ScaledClass a = eval_series(p3_600(), 10.0, 0.4, 200, 4.0);
    const ScaledClass b = eval_series(p3_600(), 10.0, -0.4, 200, 4.0);
    ClassValue conj_b = b.value();
    for (cplx& z : conj_b.c) z = std::conj(z);
    REQUIRE(rel_diff(a.value(), conj_b) <= 1e-12);
}

TEST_CASE("series evaluation demands a truncation margin") {
    const CoeffStream s = projective_stream(1, 50);
    REQUIRE_THROWS_AS(eval_series(s, 60.0, 0.0, 50, 2.0), std::length_error);
    REQUIRE_THROWS_AS(eval_series(p1_200(), 0.0, 0.0), std::domain_error);
    REQUIRE_THROWS_AS(eval_series(p1_200(), 1.0, 0.0, 500), std::invalid_argument);
}

TEST_CASE("aligned P3 ray approaches the scaled limit") {
    const AmlScaling sc = fit1(p3_600(), 300, 600);
    const ContinuousReport rep = continuous_check(p3_600(), sc, {0.0, M_PI / 4.0}, {50.0});
    REQUIRE(rep.rows.size() == 2);
    REQUIRE(rep.rows[0].aligned);
    REQUIRE(rep.rows[0].deviation <= 5e-2);
    REQUIRE_FALSE(rep.rows[1].aligned);
    REQUIRE(rep.rows[1].decay_ratio <= 1e-2);
}

TEST_CASE("P1 stays aligned along the negative axis") {
    const AmlScaling sc = fit1(p1_200(), 100, 200);
    const ContinuousReport rep = continuous_check(p1_200(), sc, {M_PI}, {30.0, 60.0});
    REQUIRE(rep.rows[0].aligned);
    REQUIRE(rep.rows[1].aligned);
    REQUIRE(rep.rows[0].deviation <= 5e-2);
    REQUIRE(rep.rows[1].deviation < rep.rows[0].deviation);
}

TEST_CASE("ml_eval pins the elementary special cases") {
    REQUIRE(std::abs(ml_eval(1.0, cplx(1.0, 0.0), cplx(1.0, 0.0)) - std::exp(1.0)) <=
            1e-12 * std::exp(1.0));
    REQUIRE(std::abs(ml_eval(2.0, cplx(1.0, 0.0), cplx(1.0, 0.0)) - std::cosh(1.0)) <=
            1e-12);
    // alpha e^{-t} t^{beta} E_{alpha,1+beta}(t^alpha) -> 1
    const double t = 40.0, beta = 0.5, alpha = 3.0;
    const cplx E = ml_eval(alpha, cplx(1.0 + beta, 0.0), std::pow(t, alpha));
    const double v = (alpha * std::exp(-t) * std::pow(t, beta) * E).real();
    REQUIRE(std::abs(v - 1.0) <= 1e-2);
}

TEST_CASE("series evaluator agrees with ml_eval on a synthetic exact stream") {
    const RingPtr ring = projective_ring(1);
    ClassValue beta(ring, {cplx(0.8, 0.0), cplx(0.3, 0.0)});
    ClassValue A(ring, {cplx(1.1, 0.0), cplx(-0.4, 0.2)});
    const double T = 2.5, theta = 0.3;
    const CoeffStream s = synthetic_ml_stream(ring, 2, beta, T, theta, A, 80);
    const double t = 4.0;
    const ScaledClass v = eval_series(s, t, 0.0, 80, T);
    const cplx zt = T * std::exp(cplx(0.0, theta)) * t;
    const cplx want = std::pow(zt, 0.8) * ml_eval(2.0, cplx(1.8, 0.0), zt * zt) * A.c[0];
    REQUIRE(std::abs(v.value().c[0] - want) <= 1e-9 * std::abs(want));
}

TEST_CASE("fractional integrals reproduce closed forms") {
    const RingPtr p1 = projective_ring(1);
    auto one = [&](double) { return unit_class(p1); };

    const ClassValue i1 = rl_integral(one, unit_class(p1), 2.0);
    REQUIRE(std::abs(i1.c[0] - 2.0) <= 1e-9);

    const ClassValue ih = rl_integral(one, scalar_class(p1, 0.5), 1.0);
    REQUIRE(std::abs(ih.c[0] - 2.0 / std::sqrt(M_PI)) <= 1e-9);

    ClassValue alpha(p1, {1, 1});
    const ClassValue ia = rl_integral(one, alpha, 1.0);
    ClassValue two_d(p1, {2, 1});
    const ClassValue want = inverse(gamma_of_class(two_d));
    REQUIRE(rel_diff(ia, want) <= 1e-8);

    auto expf = [&](double x) { return scalar_class(p1, std::exp(x)); };
    const ClassValue ie = rl_integral(expf, unit_class(p1), 1.0);
    REQUIRE(std::abs(ie.c[0] - (std::exp(1.0) - 1.0)) <= 1e-9);

    REQUIRE_THROWS_AS(rl_integral(one, scalar_class(p1, -0.3), 1.0), std::domain_error);
}

TEST_CASE("semigroup identity on the closed-form pair") {
    const RingPtr p1 = projective_ring(1);
    const ClassValue half = scalar_class(p1, 0.5);
    const RlReport rep = rl_property_check(half, half, cplx(1.0, 0.0), {1.0});
    REQUIRE(rep.semigroup_residuals.size() == 1);
    REQUIRE(rep.semigroup_residuals[0] <= 1e-8);
}

TEST_CASE("semigroup identity holds for random exponent pairs") {
    const RingPtr ring = projective_ring(1);
    std::mt19937 rng(20260814);
    std::uniform_real_distribution<double> re(0.2, 3.0), im(-1.0, 1.0), nil(-0.5, 0.5);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        ClassValue a = scalar_class(ring, cplx(re(rng), im(rng)));
        ClassValue b = scalar_class(ring, cplx(re(rng), im(rng)));
        if (i % 2 == 0) {
            a.c[1] = cplx(nil(rng), nil(rng));
            b.c[1] = cplx(nil(rng), nil(rng));
        }
        const int fidx = i % 3;
        auto f = [fidx, &ring](double x) {
            const double v = fidx == 0 ? 1.0 : fidx == 1 ? std::exp(0.5 * x) : std::cos(x);
            return scalar_class(ring, cplx(v, 0.0));
        };
        const RlOptions inner{16, 8, 26};
        const RlOptions outer{20, 8, 30};
        auto inner_f = [&](double x) { return rl_integral_opts(f, b, x, inner); };
        const ClassValue lhs = rl_integral_opts(inner_f, a, 1.0, outer);
        const ClassValue rhs = rl_integral_opts(f, add(a, b), 1.0, RlOptions{24, 8, 34});
        worst = std::max(worst, rel_diff(lhs, rhs));
    }
    REQUIRE(worst <= 1e-6);
}

TEST_CASE("exponential inputs with growing rate follow the reduced expansion") {
    const RingPtr p1 = projective_ring(1);
    ClassValue alpha(p1, {1, 1});
    const ClassValue beta = scalar_class(p1, 0.5);
    struct Want {
        cplx lambda;
        double first, last;
    };
    const Want wants[] = {
        {cplx(1, 0), 8.9942e-2, 1.5109e-2},
        {cplx(2, 0), 2.4162e-2, 3.8636e-3},
        {cplx(1, 1), 4.7961e-2, 7.7212e-3},
    };
    for (const Want& w : wants) {
        const RlReport rep = rl_property_check(alpha, beta, w.lambda, {5.0, 10.0, 20.0});
        REQUIRE(rep.prop3_scaled_residuals.size() == 3);
        REQUIRE(rep.prop3_decreasing);
        REQUIRE(rep.prop3_scaled_residuals[0] == Catch::Approx(w.first).epsilon(0.05));
        REQUIRE(rep.prop3_scaled_residuals[2] == Catch::Approx(w.last).epsilon(0.05));
    }
}

TEST_CASE("decaying and oscillating inputs stay subpolynomial") {
    const RingPtr p1 = projective_ring(1);
    ClassValue alpha(p1, {1, 1});
    const ClassValue beta = scalar_class(p1, 0.5);
    for (const cplx lam : {cplx(-1, 0), cplx(0, 1)}) {
        const RlReport rep = rl_property_check(alpha, beta, lam, {5.0, 10.0, 20.0});
        REQUIRE(rep.prop4_subpolynomial);
        REQUIRE(rep.prop4_slope <= 0.5);
    }
}
