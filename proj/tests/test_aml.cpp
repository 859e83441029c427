#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <jfan/aml.hpp>
#include <jfan/gamma_calculus.hpp>
#include <jfan/streams.hpp>

using namespace jfan;

namespace {

const double X3_T = 26.9876580807128417660131835582;

double rel_diff(const ClassValue& got, const ClassValue& want) {
    return l2_norm(sub(got, want)) / std::max(1e-300, l2_norm(want));
}

double collin_residual(const ClassValue& v, const ClassValue& w) {
    cplx num(0), den(0);
    for (size_t i = 0; i < v.c.size(); ++i) {
        num += std::conj(v.c[i]) * w.c[i];
        den += std::conj(v.c[i]) * v.c[i];
    }
    return l2_norm(sub(scal(num / den, v), w)) / l2_norm(w);
}

const CoeffStream& p1_400() {
    static const CoeffStream s = projective_stream(1, 400);
    return s;
}
const CoeffStream& p2_400() {
    static const CoeffStream s = projective_stream(2, 400);
    return s;
}
const CoeffStream& p3_400() {
    static const CoeffStream s = projective_stream(3, 400);
    return s;
}
const CoeffStream& p3_1000() {
    static const CoeffStream s = projective_stream(3, 1000);
    return s;
}
const CoeffStream& quad_400() {
    static const CoeffStream s = hypersurface_stream(projective_stream(3, 420), 2, 400);
    return s;
}
const CoeffStream& cubic_200() {
    static const CoeffStream s = hypersurface_stream(projective_stream(3, 230), 3, 200);
    return s;
}
const CoeffStream& prod_200() {
    static const CoeffStream s = product_stream(p1_400(), p1_400(), 200);
    return s;
}
const CoeffStream& x3_300() {
    static const CoeffStream s = [] {
        const RingPtr xr = x3_classical_ring();
        return toric_stream(x3_toric_data(xr), xr, 300);
    }();
    return s;
}

AmlScaling fit1(const CoeffStream& s, int m0, int m1, int comp = 0) {
    FitOptions opt;
    opt.component = comp;
    opt.aitken_passes = 1;
    return fit_scaling(s, m0, m1, opt);
}

ClassValue p3_limit_class() {
    const RingPtr ring = p3_400().ring;
    ClassValue d(ring);
    d.c[1] = 1.0;
    const ClassValue ghat = gamma_hat({d, d, d, d}, ring);
    return scal(2.0 * std::pow(2.0 * M_PI, -1.5), ghat);
}

}  // namespace

TEST_CASE("scaling a synthetic exact stream returns its limit at every index") {
    const RingPtr ring = projective_ring(2);
    ClassValue beta = default_beta(ring);
    ClassValue A(ring, {cplx(1.1, 0.0), cplx(-0.4, 0.2), cplx(0.3, -0.1)});
    const CoeffStream s = synthetic_ml_stream(ring, 2, beta, 3.0, M_PI / 2.0, A, 120);
    const std::vector<ClassValue> vals =
        scale_coefficients(s, 3.0, M_PI / 2.0, ScaleMode::gamma);
    for (int m = 0; m <= 120; ++m) REQUIRE(rel_diff(vals[m], A) <= 1e-12);
}

TEST_CASE("fitting a synthetic exact stream recovers its parameters") {
    const RingPtr ring = projective_ring(2);
    ClassValue beta = default_beta(ring);
    ClassValue A(ring, {cplx(1.1, 0.0), cplx(-0.4, 0.2), cplx(0.3, -0.1)});
    const CoeffStream s = synthetic_ml_stream(ring, 2, beta, 3.0, M_PI / 2.0, A, 120);
    const AmlScaling sc = fit1(s, 40, 110);
    REQUIRE(std::abs(sc.T - 3.0) <= 1e-10);
    REQUIRE(std::abs(sc.theta - M_PI / 2.0) <= 1e-10);
    REQUIRE(rel_diff(sc.A, A) <= 1e-10);
    REQUIRE(sc.method == "ratio-fit");

    const VerifyReport vr = verify_aml(s, sc, 40, 110);
    for (double r : vr.rel_residuals) REQUIRE(r <= 1e-12);
}

TEST_CASE("P3 fit lands on the predicted growth scale") {
    const AmlScaling sc = fit1(p3_400(), 200, 400);
    REQUIRE(std::abs(sc.T - 4.0) <= 1e-4);
    REQUIRE(std::abs(sc.T - 3.99999935) <= 5e-7);
    REQUIRE(std::abs(sc.theta) <= 1e-9);
}

TEST_CASE("X3 fit lands on the spectral growth scale on the negative axis") {
    const AmlScaling sc = fit1(x3_300(), 100, 300, 7);
    REQUIRE(std::abs(sc.T / X3_T - 1.0) <= 1e-3);
    REQUIRE(std::abs(sc.T / X3_T - 1.0) <= 2e-4);
    REQUIRE(std::abs(sc.theta - M_PI) <= 1e-4);
    REQUIRE(std::abs(sc.theta - M_PI) <= 1e-9);
}

TEST_CASE("round-trip residuals decrease over each window's second half") {
    struct Row {
        const char* name;
        const CoeffStream& s;
        int m0, m1, comp;
        double T_want, T_tol;
    };
    const Row rows[] = {
        {"P1", p1_400(), 200, 400, 0, 2.0, 1e-5},
        {"P2", p2_400(), 200, 400, 0, 3.0, 1e-5},
        {"P3", p3_400(), 200, 400, 0, 4.0, 1e-5},
        {"quadric", quad_400(), 200, 400, 0, 4.0, 1e-4},
        {"cubic", cubic_200(), 20, 48, 0, 21.0, 1e-2},
        {"P1xP1", prod_200(), 100, 200, 0, 4.0, 1e-4},
        {"X3", x3_300(), 50, 150, 7, X3_T, 1.5e-2},
    };
    for (const Row& row : rows) {
        INFO(row.name);
        const AmlScaling sc = fit1(row.s, row.m0, row.m1, row.comp);
        REQUIRE(std::abs(sc.T - row.T_want) <= row.T_tol);
        const size_t half = sc.residuals.size() / 2;
        REQUIRE(sc.residuals.back() <= sc.residuals[half]);
    }
}

TEST_CASE("frozen fitted growth scales for the shipped streams") {
    REQUIRE(fit1(p1_400(), 200, 400).T == Catch::Approx(1.99999974).margin(2e-7));
    REQUIRE(fit1(p2_400(), 200, 400).T == Catch::Approx(2.99999954).margin(2e-7));
    REQUIRE(fit1(quad_400(), 200, 400).T == Catch::Approx(3.99999793).margin(2e-7));
    REQUIRE(fit1(prod_200(), 100, 200).T == Catch::Approx(3.99999177).margin(2e-7));
    REQUIRE(fit1(x3_300(), 50, 150, 7).T / X3_T == Catch::Approx(1.0).margin(5e-4));
}

TEST_CASE("verifying the externally predicted P3 scaling") {
    AmlScaling truth;
    truth.T = 4.0;
    truth.theta = 0.0;
    truth.A = p3_limit_class();
    truth.method = "supplied";
    const VerifyReport vr = verify_aml(p3_400(), truth, 200, 400);
    REQUIRE(vr.decreasing_trend);
    REQUIRE(vr.rel_residuals.back() <= 2e-3);
}

TEST_CASE("a wrong growth scale is flagged rather than absorbed") {
    AmlScaling wrong;
    wrong.T = 5.0;
    wrong.theta = 0.0;
    wrong.A = p3_limit_class();
    const VerifyReport vr = verify_aml(p3_400(), wrong, 200, 400);
    REQUIRE_FALSE(vr.decreasing_trend);
    REQUIRE(vr.rel_residuals.back() >= 0.5);

    // far down the stream the mis-scaled values leave double range entirely
    REQUIRE_THROWS_AS(verify_aml(p3_1000(), wrong, 500, 1000), std::underflow_error);
    REQUIRE_THROWS_AS(scale_coefficients(p3_1000(), 5.0, 0.0, ScaleMode::gamma),
                      std::underflow_error);
}

TEST_CASE("aitken acceleration fixed points and rates") {
    const RingPtr ring = projective_ring(1);
    auto scalar_seq = [&](auto f, int lo, int hi) {
        std::vector<ClassValue> seq;
        for (int m = lo; m <= hi; ++m) seq.push_back(scalar_class(ring, f(m)));
        return seq;
    };

    const auto constant = scalar_seq([](int) { return cplx(2.5, -1.0); }, 1, 20);
    for (const ClassValue& v : aitken_accelerate(constant)) {
        REQUIRE(v.c[0] == cplx(2.5, -1.0));
    }

    const auto geometric =
        scalar_seq([](int m) { return cplx(1.0 + std::ldexp(1.0, -m), 0.0); }, 1, 30);
    const std::vector<ClassValue> acc_geo = aitken_accelerate(geometric);
    REQUIRE(std::abs(acc_geo.back().c[0] - 1.0) <= 1e-12);

    const auto harmonic = scalar_seq([](int m) { return cplx(1.0 + 1.0 / m, 0.0); }, 1, 52);
    const std::vector<ClassValue> acc_h = aitken_accelerate(harmonic);
    const double err = std::abs(acc_h.back().c[0].real() - 1.0);
    REQUIRE(err < 1.0 / 50.0);
    REQUIRE(std::abs(err - 1.0 / 102.0) <= 1e-12);

    REQUIRE_THROWS_AS(aitken_accelerate(scalar_seq([](int) { return cplx(1, 0); }, 1, 2)),
                      std::invalid_argument);
}

TEST_CASE("branch shifts relabel a scaling without changing residuals") {
    const AmlScaling sc = fit1(p3_400(), 200, 400);
    const CoeffStream& s = p3_400();

    const AmlScaling same = branch_shift(sc, 0, s.beta, s.r);
    REQUIRE(same.T == sc.T);
    REQUIRE(same.theta == sc.theta);
    REQUIRE(rel_diff(same.A, sc.A) == 0.0);

    const AmlScaling full = branch_shift(sc, s.r, s.beta, s.r);
    REQUIRE(full.theta == Catch::Approx(sc.theta + 2.0 * M_PI).margin(1e-14));

    const VerifyReport v0 = verify_aml(s, sc, 200, 400);
    for (int k : {1, 2, 4}) {
        const AmlScaling sh = branch_shift(sc, k, s.beta, s.r);
        const VerifyReport vk = verify_aml(s, sh, 200, 400);
        REQUIRE(vk.rel_residuals.size() == v0.rel_residuals.size());
        for (size_t i = 0; i < v0.rel_residuals.size(); ++i)
            REQUIRE(std::abs(vk.rel_residuals[i] - v0.rel_residuals[i]) <= 1e-12);
    }
}

TEST_CASE("differentiating a stream multiplies the limit by T e^(i theta)") {
    const AmlScaling orig = fit1(p3_400(), 200, 400);
    const AmlScaling dsc = fit1(derivative_stream(p3_400()), 200, 400);
    REQUIRE(std::abs(orig.T - dsc.T) <= 1e-6);
    REQUIRE(std::abs(orig.theta - dsc.theta) <= 1e-6);
    const ClassValue want = scal(orig.T * std::exp(cplx(0, orig.theta)), orig.A);
    REQUIRE(rel_diff(dsc.A, want) <= 1e-2);
    REQUIRE(collin_residual(orig.A, dsc.A) <= 1e-6);
}

TEST_CASE("dropping leading coefficients shifts the exponent, not the scaling") {
    CoeffStream tail = p3_400();
    tail.coeffs.erase(tail.coeffs.begin(), tail.coeffs.begin() + 10);
    tail.beta.c[0] += 10.0 * tail.r;
    const AmlScaling orig = fit1(p3_400(), 200, 400);
    const AmlScaling shif = fit1(tail, 190, 390);
    REQUIRE(std::abs(orig.T - shif.T) <= 1e-6);
    REQUIRE(std::abs(orig.theta - shif.theta) <= 1e-6);
    REQUIRE(rel_diff(shif.A, orig.A) <= 1e-3);
}

TEST_CASE("a wrong exponent class admits no limit at any nearby scale") {
    CoeffStream bad = p3_400();
    bad.beta.c[0] += 1.0;
    double grid_min = 1e300;
    for (double T : {3.8, 3.9, 3.95, 4.0, 4.05, 4.1, 4.2}) {
        const std::vector<ClassValue> vals = scale_coefficients(bad, T, 0.0, ScaleMode::gamma);
        std::vector<ClassValue> win(vals.begin() + 200, vals.begin() + 401);
        const size_t tail_len = (win.size() + 2) / 3;
        std::vector<ClassValue> tl(win.end() - long(tail_len), win.end());
        const ClassValue a_est = aitken_accelerate(tl).back();
        const double an = l2_norm(a_est);
        double best = 1e300;
        for (size_t i = win.size() / 2; i < win.size(); ++i)
            best = std::min(best, l2_norm(sub(win[i], a_est)) / an);
        grid_min = std::min(grid_min, best);
    }
    REQUIRE(grid_min > 0.1);
}

TEST_CASE("table normalization converges to the gamma normalization") {
    const CoeffStream& s = x3_300();
    const double T = X3_T;
    const std::vector<ClassValue> g = scale_coefficients(s, T, M_PI, ScaleMode::gamma);
    const std::vector<ClassValue> t = scale_coefficients(s, T, M_PI, ScaleMode::table);
    double prev = 1e300;
    for (int m : {50, 100, 200, 300}) {
        const double dev = rel_diff(t[m], g[m]);
        REQUIRE(dev < prev);
        prev = dev;
    }
    REQUIRE(prev <= 0.1);
}

TEST_CASE("fit rejects bad windows and vanishing functionals") {
    REQUIRE_THROWS_AS(fit_scaling(p1_400(), 100, 101), std::invalid_argument);
    REQUIRE_THROWS_AS(fit_scaling(p1_400(), 100, 500), std::invalid_argument);

    const RingPtr ring = projective_ring(1);
    ClassValue A(ring, {cplx(0.0, 0.0), cplx(1.0, 0.0)});
    const CoeffStream s =
        synthetic_ml_stream(ring, 2, default_beta(ring), 2.0, 0.0, A, 40);
    REQUIRE_THROWS_AS(fit1(s, 5, 35, 0), std::domain_error);
}
