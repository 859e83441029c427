// gamma_calculus.hpp: Gamma of a cohomology class, reciprocal, Gamma class
// products, and the closed-form X3 target class.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "ring.hpp"
#include "special_functions.hpp"

namespace jfan {

// log Gamma(alpha) as a ClassValue: H^0 part log Gamma(a0), nilpotent part
// sum_{j>=1} psi^{(j-1)}(a0) nil^j / j!. Streams consume this form directly
// so that Gamma factors with huge H^0 magnitude never get exponentiated.
inline ClassValue log_gamma_class(const ClassValue& alpha) {
    const cplx a0 = alpha.c[0];
    ClassValue nil = alpha;
    nil.c[0] = 0;
    ClassValue out(alpha.ring);
    out.c[0] = log_gamma(a0);
    ClassValue term = unit_class(alpha.ring);
    double fact = 1.0;
    for (int j = 1; j <= alpha.ring->dim_c; ++j) {
        term = mul(term, nil);
        fact *= j;
        out = add(out, scal(polygamma(j - 1, a0) / fact, term));
    }
    return out;
}

inline ClassValue gamma_of_class(const ClassValue& alpha) {
    return exp_class(log_gamma_class(alpha));
}

inline ClassValue reciprocal_gamma(const ClassValue& alpha) {
    return inverse(gamma_of_class(alpha));
}

// log Gamma(1+nu) for nilpotent nu via the zeta series
// -gamma nu + sum_{k>=2} (-1)^k zeta(k) nu^k / k; avoids polygamma at 1.
inline ClassValue log_gamma1p_nilpotent(const ClassValue& nu) {
    for (int i = 0; i < nu.ring->n(); ++i)
        if (nu.ring->degree[i] == 0 && nu.c[i] != 0.0)
            throw std::invalid_argument("log_gamma1p_nilpotent: H^0 part must vanish");
    ClassValue out = scal(-EULER_GAMMA, nu);
    ClassValue term = nu;
    for (int k = 2; k <= nu.ring->dim_c; ++k) {
        term = mul(term, nu);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        out = add(out, scal(sign * zeta_int(k) / k, term));
    }
    return out;
}

// Gamma class: product of Gamma(1 + delta_i) over the given divisor classes.
inline ClassValue gamma_hat(const std::vector<ClassValue>& divisor_classes,
                            const RingPtr& ring) {
    ClassValue out = unit_class(ring);
    for (const auto& d : divisor_classes) {
        if (d.c[0] != 0.0)
            throw std::invalid_argument("gamma_hat: divisor class has nonzero H^0 part");
        out = mul(out, exp_class(log_gamma1p_nilpotent(d)));
    }
    return out;
}

// A ~ Gamma(1+x1)^4 Gamma(1-3x1+x2) Gamma(1+x2) * P(2 pi i x1, 2 pi i x2)
// with P(x1,x2) = (-3x1+x2)(1 - x1/2 + x1^2/2 - 5 x1^3/24).
inline ClassValue x3_target_class(const RingPtr& ring_x3) {
    if (ring_x3->n() != 8 || ring_x3->dim_c != 4)
        throw std::invalid_argument("x3_target_class: expects the shipped X3 ring");
    ClassValue x1(ring_x3), x2(ring_x3);
    x1.c[2] = 1.0;
    x2.c[1] = 1.0;
    const ClassValue y = sub(x2, scal(3.0, x1));   // x2 - 3 x1

    ClassValue g = mul(exp_class(log_gamma1p_nilpotent(x1)),
                       exp_class(log_gamma1p_nilpotent(x1)));
    g = mul(g, g);                                  // Gamma(1+x1)^4
    g = mul(g, exp_class(log_gamma1p_nilpotent(y)));
    g = mul(g, exp_class(log_gamma1p_nilpotent(x2)));

    const cplx twopii(0.0, 2.0 * M_PI);
    const ClassValue u = scal(twopii, x1);
    const ClassValue v = scal(twopii, x2);
    const ClassValue u2 = mul(u, u);
    const ClassValue u3 = mul(u2, u);
    ClassValue poly = unit_class(ring_x3);
    poly = add(poly, scal(-0.5, u));
    poly = add(poly, scal(0.5, u2));
    poly = add(poly, scal(-5.0 / 24.0, u3));
    const ClassValue P = mul(sub(v, scal(3.0, u)), poly);
    return mul(g, P);
}

}  // namespace jfan
