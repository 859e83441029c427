// ring.hpp: finite-basis truncated graded commutative rings over complex
// scalars, the ClassValue vectors living in them, and the overflow-safe
// ScaledClass mantissa/exponent representation.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace jfan {

using cplx = std::complex<double>;

struct MultEntry {
    int i, j, k;   // basis[i] * basis[j] contains c * basis[k]
    cplx c;
};

// A ring presentation is immutable after construction; ClassValues hold a
// shared_ptr to it so streams and caches can outlive local ring objects.
struct RingPresentation {
    std::string name;
    std::vector<std::string> basis;      // basis[0] is the unit
    std::vector<int> degree;             // real (even) degree per basis entry
    std::vector<MultEntry> table;
    int dim_c = 0;                       // complex dimension of X
    int fano_index = 1;                  // r
    std::vector<cplx> c1;                // coefficients of c1(X) in the basis
    std::vector<double> integrate_w;     // integrate(a) = sum_k w[k] a[k]
    // point_functional is the H^0 component (pairing with [pt]); no weights
    // are needed beyond picking coefficient 0.

    int n() const { return static_cast<int>(basis.size()); }

    // FNV-1a over a canonical rendering; used by the stream cache to refuse
    // coefficient payloads generated against a different presentation.
    std::uint64_t hash() const {
        std::string s = name + "|" + std::to_string(dim_c) + "|" +
                        std::to_string(fano_index);
        char buf[64];
        for (const auto& b : basis) s += "|" + b;
        for (int d : degree) s += "," + std::to_string(d);
        for (const auto& e : table) {
            std::snprintf(buf, sizeof buf, "|%d.%d.%d:%.17g,%.17g", e.i, e.j, e.k,
                          e.c.real(), e.c.imag());
            s += buf;
        }
        for (const auto& z : c1) {
            std::snprintf(buf, sizeof buf, "|%.17g,%.17g", z.real(), z.imag());
            s += buf;
        }
        for (double w : integrate_w) {
            std::snprintf(buf, sizeof buf, "|%.17g", w);
            s += buf;
        }
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return h;
    }
};

using RingPtr = std::shared_ptr<const RingPresentation>;

struct ClassValue {
    RingPtr ring;
    std::vector<cplx> c;

    ClassValue() = default;
    explicit ClassValue(RingPtr r) : ring(std::move(r)), c(ring->n(), cplx(0)) {}
    ClassValue(RingPtr r, std::vector<cplx> v) : ring(std::move(r)), c(std::move(v)) {
        if (static_cast<int>(c.size()) != ring->n())
            throw std::invalid_argument("ClassValue length does not match ring basis");
    }
};

inline ClassValue unit_class(const RingPtr& r) {
    ClassValue u(r);
    u.c[0] = 1.0;
    return u;
}

inline ClassValue scalar_class(const RingPtr& r, cplx s) {
    ClassValue u(r);
    u.c[0] = s;
    return u;
}

inline ClassValue c1_class(const RingPtr& r) {
    return ClassValue(r, std::vector<cplx>(r->c1));
}

inline void check_same_ring(const ClassValue& a, const ClassValue& b) {
    if (a.ring.get() != b.ring.get() && a.ring->hash() != b.ring->hash())
        throw std::invalid_argument("ClassValues from different rings");
}

inline ClassValue add(const ClassValue& a, const ClassValue& b) {
    check_same_ring(a, b);
    ClassValue out = a;
    for (int i = 0; i < out.ring->n(); ++i) out.c[i] += b.c[i];
    return out;
}

inline ClassValue sub(const ClassValue& a, const ClassValue& b) {
    check_same_ring(a, b);
    ClassValue out = a;
    for (int i = 0; i < out.ring->n(); ++i) out.c[i] -= b.c[i];
    return out;
}

inline ClassValue scal(cplx s, const ClassValue& a) {
    ClassValue out = a;
    for (auto& z : out.c) z *= s;
    return out;
}

inline ClassValue mul(const ClassValue& a, const ClassValue& b) {
    check_same_ring(a, b);
    ClassValue out(a.ring);
    for (const auto& e : a.ring->table) {
        const cplx ai = a.c[e.i];
        const cplx bj = b.c[e.j];
        if (ai != 0.0 && bj != 0.0) out.c[e.k] += e.c * ai * bj;
    }
    return out;
}

inline cplx point_functional(const ClassValue& a) { return a.c[0]; }

inline cplx integrate_functional(const ClassValue& a) {
    cplx s = 0;
    for (int i = 0; i < a.ring->n(); ++i) s += a.ring->integrate_w[i] * a.c[i];
    return s;
}

inline double max_abs_coord(const ClassValue& a) {
    double m = 0;
    for (const auto& z : a.c)
        m = std::max(m, std::max(std::abs(z.real()), std::abs(z.imag())));
    return m;
}

// a0^{-1} sum_{k<=dim_c} (-nil/a0)^k; exact because nil^(dim_c+1) = 0.
inline ClassValue inverse(const ClassValue& a) {
    const cplx a0 = a.c[0];
    if (a0 == 0.0) throw std::domain_error("inverse: H^0 part vanishes, not invertible");
    ClassValue nil = a;
    nil.c[0] = 0;
    nil = scal(-1.0 / a0, nil);
    ClassValue out = unit_class(a.ring);
    ClassValue term = unit_class(a.ring);
    for (int k = 1; k <= a.ring->dim_c; ++k) {
        term = mul(term, nil);
        out = add(out, term);
    }
    return scal(1.0 / a0, out);
}

// e^{a0} sum_{k<=dim_c} nil^k/k!; exact finite sum.
inline ClassValue exp_class(const ClassValue& a) {
    ClassValue nil = a;
    nil.c[0] = 0;
    ClassValue out = unit_class(a.ring);
    ClassValue term = unit_class(a.ring);
    for (int k = 1; k <= a.ring->dim_c; ++k) {
        term = scal(1.0 / k, mul(term, nil));
        out = add(out, term);
    }
    return scal(std::exp(a.c[0]), out);
}

// log a0 (caller-chosen branch) + Mercator series in nil/a0.
inline ClassValue log_class(const ClassValue& a, double branch_arg_offset = 0.0) {
    const cplx a0 = a.c[0];
    if (a0 == 0.0) throw std::domain_error("log_class: H^0 part vanishes");
    ClassValue u = a;
    u.c[0] = 0;
    u = scal(1.0 / a0, u);
    ClassValue out(a.ring);
    ClassValue term = unit_class(a.ring);
    for (int k = 1; k <= a.ring->dim_c; ++k) {
        term = mul(term, u);
        out = add(out, scal((k % 2 ? 1.0 : -1.0) / k, term));
    }
    out.c[0] = std::log(a0) + cplx(0.0, branch_arg_offset);
    return out;
}

// t^{alpha} = exp_class(alpha (ln|t| + i branch_arg)).
inline ClassValue power_t(const ClassValue& alpha, cplx t, double branch_arg) {
    if (t == 0.0) throw std::domain_error("power_t: t = 0");
    const cplx logt(std::log(std::abs(t)), branch_arg);
    return exp_class(scal(logt, alpha));
}

inline ClassValue power_t(const ClassValue& alpha, cplx t) {
    return power_t(alpha, t, std::arg(t));
}

/// Row-major matrix of mul(a, .): M[k][j] = sum_i c_{ij}^k a_i.
inline std::vector<cplx> mult_matrix(const ClassValue& a) {
    const int n = a.ring->n();
    std::vector<cplx> M(static_cast<size_t>(n) * n, cplx(0));
    for (const auto& e : a.ring->table)
        M[static_cast<size_t>(e.k) * n + e.j] += e.c * a.c[e.i];
    return M;
}

// Operator norm of mul(a, .) induced by the max-abs coordinate norm:
// max row sum of the multiplication matrix.
inline double op_norm(const ClassValue& a) {
    const int n = a.ring->n();
    const std::vector<cplx> M = mult_matrix(a);
    double best = 0;
    for (int k = 0; k < n; ++k) {
        double row = 0;
        for (int j = 0; j < n; ++j) row += std::abs(M[static_cast<size_t>(k) * n + j]);
        best = std::max(best, row);
    }
    return best;
}

// Euclidean norm; used for collinearity deviations in reports.
inline double l2_norm(const ClassValue& a) {
    double s = 0;
    for (const auto& z : a.c) s += std::norm(z);
    return std::sqrt(s);
}

// ----------------------------------------------------------------------
/// ScaledClass: mantissa with max-abs coordinate normalized into [1/2, 2).

struct ScaledClass {
    ClassValue mantissa;
    std::int64_t exp2 = 0;

    ScaledClass() = default;
    explicit ScaledClass(ClassValue m, std::int64_t e = 0)
        : mantissa(std::move(m)), exp2(e) {
        normalize();
    }

    void normalize() {
        const double m = max_abs_coord(mantissa);
        if (m == 0.0) {
            exp2 = 0;
            return;
        }
        int k = 0;
        std::frexp(m, &k);   // m = f * 2^k with f in [1/2, 1)
        if (k != 0) {
            const double s = std::ldexp(1.0, -k);
            for (auto& z : mantissa.c) z *= s;
            exp2 += k;
        }
    }

    // Denormalized value; only safe when 2^{exp2} is representable.
    ClassValue value() const {
        const double s = std::ldexp(1.0, static_cast<int>(exp2));
        return scal(s, mantissa);
    }

    double log_magnitude() const {   // natural log of the max-abs coordinate
        const double m = max_abs_coord(mantissa);
        if (m == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(m) + static_cast<double>(exp2) * std::log(2.0);
    }
};

inline ScaledClass scaled_mul(const ScaledClass& a, const ScaledClass& b) {
    ScaledClass out(mul(a.mantissa, b.mantissa), a.exp2 + b.exp2);
    return out;
}

// ----------------------------------------------------------------------
// Built-in presentations.

namespace detail {

inline void push_entry(std::vector<MultEntry>& t, int i, int j, int k, cplx c) {
    if (c != 0.0) t.push_back({i, j, k, c});
}

}  // namespace detail

// H*(P^N) = C[d]/(d^{N+1}), basis (1, d, ..., d^N), c1 = (N+1) d.
inline RingPtr projective_ring(int N) {
    if (N < 1 || N > 12) throw std::invalid_argument("projective_ring: N in [1,12]");
    auto r = std::make_shared<RingPresentation>();
    r->name = "P" + std::to_string(N);
    r->dim_c = N;
    r->fano_index = N + 1;
    for (int k = 0; k <= N; ++k) {
        r->basis.push_back(k == 0 ? "1" : (k == 1 ? "d" : "d^" + std::to_string(k)));
        r->degree.push_back(2 * k);
    }
    for (int i = 0; i <= N; ++i)
        for (int j = 0; i + j <= N; ++j)
            detail::push_entry(r->table, i, j, i + j, 1.0);
    r->c1.assign(N + 1, cplx(0));
    r->c1[1] = N + 1;
    r->integrate_w.assign(N + 1, 0.0);
    r->integrate_w[N] = 1.0;   // int_X d^N = 1
    return r;
}

// Tensor product ring; basis index = iA * nB + iB, degrees add.
inline RingPtr product_ring(const RingPtr& A, const RingPtr& B) {
    auto r = std::make_shared<RingPresentation>();
    const int nA = A->n(), nB = B->n();
    r->name = A->name + "x" + B->name;
    r->dim_c = A->dim_c + B->dim_c;
    r->fano_index = std::gcd(A->fano_index, B->fano_index);
    for (int i = 0; i < nA; ++i)
        for (int j = 0; j < nB; ++j) {
            std::string nm;
            if (i == 0 && j == 0) nm = "1";
            else if (j == 0) nm = A->basis[i] + "(1)";
            else if (i == 0) nm = B->basis[j] + "(2)";
            else nm = A->basis[i] + "(1)" + B->basis[j] + "(2)";
            r->basis.push_back(nm);
            r->degree.push_back(A->degree[i] + B->degree[j]);
        }
    for (const auto& ea : A->table)
        for (const auto& eb : B->table)
            detail::push_entry(r->table, ea.i * nB + eb.i, ea.j * nB + eb.j,
                               ea.k * nB + eb.k, ea.c * eb.c);
    r->c1.assign(static_cast<size_t>(nA) * nB, cplx(0));
    for (int i = 0; i < nA; ++i) r->c1[static_cast<size_t>(i) * nB] += A->c1[i];
    for (int j = 0; j < nB; ++j) r->c1[j] += B->c1[j];
    r->integrate_w.assign(static_cast<size_t>(nA) * nB, 0.0);
    for (int i = 0; i < nA; ++i)
        for (int j = 0; j < nB; ++j)
            r->integrate_w[static_cast<size_t>(i) * nB + j] =
                A->integrate_w[i] * B->integrate_w[j];
    return r;
}

// Ambient-restricted ring of a degree-d hypersurface Z in P^N:
// C[x]/(x^N), r_Z = (N+1) - d, c1 = r_Z x, int_Z x^{N-1} = d.
inline RingPtr restrict_hypersurface(const RingPtr& ringX, int d) {
    // require the monogenic projective presentation
    bool monogenic = true;
    for (int k = 0; k < ringX->n(); ++k)
        if (ringX->degree[k] != 2 * k) monogenic = false;
    if (!monogenic)
        throw std::invalid_argument("restrict_hypersurface: ambient ring must be P^N");
    const int rX = ringX->fano_index;
    if (d <= 0 || d >= rX)
        throw std::invalid_argument("restrict_hypersurface: need 0 < d < fano_index(X)");
    const int N = ringX->dim_c;
    auto r = std::make_shared<RingPresentation>();
    r->name = ringX->name + "_deg" + std::to_string(d);
    r->dim_c = N - 1;
    r->fano_index = rX - d;
    for (int k = 0; k <= N - 1; ++k) {
        r->basis.push_back(k == 0 ? "1" : (k == 1 ? "x" : "x^" + std::to_string(k)));
        r->degree.push_back(2 * k);
    }
    for (int i = 0; i <= N - 1; ++i)
        for (int j = 0; i + j <= N - 1; ++j)
            detail::push_entry(r->table, i, j, i + j, 1.0);
    r->c1.assign(N, cplx(0));
    r->c1[1] = rX - d;
    r->integrate_w.assign(N, 0.0);
    r->integrate_w[N - 1] = d;   // projection formula: int_Z x^{N-1} = d
    return r;
}

// ----------------------------------------------------------------------
// X3 = P_{P^3}(O + O(3)): basis (1, x2, x1, x1x2, x1^2, x1^2x2, x1^3, x1^3x2).
// Classical relations: x1^4 = 0, x2^2 = 3 x1 x2.
// Quantum (t=1) relations: x2^2 = 1 + 3 x1 x2, x1^4 = (x2 - 3 x1)^3.

namespace detail {

inline int x3_index(int a, int b) {
    // monomial x1^a x2^b with 0 <= a <= 3, 0 <= b <= 1
    static const int idx[4][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
    return idx[a][b];
}

// Reduce x1^a x2^b against the relations; quantum toggles the deformation.
inline void x3_reduce(int a, int b, double coef, bool quantum, std::vector<double>& out) {
    if (coef == 0.0) return;
    if (b >= 2) {
        // x2^2 = 3 x1 x2 (+1 quantum)
        x3_reduce(a + 1, b - 1, 3.0 * coef, quantum, out);
        if (quantum) x3_reduce(a, b - 2, coef, quantum, out);
        return;
    }
    if (a >= 4) {
        if (!quantum) return;   // x1^4 = 0
        // x1^4 = (x2 - 3 x1)^3 = x2^3 - 9 x1 x2^2 + 27 x1^2 x2 - 27 x1^3
        x3_reduce(a - 4, b + 3, coef, quantum, out);
        x3_reduce(a - 3, b + 2, -9.0 * coef, quantum, out);
        x3_reduce(a - 2, b + 1, 27.0 * coef, quantum, out);
        x3_reduce(a - 1, b, -27.0 * coef, quantum, out);
        return;
    }
    out[x3_index(a, b)] += coef;
}

inline RingPtr x3_ring(bool quantum) {
    auto r = std::make_shared<RingPresentation>();
    r->name = quantum ? "X3q" : "X3";
    r->dim_c = 4;
    r->fano_index = 1;
    static const char* names[8] = {"1", "x2", "x1", "x1x2", "x1^2", "x1^2x2", "x1^3", "x1^3x2"};
    static const int mono[8][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1},
                                   {2, 0}, {2, 1}, {3, 0}, {3, 1}};
    for (int k = 0; k < 8; ++k) {
        r->basis.push_back(names[k]);
        r->degree.push_back(2 * (mono[k][0] + mono[k][1]));
    }
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            std::vector<double> out(8, 0.0);
            x3_reduce(mono[i][0] + mono[j][0], mono[i][1] + mono[j][1], 1.0,
                      quantum, out);
            for (int k = 0; k < 8; ++k) push_entry(r->table, i, j, k, out[k]);
        }
    r->c1.assign(8, cplx(0));
    r->c1[1] = 2;   // c1 = x1 + 2 x2
    r->c1[2] = 1;
    r->integrate_w.assign(8, 0.0);
    r->integrate_w[7] = 1.0;   // normalization int x1^3 x2 = 1
    return r;
}

}  // namespace detail

inline RingPtr x3_classical_ring() { return detail::x3_ring(false); }
inline RingPtr x3_quantum_ring() { return detail::x3_ring(true); }

}  // namespace jfan
