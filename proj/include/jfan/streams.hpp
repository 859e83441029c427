// streams.hpp: CoeffStream generators: projective spaces, tensor products,
// quantum-Lefschetz hypersurfaces, toric I-functions, and derivative streams.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ring.hpp"

namespace jfan {

struct CoeffStream {
    RingPtr ring;
    int r = 1;                        // index step: coeffs[m] is J_{r m}
    ClassValue beta;                  // exponent class, default dim_c/2 + c1
    std::vector<ScaledClass> coeffs;  // coeffs[0] = 1 for J-function streams
    std::string provenance;

    int M() const { return static_cast<int>(coeffs.size()) - 1; }
    double beta0() const { return beta.c[0].real(); }
};

inline ClassValue default_beta(const RingPtr& ring) {
    ClassValue b = c1_class(ring);
    b.c[0] += 0.5 * ring->dim_c;
    return b;
}

// J_{rm} = prod_{k=1}^m (delta + k)^{-(N+1)}, r = N+1, beta = N/2 + (N+1) delta.
inline CoeffStream projective_stream(int N, int M) {
    if (N < 1 || M < 1) throw std::invalid_argument("projective_stream: N, M >= 1");
    CoeffStream s;
    s.ring = projective_ring(N);
    s.r = N + 1;
    s.beta = default_beta(s.ring);
    s.provenance = "projective_stream(N=" + std::to_string(N) +
                   ",M=" + std::to_string(M) + ")";
    s.coeffs.reserve(M + 1);
    s.coeffs.emplace_back(unit_class(s.ring));
    ClassValue delta(s.ring);
    delta.c[1] = 1.0;
    ScaledClass cur = s.coeffs[0];
    for (int m = 1; m <= M; ++m) {
        ClassValue base = delta;
        base.c[0] += static_cast<double>(m);
        ClassValue inv = inverse(base);
        ClassValue invp = inv;
        for (int q = 1; q <= N; ++q) invp = mul(invp, inv);
        cur = ScaledClass(mul(cur.mantissa, invp), cur.exp2);
        s.coeffs.push_back(cur);
    }
    return s;
}

// Embed a factor ClassValue into the tensor-product ring (basis index
// iA * nB + iB, matching product_ring).
inline ClassValue embed_in_product(const ClassValue& a, bool left,
                                   const RingPtr& prod, int nA, int nB) {
    ClassValue out(prod);
    if (left) {
        for (int i = 0; i < nA; ++i) out.c[static_cast<size_t>(i) * nB] = a.c[i];
    } else {
        for (int j = 0; j < nB; ++j) out.c[j] = a.c[j];
    }
    return out;
}

// (alpha^X alpha^Y)_{rm} = sum_{r_X m_X + r_Y m_Y = r m} J^X_{m_X} (x) J^Y_{m_Y},
// r = gcd(r_X, r_Y), beta = beta_X + beta_Y in the tensor ring.
inline CoeffStream product_stream(const CoeffStream& sx, const CoeffStream& sy, int M) {
    CoeffStream s;
    s.ring = product_ring(sx.ring, sy.ring);
    const int nA = sx.ring->n(), nB = sy.ring->n();
    s.r = std::gcd(sx.r, sy.r);
    s.beta = add(embed_in_product(sx.beta, true, s.ring, nA, nB),
                 embed_in_product(sy.beta, false, s.ring, nA, nB));
    s.provenance = "product_stream(" + sx.provenance + "," + sy.provenance +
                   ",M=" + std::to_string(M) + ")";
    for (int m = 0; m <= M; ++m) {
        const long n_out = static_cast<long>(s.r) * m;
        if (static_cast<long>(sx.M()) * sx.r < n_out ||
            static_cast<long>(sy.M()) * sy.r < n_out)
            throw std::length_error("product_stream: input streams truncated too early");
        // collect tensor pieces, then accumulate aligned to the max exponent
        std::vector<std::pair<std::vector<cplx>, std::int64_t>> pieces;
        for (long mx = 0; mx * sx.r <= n_out; ++mx) {
            const long rem = n_out - mx * sx.r;
            if (rem % sy.r != 0) continue;
            const long my = rem / sy.r;
            if (my > sy.M()) continue;
            const auto& A = sx.coeffs[mx];
            const auto& B = sy.coeffs[my];
            std::vector<cplx> tens(static_cast<size_t>(nA) * nB, cplx(0));
            for (int i = 0; i < nA; ++i)
                for (int j = 0; j < nB; ++j)
                    tens[static_cast<size_t>(i) * nB + j] =
                        A.mantissa.c[i] * B.mantissa.c[j];
            pieces.emplace_back(std::move(tens), A.exp2 + B.exp2);
        }
        std::int64_t E = pieces.empty() ? 0 : pieces[0].second;
        for (const auto& p : pieces) E = std::max(E, p.second);
        ClassValue acc(s.ring);
        for (const auto& p : pieces) {
            const double sc = std::ldexp(1.0, static_cast<int>(p.second - E));
            for (int i = 0; i < s.ring->n(); ++i) acc.c[i] += sc * p.first[i];
        }
        s.coeffs.emplace_back(std::move(acc), E);
    }
    return s;
}

namespace detail {

// Exact Cauchy convolution with e^{-c0 t}: out_n = sum_j (-c0)^j/j! in_{n-j}.
// The alternating weights are handled in log space; the aligned accumulation
// carries a fractional binary exponent that is folded back afterwards.
inline std::vector<ScaledClass> exp_correction(const std::vector<ScaledClass>& in,
                                               double c0, const RingPtr& ring) {
    const double L2 = std::log(2.0);
    const double lnc0 = std::log(c0);
    const int M = static_cast<int>(in.size()) - 1;
    std::vector<ScaledClass> out;
    out.reserve(M + 1);
    for (int n = 0; n <= M; ++n) {
        double edge = -1e300;
        std::vector<double> e(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double lnw = j * lnc0 - std::lgamma(j + 1.0);
            e[j] = static_cast<double>(in[n - j].exp2) + lnw / L2;
            edge = std::max(edge, e[j]);
        }
        ClassValue acc(ring);
        for (int j = 0; j <= n; ++j) {
            const double sc = ((j % 2) ? -1.0 : 1.0) * std::exp((e[j] - edge) * L2);
            if (sc == 0.0) continue;
            for (int i = 0; i < ring->n(); ++i) acc.c[i] += sc * in[n - j].mantissa.c[i];
        }
        const double ei = std::floor(edge);
        acc = scal(std::exp((edge - ei) * L2), acc);
        out.emplace_back(std::move(acc), static_cast<std::int64_t>(ei));
    }
    return out;
}

}  // namespace detail

// Quantum Lefschetz: K_m = prod_{k=1}^{d m}(d x + k) * push(J^X_m) in
// C[x]/(x^N); when r_Z = 1 the e^{-c0 t} mirror-map correction is applied by
// exact convolution, c0 = d! * H^0(J^X_1).
inline CoeffStream hypersurface_stream(const CoeffStream& sx, int d, int M) {
    const int rX = sx.ring->fano_index;
    if (d <= 0 || d >= rX)
        throw std::invalid_argument("hypersurface_stream: need 0 < d < r_X");
    if (sx.M() < M)
        throw std::length_error("hypersurface_stream: ambient stream too short");
    CoeffStream s;
    s.ring = restrict_hypersurface(sx.ring, d);
    const int nZ = s.ring->n();
    s.r = rX - d;
    s.beta = default_beta(s.ring);
    s.provenance = "hypersurface_stream(" + sx.provenance + ",d=" +
                   std::to_string(d) + ",M=" + std::to_string(M) + ")";
    ClassValue dx(s.ring);
    dx.c[1] = d;
    std::vector<ScaledClass> raw;
    raw.reserve(M + 1);
    ScaledClass num(unit_class(s.ring));
    int kdone = 0;
    for (int m = 0; m <= M; ++m) {
        while (kdone < d * m) {
            ++kdone;
            ClassValue fac = dx;
            fac.c[0] += static_cast<double>(kdone);
            num = ScaledClass(mul(num.mantissa, fac), num.exp2);
        }
        ClassValue pushed(s.ring);
        for (int i = 0; i < nZ; ++i) pushed.c[i] = sx.coeffs[m].mantissa.c[i];
        raw.emplace_back(mul(pushed, num.mantissa), sx.coeffs[m].exp2 + num.exp2);
    }
    if (s.r == 1) {
        const double c0 =
            std::tgamma(d + 1.0) * point_functional(sx.coeffs[1].value()).real();
        if (c0 != 0.0) raw = detail::exp_correction(raw, c0, s.ring);
    }
    s.coeffs = std::move(raw);
    return s;
}

// ----------------------------------------------------------------------
// Toric I-function streams.

struct ToricData {
    std::vector<std::pair<ClassValue, int>> divisors;  // (degree-2 class, multiplicity)
    std::vector<std::vector<int>> mori_pairings;       // [divisor][generator]
    std::vector<int> c1_degrees;                       // per Mori generator
    std::string name;
};

inline ToricData x3_toric_data(const RingPtr& ring_x3) {
    ToricData d;
    d.name = "X3";
    ClassValue x1(ring_x3), x2(ring_x3);
    x1.c[2] = 1.0;
    x2.c[1] = 1.0;
    const ClassValue y = sub(x2, scal(3.0, x1));
    d.divisors = {{x1, 4}, {x2, 1}, {y, 1}};
    d.mori_pairings = {{1, 0}, {0, 1}, {-3, 1}};
    d.c1_degrees = {1, 2};
    return d;
}

// ToricData for P^N as a cross-validation input: N+1 copies of delta, single
// Mori generator with pairing 1, anticanonical degree N+1.
inline ToricData pn_toric_data(const RingPtr& ring_pn) {
    ToricData d;
    d.name = ring_pn->name;
    ClassValue delta(ring_pn);
    delta.c[1] = 1.0;
    d.divisors = {{delta, ring_pn->fano_index}};
    d.mori_pairings = {{1}};
    d.c1_degrees = {ring_pn->fano_index};
    return d;
}

namespace detail {

// factor(D, p) per generator pairing p: inverse(prod_{k=1}^p (D+k)) for
// p >= 0; prod_{k=p+1}^0 (D+k) for p < 0 (a polynomial, often annihilating).
// Tables are built incrementally so each entry costs one ring product.
struct ToricFactorTable {
    std::vector<ScaledClass> pos;   // pos[p], p >= 0
    std::vector<ScaledClass> neg;   // neg[q] for p = -q, q >= 0

    ToricFactorTable(const ClassValue& D, int max_pos, int max_neg) {
        const RingPtr ring = D.ring;
        pos.reserve(max_pos + 1);
        pos.emplace_back(unit_class(ring));
        for (int p = 1; p <= max_pos; ++p) {
            ClassValue fac = D;
            fac.c[0] += static_cast<double>(p);
            pos.emplace_back(mul(pos[p - 1].mantissa, inverse(fac)),
                             pos[p - 1].exp2);
        }
        neg.reserve(max_neg + 1);
        neg.emplace_back(unit_class(ring));
        for (int q = 1; q <= max_neg; ++q) {
            // prod_{k=p+1}^{0}(D+k) with p = -q appends the factor (D - (q-1))
            ClassValue fac = D;
            fac.c[0] -= static_cast<double>(q - 1);
            neg.emplace_back(mul(neg[q - 1].mantissa, fac), neg[q - 1].exp2);
        }
    }

    const ScaledClass& at(int p) const { return p >= 0 ? pos[p] : neg[-p]; }
};

}  // namespace detail

// J_n = sum over lattice points a >= 0 with sum_i a_i c1_degrees[i] = n of
// prod_j factor(D_j, <D_j, a>)^{mult_j}. The degree-1 H^0 part is checked at
// runtime: nonzero means a mirror-map correction is required (applied for
// r = 1 via the e^{-c0 t} convolution); for the shipped data it vanishes.
inline CoeffStream toric_stream(const ToricData& data, const RingPtr& ring, int M,
                                long lattice_cap = 50'000'000L) {
    const int G = static_cast<int>(data.c1_degrees.size());
    for (int i = 0; i < G; ++i)
        if (data.c1_degrees[i] < 1)
            throw std::invalid_argument("toric_stream: non-Fano c1 degree");
    // validate sum_j mult_j D_j = c1 and the per-generator degree bookkeeping
    {
        ClassValue sum(ring);
        for (const auto& [D, mult] : data.divisors) sum = add(sum, scal(mult, D));
        ClassValue diff = sub(sum, c1_class(ring));
        if (max_abs_coord(diff) > 1e-12)
            throw std::invalid_argument("toric_stream: divisors do not sum to c1");
        for (int i = 0; i < G; ++i) {
            long deg = 0;
            for (size_t j = 0; j < data.divisors.size(); ++j)
                deg += static_cast<long>(data.divisors[j].second) * data.mori_pairings[j][i];
            if (deg != data.c1_degrees[i])
                throw std::invalid_argument("toric_stream: c1 degree mismatch on a generator");
        }
    }
    int r = 0;
    for (int deg : data.c1_degrees) r = std::gcd(r, deg);

    CoeffStream s;
    s.ring = ring;
    s.r = r;
    s.beta = default_beta(ring);
    s.provenance = "toric_stream(" + data.name + ",M=" + std::to_string(M) + ")";

    // pairing bounds over all admissible lattice points of degree <= r*M
    const long nmax = static_cast<long>(r) * M;
    std::vector<long> amax(G);
    for (int i = 0; i < G; ++i) amax[i] = nmax / data.c1_degrees[i];
    std::vector<detail::ToricFactorTable> tables;
    tables.reserve(data.divisors.size());
    for (size_t j = 0; j < data.divisors.size(); ++j) {
        long ppos = 0, pneg = 0;
        for (int i = 0; i < G; ++i) {
            const long contrib = data.mori_pairings[j][i] * amax[i];
            if (contrib > 0) ppos += contrib;
            else pneg -= contrib;
        }
        tables.emplace_back(data.divisors[j].first, static_cast<int>(ppos),
                            static_cast<int>(pneg));
    }

    // per-degree accumulation over lattice points, exponent-aligned
    std::vector<std::vector<std::pair<ClassValue, std::int64_t>>> bydeg(nmax / r + 1);
    std::vector<int> a(G, 0);
    long visited = 0;
    // iterate all a with degree <= nmax by odometer
    for (;;) {
        long deg = 0;
        for (int i = 0; i < G; ++i) deg += static_cast<long>(a[i]) * data.c1_degrees[i];
        if (deg <= nmax && deg % r == 0) {
            if (++visited > lattice_cap)
                throw std::length_error("toric_stream: lattice enumeration cap exceeded");
            ScaledClass term(unit_class(ring));
            for (size_t j = 0; j < data.divisors.size(); ++j) {
                long p = 0;
                for (int i = 0; i < G; ++i)
                    p += static_cast<long>(data.mori_pairings[j][i]) * a[i];
                const auto& f = tables[j].at(static_cast<int>(p));
                for (int rep = 0; rep < data.divisors[j].second; ++rep)
                    term = scaled_mul(term, f);
            }
            if (max_abs_coord(term.mantissa) != 0.0)
                bydeg[deg / r].emplace_back(term.mantissa, term.exp2);
        }
        // odometer increment with degree pruning
        int pos = 0;
        while (pos < G) {
            ++a[pos];
            long d2 = 0;
            for (int i = 0; i < G; ++i) d2 += static_cast<long>(a[i]) * data.c1_degrees[i];
            if (d2 <= nmax) break;
            a[pos] = 0;
            ++pos;
        }
        if (pos == G) break;
    }

    s.coeffs.reserve(M + 1);
    for (int m = 0; m <= M; ++m) {
        auto& pieces = bydeg[m];
        std::int64_t E = pieces.empty() ? 0 : pieces[0].second;
        for (const auto& p : pieces) E = std::max(E, p.second);
        ClassValue acc(ring);
        for (const auto& p : pieces) {
            const double sc = std::ldexp(1.0, static_cast<int>(p.second - E));
            for (int i = 0; i < ring->n(); ++i) acc.c[i] += sc * p.first.c[i];
        }
        s.coeffs.emplace_back(std::move(acc), E);
    }

    // mirror map: trivial iff the degree-1 H^0 part vanishes
    if (r == 1 && M >= 1) {
        const double h0 = std::abs(point_functional(s.coeffs[1].value()));
        const double scale = std::max(max_abs_coord(s.coeffs[1].value()), 1.0);
        if (h0 > 1e-12 * scale) {
            const double c0 = point_functional(s.coeffs[1].value()).real();
            s.coeffs = detail::exp_correction(s.coeffs, c0, ring);
            s.provenance += "+exp_correction(c0=" + std::to_string(c0) + ")";
        }
    }
    return s;
}

// coefficients J_{rm} * (rm + beta); beta decremented by 1 in H^0.
inline CoeffStream derivative_stream(const CoeffStream& s) {
    CoeffStream out;
    out.ring = s.ring;
    out.r = s.r;
    out.beta = s.beta;
    out.beta.c[0] -= 1.0;
    out.provenance = "derivative_stream(" + s.provenance + ")";
    out.coeffs.reserve(s.coeffs.size());
    for (int m = 0; m <= s.M(); ++m) {
        ClassValue fac = s.beta;
        fac.c[0] += static_cast<double>(s.r) * m;
        out.coeffs.emplace_back(mul(s.coeffs[m].mantissa, fac), s.coeffs[m].exp2);
    }
    return out;
}

}  // namespace jfan
