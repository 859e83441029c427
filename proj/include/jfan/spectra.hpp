// spectra.hpp: spectral predictions of the growth scale T for the shipped
// manifolds: closed forms for P^N and products, the hypersurface scaling
// rule, and a small dense eigensolver for multiplication operators.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ring.hpp"
#include "streams.hpp"

namespace jfan {

struct SpectrumReport {
    std::vector<cplx> eigenvalues;
    double spectral_radius = 0.0;
    std::optional<cplx> rightmost;   // present only when simple
    std::vector<double> theta_candidates;  // args of max-modulus eigenvalues
};

namespace detail {

inline SpectrumReport make_report(std::vector<cplx> eigs) {
    SpectrumReport rep;
    rep.eigenvalues = std::move(eigs);
    for (const cplx& z : rep.eigenvalues)
        rep.spectral_radius = std::max(rep.spectral_radius, std::abs(z));
    double remax = -1e300;
    for (const cplx& z : rep.eigenvalues) remax = std::max(remax, z.real());
    const double tol = 1e-9 * (1.0 + rep.spectral_radius);
    int atmax = 0;
    cplx right(0);
    for (const cplx& z : rep.eigenvalues)
        if (z.real() >= remax - tol) {
            ++atmax;
            right = z;
        }
    if (atmax == 1) rep.rightmost = right;
    for (const cplx& z : rep.eigenvalues)
        if (std::abs(z) >= rep.spectral_radius - tol) {
            double a = std::arg(z);
            if (a < 0) a += 2.0 * M_PI;
            rep.theta_candidates.push_back(a);
        }
    std::sort(rep.theta_candidates.begin(), rep.theta_candidates.end());
    rep.theta_candidates.erase(
        std::unique(rep.theta_candidates.begin(), rep.theta_candidates.end(),
                    [](double a, double b) { return std::abs(a - b) < 1e-12; }),
        rep.theta_candidates.end());
    return rep;
}

// Monic characteristic polynomial coefficients c[0..n] (c[n] = 1) of a
// row-major n x n matrix, by the Faddeev-LeVerrier recurrence.
inline std::vector<cplx> char_poly(const std::vector<cplx>& A, int n) {
    std::vector<cplx> c(n + 1, cplx(0));
    c[n] = 1.0;
    std::vector<cplx> M(static_cast<size_t>(n) * n, cplx(0));
    for (int i = 0; i < n; ++i) M[static_cast<size_t>(i) * n + i] = 1.0;
    std::vector<cplx> AM(static_cast<size_t>(n) * n);
    for (int k = 1; k <= n; ++k) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx s(0);
                for (int l = 0; l < n; ++l)
                    s += A[static_cast<size_t>(i) * n + l] * M[static_cast<size_t>(l) * n + j];
                AM[static_cast<size_t>(i) * n + j] = s;
            }
        cplx tr(0);
        for (int i = 0; i < n; ++i) tr += AM[static_cast<size_t>(i) * n + i];
        c[n - k] = -tr / static_cast<double>(k);
        M = AM;
        for (int i = 0; i < n; ++i) M[static_cast<size_t>(i) * n + i] += c[n - k];
    }
    return c;
}

inline cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx v(0);
    for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) v = v * z + c[j];
    return v;
}

// All roots of a monic polynomial by Durand-Kerner, Newton-polished.
inline std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    double scale = 0;
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::pow(std::abs(c[j]), 1.0 / (n - j)));
    scale = std::max(scale, 1.0);
    std::vector<cplx> z(n);
    const cplx seed(0.4, 0.9);
    cplx p = seed;
    for (int i = 0; i < n; ++i) {
        z[i] = scale * p;
        p *= seed;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            cplx denom(1);
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            const cplx step = horner(c, z[i]) / denom;
            z[i] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (worst < 1e-14) break;
        if (iter == 499) throw std::runtime_error("poly_roots: no convergence");
    }
    std::vector<cplx> dc(n);
    for (int j = 1; j <= n; ++j) dc[j - 1] = static_cast<double>(j) * c[j];
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k) {
            const cplx d = horner(dc, z[i]);
            if (std::abs(d) == 0.0) break;
            z[i] -= horner(c, z[i]) / d;
        }
    return z;
}

// For a real matrix the spectrum is conjugation-symmetric; snap nearly-real
// roots and average conjugate partners so the output is exactly symmetric.
inline void symmetrize_conjugates(std::vector<cplx>& z) {
    std::vector<cplx> out;
    std::vector<bool> used(z.size(), false);
    for (size_t i = 0; i < z.size(); ++i) {
        if (used[i]) continue;
        const double tol = 1e-8 * (1.0 + std::abs(z[i]));
        if (std::abs(z[i].imag()) <= tol) {
            out.emplace_back(z[i].real(), 0.0);
            used[i] = true;
            continue;
        }
        size_t best = i;
        double bd = 1e300;
        for (size_t j = 0; j < z.size(); ++j) {
            if (used[j] || j == i) continue;
            const double d = std::abs(std::conj(z[j]) - z[i]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (best == i || bd > tol * 100)
            throw std::runtime_error("symmetrize_conjugates: unpaired complex root");
        const cplx m = 0.5 * (z[i] + std::conj(z[best]));
        out.push_back(m);
        out.push_back(std::conj(m));
        used[i] = used[best] = true;
    }
    z = std::move(out);
}

// Solve (A - mu I) x = b by complex LU with partial pivoting; the matrix is
// near-singular by design (inverse iteration), tiny pivots are kept.
inline std::vector<cplx> shifted_solve(std::vector<cplx> A, int n, cplx mu,
                                       std::vector<cplx> b) {
    for (int i = 0; i < n; ++i) A[static_cast<size_t>(i) * n + i] -= mu;
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A[static_cast<size_t>(i) * n + k]) >
                std::abs(A[static_cast<size_t>(p) * n + k]))
                p = i;
        piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j)
                std::swap(A[static_cast<size_t>(k) * n + j], A[static_cast<size_t>(p) * n + j]);
        cplx d = A[static_cast<size_t>(k) * n + k];
        if (std::abs(d) < 1e-300) {
            d = cplx(1e-300, 0);
            A[static_cast<size_t>(k) * n + k] = d;
        }
        for (int i = k + 1; i < n; ++i) {
            const cplx f = A[static_cast<size_t>(i) * n + k] / d;
            A[static_cast<size_t>(i) * n + k] = f;
            for (int j = k + 1; j < n; ++j)
                A[static_cast<size_t>(i) * n + j] -= f * A[static_cast<size_t>(k) * n + j];
        }
    }
    for (int k = 0; k < n; ++k) {
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
        for (int i = k + 1; i < n; ++i) b[i] -= A[static_cast<size_t>(i) * n + k] * b[k];
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = k + 1; j < n; ++j) b[k] -= A[static_cast<size_t>(k) * n + j] * b[j];
        b[k] /= A[static_cast<size_t>(k) * n + k];
    }
    return b;
}

}  // namespace detail

// Eigenvalues of the multiplication operator mul(a, .), with an eigenvector
// residual check ||A v - lambda v||_2 <= 1e-9 (1 + |lambda|) per eigenvalue.
inline std::vector<cplx> class_mult_spectrum(const ClassValue& a) {
    const int n = a.ring->n();
    const std::vector<cplx> A = mult_matrix(a);
    const std::vector<cplx> c = detail::char_poly(A, n);
    std::vector<cplx> z = detail::poly_roots(c);
    bool realmat = true;
    for (const cplx& e : A)
        if (e.imag() != 0.0) realmat = false;
    if (realmat) detail::symmetrize_conjugates(z);
    for (const cplx& lam : z) {
        const cplx mu = lam + cplx(1e-10, 1e-10) * (1.0 + std::abs(lam));
        std::vector<cplx> v(n, cplx(1));
        for (int it = 0; it < 3; ++it) {
            v = detail::shifted_solve(A, n, mu, v);
            double nrm = 0;
            for (const cplx& e : v) nrm += std::norm(e);
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) throw std::runtime_error("class_mult_spectrum: zero iterate");
            for (cplx& e : v) e /= nrm;
        }
        double resid = 0;
        for (int i = 0; i < n; ++i) {
            cplx r = -lam * v[i];
            for (int j = 0; j < n; ++j) r += A[static_cast<size_t>(i) * n + j] * v[j];
            resid += std::norm(r);
        }
        if (std::sqrt(resid) > 1e-9 * (1.0 + std::abs(lam)))
            throw std::runtime_error("class_mult_spectrum: eigenpair residual above 1e-9");
    }
    std::sort(z.begin(), z.end(), [](const cplx& p, const cplx& q) {
        if (p.real() != q.real()) return p.real() < q.real();
        return p.imag() < q.imag();
    });
    return z;
}

// Eigenvalues (N+1) xi^k on the circle of radius N+1; rightmost = N+1.
inline SpectrumReport pn_spectrum(int N) {
    if (N < 1) throw std::invalid_argument("pn_spectrum: N >= 1");
    std::vector<cplx> eigs;
    const double R = N + 1.0;
    for (int k = 0; k <= N; ++k) {
        const double a = 2.0 * M_PI * k / (N + 1.0);
        eigs.emplace_back(R * std::cos(a), R * std::sin(a));
    }
    eigs[0] = cplx(R, 0.0);
    return detail::make_report(std::move(eigs));
}

inline double product_T(double Tx, double Ty) {
    if (Tx <= 0 || Ty <= 0) throw std::domain_error("product_T: scales must be positive");
    return Tx + Ty;
}

// c0 = d! * (H^0 of J^X_{r_X}) when r_Z = r_X - d = 1; 0 when r_Z > 1.
inline double c0_correction(const CoeffStream& sx, int d) {
    const int rX = sx.ring->fano_index;
    if (rX - d > 1) return 0.0;
    if (rX - d != 1) throw std::invalid_argument("c0_correction: need 0 < d < r_X");
    if (sx.M() < 1) throw std::length_error("c0_correction: stream needs coefficient m=1");
    return std::tgamma(d + 1.0) * point_functional(sx.coeffs[1].value()).real();
}

// Positive real solution of ((T_Z + c0)/r_Z)^{r_Z} = d^d (T_X/r_X)^{r_X}.
inline double hypersurface_T(double Tx, int rX, int d, double c0) {
    if (d <= 0 || d >= rX) throw std::invalid_argument("hypersurface_T: need 0 < d < rX");
    if (Tx <= 0) throw std::domain_error("hypersurface_T: Tx must be positive");
    const int rZ = rX - d;
    const double rhs = std::pow(static_cast<double>(d), d) * std::pow(Tx / rX, rX);
    return rZ * std::pow(rhs, 1.0 / rZ) - c0;
}

// The 8 eigenvalues of multiplication by c1 = x1 + 2 x2 in the quantum ring.
inline SpectrumReport x3_spectrum() {
    const RingPtr ring = x3_quantum_ring();
    return detail::make_report(class_mult_spectrum(c1_class(ring)));
}

// Externally computed reference value for the spectral radius of the toric
// bundle example; used to gate everything downstream of its presentation.
constexpr double X3_REFERENCE_RADIUS = 26.9877;

// Growth scale T for the toric bundle example. Aborts when the computed
// spectrum disagrees with the reference radius or the dominant eigenvalue is
// not negative real, since every downstream number would then be wrong.
inline double x3_growth_scale() {
    const SpectrumReport rep = x3_spectrum();
    bool dominant_neg_real = false;
    for (const cplx& z : rep.eigenvalues)
        if (std::abs(z) >= rep.spectral_radius * (1.0 - 1e-9) && z.real() < 0 &&
            std::abs(z.imag()) <= 1e-9)
            dominant_neg_real = true;
    if (std::abs(rep.spectral_radius - X3_REFERENCE_RADIUS) > 1e-3 || !dominant_neg_real)
        throw std::runtime_error(
            "x3_growth_scale: spectrum disagrees with the reference radius 26.9877; "
            "the quantum-ring presentation is wrong, aborting");
    return rep.spectral_radius;
}

}  // namespace jfan
