// special_functions.hpp: complex log-Gamma, polygamma, integer zeta, and the
// constants feeding the Gamma-class calculus.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace jfan {

inline constexpr double EULER_GAMMA = 0.57721566490153286060651209008;

namespace detail {

using cplx = std::complex<double>;

// B_{2n} for n = 1..15; enough for the Stirling/polygamma tails used here.
inline constexpr std::array<double, 15> BERNOULLI_2N = {
    1.0 / 6,       -1.0 / 30,      1.0 / 42,       -1.0 / 30,
    5.0 / 66,      -691.0 / 2730,  7.0 / 6,        -3617.0 / 510,
    43867.0 / 798, -174611.0 / 330, 854513.0 / 138, -236364091.0 / 2730,
    8553103.0 / 6, -23749461029.0 / 870, 8615841276005.0 / 14322};

inline bool near_nonpositive_integer(cplx z) {
    if (z.real() > 0.25) return false;
    const double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) < 1e-12 && std::abs(z.imag()) < 1e-12;
}

}  // namespace detail

// Principal-branch log Gamma via upward recurrence into |z| >= 16 followed by
// the Stirling series. For Re z < 0 the reflection formula is applied; the
// recurrence consistency test tolerates the 2*pi*i ambiguity this leaves.
inline std::complex<double> log_gamma(std::complex<double> z) {
    using detail::BERNOULLI_2N;
    using cplx = std::complex<double>;
    if (detail::near_nonpositive_integer(z))
        throw std::domain_error("log_gamma: pole at nonpositive integer");
    if (z.real() < 0.5) {
        // reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        const cplx s = std::sin(M_PI * z);
        if (s == 0.0) throw std::domain_error("log_gamma: pole");
        return std::log(M_PI) - std::log(s) - log_gamma(1.0 - z);
    }
    cplx shift = 0.0;
    while (std::abs(z) < 16.0) {
        shift -= std::log(z);
        z += 1.0;
    }
    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    cplx tail = 0.0;
    cplx p = zi;
    for (size_t n = 1; n <= 8; ++n) {
        tail += BERNOULLI_2N[n - 1] / (2.0 * n * (2.0 * n - 1.0)) * p;
        p *= zi2;
    }
    const cplx core = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * M_PI) + tail;
    return core + shift;
}

// psi^{(n)}(z) by upward recurrence to |z| >= 24 (and into Re z >= 1) then
// the asymptotic series. Contract: <= 1e-11 relative for n <= 16, |z| <= 1e4.
inline std::complex<double> polygamma(int n, std::complex<double> z) {
    using detail::BERNOULLI_2N;
    using cplx = std::complex<double>;
    if (n < 0) throw std::invalid_argument("polygamma: order must be >= 0");
    if (detail::near_nonpositive_integer(z))
        throw std::domain_error("polygamma: pole at nonpositive integer");
    double nfact = 1.0;
    for (int k = 2; k <= n; ++k) nfact *= k;

    // psi^{(n)}(z) = psi^{(n)}(z+1) - (-1)^n n! z^{-(n+1)}; walk upward and
    // collect the correction sum.
    cplx shift_sum = 0.0;
    while (z.real() < 1.0 || std::abs(z) < 24.0) {
        shift_sum += std::pow(z, -(n + 1));
        z += 1.0;
    }

    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    cplx r;
    if (n == 0) {
        r = std::log(z) - 0.5 * zi;
        cplx p = zi2;
        for (size_t k = 1; k <= 10; ++k) {
            r -= BERNOULLI_2N[k - 1] / (2.0 * k) * p;
            p *= zi2;
        }
    } else {
        // psi^{(n)}(z) ~ (-1)^{n-1}[(n-1)!/z^n + n!/(2 z^{n+1})
        //   + sum_k B_{2k} (2k+n-1)!/(2k)! z^{-(2k+n)}]
        r = (nfact / n) * std::pow(z, -n) + 0.5 * nfact * std::pow(z, -(n + 1));
        cplx p = std::pow(z, -(n + 2));
        for (size_t k = 1; k <= 10; ++k) {
            double f = 1.0;   // (2k+n-1)! / (2k)!
            for (int q = 2 * static_cast<int>(k) + n - 1; q > 2 * static_cast<int>(k); --q)
                f *= q;
            r += BERNOULLI_2N[k - 1] * f * p;
            p *= zi2;
        }
        if (n % 2 == 0) r = -r;
    }
    const double minus1_n = (n % 2 == 0) ? 1.0 : -1.0;
    return r - minus1_n * nfact * shift_sum;
}

// zeta(k) for integer k >= 2: direct series plus Euler-Maclaurin tail.
inline double zeta_int(int k) {
    if (k < 2) throw std::invalid_argument("zeta_int: k >= 2 required");
    const int N = 64;
    double s = 0;
    for (int n = N - 1; n >= 1; --n) s += std::pow(static_cast<double>(n), -k);
    // tail: int_N^inf x^{-k} dx + N^{-k}/2 + corrections
    const double Nd = N;
    double t = std::pow(Nd, 1.0 - k) / (k - 1.0) + 0.5 * std::pow(Nd, -k);
    double deriv = k * std::pow(Nd, -k - 1.0);                  // -f'(N) with f = x^{-k}
    t += deriv / 12.0;
    double deriv3 = k * (k + 1.0) * (k + 2.0) * std::pow(Nd, -k - 3.0);
    t -= deriv3 / 720.0;
    double deriv5 = k * (k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0) * std::pow(Nd, -k - 5.0);
    t += deriv5 / 30240.0;
    return s + t;
}

// Cached psi^{(0..K)}(z) at one anchor; feeds the nilpotent Taylor expansion
// of Gamma around a class's H^0 part.
struct PolygammaTable {
    std::complex<double> z;
    std::vector<std::complex<double>> values;   // values[j] = psi^{(j)}(z)

    PolygammaTable(std::complex<double> anchor, int K) : z(anchor), values(K + 1) {
        for (int j = 0; j <= K; ++j) values[j] = polygamma(j, anchor);
    }
};

}  // namespace jfan
