// Generates the projective-space coefficient stream for P^3, fits the
// growth scaling over the second half of the window, and compares the
// fitted amplitude with the closed-form Gamma-class prediction.

#include <cstdio>

#include <jfan/jfan.hpp>

int main() {
    using namespace jfan;

    const int N = 3;
    const int M = 400;
    const CoeffStream s = projective_stream(N, M);

    FitOptions opt;
    opt.component = 0;  // point functional
    opt.aitken_passes = 1;
    const AmlScaling sc = fit_scaling(s, M / 2, M, opt);

    std::printf("P%d stream, M = %d, window [%d, %d]\n", N, M, M / 2, M);
    std::printf("  T     = %.12f   (exact %d)\n", sc.T, N + 1);
    std::printf("  theta = %.3e          (exact 0)\n", sc.theta);

    // prediction: A = (N+1)^{1/2} (2 pi)^{-N/2} Gamma(1+delta)^{N+1}
    const RingPtr ring = s.ring;
    ClassValue delta(ring);
    delta.c[1] = 1.0;
    const ClassValue ghat = gamma_hat(std::vector<ClassValue>(N + 1, delta), ring);
    const double scale0 =
        std::sqrt(static_cast<double>(N + 1)) * std::pow(2.0 * M_PI, -0.5 * N);
    const ClassValue predicted = scal(scale0, ghat);

    std::printf("  A fitted    = (");
    for (int k = 0; k < ring->n(); ++k)
        std::printf("%s%.9f", k ? ", " : "", sc.A.c[k].real());
    std::printf(")\n  A predicted = (");
    for (int k = 0; k < ring->n(); ++k)
        std::printf("%s%.9f", k ? ", " : "", predicted.c[k].real());
    std::printf(")\n");

    const double rel = l2_norm(sub(sc.A, predicted)) / l2_norm(predicted);
    std::printf("  relative difference = %.3e\n", rel);
    return rel < 1e-3 ? 0 : 1;
}
