#pragma once

#include <vector>

#include "stokeslab/semigroup.hpp"

namespace stokeslab {

enum class PowerRoute { Spectral, Dunford };

struct DunfordOptions {
    int n_quad = 2000;  // trapezoid nodes on the closed contour
};

// (shift + A')^alpha f via the principal branch.  shift = 0 requires f to be
// kernel-orthogonal (A' route); shift > 0 works on the full space.  The
// Dunford route evaluates the contour integral
//   (2 pi i)^{-1} oint z^alpha (z - shift - A)^{-1} f dz
// with trapezoid quadrature on an ellipse enclosing [shift + lambda_1/2,
// shift + 2 lambda_max], using only direct resolvent solves.
Field power_apply(const StokesBasis& basis, Complex alpha, const Field& f,
                  PowerRoute route = PowerRoute::Spectral, double shift = 0.0,
                  const DunfordOptions& opts = {});

// Shared-contour evaluation for several exponents: one resolvent solve per
// quadrature node serves every alpha.
std::vector<Field> power_apply_many(const StokesBasis& basis, const std::vector<Complex>& alphas,
                                    const Field& f, double shift = 0.0, const DunfordOptions& opts = {});

struct GrowthFit {
    double K = 0.0;      // prefactor of the bound norm <= K e^{theta |s|}
    double theta = 0.0;  // fitted growth rate
    double residual = 0.0;
    std::vector<double> s_values;
    std::vector<double> norms;
};

// Estimated L^p -> L^p operator norms of (A')^{is} by random probes plus
// ascent refinement, with a least-squares exponential fit across s.
GrowthFit imaginary_power_growth(const StokesBasis& basis, double p, const std::vector<double>& s_list,
                                 int n_probes, unsigned seed);

// Empirical constant in ||u||_q <= C ||(A')^alpha u||_p under the scaling
// relation 1/q = 1/p - 2 alpha / d  (d = 3), resp. 1/q = 1/p - alpha (d = 2).
double sobolev_embedding_constant(const StokesBasis& basis, double alpha, double p, double q, int n_probes,
                                  unsigned seed);

// Random kernel-orthogonal probe with smooth spectral decay (shared by the
// probe-based estimators; exposed for tests).
Field random_probe(const StokesBasis& basis, unsigned seed, double decay = 1.0);

}  // namespace stokeslab
