#pragma once

#include <vector>

#include "stokeslab/stokes_basis.hpp"

namespace stokeslab {

// Evolution states as spectral coefficients: alpha_j is constant in t
// (kernel conservation), beta_k(t) decays mode by mode.
struct EvolutionResult {
    std::vector<double> times;
    std::vector<SpectralCoeffs> states;
};

// u(t) = sum_j alpha_j K_j + sum_k beta_k e^{-lambda_k t} z_k, exact per
// mode -- no time-stepping error.
EvolutionResult evolve_homogeneous(const StokesBasis& basis, const Field& u0, std::vector<double> times);

// Inhomogeneous problem with u(0) = 0: the forcing is sampled on its own
// time grid and interpolated piecewise-linearly; each step uses the
// closed-form Duhamel increment.  Output times must be nodes of the forcing
// grid (the forcing grid is the evolution grid or finer).
EvolutionResult evolve_inhomogeneous(const StokesBasis& basis, const std::vector<double>& forcing_times,
                                     const std::vector<SpectralCoeffs>& forcing, std::vector<double> times);

enum class ResolventRoute { Spectral, Direct };

// u = (lambda + A)^{-1} f.  The spectral route divides coefficients by
// (lambda + lambda_k); the direct route solves the dense per-mode systems
// (lambda - Delta) u = f with the Navier constraint rows and never touches
// the eigendecomposition.
Field resolvent_apply(const StokesBasis& basis, Complex lambda, const Field& f,
                      ResolventRoute route = ResolventRoute::Spectral);

// phi-functions of the exponential integrator (exposed for tests):
// phi1(x) = (1 - e^{-x})/x, phi2(x) = (1 - (1+x)e^{-x})/x^2.
double phi1(double x);
double phi2(double x);

}  // namespace stokeslab
