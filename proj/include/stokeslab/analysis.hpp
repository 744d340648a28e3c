#pragma once

#include <string>
#include <vector>

#include "stokeslab/semigroup.hpp"

namespace stokeslab {

// Quadrature-weighted L^p norm of the pointwise vector magnitude; p = inf
// (any p > 1e12) is the nodal maximum.  Evaluation happens on an
// oversampled nodal tensor grid.
double lp_norm(const Field& f, double p, int oversample = 2);

// -Delta f per mode (the operator applied coefficient-wise, no BC rows).
Field apply_vector_laplacian(const Field& f);

// Sobolev-type graph norms: W^{1,p} via ||u||_p + ||curl u||_p, W^{2,p} via
// ||u||_p + ||Delta u||_p.
double w1p_norm(const Field& f, double p);
double w2p_norm(const Field& f, double p);

// Spectral negative norm at p = 2: (sum |beta_k|^2/lambda_k)^{1/2} on the
// kernel-orthogonal part plus the L^2 norm of the kernel part.
double negative_norm(const StokesBasis& basis, const Field& f);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
};

// Localized bump datum: directional Gaussian bump G(x) e_theta with
// wrapped-Gaussian angular (and axial) factors, band-limited to the grid
// and projected onto the zero-flux solenoidal span so that expansion is
// exact.  width sets the radial standard deviation; the angular/axial
// widths scale with it.
Field bump_datum(const StokesBasis& basis, double width);

// Least-squares fit of log(values) against log(times) (exposed: the trivial
// power-law path of the smoothing fit).
DecayFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values);

// Fits log ||T(t) u0_tilde||_q e^{mu t} / ||u0_tilde||_p against log t with
// mu = lambda_1/2; the kernel part of u0 is removed first.
DecayFit fit_smoothing_exponent(const StokesBasis& basis, const Field& u0, double p, double q, double t_min,
                                double t_max, int n_samples);

struct MaxRegResult {
    double max_ratio = 0.0;
    std::vector<double> ratios;  // one per trial; skipped trials omitted
    int skipped = 0;
};

// Ensemble estimate of the maximal L^q(0,T;L^p) regularity constant:
// R = (||d_t u||^q + ||Delta u||^q)^{1/q} / ||f||, with d_t u = f - A u
// exactly per mode.
MaxRegResult maximal_regularity_constant(const StokesBasis& basis, double p, double q, double T_horizon,
                                         int n_trials, unsigned seed, int n_steps = 64);

struct SweepRow {
    double angle = 0.0;
    double abs_lambda = 0.0;
    std::string quantity;
    double value = 0.0;
};

// Resolvent sweep over rays lambda = |lambda| e^{i angle}: reports
// |lambda| ||u||_p / ||f||_p, sqrt|lambda| ||curl u||_p / ||f||_p and the
// W^{2,p} quantity maximized over random probes.
std::vector<SweepRow> resolvent_sweep(const StokesBasis& basis, const std::vector<double>& angles,
                                      const std::vector<double>& magnitudes, double p, int n_probes,
                                      unsigned seed);

}  // namespace stokeslab
