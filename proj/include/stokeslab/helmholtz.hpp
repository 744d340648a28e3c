#pragma once

#include "stokeslab/stokes_basis.hpp"

namespace stokeslab {

// Weak Neumann problem: find the scalar potential pi with
//   div(grad pi - f) = 0 in Omega,  (grad pi - f) . n = 0 on the boundary,
// gauge-fixed to zero mean.  Solved per Fourier mode by dense LU; the (0,0)
// mode carries the constant nullspace and is deflated by a bordered system.
Field weak_neumann(const Field& f);

// Helmholtz projection P f = f - grad pi onto divergence-free tangent fields.
Field project(const Field& f);

// Flux splitting u0 = w0 + u0_tilde: w0 is the kernel (steady) part
// reconstructed from the cut fluxes, u0_tilde has vanishing fluxes.
struct FluxSplit {
    Field w0;
    Field u0_tilde;
    Eigen::VectorXcd fluxes;  // <u0 . n, 1>_{Sigma_j}
};
FluxSplit split_flux(const StokesBasis& basis, const Field& u0);

}  // namespace stokeslab
