#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stokeslab/field.hpp"

namespace stokeslab {

struct ModeIndex {
    int m = 0;
    int k = 0;
};

// Dense per-mode operators for a single Fourier mode (m, k).
struct ModeOperators {
    ModeIndex mode;
    Eigen::MatrixXd D1, D2;   // radial differentiation (shared with the grid)
    Eigen::MatrixXd Lm;       // scalar mode Laplacian -(d2/dr2 + (1/r)d/dr - m^2/r^2 - kt^2)
    Eigen::MatrixXcd Lvec;    // vector blocks of -Delta acting on (u_r, u_theta[, u_z])
    std::vector<int> bc_rows; // rows replaced by boundary conditions in tau solves
};

ModeOperators scalar_mode_laplacian(const SpectralGrid& grid, ModeIndex mode);

// Replace the boundary rows of the ncomp*Nr mode system with the Navier-type
// constraint rows: u.n = 0 and the tangential vorticity traces.  Interior
// rows are untouched.
void apply_navier_bc(const SpectralGrid& grid, ModeIndex mode, Eigen::MatrixXcd& A);
// The constraint rows themselves (one per bc_rows entry, same order).
Eigen::MatrixXcd navier_constraint_rows(const SpectralGrid& grid, ModeIndex mode);
std::vector<int> navier_bc_row_indices(const SpectralGrid& grid);

// curl: scalar vorticity in 2D, vector field in 3D.
ModalField vector_curl(const ModalField& u);
// div u as a scalar modal field.
ModalField vector_divergence(const ModalField& u);
// grad of a scalar modal field.
ModalField gradient(const ModalField& p);
// Divergence-free field from a stream function (2D): u = grad^perp psi.
ModalField perp_gradient(const ModalField& psi);

}  // namespace stokeslab
