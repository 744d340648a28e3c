#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stokeslab/spectral_ops.hpp"

namespace stokeslab {

struct EigenResiduals {
    double eig = 0.0;  // ||-Delta_h z - lambda z|| / ||z||
    double div = 0.0;  // ||div z|| / ||z||
    double bc = 0.0;   // u.n and tangential-vorticity traces, relative
};

// One validated eigenpair of the Stokes operator, living in a single
// Fourier mode.
struct EigenPair {
    double lambda = 0.0;
    ModeIndex mode;
    Eigen::MatrixXcd coeffs;  // ncomp x Nr radial profiles of the velocity
    EigenResiduals residuals;
    double pressure_dev = 0.0;  // 3D multiplier deviation from constancy
};

// Kernel coefficients alpha_j and eigen coefficients beta_k of a field.
struct SpectralCoeffs {
    Eigen::VectorXcd alpha;
    Eigen::VectorXcd beta;
    double recon_error = 0.0;
};

struct BuildOptions {
    double residual_tol = 1e-8;
    double pressure_tol = 1e-7;
    double kernel_clamp = 1e-10;  // eigenvalues below this are kernel modes
    double not_in_span_tol = 0.1;
    int workers = 0;  // 0 = hardware concurrency
};

// The discrete Stokes operator with Navier-type boundary conditions:
// flux-normalized kernel fields (the discrete grad q_j) plus an
// L2-orthonormal eigenbasis sorted by ascending eigenvalue.
class StokesBasis {
public:
    StokesBasis() = default;
    StokesBasis(GridPtr grid, std::vector<EigenPair> kernel, std::vector<EigenPair> eigs, BuildOptions opts);

    const SpectralGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int J() const { return static_cast<int>(kernel_.size()); }
    int size() const { return static_cast<int>(eigs_.size()); }
    const std::vector<EigenPair>& kernel() const { return kernel_; }
    const std::vector<EigenPair>& eigs() const { return eigs_; }
    double lambda1() const { return lambda1_; }
    double lambda_max() const { return eigs_.back().lambda; }
    const BuildOptions& options() const { return opts_; }

    Field kernel_field(int j) const;  // 0-based
    Field eigen_field(int k) const;   // 0-based
    Field make_field(const EigenPair& p) const;

    SpectralCoeffs expand(const Field& f, bool check_span = true) const;
    Field synthesize(const SpectralCoeffs& c) const;

    // Worst deviation of the discrete Gram matrix from the identity
    // (eigenfields) resp. from mutual orthogonality against the kernel.
    double gram_error() const { return gram_error_; }
    const Eigen::MatrixXcd& kernel_gram() const { return kernel_gram_; }

private:
    GridPtr grid_;
    std::vector<EigenPair> kernel_;
    std::vector<EigenPair> eigs_;
    double lambda1_ = 0.0;
    double gram_error_ = 0.0;
    Eigen::MatrixXcd kernel_gram_;
    BuildOptions opts_;
};

StokesBasis build_basis(GridPtr grid, int n_modes, const BuildOptions& opts = {});

// Versioned JSON bundle for reuse across experiments.
void save_basis(const StokesBasis& basis, const std::string& path);
StokesBasis load_basis(const std::string& path);

// Mode-local inner product helper: profiles are ncomp x Nr blocks in one
// Fourier mode; the cross-mode products vanish identically.
Complex mode_inner(const SpectralGrid& g, const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

}  // namespace stokeslab
