#include "stokeslab/stokes_basis.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>

#include "parallel.hpp"
#include <json.hpp>

namespace stokeslab {

namespace {

const Complex kI{0.0, 1.0};

struct RealEig {
    double lambda;
    Eigen::VectorXd vec;
};

// Real nonsymmetric eigenproblem A x = lambda x; returns real eigenpairs
// sorted ascending.
std::vector<RealEig> dense_eig(Eigen::MatrixXd A) {
    const int n = static_cast<int>(A.rows());
    std::vector<double> wr(n), wi(n);
    Eigen::MatrixXd vr(n, n);
    int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, A.data(), n, wr.data(), wi.data(), nullptr, n,
                             vr.data(), n);
    if (info != 0) throw EigensolveFailure("dgeev failed, info=" + std::to_string(info));
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(wr[i]) + std::abs(wi[i]));
    std::vector<RealEig> out;
    for (int i = 0; i < n; ++i) {
        if (std::abs(wi[i]) > 1e-9 * (1.0 + scale)) continue;  // complex pair (unresolved/spurious)
        out.push_back({wr[i], vr.col(i)});
    }
    std::sort(out.begin(), out.end(), [](const RealEig& a, const RealEig& b) { return a.lambda < b.lambda; });
    return out;
}

// Generalized real eigenproblem A x = lambda B x; finite real eigenpairs
// sorted ascending.
std::vector<RealEig> dense_gen_eig(Eigen::MatrixXd A, Eigen::MatrixXd B) {
    const int n = static_cast<int>(A.rows());
    const double anorm = A.cwiseAbs().maxCoeff();
    std::vector<double> ar(n), ai(n), be(n);
    Eigen::MatrixXd vr(n, n);
    int info = LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'V', n, A.data(), n, B.data(), n, ar.data(), ai.data(),
                             be.data(), nullptr, n, vr.data(), n);
    if (info != 0) throw EigensolveFailure("dggev failed, info=" + std::to_string(info));
    std::vector<RealEig> out;
    for (int i = 0; i < n; ++i) {
        if (std::abs(be[i]) < 1e-10) continue;  // infinite / indeterminate (constraint directions)
        double lam = ar[i] / be[i];
        if (std::abs(ai[i] / be[i]) > 1e-8 * (1.0 + std::abs(lam))) continue;
        if (!std::isfinite(lam) || std::abs(lam) > 1e12 * (1.0 + anorm)) continue;
        out.push_back({lam, vr.col(i)});
    }
    std::sort(out.begin(), out.end(), [](const RealEig& a, const RealEig& b) { return a.lambda < b.lambda; });
    return out;
}

double mode_norm(const SpectralGrid& g, const Eigen::MatrixXcd& A) {
    double acc = 0.0;
    for (int c = 0; c < A.rows(); ++c) {
        for (int i = 0; i < g.Nr; ++i) acc += std::norm(A(c, i)) * g.w_rjac[i];
    }
    return std::sqrt(acc * g.angular_factor());
}

// Deterministic phase fix: the largest-magnitude coefficient becomes
// positive real.
void canonicalize(const SpectralGrid& g, Eigen::MatrixXcd& A) {
    double nrm = mode_norm(g, A);
    if (nrm == 0.0) return;
    A /= nrm;
    Eigen::Index rmax = 0, cmax = 0;
    double best = -1.0;
    for (Eigen::Index c = 0; c < A.rows(); ++c) {
        for (Eigen::Index i = 0; i < A.cols(); ++i) {
            double v = std::abs(A(c, i));
            if (v > best + 1e-14) {
                best = v;
                rmax = c;
                cmax = i;
            }
        }
    }
    Complex ph = A(rmax, cmax) / std::abs(A(rmax, cmax));
    A *= std::conj(ph);
}

struct Candidate {
    double lambda;
    ModeIndex mode;
    Eigen::MatrixXcd coeffs;
    double pressure_dev = 0.0;
};

// 2D, m = 0: swirl problem on u_theta with vorticity-vanishing rows.
void solve_swirl_2d(const SpectralGrid& g, std::vector<Candidate>& out) {
    const int Nr = g.Nr;
    ModeOperators ops = scalar_mode_laplacian(g, {0, 0});
    const Eigen::ArrayXd r = g.r_nodes.array();
    Eigen::MatrixXd A = ops.Lm + Eigen::MatrixXd((1.0 / (r * r)).matrix().asDiagonal());
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(Nr, Nr);
    for (int e : {0, Nr - 1}) {
        A.row(e) = g.D1.row(e);
        A(e, e) += 1.0 / g.r_nodes[e];
        B.row(e).setZero();
    }
    auto eigs = dense_gen_eig(A, B);
    std::erase_if(eigs, [](const RealEig& e) { return e.lambda < -1e-6; });
    int keep = std::min<int>(static_cast<int>(eigs.size()), Nr / 2);
    for (int i = 0; i < keep; ++i) {
        Candidate c;
        c.lambda = eigs[i].lambda;
        c.mode = {0, 0};
        c.coeffs = Eigen::MatrixXcd::Zero(g.ncomp(), Nr);
        c.coeffs.row(1) = eigs[i].vec.transpose().cast<Complex>();
        out.push_back(std::move(c));
    }
}

// 2D, |m| >= 1: stream-function reduction.  Eigenfields are grad^perp psi
// with psi a Dirichlet eigenfunction of the scalar mode Laplacian.
void solve_stream_2d(const SpectralGrid& g, int m, std::vector<Candidate>& out) {
    const int Nr = g.Nr;
    ModeOperators ops = scalar_mode_laplacian(g, {m, 0});
    Eigen::MatrixXd Li = ops.Lm.block(1, 1, Nr - 2, Nr - 2);
    auto eigs = dense_eig(Li);
    int keep = std::min<int>(static_cast<int>(eigs.size()), Nr / 2);
    const Eigen::ArrayXd r = g.r_nodes.array();
    for (int i = 0; i < keep; ++i) {
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(Nr);
        psi.segment(1, Nr - 2) = eigs[i].vec;
        Eigen::VectorXd dpsi = g.D1 * psi;
        for (int sgn : {1, -1}) {
            int mm = sgn * m;
            Candidate c;
            c.lambda = eigs[i].lambda;
            c.mode = {mm, 0};
            c.coeffs = Eigen::MatrixXcd::Zero(g.ncomp(), Nr);
            c.coeffs.row(0) = (kI * static_cast<double>(mm) * psi.array().cast<Complex>() / r.cast<Complex>())
                                  .matrix()
                                  .transpose();
            c.coeffs.row(1) = -dpsi.transpose().cast<Complex>();
            out.push_back(std::move(c));
        }
    }
}

// 3D: primitive-variable saddle eigenproblem per (m, k).  The complex mode
// system becomes real in the variables (u_r, i*u_theta, i*u_z, p); mirrored
// sign combinations follow by symmetry.
void solve_saddle_3d(const SpectralGrid& g, int m, int k, std::vector<Candidate>& out) {
    const int Nr = g.Nr;
    const double kt = g.axial_wavenumber(k);
    ModeOperators ops = scalar_mode_laplacian(g, {m, k});
    const Eigen::ArrayXd r = g.r_nodes.array();
    Eigen::ArrayXd inv_r = 1.0 / r, inv_r2 = 1.0 / (r * r);

    const int n = 4 * Nr;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    auto blk = [&](int i, int j) { return A.block(i * Nr, j * Nr, Nr, Nr); };

    // momentum rows
    A.block(0, 0, Nr, Nr) = ops.Lm + Eigen::MatrixXd(inv_r2.matrix().asDiagonal());
    A.block(0, Nr, Nr, Nr) = Eigen::MatrixXd((2.0 * m * inv_r2).matrix().asDiagonal());
    A.block(0, 3 * Nr, Nr, Nr) = g.D1;
    A.block(Nr, 0, Nr, Nr) = Eigen::MatrixXd((2.0 * m * inv_r2).matrix().asDiagonal());
    A.block(Nr, Nr, Nr, Nr) = ops.Lm + Eigen::MatrixXd(inv_r2.matrix().asDiagonal());
    A.block(Nr, 3 * Nr, Nr, Nr) = Eigen::MatrixXd((-m * inv_r).matrix().asDiagonal());
    A.block(2 * Nr, 2 * Nr, Nr, Nr) = ops.Lm;
    A.block(2 * Nr, 3 * Nr, Nr, Nr) = -kt * Eigen::MatrixXd::Identity(Nr, Nr);
    // divergence rows
    A.block(3 * Nr, 0, Nr, Nr) = g.D1 + Eigen::MatrixXd(inv_r.matrix().asDiagonal());
    A.block(3 * Nr, Nr, Nr, Nr) = Eigen::MatrixXd((m * inv_r).matrix().asDiagonal());
    A.block(3 * Nr, 2 * Nr, Nr, Nr) = kt * Eigen::MatrixXd::Identity(Nr, Nr);

    B.block(0, 0, 3 * Nr, 3 * Nr).setIdentity();

    for (int e : {0, Nr - 1}) {
        const double re = g.r_nodes[e];
        // u.n = 0
        A.row(e).setZero();
        A(e, e) = 1.0;
        B.row(e).setZero();
        // (curl u)_z = 0 : v_theta' + v_theta/r + (m/r) u_r = 0
        A.row(Nr + e).setZero();
        A.block(Nr + e, Nr, 1, Nr) = g.D1.row(e);
        A(Nr + e, Nr + e) += 1.0 / re;
        A(Nr + e, e) += m / re;
        B.row(Nr + e).setZero();
        // (curl u)_theta = 0 : v_z' + kt u_r = 0
        A.row(2 * Nr + e).setZero();
        A.block(2 * Nr + e, 2 * Nr, 1, Nr) = g.D1.row(e);
        A(2 * Nr + e, e) += kt;
        B.row(2 * Nr + e).setZero();
    }
    (void)blk;

    auto eigs = dense_gen_eig(A, B);
    // drop eigenvalues far below zero (spurious); keep a small negative
    // margin so kernel modes at -1e-12 survive the clamp later
    std::erase_if(eigs, [](const RealEig& e) { return e.lambda < -1e-6; });
    int keep = std::min<int>(static_cast<int>(eigs.size()), Nr / 2);

    const double wsum = g.w_rjac.sum();
    for (int i = 0; i < keep; ++i) {
        Eigen::VectorXd ur = eigs[i].vec.segment(0, Nr);
        Eigen::VectorXd vt = eigs[i].vec.segment(Nr, Nr);
        Eigen::VectorXd vz = eigs[i].vec.segment(2 * Nr, Nr);
        Eigen::VectorXd p = eigs[i].vec.segment(3 * Nr, Nr);
        double pmean = g.w_rjac.dot(p) / wsum;
        double pdev = std::sqrt(g.w_rjac.dot((p.array() - pmean).square().matrix()));
        double unrm = std::sqrt(g.w_rjac.dot(ur.cwiseAbs2()) + g.w_rjac.dot(vt.cwiseAbs2()) +
                                g.w_rjac.dot(vz.cwiseAbs2()));
        if (unrm == 0.0) continue;  // pure pressure direction
        // the four sign combinations (+-m, +-k)
        for (int sm : {1, -1}) {
            if (sm < 0 && m == 0) continue;
            for (int sk : {1, -1}) {
                if (sk < 0 && k == 0) continue;
                Candidate c;
                c.lambda = eigs[i].lambda;
                c.mode = {sm * m, sk * k};
                c.pressure_dev = pdev / unrm;
                c.coeffs = Eigen::MatrixXcd::Zero(3, Nr);
                c.coeffs.row(0) = ur.transpose().cast<Complex>();
                c.coeffs.row(1) = (-kI) * (sm * vt).transpose().cast<Complex>();
                c.coeffs.row(2) = (-kI) * (sk * vz).transpose().cast<Complex>();
                out.push_back(std::move(c));
            }
        }
    }
}

// Flux of a single-mode coefficient block through cut j (1-based).
Complex mode_flux(const SpectralGrid& g, const ModeIndex& mode, const Eigen::MatrixXcd& coeffs, int j) {
    if (j == 1) {
        if (mode.k != 0) return 0.0;
        Complex acc = 0.0;
        for (int i = 0; i < g.Nr; ++i) acc += coeffs(1, i) * g.w_cc[i];
        return acc * (g.domain.dim() == 2 ? 1.0 : g.domain.Lz);
    }
    if (mode.m != 0) return 0.0;
    Complex acc = 0.0;
    for (int i = 0; i < g.Nr; ++i) acc += coeffs(2, i) * g.w_rjac[i];
    return acc * 2.0 * std::numbers::pi;
}

EigenResiduals compute_residuals(const SpectralGrid& g, const ModeOperators& ops, const EigenPair& p) {
    const int Nr = g.Nr;
    const int nc = g.ncomp();
    Eigen::VectorXcd u(static_cast<Eigen::Index>(nc) * Nr);
    for (int c = 0; c < nc; ++c) u.segment(c * Nr, Nr) = p.coeffs.row(c).transpose();

    auto wnorm = [&](const Eigen::VectorXcd& x) {
        double acc = 0.0;
        for (int c = 0; c * Nr < x.size(); ++c) {
            for (int i = 0; i < Nr; ++i) acc += std::norm(x[c * Nr + i]) * g.w_rjac[i];
        }
        return std::sqrt(acc * g.angular_factor());
    };

    const double un = wnorm(u);
    EigenResiduals res;
    Eigen::VectorXcd eigdef = ops.Lvec * u - p.lambda * u;
    res.eig = wnorm(eigdef) / (un * (1.0 + p.lambda));

    // divergence
    const Eigen::ArrayXcd r = g.r_nodes.array().cast<Complex>();
    Eigen::VectorXcd d = g.D1.cast<Complex>() * u.segment(0, Nr);
    d.array() += u.segment(0, Nr).array() / r +
                 kI * static_cast<double>(p.mode.m) * u.segment(Nr, Nr).array() / r;
    if (nc == 3) d += kI * g.axial_wavenumber(p.mode.k) * u.segment(2 * Nr, Nr);
    res.div = wnorm(d) / (un * (1.0 + std::sqrt(p.lambda)));

    // boundary traces
    Eigen::MatrixXcd C = navier_constraint_rows(g, {p.mode.m, p.mode.k});
    Eigen::VectorXcd traces = C * u;
    const double vol = g.domain.volume();
    const double uscale = un / std::sqrt(vol);
    const double wscale = std::max(uscale * (1.0 + std::sqrt(p.lambda)), 1e-300);
    double worst = 0.0;
    for (int i = 0; i < traces.size(); ++i) {
        // first 2 rows per component pair are u.n (scale uscale), rest are
        // vorticity traces (scale wscale)
        double scale = (i < 2) ? uscale : wscale;
        worst = std::max(worst, std::abs(traces[i]) / scale);
    }
    res.bc = worst;
    return res;
}

}  // namespace

Complex mode_inner(const SpectralGrid& g, const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Complex acc = 0.0;
    for (int c = 0; c < A.rows(); ++c) {
        for (int i = 0; i < g.Nr; ++i) acc += A(c, i) * std::conj(B(c, i)) * g.w_rjac[i];
    }
    return acc * g.angular_factor();
}

StokesBasis build_basis(GridPtr grid, int n_modes, const BuildOptions& opts) {
    const SpectralGrid& g = *grid;
    if (n_modes < 1) throw IndexOutOfRange("n_modes must be >= 1");
    if (n_modes > g.basis_capacity()) {
        throw IndexOutOfRange("n_modes=" + std::to_string(n_modes) + " exceeds basis capacity Nr*(2Mmax+1)*(2Kmax+1)/4=" +
                              std::to_string(g.basis_capacity()));
    }

    // per-mode solves (quadrant only; mirrors are generated by symmetry)
    std::vector<std::vector<Candidate>> slots;
    if (g.domain.dim() == 2) {
        slots.resize(g.Mmax + 1);
        detail::parallel_for(g.Mmax + 1, opts.workers, [&](int m) {
            if (m == 0) {
                solve_swirl_2d(g, slots[m]);
            } else {
                solve_stream_2d(g, m, slots[m]);
            }
        });
    } else {
        const int nm = g.Mmax + 1, nk = g.Kmax + 1;
        slots.resize(static_cast<size_t>(nm) * nk);
        detail::parallel_for(nm * nk, opts.workers, [&](int idx) {
            solve_saddle_3d(g, idx / nk, idx % nk, slots[idx]);
        });
    }

    std::vector<Candidate> kernel_cands, positive;
    for (auto& s : slots) {
        for (auto& c : s) {
            if (c.lambda <= opts.kernel_clamp) {
                c.lambda = 0.0;
                kernel_cands.push_back(std::move(c));
            } else {
                positive.push_back(std::move(c));
            }
        }
    }

    const int J = g.domain.cuts();
    if (static_cast<int>(kernel_cands.size()) != J) {
        throw EigensolveFailure("expected " + std::to_string(J) + " kernel modes, found " +
                                std::to_string(kernel_cands.size()));
    }
    for (const auto& c : kernel_cands) {
        if (c.mode.m != 0 || c.mode.k != 0) throw EigensolveFailure("kernel mode outside the (0,0) block");
    }

    // sort: (lambda, |m|, m, k)
    std::sort(positive.begin(), positive.end(), [](const Candidate& a, const Candidate& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (std::abs(a.mode.m) != std::abs(b.mode.m)) return std::abs(a.mode.m) < std::abs(b.mode.m);
        if (a.mode.m != b.mode.m) return a.mode.m < b.mode.m;
        return a.mode.k < b.mode.k;
    });
    if (static_cast<int>(positive.size()) < n_modes) {
        throw EigensolveFailure("grid yields only " + std::to_string(positive.size()) +
                                " resolved eigenpairs, requested " + std::to_string(n_modes));
    }
    positive.resize(n_modes);

    // normalize, fix phases
    for (auto& c : kernel_cands) canonicalize(g, c.coeffs);
    for (auto& c : positive) canonicalize(g, c.coeffs);

    // orthonormalize within (mode, degenerate-eigenvalue) groups
    std::map<std::pair<int, int>, std::vector<Candidate*>> by_mode;
    for (auto& c : positive) by_mode[{c.mode.m, c.mode.k}].push_back(&c);
    for (auto& [mk, group] : by_mode) {
        for (size_t i = 0; i < group.size(); ++i) {
            for (size_t j = 0; j < i; ++j) {
                if (std::abs(group[i]->lambda - group[j]->lambda) > 1e-6 * (1.0 + group[i]->lambda)) continue;
                Complex proj = mode_inner(g, group[i]->coeffs, group[j]->coeffs);
                group[i]->coeffs -= proj * group[j]->coeffs;
            }
            canonicalize(g, group[i]->coeffs);
        }
    }

    // flux-normalize the kernel: J x J cut-flux matrix inverted
    Eigen::MatrixXcd F(J, J);
    for (int i = 0; i < J; ++i) {
        for (int j = 0; j < J; ++j) F(i, j) = mode_flux(g, kernel_cands[i].mode, kernel_cands[i].coeffs, j + 1);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(F);
    if (std::abs(lu.determinant()) < 1e-12) throw EigensolveFailure("singular kernel flux matrix");
    Eigen::MatrixXcd C = lu.solve(Eigen::MatrixXcd::Identity(J, J));  // C = F^{-1}
    std::vector<EigenPair> kernel(J);
    for (int j = 0; j < J; ++j) {
        kernel[j].lambda = 0.0;
        kernel[j].mode = {0, 0};
        kernel[j].coeffs = Eigen::MatrixXcd::Zero(g.ncomp(), g.Nr);
        for (int i = 0; i < J; ++i) kernel[j].coeffs += C(j, i) * kernel_cands[i].coeffs;
    }

    std::vector<EigenPair> eigs(n_modes);
    for (int i = 0; i < n_modes; ++i) {
        eigs[i].lambda = positive[i].lambda;
        eigs[i].mode = positive[i].mode;
        eigs[i].coeffs = std::move(positive[i].coeffs);
        eigs[i].pressure_dev = positive[i].pressure_dev;
    }

    // validate residuals of everything retained; a failing pair rejects the
    // basis rather than being silently repaired
    std::vector<EigenPair*> all;
    for (auto& p : kernel) all.push_back(&p);
    for (auto& p : eigs) all.push_back(&p);
    std::map<std::pair<int, int>, ModeOperators> ops_cache;
    for (const auto* p : all) {
        auto key = std::make_pair(p->mode.m, p->mode.k);
        if (!ops_cache.count(key)) ops_cache.emplace(key, scalar_mode_laplacian(g, p->mode));
    }
    auto ops_for = [&](const ModeIndex& mode) -> const ModeOperators& {
        return ops_cache.at({mode.m, mode.k});
    };
    std::vector<std::string> failures(all.size());
    detail::parallel_for(static_cast<int>(all.size()), opts.workers, [&](int i) {
        EigenPair& p = *all[i];
        p.residuals = compute_residuals(g, ops_for(p.mode), p);
        auto sci = [](double x) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3e", x);
            return std::string(buf);
        };
        if (p.residuals.eig > opts.residual_tol || p.residuals.div > opts.residual_tol ||
            p.residuals.bc > opts.residual_tol) {
            failures[i] = "eigenpair (lambda=" + std::to_string(p.lambda) + ", m=" + std::to_string(p.mode.m) +
                          ", k=" + std::to_string(p.mode.k) + ") residuals eig=" + sci(p.residuals.eig) +
                          " div=" + sci(p.residuals.div) + " bc=" + sci(p.residuals.bc);
        } else if (g.domain.dim() == 3 && p.pressure_dev > opts.pressure_tol) {
            failures[i] = "eigenpair (lambda=" + std::to_string(p.lambda) +
                          ") multiplier deviation " + sci(p.pressure_dev);
        }
    });
    for (const auto& f : failures) {
        if (!f.empty()) throw ResidualTooLarge(f);
    }

    return StokesBasis(grid, std::move(kernel), std::move(eigs), opts);
}

StokesBasis::StokesBasis(GridPtr grid, std::vector<EigenPair> kernel, std::vector<EigenPair> eigs,
                         BuildOptions opts)
    : grid_(std::move(grid)), kernel_(std::move(kernel)), eigs_(std::move(eigs)), opts_(opts) {
    lambda1_ = eigs_.empty() ? 0.0 : eigs_.front().lambda;
    // Gram certification: cross-mode products vanish identically, so only
    // same-mode pairs need checking.
    const SpectralGrid& g = *grid_;
    double worst = 0.0;
    std::map<std::pair<int, int>, std::vector<const EigenPair*>> by_mode;
    for (const auto& p : eigs_) by_mode[{p.mode.m, p.mode.k}].push_back(&p);
    for (const auto& [mk, group] : by_mode) {
        for (size_t i = 0; i < group.size(); ++i) {
            for (size_t j = 0; j <= i; ++j) {
                Complex ip = mode_inner(g, group[i]->coeffs, group[j]->coeffs);
                double dev = std::abs(ip - (i == j ? 1.0 : 0.0));
                worst = std::max(worst, dev);
            }
        }
    }
    kernel_gram_ = Eigen::MatrixXcd::Zero(J(), J());
    for (int i = 0; i < J(); ++i) {
        for (int j = 0; j < J(); ++j) kernel_gram_(i, j) = mode_inner(g, kernel_[i].coeffs, kernel_[j].coeffs);
    }
    auto it = by_mode.find({0, 0});
    if (it != by_mode.end()) {
        for (const auto* p : it->second) {
            for (int j = 0; j < J(); ++j) {
                double knrm = std::sqrt(std::abs(kernel_gram_(j, j).real()));
                double dev = std::abs(mode_inner(g, p->coeffs, kernel_[j].coeffs)) / knrm;
                worst = std::max(worst, dev);
            }
        }
    }
    gram_error_ = worst;
}

Field StokesBasis::make_field(const EigenPair& p) const {
    Field f = Field::vector(grid_);
    for (int c = 0; c < f.ncomp(); ++c) f.profile_vec(p.mode.m, p.mode.k, c) = p.coeffs.row(c).transpose();
    return f;
}

Field StokesBasis::kernel_field(int j) const {
    if (j < 0 || j >= J()) throw IndexOutOfRange("kernel index " + std::to_string(j));
    return make_field(kernel_[j]);
}

Field StokesBasis::eigen_field(int k) const {
    if (k < 0 || k >= size()) throw IndexOutOfRange("eigenfield index " + std::to_string(k));
    return make_field(eigs_[k]);
}

SpectralCoeffs StokesBasis::expand(const Field& f, bool check_span) const {
    const SpectralGrid& g = *grid_;
    if (!g.same_layout(f.grid())) throw DimensionMismatch("field grid does not match basis grid");
    SpectralCoeffs out;
    out.beta.resize(size());
    const int Nr = g.Nr;
    for (int k = 0; k < size(); ++k) {
        const EigenPair& p = eigs_[k];
        Complex acc = 0.0;
        for (int c = 0; c < g.ncomp(); ++c) {
            auto prof = f.profile(p.mode.m, p.mode.k, c);
            for (int i = 0; i < Nr; ++i) acc += prof[i] * std::conj(p.coeffs(c, i)) * g.w_rjac[i];
        }
        out.beta[k] = acc * g.angular_factor();
    }
    Eigen::VectorXcd rhs(J());
    for (int j = 0; j < J(); ++j) {
        const EigenPair& p = kernel_[j];
        Complex acc = 0.0;
        for (int c = 0; c < g.ncomp(); ++c) {
            auto prof = f.profile(0, 0, c);
            for (int i = 0; i < Nr; ++i) acc += prof[i] * std::conj(p.coeffs(c, i)) * g.w_rjac[i];
        }
        rhs[j] = acc * g.angular_factor();
    }
    out.alpha = kernel_gram_.partialPivLu().solve(rhs);

    Field rec = synthesize(out);
    double fn = norm_l2(f);
    out.recon_error = fn == 0.0 ? 0.0 : norm_l2(f - rec) / fn;
    if (check_span && out.recon_error > opts_.not_in_span_tol) {
        throw NotInSpan("reconstruction error " + std::to_string(out.recon_error) +
                        " exceeds tolerance; field too rough for the truncated basis");
    }
    return out;
}

Field StokesBasis::synthesize(const SpectralCoeffs& c) const {
    Field f = Field::vector(grid_);
    const SpectralGrid& g = *grid_;
    for (int j = 0; j < J() && j < c.alpha.size(); ++j) {
        const EigenPair& p = kernel_[j];
        for (int comp = 0; comp < g.ncomp(); ++comp) {
            f.profile_vec(0, 0, comp) += c.alpha[j] * p.coeffs.row(comp).transpose();
        }
    }
    for (int k = 0; k < size() && k < c.beta.size(); ++k) {
        if (c.beta[k] == 0.0) continue;
        const EigenPair& p = eigs_[k];
        for (int comp = 0; comp < g.ncomp(); ++comp) {
            f.profile_vec(p.mode.m, p.mode.k, comp) += c.beta[k] * p.coeffs.row(comp).transpose();
        }
    }
    return f;
}

namespace {

nlohmann::json coeffs_to_json(const Eigen::MatrixXcd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index c = 0; c < M.rows(); ++c) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index i = 0; i < M.cols(); ++i) {
            row.push_back(M(c, i).real());
            row.push_back(M(c, i).imag());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd coeffs_from_json(const nlohmann::json& rows) {
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(rows.at(0).size() / 2);
    Eigen::MatrixXcd M(nr, nc);
    for (Eigen::Index c = 0; c < nr; ++c) {
        for (Eigen::Index i = 0; i < nc; ++i) {
            M(c, i) = Complex(rows.at(c).at(2 * i).get<double>(), rows.at(c).at(2 * i + 1).get<double>());
        }
    }
    return M;
}

nlohmann::json pair_to_json(const EigenPair& p) {
    return {{"lambda", p.lambda},
            {"m", p.mode.m},
            {"k", p.mode.k},
            {"residuals", {{"eig", p.residuals.eig}, {"div", p.residuals.div}, {"bc", p.residuals.bc}}},
            {"pressure_dev", p.pressure_dev},
            {"coeffs", coeffs_to_json(p.coeffs)}};
}

EigenPair pair_from_json(const nlohmann::json& j) {
    EigenPair p;
    p.lambda = j.at("lambda").get<double>();
    p.mode = {j.at("m").get<int>(), j.at("k").get<int>()};
    p.residuals.eig = j.at("residuals").at("eig").get<double>();
    p.residuals.div = j.at("residuals").at("div").get<double>();
    p.residuals.bc = j.at("residuals").at("bc").get<double>();
    p.pressure_dev = j.at("pressure_dev").get<double>();
    p.coeffs = coeffs_from_json(j.at("coeffs"));
    return p;
}

}  // namespace

void save_basis(const StokesBasis& basis, const std::string& path) {
    const SpectralGrid& g = basis.grid();
    nlohmann::ordered_json j;
    j["format"] = "stokeslab-basis";
    j["version"] = 1;
    j["domain"] = {{"kind", g.domain.dim() == 2 ? "annulus2d" : "annular_cylinder3d"},
                   {"a", g.domain.a},
                   {"b", g.domain.b},
                   {"Lz", g.domain.Lz}};
    j["grid"] = {{"Nr", g.Nr}, {"Mmax", g.Mmax}, {"Kmax", g.Kmax}};
    nlohmann::json kernel = nlohmann::json::array();
    for (const auto& p : basis.kernel()) kernel.push_back(pair_to_json(p));
    nlohmann::json eigs = nlohmann::json::array();
    for (const auto& p : basis.eigs()) eigs.push_back(pair_to_json(p));
    j["kernel"] = std::move(kernel);
    j["eigs"] = std::move(eigs);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw SolveFailure("cannot open " + path + " for writing");
    os << j.dump();
}

StokesBasis load_basis(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw SolveFailure("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(is);
    if (j.at("format") != "stokeslab-basis" || j.at("version").get<int>() != 1) {
        throw SolveFailure("unsupported basis bundle format in " + path);
    }
    DomainSpec dom;
    if (j.at("domain").at("kind") == "annulus2d") {
        dom = DomainSpec::annulus(j["domain"]["a"].get<double>(), j["domain"]["b"].get<double>());
    } else {
        dom = DomainSpec::annular_cylinder(j["domain"]["a"].get<double>(), j["domain"]["b"].get<double>(),
                                           j["domain"]["Lz"].get<double>());
    }
    GridPtr grid = make_grid(dom, j["grid"]["Nr"].get<int>(), j["grid"]["Mmax"].get<int>(),
                             j["grid"]["Kmax"].get<int>());
    std::vector<EigenPair> kernel, eigs;
    for (const auto& pj : j.at("kernel")) kernel.push_back(pair_from_json(pj));
    for (const auto& pj : j.at("eigs")) eigs.push_back(pair_from_json(pj));
    return StokesBasis(grid, std::move(kernel), std::move(eigs), BuildOptions{});
}

}  // namespace stokeslab
