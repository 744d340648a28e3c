#include "stokeslab/field.hpp"

#include <cmath>
#include <numbers>

namespace stokeslab {

namespace {
constexpr double kPi = std::numbers::pi;
}

ModalField::ModalField(GridPtr grid, int ncomp) : grid_(std::move(grid)), ncomp_(ncomp) {
    data_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_->n_mode_pairs()) * ncomp_ * grid_->Nr);
}

std::span<Complex> ModalField::profile(int m, int k, int comp) {
    const int Nr = grid_->Nr;
    Eigen::Index off = (static_cast<Eigen::Index>(grid_->mode_index(m, k)) * ncomp_ + comp) * Nr;
    return {data_.data() + off, static_cast<size_t>(Nr)};
}

std::span<const Complex> ModalField::profile(int m, int k, int comp) const {
    const int Nr = grid_->Nr;
    Eigen::Index off = (static_cast<Eigen::Index>(grid_->mode_index(m, k)) * ncomp_ + comp) * Nr;
    return {data_.data() + off, static_cast<size_t>(Nr)};
}

Eigen::Map<Eigen::VectorXcd> ModalField::profile_vec(int m, int k, int comp) {
    auto s = profile(m, k, comp);
    return {s.data(), static_cast<Eigen::Index>(s.size())};
}

Eigen::Map<const Eigen::VectorXcd> ModalField::profile_vec(int m, int k, int comp) const {
    auto s = profile(m, k, comp);
    return {s.data(), static_cast<Eigen::Index>(s.size())};
}

Eigen::Map<Eigen::VectorXcd> ModalField::mode_block(int m, int k) {
    const Eigen::Index n = static_cast<Eigen::Index>(ncomp_) * grid_->Nr;
    return {data_.data() + grid_->mode_index(m, k) * n, n};
}

Eigen::Map<const Eigen::VectorXcd> ModalField::mode_block(int m, int k) const {
    const Eigen::Index n = static_cast<Eigen::Index>(ncomp_) * grid_->Nr;
    return {data_.data() + grid_->mode_index(m, k) * n, n};
}

ModalField& ModalField::operator+=(const ModalField& o) {
    if (!grid_->same_layout(o.grid()) || ncomp_ != o.ncomp_) throw DimensionMismatch("field shape mismatch in +=");
    data_ += o.data_;
    return *this;
}

ModalField& ModalField::operator-=(const ModalField& o) {
    if (!grid_->same_layout(o.grid()) || ncomp_ != o.ncomp_) throw DimensionMismatch("field shape mismatch in -=");
    data_ -= o.data_;
    return *this;
}

ModalField& ModalField::operator*=(Complex c) {
    data_ *= c;
    return *this;
}

Complex inner(const ModalField& u, const ModalField& v) {
    const SpectralGrid& g = u.grid();
    if (!g.same_layout(v.grid()) || u.ncomp() != v.ncomp()) throw DimensionMismatch("field shape mismatch in inner()");
    const int Nr = g.Nr;
    Complex acc = 0.0;
    const Eigen::Index nprof = u.data().size() / Nr;
    for (Eigen::Index p = 0; p < nprof; ++p) {
        for (int i = 0; i < Nr; ++i) {
            acc += u.data()[p * Nr + i] * std::conj(v.data()[p * Nr + i]) * g.w_rjac[i];
        }
    }
    return acc * g.angular_factor();
}

double norm_l2(const ModalField& u) {
    const SpectralGrid& g = u.grid();
    const int Nr = g.Nr;
    double acc = 0.0;
    const Eigen::Index nprof = u.data().size() / Nr;
    for (Eigen::Index p = 0; p < nprof; ++p) {
        for (int i = 0; i < Nr; ++i) {
            acc += std::norm(u.data()[p * Nr + i]) * g.w_rjac[i];
        }
    }
    return std::sqrt(acc * g.angular_factor());
}

std::vector<Eigen::MatrixXcd> nodal_values(const ModalField& f, int Ntheta, int Nz) {
    const SpectralGrid& g = f.grid();
    const int Nr = g.Nr, M = g.Mmax, K = g.Kmax;
    const int nm = 2 * M + 1, nk = 2 * K + 1;
    if (g.domain.dim() == 2) Nz = 1;

    Eigen::MatrixXcd Etheta(nm, Ntheta);
    for (int mi = 0; mi < nm; ++mi) {
        int m = mi - M;
        for (int j = 0; j < Ntheta; ++j) {
            Etheta(mi, j) = std::polar(1.0, m * 2.0 * kPi * j / Ntheta);
        }
    }
    Eigen::MatrixXcd Ez(nk, Nz);
    for (int ki = 0; ki < nk; ++ki) {
        int k = ki - K;
        for (int l = 0; l < Nz; ++l) {
            double z = g.domain.dim() == 2 ? 0.0 : g.domain.Lz * l / Nz;
            Ez(ki, l) = std::polar(1.0, g.axial_wavenumber(k) * z);
        }
    }

    std::vector<Eigen::MatrixXcd> out;
    out.reserve(f.ncomp());
    Eigen::MatrixXcd coeff(Nr, nm);           // per k slice
    Eigen::MatrixXcd stage(static_cast<Eigen::Index>(Nr) * Ntheta, nk);
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int ki = 0; ki < nk; ++ki) {
            int k = ki - K;
            for (int mi = 0; mi < nm; ++mi) {
                coeff.col(mi) = f.profile_vec(mi - M, k, c);
            }
            Eigen::MatrixXcd slice = coeff * Etheta;  // Nr x Ntheta
            stage.col(ki) = Eigen::Map<Eigen::VectorXcd>(slice.data(), slice.size());
        }
        Eigen::MatrixXcd full = stage * Ez;  // (Nr*Ntheta) x Nz
        Eigen::MatrixXcd vals(Nr, static_cast<Eigen::Index>(Ntheta) * Nz);
        for (int l = 0; l < Nz; ++l) {
            vals.middleCols(static_cast<Eigen::Index>(l) * Ntheta, Ntheta) =
                Eigen::Map<Eigen::MatrixXcd>(full.col(l).data(), Nr, Ntheta);
        }
        out.push_back(std::move(vals));
    }
    return out;
}

ModalField modal_from_nodal(GridPtr grid, const std::vector<Eigen::MatrixXcd>& nodal, int Ntheta, int Nz) {
    const SpectralGrid& g = *grid;
    const int Nr = g.Nr, M = g.Mmax, K = g.Kmax;
    if (g.domain.dim() == 2) Nz = 1;
    if (Ntheta <= 2 * M || Nz <= 2 * K) throw DimensionMismatch("nodal grid too coarse for modal analysis");
    ModalField f(grid, static_cast<int>(nodal.size()));
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int m = -M; m <= M; ++m) {
            for (int k = -K; k <= K; ++k) {
                auto prof = f.profile_vec(m, k, c);
                for (int i = 0; i < Nr; ++i) {
                    Complex acc = 0.0;
                    for (int l = 0; l < Nz; ++l) {
                        double z = g.domain.dim() == 2 ? 0.0 : g.domain.Lz * l / Nz;
                        Complex ez = std::polar(1.0, -g.axial_wavenumber(k) * z);
                        for (int j = 0; j < Ntheta; ++j) {
                            Complex et = std::polar(1.0, -m * 2.0 * kPi * j / Ntheta);
                            acc += nodal[c](i, static_cast<Eigen::Index>(l) * Ntheta + j) * et * ez;
                        }
                    }
                    prof[i] = acc / (static_cast<double>(Ntheta) * Nz);
                }
            }
        }
    }
    return f;
}

Complex cut_flux_at(const ModalField& field, int j, double theta0, double z0) {
    const SpectralGrid& g = field.grid();
    if (!field.is_vector()) throw DimensionMismatch("cut_flux requires a vector field");
    if (j < 1 || j > g.domain.cuts()) {
        throw IndexOutOfRange("cut index " + std::to_string(j) + " out of range (J=" +
                              std::to_string(g.domain.cuts()) + ")");
    }
    Complex flux = 0.0;
    if (j == 1) {
        // int u_theta(r, theta0, z) dr dz ; z integral picks k = 0
        const int ctheta = 1;
        double zfac = g.domain.dim() == 2 ? 1.0 : g.domain.Lz;
        for (int m = -g.Mmax; m <= g.Mmax; ++m) {
            auto prof = field.profile_vec(m, 0, ctheta);
            Complex radial = 0.0;
            for (int i = 0; i < g.Nr; ++i) radial += prof[i] * g.w_cc[i];
            flux += std::polar(1.0, m * theta0) * radial;
        }
        flux *= zfac;
    } else {
        // int int u_z(r, theta, z0) r dr dtheta ; theta integral picks m = 0
        const int cz = 2;
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto prof = field.profile_vec(0, k, cz);
            Complex radial = 0.0;
            for (int i = 0; i < g.Nr; ++i) radial += prof[i] * g.w_rjac[i];
            flux += std::polar(1.0, g.axial_wavenumber(k) * z0) * radial;
        }
        flux *= 2.0 * kPi;
    }
    return flux;
}

Complex cut_flux(const ModalField& field, int j) { return cut_flux_at(field, j, 0.0, 0.0); }

}  // namespace stokeslab
