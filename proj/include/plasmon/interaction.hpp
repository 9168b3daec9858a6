#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "plasmon/bundles.hpp"
#include "plasmon/hamiltonian.hpp"
#include "plasmon/ldg.hpp"

namespace plasmon {

/// Emission/absorption kernel U_l / omega^2 * phi_eps(omega - k_z v_par - l omega_c / gamma)
/// with phi_eps a unit-mass Gaussian of standard deviation eps.
struct KernelSpec {
    int harmonic = 1;
    double epsilon = 0.1;
    /// U_l(p_par, p_perp, k_r, q_phi, k_z, r) >= 0; empty means U_l = 1.
    std::function<double(double p_par, double p_perp, double kr, double q_phi, double kz, double r)> amplitude;
};

double mollified_kernel(double p_par, double p_perp, double kr, double q_phi, double kz, double r,
                        const KernelSpec& spec, const DispersionModel& model);

struct OperatorStats {
    std::size_t nonzeros = 0;
    std::size_t memory_bytes = 0;
    double predicted_nonzeros = 0.0;  // n_p * n_r * n_bundles, the dense upper bound
};

/// Sparse interaction tensor: for every electron cell (r-cell xi, p-cell c)
/// the bundles q it couples to, each with the scalar weight
///   K_qxc = sum over pieces of (cover triangle) x (r-cell xi) of
///           r_m |piece| |phz cell| 2 pi r(piece centroid) B_eps(p_c, k, r),
/// so that the stored 2x2 block is K beta_qc (x) beta_qc.
class InteractionOperator {
public:
    InteractionOperator() = default;
    InteractionOperator(std::shared_ptr<const ElectronSpace> electrons, std::shared_ptr<const PlasmonSpace> plasmons,
                        const KernelSpec& spec, const DispersionModel& model);

    const ElectronSpace& electrons() const { return *electrons_; }
    const PlasmonSpace& plasmons() const { return *plasmons_; }
    std::size_t num_bundles() const { return omega_.size(); }
    bool empty() const { return weight_.empty(); }

    /// Entries of cell (xi, c) as [begin, end) offsets into bundle()/weight().
    std::size_t row_begin(std::size_t xi, std::size_t c) const { return row_start_[xi * np_ + c]; }
    std::size_t row_end(std::size_t xi, std::size_t c) const { return row_start_[xi * np_ + c + 1]; }
    const std::vector<std::uint32_t>& bundle() const { return bundle_; }
    const std::vector<double>& weight() const { return weight_; }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& k_par() const { return kpar_; }
    const std::vector<double>& bundle_measure() const { return measure_; }

    Beta beta(std::size_t q, std::size_t c) const { return electrons_->beta(kpar_[q], omega_[q], c); }

    /// Diffusion tensor (D11, D12, D22) of cell (xi, c) for plasmon coefficients N,
    /// D = sum_q N_q omega_q K beta (x) beta, without the radial volume.
    std::array<double, 3> diffusion_tensor(const std::vector<double>& N, std::size_t xi, std::size_t c) const;

    /// Physical diffusion coefficients D / (radial volume), one triple per cell.
    std::vector<std::array<double, 3>> diffusion_field(const std::vector<double>& N) const;

    /// Time derivative of the electron coefficients: -M^{-1} G^T (W D[N] G a).
    void f_rate(const std::vector<double>& N, const std::vector<double>& a, std::vector<double>& out) const;

    /// Per-bundle growth rates q_s = (1/G_s) sum W K (beta . grad E)(beta . grad a).
    void reaction_rates(const std::vector<double>& a, std::vector<double>& out) const;

    OperatorStats stats() const;

private:
    std::shared_ptr<const ElectronSpace> electrons_;
    std::shared_ptr<const PlasmonSpace> plasmons_;
    std::size_t np_ = 0;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> bundle_;
    std::vector<double> weight_;
    std::vector<double> omega_;
    std::vector<double> kpar_;
    std::vector<double> measure_;
};

/// Forward-difference gradient of one r-slice of electron coefficients.
void slice_gradient(const PGrid& grid, const double* a, double* g_par, double* g_perp);

/// Adds G^T (y_par, y_perp) to out for one r-slice.
void slice_gradient_transpose(const PGrid& grid, const double* y_par, const double* y_perp, double* out);

}  // namespace plasmon
