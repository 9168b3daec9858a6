#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "plasmon/mesh.hpp"

namespace plasmon {

/// Tensor grid of the electron momentum (p_par, p_perp); p_perp >= 0.
struct PGrid {
    RectGrid1D par;
    RectGrid1D perp;

    std::size_t n_par() const { return par.n; }
    std::size_t n_perp() const { return perp.n; }
    std::size_t size() const { return par.n * perp.n; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * perp.n + j; }
};

/// Piecewise-constant field on a PGrid, one value per cell.
struct PGridField {
    std::size_t n_par = 0;
    std::size_t n_perp = 0;
    std::vector<double> values;

    PGridField() = default;
    explicit PGridField(const PGrid& g, double fill = 0.0)
        : n_par(g.n_par()), n_perp(g.n_perp()), values(g.size(), fill) {}

    double& operator()(std::size_t i, std::size_t j) { return values[i * n_perp + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * n_perp + j]; }
};

/// Forward difference in p_par; the last column is zero (ghost copy of the last cell).
PGridField discrete_grad_par(const PGrid& grid, const PGridField& g);

/// Forward difference in p_perp weighted by p_perp(upper face) / p_perp(center);
/// the last row is zero.
PGridField discrete_grad_perp(const PGrid& grid, const PGridField& g);

/// Samples g at the lower-left corner of every cell.
PGridField project_px(const PGrid& grid, const std::function<double(double p_par, double p_perp)>& g);

/// Samples g at every cell center.
PGridField sample_centers(const PGrid& grid, const std::function<double(double p_par, double p_perp)>& g);

/// Sparse matrix of the discrete gradient: rows [0, n) hold the p_par
/// component, rows [n, 2n) the p_perp component.
Eigen::SparseMatrix<double> gradient_matrix(const PGrid& grid);

/// Direction field of the resonant diffusion for one bundle at one cell.
struct Beta {
    double par = 0.0;
    double perp = 0.0;
};

/// Discrete directional derivative beta . grad_h g at one cell.
inline double apply_Lh(double grad_par, double grad_perp, Beta beta) {
    return beta.par * grad_par + beta.perp * grad_perp;
}

/// Electron phase space: momentum grid times radial cells, with the
/// projected conserved densities and their discrete gradients.
struct ElectronSpace {
    PGrid p;
    RectGrid1D r;
    PGridField energy;     // Pi E, E = sqrt(1 + p^2)
    PGridField pz;         // Pi p_z
    PGridField dE_par;
    PGridField dE_perp;
    std::vector<double> p_volume;    // dp_par * dp_perp * 2 pi p_perp(center), per p-cell
    std::vector<double> speed_ratio; // |p| / p_perp at the cell center
    std::vector<double> r_volume;    // pi (r_hi^2 - r_lo^2), per r-cell

    std::size_t num_p() const { return p.size(); }
    std::size_t num_r() const { return r.n; }
    std::size_t size() const { return p.size() * r.n; }
    double mass_weight(std::size_t xi, std::size_t c) const { return p_volume[c] * r_volume[xi]; }

    /// beta = [k (d_perp E) s, (omega - k d_par E) s] with s = |p| / p_perp.
    Beta beta(double k_par, double omega, std::size_t c) const {
        const double s = speed_ratio[c];
        return {k_par * dE_perp.values[c] * s, (omega - k_par * dE_par.values[c]) * s};
    }
};

ElectronSpace build_electron_space(const PGrid& p, const RectGrid1D& r);

/// Discrete gradient from the primal weak form with alternating fluxes: face
/// traces are taken from the neighbour on the +u side, boundary traces copy
/// the interior value, and `weight` is the (linear) volume density.
struct GradientField {
    PGridField par;
    PGridField perp;
};

GradientField gradient_primal_flux(const PGrid& grid, const PGridField& g,
                                   const std::function<double(double p_par, double p_perp)>& weight);

/// Discrete gradient defined as minus the weighted adjoint of the discrete
/// divergence with the opposite (-u side) traces and zero boundary flux.
GradientField gradient_dual_flux(const PGrid& grid, const PGridField& g,
                                 const std::function<double(double p_par, double p_perp)>& weight);

}  // namespace plasmon
