#include "plasmon/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plasmon/errors.hpp"
#include "plasmon/geometry.hpp"
#include "plasmon/numerics.hpp"
#include "plasmon/parallel.hpp"

namespace plasmon {

double mollified_kernel(double p_par, double p_perp, double kr, double q_phi, double kz, double r,
                        const KernelSpec& spec, const DispersionModel& model) {
    const double omega = eval_dispersion(model, kr, q_phi, kz, r);
    const double gamma = std::sqrt(1.0 + p_par * p_par + p_perp * p_perp);
    const double v_par = p_par / gamma;
    const double arg = omega - kz * v_par - spec.harmonic * model.omega_ce(r) / gamma;
    const double z = arg / spec.epsilon;
    const double gauss = std::exp(-0.5 * z * z) / (spec.epsilon * std::sqrt(2.0 * std::numbers::pi));
    const double u = spec.amplitude ? spec.amplitude(p_par, p_perp, kr, q_phi, kz, r) : 1.0;
    return u * gauss / (omega * omega);
}

namespace {

struct Piece {
    std::uint32_t bundle;
    double weight;  // r_m |piece| |phz cell| 2 pi r
    double kr;
    double r;
    double q_phi;
    double kz;
};

}  // namespace

InteractionOperator::InteractionOperator(std::shared_ptr<const ElectronSpace> electrons_ptr,
                                         std::shared_ptr<const PlasmonSpace> plasmons_ptr, const KernelSpec& spec,
                                         const DispersionModel& model)
    : electrons_(std::move(electrons_ptr)), plasmons_(std::move(plasmons_ptr)), np_(electrons_->num_p()) {
    const ElectronSpace& electrons = *electrons_;
    const PlasmonSpace& plasmons = *plasmons_;
    if (!(spec.epsilon > 0.0)) throw ConfigError("kernel width epsilon must be positive");
    const auto& bundles = plasmons.bundles;
    const std::size_t nb = bundles.size();
    const std::size_t nr = electrons.num_r();
    omega_ = plasmons.omega;
    kpar_ = plasmons.kz;
    measure_.resize(nb);
    for (std::size_t q = 0; q < nb; ++q) {
        measure_[q] = bundles[q].measure;
        if (!(measure_[q] > 0.0)) throw StepFailure("bundle with non-positive measure in the interaction");
    }

    // Quadrature pieces: each cover triangle clipped to each r-cell.
    const TriMesh& mesh = plasmons.mesh;
    std::vector<std::vector<Piece>> pieces(nr);
    for (std::size_t q = 0; q < nb; ++q) {
        const auto& b = bundles[q];
        const double cell_area = plasmons.phz_cell_area(b.phz_cell);
        for (std::size_t m = 0; m < b.cover.size(); ++m) {
            const auto corners = mesh.corners(b.cover[m]);
            const Polygon tri{corners[0], corners[1], corners[2]};
            const double rlo = std::min({corners[0].r, corners[1].r, corners[2].r});
            const double rhi = std::max({corners[0].r, corners[1].r, corners[2].r});
            for (std::size_t xi = electrons.r.locate(rlo); xi < nr; ++xi) {
                if (electrons.r.edges[xi] >= rhi) break;
                const Polygon piece = clip_to_r_slab(tri, electrons.r.edges[xi], electrons.r.edges[xi + 1]);
                const double area = polygon_area(piece);
                if (!(area > 0.0)) continue;
                const Point2 c = polygon_centroid(piece);
                const double w = b.proportions[m] * area * cell_area * 2.0 * std::numbers::pi * c.r;
                pieces[xi].push_back({static_cast<std::uint32_t>(q), w, c.kr, c.r, b.q_phi, b.kz});
            }
        }
    }

    // Kernel weights per electron cell. Pieces of one bundle are contiguous.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(nr * np_);
    const PGrid& pg = electrons.p;
    parallel_for(nr * np_, [&](std::size_t cell) {
        const std::size_t xi = cell / np_;
        const std::size_t c = cell % np_;
        const std::size_t i = c / pg.n_perp();
        const std::size_t j = c % pg.n_perp();
        const double pp = pg.par.centers[i];
        const double pt = pg.perp.centers[j];
        auto& row = rows[cell];
        const auto& list = pieces[xi];
        std::size_t k = 0;
        while (k < list.size()) {
            const std::uint32_t q = list[k].bundle;
            double K = 0.0;
            for (; k < list.size() && list[k].bundle == q; ++k) {
                const Piece& pc = list[k];
                K += pc.weight * mollified_kernel(pp, pt, pc.kr, pc.q_phi, pc.kz, pc.r, spec, model);
            }
            if (K > 0.0) row.emplace_back(q, K);
        }
    });

    double max_weight = 0.0;
    for (const auto& row : rows)
        for (const auto& e : row) max_weight = std::max(max_weight, e.second);
    const double cutoff = 1e-300 * max_weight;

    row_start_.assign(nr * np_ + 1, 0);
    for (std::size_t cell = 0; cell < rows.size(); ++cell) {
        std::size_t kept = 0;
        for (const auto& e : rows[cell])
            if (e.second >= cutoff) ++kept;
        row_start_[cell + 1] = row_start_[cell] + kept;
    }
    bundle_.reserve(row_start_.back());
    weight_.reserve(row_start_.back());
    for (auto& row : rows) {
        for (const auto& e : row) {
            if (e.second < cutoff) continue;
            bundle_.push_back(e.first);
            weight_.push_back(e.second);
        }
        std::vector<std::pair<std::uint32_t, double>>().swap(row);
    }
}

void slice_gradient(const PGrid& grid, const double* a, double* g_par, double* g_perp) {
    const std::size_t I = grid.n_par();
    const std::size_t J = grid.n_perp();
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t c = i * J + j;
            g_par[c] = i + 1 < I ? (a[c + J] - a[c]) / grid.par.widths[i] : 0.0;
            g_perp[c] = j + 1 < J
                            ? grid.perp.edges[j + 1] / grid.perp.centers[j] * (a[c + 1] - a[c]) / grid.perp.widths[j]
                            : 0.0;
        }
    }
}

void slice_gradient_transpose(const PGrid& grid, const double* y_par, const double* y_perp, double* out) {
    const std::size_t I = grid.n_par();
    const std::size_t J = grid.n_perp();
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t c = i * J + j;
            if (i + 1 < I) {
                const double y = y_par[c] / grid.par.widths[i];
                out[c + J] += y;
                out[c] -= y;
            }
            if (j + 1 < J) {
                const double y = grid.perp.edges[j + 1] / grid.perp.centers[j] * y_perp[c] / grid.perp.widths[j];
                out[c + 1] += y;
                out[c] -= y;
            }
        }
    }
}

std::array<double, 3> InteractionOperator::diffusion_tensor(const std::vector<double>& N, std::size_t xi,
                                                            std::size_t c) const {
    std::array<double, 3> D{0.0, 0.0, 0.0};
    for (std::size_t e = row_begin(xi, c); e < row_end(xi, c); ++e) {
        const std::uint32_t q = bundle_[e];
        const Beta b = beta(q, c);
        const double s = N[q] * omega_[q] * weight_[e];
        D[0] += s * b.par * b.par;
        D[1] += s * b.par * b.perp;
        D[2] += s * b.perp * b.perp;
    }
    return D;
}

std::vector<std::array<double, 3>> InteractionOperator::diffusion_field(const std::vector<double>& N) const {
    const std::size_t nr = electrons_->num_r();
    std::vector<std::array<double, 3>> out(nr * np_);
    parallel_for(nr, [&](std::size_t xi) {
        const double inv = 1.0 / electrons_->r_volume[xi];
        for (std::size_t c = 0; c < np_; ++c) {
            auto D = diffusion_tensor(N, xi, c);
            out[xi * np_ + c] = {D[0] * inv, D[1] * inv, D[2] * inv};
        }
    });
    return out;
}

void InteractionOperator::f_rate(const std::vector<double>& N, const std::vector<double>& a,
                                 std::vector<double>& out) const {
    const std::size_t nr = electrons_->num_r();
    out.assign(nr * np_, 0.0);
    if (empty()) return;
    const PGrid& pg = electrons_->p;
    parallel_for(nr, [&](std::size_t xi) {
        const double* as = a.data() + xi * np_;
        std::vector<double> g_par(np_), g_perp(np_), y_par(np_, 0.0), y_perp(np_, 0.0);
        slice_gradient(pg, as, g_par.data(), g_perp.data());
        for (std::size_t c = 0; c < np_; ++c) {
            double fx = 0.0;
            double fy = 0.0;
            for (std::size_t e = row_begin(xi, c); e < row_end(xi, c); ++e) {
                const std::uint32_t q = bundle_[e];
                const Beta b = beta(q, c);
                const double s = N[q] * omega_[q] * weight_[e] * apply_Lh(g_par[c], g_perp[c], b);
                fx += s * b.par;
                fy += s * b.perp;
            }
            y_par[c] = electrons_->p_volume[c] * fx;
            y_perp[c] = electrons_->p_volume[c] * fy;
        }
        double* os = out.data() + xi * np_;
        slice_gradient_transpose(pg, y_par.data(), y_perp.data(), os);
        for (std::size_t c = 0; c < np_; ++c) os[c] = -os[c] / electrons_->mass_weight(xi, c);
    });
}

void InteractionOperator::reaction_rates(const std::vector<double>& a, std::vector<double>& out) const {
    const std::size_t nr = electrons_->num_r();
    const std::size_t nb = num_bundles();
    out.assign(nb, 0.0);
    if (empty()) return;
    const PGrid& pg = electrons_->p;
    std::vector<std::vector<double>> partial(nr);
    parallel_for(nr, [&](std::size_t xi) {
        auto& acc = partial[xi];
        acc.assign(nb, 0.0);
        const double* as = a.data() + xi * np_;
        std::vector<double> g_par(np_), g_perp(np_);
        slice_gradient(pg, as, g_par.data(), g_perp.data());
        for (std::size_t c = 0; c < np_; ++c) {
            const double ge_par = electrons_->dE_par.values[c];
            const double ge_perp = electrons_->dE_perp.values[c];
            for (std::size_t e = row_begin(xi, c); e < row_end(xi, c); ++e) {
                const std::uint32_t q = bundle_[e];
                const Beta b = beta(q, c);
                acc[q] += electrons_->p_volume[c] * weight_[e] * apply_Lh(ge_par, ge_perp, b) *
                          apply_Lh(g_par[c], g_perp[c], b);
            }
        }
    });
    for (std::size_t xi = 0; xi < nr; ++xi)
        for (std::size_t q = 0; q < nb; ++q) out[q] += partial[xi][q];
    for (std::size_t q = 0; q < nb; ++q) out[q] /= measure_[q];
}

OperatorStats InteractionOperator::stats() const {
    OperatorStats s;
    s.nonzeros = weight_.size();
    s.memory_bytes = weight_.size() * (sizeof(double) + sizeof(std::uint32_t)) +
                     row_start_.size() * sizeof(std::size_t);
    s.predicted_nonzeros = static_cast<double>(np_) * static_cast<double>(electrons_ ? electrons_->num_r() : 0) *
                           static_cast<double>(num_bundles());
    return s;
}

}  // namespace plasmon
