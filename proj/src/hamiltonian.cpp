#include "plasmon/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plasmon/errors.hpp"

namespace plasmon {

DispersionModel make_default_model(const PlasmaParameters& params) {
    DispersionModel model;
    const double wpe0 = params.omega_pe0;
    const double rmax = params.r_max;
    if (params.profile == DensityProfile::parabolic) {
        model.omega_pe = [wpe0, rmax](double r) {
            const double x = r / rmax;
            return wpe0 * std::sqrt(std::max(0.0, 1.0 - x * x));
        };
    } else {
        model.omega_pe = [wpe0](double) { return wpe0; };
    }
    const double wce0 = params.omega_ce0;
    model.omega_ce = [wce0](double) { return wce0; };
    model.branch = [](double kr, double kphi, double kz, double wpe, double) {
        return std::sqrt(wpe * wpe + kr * kr + kphi * kphi + kz * kz);
    };
    return model;
}

double eval_dispersion(const DispersionModel& model, double kr, double q_phi, double kz, double r) {
    if (!(r > 0.0)) {
        std::ostringstream msg;
        msg << "dispersion relation evaluated at r = " << r << " (k_phi = q_phi / r undefined)";
        throw DomainError(msg.str());
    }
    const double kphi = q_phi / r;
    const double w = model.branch(kr, kphi, kz, model.omega_pe(r), model.omega_ce(r));
    if (!(w > 0.0) || !std::isfinite(w)) {
        std::ostringstream msg;
        msg << "dispersion branch returned non-positive omega = " << w << " at (k_r=" << kr
            << ", q_phi=" << q_phi << ", k_z=" << kz << ", r=" << r << ")";
        throw DomainError(msg.str());
    }
    return w;
}

std::array<double, 3> PLHamiltonian::triangle_values(const TriMesh& mesh, std::size_t t) const {
    const auto& tri = mesh.triangles[t];
    return {node_values[tri[0]], node_values[tri[1]], node_values[tri[2]]};
}

double PLHamiltonian::value_in(const TriMesh& mesh, std::size_t t, Point2 p) const {
    const auto l = mesh.barycentric(t, p);
    const auto h = triangle_values(mesh, t);
    return l[0] * h[0] + l[1] * h[1] + l[2] * h[2];
}

double PLHamiltonian::value_at(const TriMesh& mesh, Point2 p) const {
    return value_in(mesh, mesh.locate(p), p);
}

Point2 PLHamiltonian::gradient(const TriMesh& mesh, std::size_t t) const {
    const auto [a, b, c] = mesh.corners(t);
    const auto h = triangle_values(mesh, t);
    const double det = (b.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (b.r - a.r);
    const double d1 = h[1] - h[0];
    const double d2 = h[2] - h[0];
    const double gx = (d1 * (c.r - a.r) - d2 * (b.r - a.r)) / det;
    const double gy = (d2 * (b.kr - a.kr) - d1 * (c.kr - a.kr)) / det;
    return {gx, gy};
}

PLHamiltonian make_pl_hamiltonian(std::vector<double> node_values, std::size_t phz_cell,
                                  double q_phi, double kz) {
    if (node_values.empty()) throw ConfigError("Hamiltonian needs at least one node value");
    PLHamiltonian H;
    H.phz_cell = phz_cell;
    H.q_phi = q_phi;
    H.kz = kz;
    H.node_values = std::move(node_values);
    for (double v : H.node_values)
        if (!std::isfinite(v)) throw DomainError("non-finite Hamiltonian node value");
    const auto [lo, hi] = std::minmax_element(H.node_values.begin(), H.node_values.end());
    H.min_val = *lo;
    H.max_val = *hi;
    return H;
}

PLHamiltonian sample_pl_hamiltonian(const TriMesh& mesh,
                                    const std::function<double(double, double)>& fn) {
    std::vector<double> values(mesh.num_vertices());
    for (std::size_t v = 0; v < values.size(); ++v)
        values[v] = fn(mesh.vertices[v].kr, mesh.vertices[v].r);
    return make_pl_hamiltonian(std::move(values));
}

PLHamiltonian interpolate_hamiltonian(const DispersionModel& model, const TriMesh& mesh,
                                      double q_phi, double kz, std::size_t phz_cell) {
    const double axis_r = mesh.r_grid.lo + 0.5 * mesh.r_grid.widths.front();
    std::vector<double> values(mesh.num_vertices());
    for (std::size_t v = 0; v < values.size(); ++v) {
        const Point2 p = mesh.vertices[v];
        const double r = p.r > 0.0 ? p.r : axis_r;
        values[v] = eval_dispersion(model, p.kr, q_phi, kz, r);
    }
    return make_pl_hamiltonian(std::move(values), phz_cell, q_phi, kz);
}

Stratification stratify(const PLHamiltonian& H, std::size_t n_s) {
    if (n_s == 0) throw ConfigError("number of strata must be at least 1");
    const double range = H.max_val - H.min_val;
    if (!(range > 0.0)) throw DegenerateFieldError("cannot stratify a constant Hamiltonian");

    std::vector<double> sorted = H.node_values;
    std::sort(sorted.begin(), sorted.end());
    const double tol = 1e-12 * range;
    auto collides = [&](double level) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), level - tol);
        return it != sorted.end() && *it <= level + tol;
    };

    Stratification s;
    s.levels.resize(n_s + 1);
    s.levels.front() = H.min_val;
    s.levels.back() = H.max_val;
    for (std::size_t j = 1; j < n_s; ++j) {
        const double base = H.min_val + range * static_cast<double>(j) / static_cast<double>(n_s);
        double level = base;
        double nudge = 1e-9 * range;
        int doublings = 0;
        while (collides(level)) {
            if (doublings > 64)
                throw DegenerateFieldError("could not move a stratification level off the node values");
            level = base + nudge;
            nudge *= 2.0;
            ++doublings;
        }
        s.levels[j] = level;
    }
    return s;
}

PiecewiseLinearFlow::PiecewiseLinearFlow(const TriMesh& mesh, const PLHamiltonian& H)
    : mesh_(&mesh), H_(&H) {
    const double h = std::min(*std::min_element(mesh.kr_grid.widths.begin(), mesh.kr_grid.widths.end()),
                              *std::min_element(mesh.r_grid.widths.begin(), mesh.r_grid.widths.end()));
    nudge_ = 1e-12 * h;
}

Point2 PiecewiseLinearFlow::velocity(std::size_t t) const {
    const Point2 g = H_->gradient(*mesh_, t);
    // d(k_r)/dt = -dH/dr, dr/dt = dH/dk_r
    return {-g.r, g.kr};
}

PiecewiseLinearFlow::State PiecewiseLinearFlow::start(Point2 p) const {
    State s;
    s.position = p;
    s.triangle = mesh_->locate(p);
    s.left_domain = !mesh_->contains(p);
    return s;
}

namespace {

// Gradients of the barycentric coordinates of triangle t.
std::array<Point2, 3> barycentric_gradients(const TriMesh& mesh, std::size_t t) {
    const auto [a, b, c] = mesh.corners(t);
    const double det = (b.kr - a.kr) * (c.r - a.r) - (c.kr - a.kr) * (b.r - a.r);
    const Point2 g1{(c.r - a.r) / det, -(c.kr - a.kr) / det};
    const Point2 g2{-(b.r - a.r) / det, (b.kr - a.kr) / det};
    return {Point2{-g1.kr - g2.kr, -g1.r - g2.r}, g1, g2};
}

}  // namespace

PiecewiseLinearFlow::State PiecewiseLinearFlow::advance(State s, double duration) const {
    constexpr std::size_t kMaxSegments = 1'000'000;
    double remaining = duration;
    std::size_t entered_edge = 3;  // local vertex index opposite the entry edge, 3 = none
    for (std::size_t seg = 0; seg < kMaxSegments && remaining > 0.0 && !s.left_domain; ++seg) {
        const std::size_t t = s.triangle;
        const Point2 v = velocity(t);
        if (v.kr == 0.0 && v.r == 0.0) return s;

        const auto lam = mesh_->barycentric(t, s.position);
        const auto grads = barycentric_gradients(*mesh_, t);
        double t_exit = std::numeric_limits<double>::infinity();
        std::size_t exit_k = 3;
        std::size_t hits = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            if (k == entered_edge) continue;
            const double rate = grads[k].kr * v.kr + grads[k].r * v.r;
            if (rate >= 0.0) continue;
            const double tk = std::max(lam[k], 0.0) / (-rate);
            if (exit_k == 3 || tk < t_exit - 1e-14 * t_exit) {
                t_exit = tk;
                exit_k = k;
                hits = 1;
            } else if (std::abs(tk - t_exit) <= 1e-14 * t_exit) {
                ++hits;
            }
        }

        if (t_exit >= remaining) {
            s.position.kr += v.kr * remaining;
            s.position.r += v.r * remaining;
            return s;
        }
        s.position.kr += v.kr * t_exit;
        s.position.r += v.r * t_exit;
        remaining -= t_exit;

        const auto& tri = mesh_->triangles[t];
        const std::size_t va = tri[(exit_k + 1) % 3];
        const std::size_t vb = tri[(exit_k + 2) % 3];
        std::size_t next = t;
        if (hits == 1) {
            for (std::size_t nb : mesh_->neighbors[t]) {
                const auto& ot = mesh_->triangles[nb];
                const bool has_a = ot[0] == va || ot[1] == va || ot[2] == va;
                const bool has_b = ot[0] == vb || ot[1] == vb || ot[2] == vb;
                if (has_a && has_b) {
                    next = nb;
                    break;
                }
            }
        }
        if (next != t) {
            const auto& ot = mesh_->triangles[next];
            for (std::size_t k = 0; k < 3; ++k)
                if (ot[k] != va && ot[k] != vb) entered_edge = k;
            s.triangle = next;
            continue;
        }
        // Boundary edge, or the orbit runs through a vertex: step a hair
        // forward along the current segment and relocate.
        const double speed = std::hypot(v.kr, v.r);
        const double dt = std::min(remaining, nudge_ / speed);
        const Point2 probe{s.position.kr + v.kr * dt, s.position.r + v.r * dt};
        if (!mesh_->contains(probe)) {
            s.left_domain = true;
            return s;
        }
        s.position = probe;
        remaining -= dt;
        s.triangle = mesh_->locate(probe);
        entered_edge = 3;
    }
    return s;
}

}  // namespace plasmon
