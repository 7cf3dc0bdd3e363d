#ifndef SRTBP_HILL_HPP
#define SRTBP_HILL_HPP

#include <srtbp/hamiltonian.hpp>

#include <limits>
#include <vector>

namespace srtbp {

enum class Primary { m1, m2 };

inline Vec2 primary_position(Primary which) {
    return which == Primary::m1 ? primary_m1() : primary_m2();
}

/// Uniform Cartesian cell-center grid on [xmin,xmax] x [ymin,ymax].
struct GridSpec {
    double xmin{-1.0}, xmax{1.0};
    double ymin{-1.0}, ymax{1.0};
    int nx{1024};
    int ny{1024};

    double dx() const { return (xmax - xmin) / nx; }
    double dy() const { return (ymax - ymin) / ny; }
    Vec2 center(int i, int j) const {
        return Vec2(xmin + (i + 0.5) * dx(), ymin + (j + 0.5) * dy());
    }
    int index(int i, int j) const { return j * nx + i; }
    static GridSpec square(double half_width, int n) {
        return {-half_width, half_width, -half_width, half_width, n, n};
    }
};

enum class ComponentLabel { m1, m2, merged };

/// Connected component of {U <= c} containing the designated primary,
/// flood-filled on a cell grid with 4-connectivity.
struct HillRegionMask {
    GridSpec grid;
    double c{0.0};
    Primary primary{Primary::m1};
    ComponentLabel label{ComponentLabel::m1};
    std::vector<uint8_t> inside;  // size nx*ny

    int cell_count{0};
    double area{0.0};
    double max_dist_from_primary{0.0};
    double min_U{std::numeric_limits<double>::infinity()};
    Vec2 argmin_U{Vec2::Zero()};
    double bbox_xmin{0}, bbox_xmax{0}, bbox_ymin{0}, bbox_ymax{0};

    bool contains(const Vec2& q) const {
        const int i = static_cast<int>(std::floor((q[0] - grid.xmin) / grid.dx()));
        const int j = static_cast<int>(std::floor((q[1] - grid.ymin) / grid.dy()));
        if (i < 0 || j < 0 || i >= grid.nx || j >= grid.ny) return false;
        return inside[grid.index(i, j)] != 0;
    }
};

/// Potential with the collision guard mapped to -infinity so grid scans stay total.
inline double guarded_U(const Vec2& q) {
    try {
        return potential(q).U;
    } catch (const CollisionError&) {
        return -std::numeric_limits<double>::infinity();
    }
}

/// Flood fill of the sublevel component of U containing the given primary.
/// Throws if the component is not enclosed by the grid window.
inline HillRegionMask compute_hill_region(double c, Primary primary, const GridSpec& grid) {
    if (c >= 0.0) {
        throw std::invalid_argument("compute_hill_region: expects a negative energy");
    }
    HillRegionMask mask;
    mask.grid = grid;
    mask.c = c;
    mask.primary = primary;
    mask.inside.assign(static_cast<size_t>(grid.nx) * grid.ny, 0);

    const Vec2 seed_pos = primary_position(primary);
    const int si = static_cast<int>(std::floor((seed_pos[0] - grid.xmin) / grid.dx()));
    const int sj = static_cast<int>(std::floor((seed_pos[1] - grid.ymin) / grid.dy()));
    if (si < 0 || sj < 0 || si >= grid.nx || sj >= grid.ny) {
        throw std::invalid_argument("compute_hill_region: primary outside grid window");
    }

    std::vector<std::pair<int, int>> stack;
    stack.emplace_back(si, sj);
    bool touched_boundary = false;
    mask.bbox_xmin = mask.bbox_ymin = std::numeric_limits<double>::infinity();
    mask.bbox_xmax = mask.bbox_ymax = -std::numeric_limits<double>::infinity();

    // Neighbors connect only through an admissible shared-edge midpoint. A
    // center-only fill bridges the neck for c just below the critical energy,
    // where the barrier {U > c} around the q2-axis is narrower than a cell.
    const auto edge_open = [&](const Vec2& a, const Vec2& b) {
        return guarded_U(0.5 * (a + b)) <= c;
    };

    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        auto& cell = mask.inside[grid.index(i, j)];
        if (cell) continue;
        const Vec2 q = grid.center(i, j);
        const double u = guarded_U(q);
        if (u > c) continue;
        cell = 1;
        ++mask.cell_count;
        const double d = (q - seed_pos).norm();
        mask.max_dist_from_primary = std::max(mask.max_dist_from_primary, d);
        if (u < mask.min_U) {
            mask.min_U = u;
            mask.argmin_U = q;
        }
        mask.bbox_xmin = std::min(mask.bbox_xmin, q[0]);
        mask.bbox_xmax = std::max(mask.bbox_xmax, q[0]);
        mask.bbox_ymin = std::min(mask.bbox_ymin, q[1]);
        mask.bbox_ymax = std::max(mask.bbox_ymax, q[1]);
        const std::pair<int, int> nbrs[4] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
        for (const auto& [ni, nj] : nbrs) {
            if (ni < 0 || nj < 0 || ni >= grid.nx || nj >= grid.ny) {
                touched_boundary = true;
                continue;
            }
            if (!mask.inside[grid.index(ni, nj)] && edge_open(q, grid.center(ni, nj))) {
                stack.emplace_back(ni, nj);
            }
        }
    }

    if (touched_boundary) {
        throw std::runtime_error("compute_hill_region: region not enclosed at this resolution");
    }
    mask.area = mask.cell_count * grid.dx() * grid.dy();

    const Vec2 other = primary_position(primary == Primary::m1 ? Primary::m2 : Primary::m1);
    const bool merged = mask.contains(other + Vec2(0.0, 2.0 * grid.dy()));
    if (merged) {
        mask.label = ComponentLabel::merged;
    } else {
        mask.label = primary == Primary::m1 ? ComponentLabel::m1 : ComponentLabel::m2;
    }
    return mask;
}

/// Uniform sampling of a function of theta with argmin data and a
/// central-difference second derivative at theta = 0.
struct AngularProfile {
    double rho{0.0};
    std::vector<double> theta;
    std::vector<double> value;
    int argmin_index{0};
    double min_value{0.0};
    double argmin_theta{0.0};
    double second_derivative_at_zero{0.0};
};

namespace detail {

template <class F>
AngularProfile sample_profile(double rho, int n, F&& f) {
    AngularProfile prof;
    prof.rho = rho;
    prof.theta.resize(n);
    prof.value.resize(n);
    for (int j = 0; j < n; ++j) {
        prof.theta[j] = two_pi * j / n;
        prof.value[j] = f(prof.theta[j]);
        if (prof.value[j] < prof.value[prof.argmin_index]) prof.argmin_index = j;
    }
    prof.min_value = prof.value[prof.argmin_index];
    prof.argmin_theta = prof.theta[prof.argmin_index];
    const double h = 1e-3;
    prof.second_derivative_at_zero = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    return prof;
}

}  // namespace detail

/// U_rho(theta) on a uniform theta grid (m1-centered polar chart).
inline AngularProfile boundary_profile(double rho, int n = 720) {
    if (rho <= 0.0 || rho > primary_offset + 1e-12) {
        throw std::invalid_argument("boundary_profile: rho outside (0, sqrt(2)-1]");
    }
    return detail::sample_profile(rho, n, [rho](double th) { return eval_U_polar({rho, th}).U; });
}

/// V(theta) = dU/drho at fixed rho on a uniform theta grid.
inline AngularProfile radial_derivative_profile(double rho, int n = 720) {
    if (rho <= 0.0 || rho > primary_offset + 1e-12) {
        throw std::invalid_argument("radial_derivative_profile: rho outside (0, sqrt(2)-1]");
    }
    return detail::sample_profile(rho, n, [rho](double th) { return dU_drho({rho, th}); });
}

/// Radius below which the angular minimum of U_rho leaves theta = 0
/// (the bifurcation the scan logs; located by bisection on the argmin).
inline double locate_argmin_bifurcation(int n_theta = 2048) {
    auto argmin_at_zero = [n_theta](double rho) {
        const auto prof = boundary_profile(rho, n_theta);
        const double t = prof.argmin_theta;
        return t < 1e-2 || two_pi - t < 1e-2;
    };
    double lo = 0.2, hi = primary_offset * 0.999;
    if (!argmin_at_zero(hi) || argmin_at_zero(lo)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (argmin_at_zero(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace srtbp

#endif  // SRTBP_HILL_HPP
