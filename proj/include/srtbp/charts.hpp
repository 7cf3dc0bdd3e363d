#ifndef SRTBP_CHARTS_HPP
#define SRTBP_CHARTS_HPP

#include <srtbp/core.hpp>

namespace srtbp {

/// Point of the rotating stereographic chart together with conjugate momenta.
struct PlanarPhaseState {
    Vec2 q{Vec2::Zero()};
    Vec2 p{Vec2::Zero()};

    Vec4 to_vec4() const { return Vec4(q[0], q[1], p[0], p[1]); }
    static PlanarPhaseState from_vec4(const Vec4& z) {
        return {Vec2(z[0], z[1]), Vec2(z[2], z[3])};
    }
};

/// Polar position relative to a primary, theta normalized to [0, 2*pi).
struct PolarPosition {
    double rho{0.0};
    double theta{0.0};
};

/// Image of a phase state under the canonical flip x = -p, y = q - center.
struct FlipState {
    Vec2 x{Vec2::Zero()};
    Vec2 y{Vec2::Zero()};
};

/// (xi, eta) with xi on the unit sphere and eta cotangent at xi.
struct SphereCotangentState {
    Vec3 xi{Vec3::Zero()};
    Vec3 eta{Vec3::Zero()};

    double sphere_residual() const { return std::abs(xi.norm() - 1.0); }
    double orthogonality_residual() const { return std::abs(xi.dot(eta)); }
};

inline constexpr double constraint_tol = 1e-12;

inline PolarPosition polar_from_cartesian(const Vec2& q, const Vec2& center) {
    const Vec2 d = q - center;
    const double rho = d.norm();
    if (rho == 0.0) return {0.0, 0.0};
    return {rho, wrap_angle(std::atan2(d[1], d[0]))};
}

inline Vec2 cartesian_from_polar(const PolarPosition& pos, const Vec2& center) {
    return center + pos.rho * Vec2(std::cos(pos.theta), std::sin(pos.theta));
}

inline FlipState flip(const PlanarPhaseState& s, const Vec2& center) {
    return {-s.p, s.q - center};
}

inline PlanarPhaseState unflip(const FlipState& f, const Vec2& center) {
    return {f.y + center, -f.x};
}

/// Inverse stereographic lift of (x, y) onto the cotangent bundle of the sphere.
inline SphereCotangentState moser_lift(const FlipState& f) {
    const double xx = f.x.squaredNorm();
    const double d = xx + 1.0;
    const double xy = f.x.dot(f.y);
    SphereCotangentState s;
    s.xi = Vec3((xx - 1.0) / d, 2.0 * f.x[0] / d, 2.0 * f.x[1] / d);
    s.eta = Vec3(xy,
                 0.5 * d * f.y[0] - xy * f.x[0],
                 0.5 * d * f.y[1] - xy * f.x[1]);
    return s;
}

/// Stereographic projection along (1,0,0); undefined on the collision locus xi0 = 1.
inline FlipState moser_project(const SphereCotangentState& s) {
    const double one_minus_xi0 = 1.0 - s.xi[0];
    if (one_minus_xi0 < 1e-14) {
        throw CollisionError("moser_project: at projection point");
    }
    FlipState f;
    f.x = Vec2(s.xi[1], s.xi[2]) / one_minus_xi0;
    f.y = Vec2(s.eta[1] * one_minus_xi0 + s.xi[1] * s.eta[0],
               s.eta[2] * one_minus_xi0 + s.xi[2] * s.eta[0]);
    return f;
}

/// South-pole stereographic projection of the physical sphere to the chart plane.
inline Vec2 physical_stereographic(const Vec3& point) {
    if (std::abs(point.norm() - 1.0) > 1e-9) {
        throw std::domain_error("physical_stereographic: input not on unit sphere");
    }
    const double denom = 1.0 + point[2];
    if (denom < 1e-12) {
        throw std::domain_error("physical_stereographic: south pole excluded");
    }
    return Vec2(point[0] / denom, point[1] / denom);
}

}  // namespace srtbp

#endif  // SRTBP_CHARTS_HPP
