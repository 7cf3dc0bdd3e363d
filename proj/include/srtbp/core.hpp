#ifndef SRTBP_CORE_HPP
#define SRTBP_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace srtbp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double sqrt2 = std::numbers::sqrt2;

/// Rotating-chart abscissa of the primaries: they sit at (+-(sqrt(2)-1), 0).
inline constexpr double primary_offset = std::numbers::sqrt2 - 1.0;

/// Energy of the first Lagrange point (the chart origin).
inline constexpr double lagrange_energy = -1.0;

/// Potential evaluation refuses to approach a primary closer than this.
inline constexpr double collision_guard = 1e-13;

inline Vec2 primary_m1() { return Vec2(-primary_offset, 0.0); }
inline Vec2 primary_m2() { return Vec2(primary_offset, 0.0); }

/// Antipodal singularities of the spherical metric, projected to the chart.
inline Vec2 antipode_m1() { return Vec2(sqrt2 + 1.0, 0.0); }
inline Vec2 antipode_m2() { return Vec2(-(sqrt2 + 1.0), 0.0); }

struct CollisionError : std::domain_error {
    explicit CollisionError(const std::string& what) : std::domain_error(what) {}
};

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    // fmod can land exactly on 2*pi after the correction
    if (t >= two_pi) t = 0.0;
    return t;
}

inline double sq(double v) { return v * v; }

}  // namespace srtbp

#endif  // SRTBP_CORE_HPP
