#ifndef SRTBP_NECK_HPP
#define SRTBP_NECK_HPP

#include <srtbp/hamiltonian.hpp>

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

namespace srtbp {

/// Quadratic model of H at the first Lagrange point: the published matrices
/// verbatim, plus the finite-difference Hessian cross-check against 2*Qfull.
struct QuadraticForms {
    Mat2 Qtilde;
    Mat4 Kbar;
    Mat4 Qfull;
    double C{0.0};
    Mat4 fd_hessian;
    double hessian_max_dev{0.0};
    bool hessian_matches{false};
};

inline Mat4 fd_hessian_H(const Vec4& z0, double h = 1e-4) {
    auto H_of = [](const Vec4& z) { return eval_H(PlanarPhaseState::from_vec4(z)).H; };
    Mat4 hess;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            Vec4 zpp = z0, zpm = z0, zmp = z0, zmm = z0;
            zpp[i] += h; zpp[j] += h;
            zpm[i] += h; zpm[j] -= h;
            zmp[i] -= h; zmp[j] += h;
            zmm[i] -= h; zmm[j] -= h;
            hess(i, j) = (H_of(zpp) - H_of(zpm) - H_of(zmp) + H_of(zmm)) / (4.0 * h * h);
        }
    }
    return hess;
}

inline QuadraticForms quadratic_forms() {
    QuadraticForms qf;
    qf.Qtilde << -10.0, 0.0,
                 0.0, 6.0;
    qf.Kbar << 2.0, 0.0, 0.0, -0.5,
               0.0, 2.0, 0.5, 0.0,
               0.0, 0.5, 0.125, 0.0,
               -0.5, 0.0, 0.0, 0.125;
    qf.Qfull << -8.0, 0.0, 0.0, -0.5,
                0.0, 8.0, 0.5, 0.0,
                0.0, 0.5, 0.125, 0.0,
                -0.5, 0.0, 0.0, 0.125;
    qf.C = potential(Vec2::Zero()).U;
    qf.fd_hessian = fd_hessian_H(Vec4::Zero());
    qf.hessian_max_dev = (qf.fd_hessian - 2.0 * qf.Qfull).cwiseAbs().maxCoeff();
    qf.hessian_matches = qf.hessian_max_dev < 1e-5;
    return qf;
}

/// The Weinstein-type linear Liouville field Y_{a,b}.
inline Vec4 weinstein_field(const PlanarPhaseState& s, double a, double b) {
    return Vec4(a * s.q[0], b * s.q[1], (1.0 - a) * s.p[0], (1.0 - b) * s.p[1]);
}

struct YQResult {
    Mat4 matrix;
    Vec4 eigenvalues;  // ascending
};

/// Quadratic form of Y(Q) as displayed; eigenvalues sorted ascending.
inline YQResult YQ_matrix(double a, double b) {
    YQResult r;
    r.matrix << -16.0 * a, 0.0, 0.0, 0.5 * (-a + b - 1.0),
                0.0, 16.0 * b, 0.5 * (b + 1.0 - a), 0.0,
                0.0, 0.5 * (b + 1.0 - a), 0.25 * (1.0 - a), 0.0,
                0.5 * (-a + b - 1.0), 0.0, 0.0, 0.25 * (1.0 - b);
    Eigen::SelfAdjointEigenSolver<Mat4> es(r.matrix);
    r.eigenvalues = es.eigenvalues();
    return r;
}

/// Primitive of alpha1 - alpha0.
inline double G_primitive(const PlanarPhaseState& s, double a, double b) {
    return (1.0 - a) * s.q[0] * s.p[0] - (sqrt2 - 1.0) * s.p[0] +
           (1.0 - b) * s.p[1] * s.q[1];
}

/// One-form components in the order (dq1, dq2, dp1, dp2).
inline Vec4 alpha0_form(const PlanarPhaseState& s) {
    return Vec4(0.0, 0.0, sqrt2 - 1.0 - s.q[0], -s.q[1]);
}

inline Vec4 alpha1_form(const PlanarPhaseState& s, double a, double b) {
    return Vec4((1.0 - a) * s.p[0], (1.0 - b) * s.p[1], -a * s.q[0], -b * s.q[1]);
}

/// Contraction i_V omega for omega = dp ^ dq, as (dq1, dq2, dp1, dp2) components.
inline Vec4 contract_omega(const Vec4& v) {
    return Vec4(v[2], v[3], -v[0], -v[1]);
}

/// Cut-off data for the interpolated Liouville field.
struct InterpolationSpec {
    double a{-0.5};
    double b{0.5};
    double eps1{0.02};
    double eps2{0.05};
};

namespace detail {

inline double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
inline double bump_deriv(double s) {
    return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0;
}

}  // namespace detail

/// Even cut-off profile: 1 on [-eps1, eps1], 0 outside (-eps2, eps2), smooth
/// and non-increasing in |w| in between.
inline double cutoff(double w, const InterpolationSpec& spec) {
    const double x = std::abs(w);
    if (x <= spec.eps1) return 1.0;
    if (x >= spec.eps2) return 0.0;
    const double u = (x - spec.eps1) / (spec.eps2 - spec.eps1);
    const double n = detail::bump(1.0 - u);
    return n / (n + detail::bump(u));
}

inline double cutoff_derivative(double w, const InterpolationSpec& spec) {
    const double x = std::abs(w);
    if (x <= spec.eps1 || x >= spec.eps2) return 0.0;
    const double u = (x - spec.eps1) / (spec.eps2 - spec.eps1);
    const double n = detail::bump(1.0 - u);
    const double m = detail::bump(u);
    const double np = -detail::bump_deriv(1.0 - u);
    const double mp = detail::bump_deriv(u);
    const double dfdu = (np * m - n * mp) / sq(n + m);
    return dfdu / (spec.eps2 - spec.eps1) * (w >= 0.0 ? 1.0 : -1.0);
}

/// Cut-off variable of the interpolation.
inline double neck_variable(const PlanarPhaseState& s) { return s.q[0] + s.p[1] / 8.0; }

/// Radial Liouville field matching the displayed alpha0.
inline Vec4 Z0_field(const PlanarPhaseState& s) {
    return Vec4(s.q[0] - (sqrt2 - 1.0), s.q[1], 0.0, 0.0);
}

/// Hamiltonian-type field of G: i_{Z_G} omega = dG.
inline Vec4 ZG_field(const PlanarPhaseState& s, double a, double b) {
    return Vec4((sqrt2 - 1.0) - (1.0 - a) * s.q[0], -(1.0 - b) * s.q[1],
                (1.0 - a) * s.p[0], (1.0 - b) * s.p[1]);
}

/// Field of the cut-off alone: i_{Z_f} omega = df.
inline Vec4 Zf_field(const PlanarPhaseState& s, const InterpolationSpec& spec) {
    const double fp = cutoff_derivative(neck_variable(s), spec);
    return Vec4(0.0, -fp / 8.0, fp, 0.0);
}

/// Interpolated Liouville field Z = Z0 + Z_{fG} = Z0 + f Z_G + G Z_f.
inline Vec4 Z_field(const PlanarPhaseState& s, const InterpolationSpec& spec) {
    const double f = cutoff(neck_variable(s), spec);
    const double G = G_primitive(s, spec.a, spec.b);
    return Z0_field(s) + f * ZG_field(s, spec.a, spec.b) + G * Zf_field(s, spec);
}

/// The mirror-conjugate field: mu is the H-preserving antisymplectic
/// involution (q1,q2,p1,p2) -> (-q1,q2,p1,-p2), so mu_* Z is again Liouville
/// and covers the other side of the neck; both sides equal Y where f = 1.
inline PlanarPhaseState mirror_state(const PlanarPhaseState& s) {
    return {Vec2(-s.q[0], s.q[1]), Vec2(s.p[0], -s.p[1])};
}

inline Vec4 Z_field_glued(const PlanarPhaseState& s, const InterpolationSpec& spec) {
    if (neck_variable(s) >= 0.0) return Z_field(s, spec);
    const Vec4 zm = Z_field(mirror_state(s), spec);
    return Vec4(-zm[0], zm[1], zm[2], -zm[3]);
}

/// Transversality scan of the glued field across the neck for -1 < c < -1+eps.
/// Samples the energy surface inside a phase-space ball around L1 (the cut-off
/// variable alone does not localize there: far-lobe states with large p2 also
/// have small q1 + p2/8) plus the two outer bands where Z = Z0.
struct NeckScanReport {
    double c{0.0};
    InterpolationSpec spec;
    double z_ball{0.4};
    double w_max{0.2};
    int samples{0};
    double min_ZH{0.0};
    Vec4 argmin_state{Vec4::Zero()};
    // zone minima by |w|: f = 1 core, interpolation band, outer
    double min_core{0.0}, min_band{0.0}, min_outer{0.0};
    // the three summands at the argmin (evaluated on the displayed side)
    double term_Z0{0.0}, term_Y{0.0}, term_G{0.0};
    bool pass{false};
};

inline NeckScanReport ZH_scan(double c, const InterpolationSpec& spec, int n_q = 96,
                              int n_phi = 24, double z_ball = 0.4, double w_max = 0.2) {
    if (c <= lagrange_energy || c >= lagrange_energy + 0.05 + 1e-12) {
        throw std::invalid_argument("ZH_scan: requires -1 < c < -0.95");
    }
    NeckScanReport rep;
    rep.c = c;
    rep.spec = spec;
    rep.z_ball = z_ball;
    rep.w_max = w_max;
    rep.min_ZH = rep.min_core = rep.min_band = rep.min_outer =
        std::numeric_limits<double>::infinity();

    for (int i = 0; i < n_q; ++i) {
        const double q1 = -z_ball + 2.0 * z_ball * (i + 0.5) / n_q;
        for (int j = 0; j < n_q; ++j) {
            const double q2 = -z_ball + 2.0 * z_ball * (j + 0.5) / n_q;
            const Vec2 q(q1, q2);
            if (q.norm() > z_ball) continue;
            double gap;
            try {
                gap = c - potential(q).U;
            } catch (const CollisionError&) {
                continue;
            }
            if (gap < 0.0) continue;
            for (int m = 0; m < n_phi; ++m) {
                const auto s = fiber_state(q, c, two_pi * m / n_phi);
                if (s.to_vec4().norm() > z_ball) continue;
                const double w = neck_variable(s);
                if (std::abs(w) > w_max) continue;
                const double zh = grad_H(s).dot(Z_field_glued(s, spec));
                ++rep.samples;
                if (zh < rep.min_ZH) {
                    rep.min_ZH = zh;
                    rep.argmin_state = s.to_vec4();
                    const auto side = w >= 0.0 ? s : mirror_state(s);
                    const double f = cutoff(neck_variable(side), spec);
                    const Vec4 g = grad_H(side);
                    rep.term_Z0 = (1.0 - f) * g.dot(Z0_field(side));
                    rep.term_Y = f * g.dot(Z0_field(side) + ZG_field(side, spec.a, spec.b));
                    rep.term_G = G_primitive(side, spec.a, spec.b) * g.dot(Zf_field(side, spec));
                }
                const double aw = std::abs(w);
                double& zone = aw <= spec.eps1 ? rep.min_core
                               : aw < spec.eps2 ? rep.min_band
                                                : rep.min_outer;
                zone = std::min(zone, zh);
            }
        }
    }
    rep.pass = rep.samples > 0 && rep.min_ZH > 0.0;
    return rep;
}

/// Experimentally determined energy window: the largest eps in (eps_min, 0.05]
/// with a passing scan at c = -1 + eps, located by bisection.
struct NeckWindowResult {
    double eps{0.0};
    bool found{false};
    std::vector<std::pair<double, bool>> probes;
};

inline NeckWindowResult bisect_neck_window(const InterpolationSpec& spec, int n_q = 72,
                                           int n_phi = 16, double eps_min = 1e-4) {
    NeckWindowResult res;
    auto passes = [&](double eps) {
        const bool ok = ZH_scan(-1.0 + eps, spec, n_q, n_phi).pass;
        res.probes.emplace_back(eps, ok);
        return ok;
    };
    double hi = 0.05;
    if (passes(hi)) {
        res.eps = hi;
        res.found = true;
        return res;
    }
    double lo = hi;
    while (lo > eps_min) {
        lo *= 0.5;
        if (passes(lo)) break;
    }
    if (lo <= eps_min) return res;
    for (int it = 0; it < 12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    res.eps = lo;
    res.found = true;
    return res;
}

/// Section of the critical quadric {Q = 0} by {q1 + p2/8 = delta}, reduced by
/// exact coefficient arithmetic to a quadric in (q1, q2, p1).
struct EllipsoidReport {
    double delta{0.0};
    Mat3 form;          // quadratic part after substitution
    Vec3 center{Vec3::Zero()};
    double rhs{0.0};    // (v-center)^T form (v-center) = rhs
    Vec3 semi_axes{Vec3::Zero()};
    bool collapsed{false};
};

inline EllipsoidReport ellipsoid_section(double delta) {
    const Mat4 Q = quadratic_forms().Qfull;
    Eigen::Matrix<double, 4, 3> S;
    S << 1, 0, 0,
         0, 1, 0,
         0, 0, 1,
         -8, 0, 0;
    Vec4 d(0, 0, 0, 8.0 * delta);

    EllipsoidReport rep;
    rep.delta = delta;
    rep.form = S.transpose() * Q * S;
    const Vec3 lin = 2.0 * S.transpose() * Q * d;
    const double c0 = d.dot(Q * d);
    rep.center = rep.form.ldlt().solve(-0.5 * lin);
    rep.rhs = rep.center.dot(rep.form * rep.center) - c0;
    Eigen::SelfAdjointEigenSolver<Mat3> es(rep.form);
    for (int i = 0; i < 3; ++i) {
        rep.semi_axes[i] =
            es.eigenvalues()[i] > 0.0 && rep.rhs > 0.0
                ? std::sqrt(rep.rhs / es.eigenvalues()[i])
                : 0.0;
    }
    rep.collapsed = rep.rhs < 1e-15;
    return rep;
}

/// Value of the full quadratic form at (q1, q2, p1) with p2 = 8(delta - q1).
inline double quadric_value(const Vec3& v, double delta) {
    const Mat4 Q = quadratic_forms().Qfull;
    const Vec4 z(v[0], v[1], v[2], 8.0 * (delta - v[0]));
    return z.dot(Q * z);
}

/// The completed-square rewrite of the same substitution.
inline double quadric_value_completed(const Vec3& v, double delta) {
    const double q1 = v[0], q2 = v[1], p1 = v[2];
    return 2.0 * (sq(p1 + 4.0 * q2) / 16.0 + sq(2.0 * q1 - 3.0 * delta) + 3.0 * q2 * q2 -
                  5.0 * delta * delta);
}

}  // namespace srtbp

#endif  // SRTBP_NECK_HPP
