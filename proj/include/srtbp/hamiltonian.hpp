#ifndef SRTBP_HAMILTONIAN_HPP
#define SRTBP_HAMILTONIAN_HPP

#include <srtbp/charts.hpp>
#include <srtbp/core.hpp>

namespace srtbp {

/// Value of the rotating-frame Hamiltonian split as H = K + U0 + U1 + U2.
struct HamiltonianTerms {
    double K{0.0};
    double U0{0.0};
    double U1{0.0};
    double U2{0.0};
    double H{0.0};
};

struct PotentialTerms {
    double U0{0.0};
    double U1{0.0};
    double U2{0.0};
    double U{0.0};
};

enum class EnergyRegime { below_L1, at_L1, above_L1 };

struct EnergySpec {
    double c{0.0};
    EnergyRegime regime{EnergyRegime::below_L1};

    static EnergySpec classify(double c, double tol = 0.0) {
        EnergySpec s;
        s.c = c;
        if (c < lagrange_energy - tol) {
            s.regime = EnergyRegime::below_L1;
        } else if (c > lagrange_energy + tol) {
            s.regime = EnergyRegime::above_L1;
        } else {
            s.regime = EnergyRegime::at_L1;
        }
        return s;
    }
};

namespace detail {

inline void check_off_primaries(const Vec2& q) {
    if ((q - primary_m1()).norm() < collision_guard ||
        (q - primary_m2()).norm() < collision_guard) {
        throw CollisionError("potential: collision singularity");
    }
}

// Numerators of the two gravitational terms; the sign convention follows the
// Cartesian Hamiltonian with m2's potential first (U1) and m1's second (U2).
inline double pot_numerator_m2(const Vec2& q) {
    return sqrt2 * (q[0] - 0.5 * (q.squaredNorm() - 1.0));
}

inline double pot_numerator_m1(const Vec2& q) {
    return sqrt2 * (-q[0] - 0.5 * (q.squaredNorm() - 1.0));
}

}  // namespace detail

/// Effective potential U = U0 + U1 + U2 in the rotating chart.
inline PotentialTerms potential(const Vec2& q) {
    detail::check_off_primaries(q);
    const double A = q.squaredNorm() + 1.0;
    const double A2 = A * A;

    PotentialTerms t;
    t.U0 = -2.0 * q.squaredNorm() / A2;

    const double n1 = detail::pot_numerator_m2(q);
    const double n2 = detail::pot_numerator_m1(q);
    const double D1 = A2 - n1 * n1;
    const double D2 = A2 - n2 * n2;
    if (D1 <= 0.0 || D2 <= 0.0) {
        throw std::domain_error("potential: antipodal singularity reached");
    }
    t.U1 = -n1 / (2.0 * std::sqrt(D1));
    t.U2 = -n2 / (2.0 * std::sqrt(D2));
    t.U = t.U0 + t.U1 + t.U2;
    return t;
}

/// Kinetic term of the completed-square Hamiltonian; nonnegative by construction.
inline double kinetic(const PlanarPhaseState& s) {
    const double A = s.q.squaredNorm() + 1.0;
    const double f1 = A * s.p[0] + 4.0 * s.q[1] / A;
    const double f2 = A * s.p[1] - 4.0 * s.q[0] / A;
    return (f1 * f1 + f2 * f2) / 8.0;
}

inline HamiltonianTerms eval_H(const PlanarPhaseState& s) {
    const PotentialTerms u = potential(s.q);
    HamiltonianTerms t;
    t.K = kinetic(s);
    t.U0 = u.U0;
    t.U1 = u.U1;
    t.U2 = u.U2;
    t.H = t.K + t.U0 + t.U1 + t.U2;
    return t;
}

/// The same energy evaluated before completing the square (H1 + H2 + U1 + U2).
inline double eval_H_split(const PlanarPhaseState& s) {
    detail::check_off_primaries(s.q);
    const double A = s.q.squaredNorm() + 1.0;
    const double H1 = A * A * s.p.squaredNorm() / 8.0;
    const double H2 = s.q[1] * s.p[0] - s.q[0] * s.p[1];
    const PotentialTerms u = potential(s.q);
    return H1 + H2 + u.U1 + u.U2;
}

/// Product-of-distances form of the energy (gravitational terms written over
/// |q - q_m||q - qbar_m|); used as an independent route for the regularizer.
inline double eval_H_product_form(const PlanarPhaseState& s) {
    detail::check_off_primaries(s.q);
    const Vec2 q = s.q;
    const double A = q.squaredNorm() + 1.0;
    const double H1 = A * A * s.p.squaredNorm() / 8.0;
    const double H2 = q[1] * s.p[0] - q[0] * s.p[1];
    const double num_m2 = q[0] - 0.5 * (q.squaredNorm() - 1.0);
    const double num_m1 = -q[0] - 0.5 * (q.squaredNorm() - 1.0);
    const double den_m2 = (q - primary_m2()).norm() * (q - antipode_m2()).norm();
    const double den_m1 = (q - primary_m1()).norm() * (q - antipode_m1()).norm();
    return H1 + H2 - num_m2 / den_m2 - num_m1 / den_m1;
}

/// Term-by-term gradient of the effective potential.
struct PotentialGradients {
    Vec2 gU0{Vec2::Zero()};
    Vec2 gU1{Vec2::Zero()};
    Vec2 gU2{Vec2::Zero()};
};

inline PotentialGradients potential_gradients(const Vec2& q) {
    detail::check_off_primaries(q);
    const double qq = q.squaredNorm();
    const double A = qq + 1.0;
    const double A2 = A * A;
    PotentialGradients g;
    g.gU0 = -4.0 * (1.0 - qq) / (A * A2) * q;

    const double n1 = detail::pot_numerator_m2(q);
    const double n2 = detail::pot_numerator_m1(q);
    const Vec2 dn1(sqrt2 * (1.0 - q[0]), -sqrt2 * q[1]);
    const Vec2 dn2(sqrt2 * (-1.0 - q[0]), -sqrt2 * q[1]);
    const double D1 = A2 - n1 * n1;
    const double D2 = A2 - n2 * n2;
    if (D1 <= 0.0 || D2 <= 0.0) {
        throw std::domain_error("potential_gradients: antipodal singularity reached");
    }
    const Vec2 dD1 = 4.0 * A * q - 2.0 * n1 * dn1;
    const Vec2 dD2 = 4.0 * A * q - 2.0 * n2 * dn2;
    const double rt1 = std::sqrt(D1);
    const double rt2 = std::sqrt(D2);
    g.gU1 = -dn1 / (2.0 * rt1) + n1 / (4.0 * D1 * rt1) * dD1;
    g.gU2 = -dn2 / (2.0 * rt2) + n2 / (4.0 * D2 * rt2) * dD2;
    return g;
}

/// Gradient of the effective potential U = U0 + U1 + U2.
inline Vec2 grad_U(const Vec2& q) {
    const auto g = potential_gradients(q);
    return g.gU0 + g.gU1 + g.gU2;
}

/// Radial derivatives of the individual polar potential terms at (rho, theta).
struct PolarTermDerivatives {
    double dU0{0.0};
    double dU1{0.0};
    double dU2{0.0};
    double dU{0.0};
};

inline PolarTermDerivatives dU_drho_terms(const PolarPosition& pos) {
    const auto g = potential_gradients(cartesian_from_polar(pos, primary_m1()));
    const Vec2 dir(std::cos(pos.theta), std::sin(pos.theta));
    PolarTermDerivatives d;
    d.dU0 = g.gU0.dot(dir);
    d.dU1 = g.gU1.dot(dir);
    d.dU2 = g.gU2.dot(dir);
    d.dU = d.dU0 + d.dU1 + d.dU2;
    return d;
}

/// Analytic gradient of H in the order (q1, q2, p1, p2), computed from the
/// raw split H1 + H2 + U1 + U2 (U0 is already inside the completed square).
inline Vec4 grad_H(const PlanarPhaseState& s) {
    const double A = s.q.squaredNorm() + 1.0;
    const double pp = s.p.squaredNorm();
    const auto pg = potential_gradients(s.q);
    const Vec2 gU = pg.gU1 + pg.gU2;
    Vec4 g;
    g[0] = 0.5 * A * s.q[0] * pp - s.p[1] + gU[0];
    g[1] = 0.5 * A * s.q[1] * pp + s.p[0] + gU[1];
    g[2] = 0.25 * A * A * s.p[0] + s.q[1];
    g[3] = 0.25 * A * A * s.p[1] - s.q[0];
    return g;
}

/// Chart point of a polar position centered at the first mass.
inline Vec2 chart_point_m1(const PolarPosition& pos) {
    return cartesian_from_polar(pos, primary_m1());
}

/// Potential in shifted polar coordinates centered at m1, defined by exact
/// composition with the Cartesian terms.
inline PotentialTerms eval_U_polar(const PolarPosition& pos) {
    if (pos.rho <= 0.0) throw CollisionError("eval_U_polar: collision singularity");
    return potential(chart_point_m1(pos));
}

/// Radial derivative of the potential in the polar chart centered at m1.
inline double dU_drho(const PolarPosition& pos) {
    const Vec2 g = grad_U(chart_point_m1(pos));
    return std::cos(pos.theta) * g[0] + std::sin(pos.theta) * g[1];
}

struct LagrangePointData {
    Vec4 state{Vec4::Zero()};
    double energy{lagrange_energy};
};

/// First Lagrange point of the rotating chart and its energy.
inline LagrangePointData lagrange_point_data() {
    LagrangePointData d;
    d.state = Vec4::Zero();
    d.energy = eval_H(PlanarPhaseState{}).H;
    return d;
}

/// Momenta minimizing K over the fiber at q; there K = 0 and H = U(q).
inline Vec2 fiber_floor_momentum(const Vec2& q) {
    const double A = q.squaredNorm() + 1.0;
    return Vec2(-4.0 * q[1] / (A * A), 4.0 * q[0] / (A * A));
}

/// States on the fiber over q with H = c, parametrized by an angle phi.
/// Requires U(q) <= c; the fiber is the circle K = c - U(q).
inline PlanarPhaseState fiber_state(const Vec2& q, double c, double phi) {
    const PotentialTerms u = potential(q);
    const double gap = c - u.U;
    if (gap < 0.0) {
        throw std::domain_error("fiber_state: position outside Hill region");
    }
    const double r = std::sqrt(8.0 * gap);
    const double A = q.squaredNorm() + 1.0;
    PlanarPhaseState s;
    s.q = q;
    s.p[0] = (-4.0 * q[1] / A + r * std::cos(phi)) / A;
    s.p[1] = (4.0 * q[0] / A + r * std::sin(phi)) / A;
    return s;
}

}  // namespace srtbp

#endif  // SRTBP_HAMILTONIAN_HPP
