#ifndef SRTBP_DYNAMICS_HPP
#define SRTBP_DYNAMICS_HPP

#include <srtbp/hamiltonian.hpp>
#include <srtbp/regularizer.hpp>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace srtbp {

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with dense output
// ---------------------------------------------------------------------------

struct IntegratorStats {
    long accepted{0};
    long rejected{0};
    long rhs_evals{0};
};

struct IntegratorOptions {
    double rtol{1e-12};
    double atol{1e-14};
    double h_init{1e-3};
    double h_max{0.5};
    long max_steps{2000000};
};

/// One accepted step with the dense-output polynomial of the 5(4) pair.
template <int N>
struct DenseStep {
    using Vec = Eigen::Matrix<double, N, 1>;
    double t0{0.0}, h{0.0};
    Vec r1, r2, r3, r4, r5;

    Vec eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
};

/// Adaptive Dormand-Prince 5(4). The callback sees every accepted step and may
/// stop the run (chart switches, section crossings).
template <int N>
class Dopri5 {
  public:
    using Vec = Eigen::Matrix<double, N, 1>;
    using Rhs = std::function<Vec(double, const Vec&)>;
    // return false to stop after this step
    using StepCallback = std::function<bool(const DenseStep<N>&, const Vec&)>;

    Dopri5(Rhs rhs, IntegratorOptions opts) : rhs_(std::move(rhs)), opts_(opts) {}

    IntegratorStats stats;

    /// Integrates from (t0, y0) toward t1; returns the final accepted state.
    std::pair<double, Vec> run(double t0, const Vec& y0, double t1,
                               const StepCallback& on_step = {},
                               const std::function<Vec(const Vec&)>& post_step = {}) {
        double t = t0;
        Vec y = y0;
        double h = std::min(opts_.h_init, std::abs(t1 - t0));
        const double dir = t1 >= t0 ? 1.0 : -1.0;
        h *= dir;
        Vec k1 = rhs_(t, y);
        ++stats.rhs_evals;

        while (dir * (t1 - t) > 1e-15 * (1.0 + std::abs(t))) {
            if (stats.accepted + stats.rejected > opts_.max_steps) {
                throw std::runtime_error("dopri5: step budget exhausted");
            }
            if (dir * (t + h - t1) > 0.0) h = t1 - t;

            Vec k2, k3, k4, k5, k6, k7, y5;
            stage(t, y, k1, h, k2, k3, k4, k5, k6, k7, y5);

            // embedded error estimate
            const Vec err_v = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err += sq(err_v[i] / sc);
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                DenseStep<N> ds;
                ds.t0 = t;
                ds.h = h;
                ds.r1 = y;
                ds.r2 = y5 - y;
                ds.r3 = h * k1 - ds.r2;
                ds.r4 = ds.r2 - h * k7 - ds.r3;
                ds.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

                t += h;
                y = y5;
                if (post_step) y = post_step(y);
                ++stats.accepted;
                if (on_step && !on_step(ds, y)) return {t, y};
                k1 = rhs_(t, y);
                ++stats.rhs_evals;
            } else {
                ++stats.rejected;
            }
            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            h *= fac;
            if (std::abs(h) > opts_.h_max) h = dir * opts_.h_max;
            if (std::abs(h) < 1e-14) {
                throw std::runtime_error("dopri5: step size underflow (tolerance unachievable)");
            }
        }
        return {t, y};
    }

  private:
    void stage(double t, const Vec& y, const Vec& k1, double h, Vec& k2, Vec& k3, Vec& k4,
               Vec& k5, Vec& k6, Vec& k7, Vec& y5) {
        k2 = rhs_(t + h / 5.0, y + h * (k1 / 5.0));
        k3 = rhs_(t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        k4 = rhs_(t + 4.0 * h / 5.0,
                  y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        k5 = rhs_(t + 8.0 * h / 9.0,
                  y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                           64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        k6 = rhs_(t + h, y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                  46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                  5103.0 / 18656.0 * k5));
        y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                      2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        k7 = rhs_(t + h, y5);
        stats.rhs_evals += 6;
    }

    static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
    static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
    static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
    static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
    static constexpr double e7 = -1.0 / 40.0;
    static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;

    Rhs rhs_;
    IntegratorOptions opts_;
};

// ---------------------------------------------------------------------------
// Physical-chart flow
// ---------------------------------------------------------------------------

enum class HamiltonianModel { full, kepler, kepler_no_rotation };

inline double model_energy(const PlanarPhaseState& s, HamiltonianModel m) {
    switch (m) {
        case HamiltonianModel::full:
            return eval_H(s).H;
        case HamiltonianModel::kepler:
            return kepler_H(s);
        case HamiltonianModel::kepler_no_rotation:
            return kepler_H(s) - (s.q[1] * s.p[0] - s.q[0] * s.p[1]);
    }
    return 0.0;
}

inline Vec4 model_grad(const PlanarPhaseState& s, HamiltonianModel m) {
    if (m == HamiltonianModel::full) return grad_H(s);
    const double r = s.q.norm();
    if (r < collision_guard) throw CollisionError("model_grad: collision singularity");
    const double A = s.q.squaredNorm() + 1.0;
    const double pp = s.p.squaredNorm();
    // potential -(1-|q|^2)/(2|q|) = |q|/2 - 1/(2|q|)
    const Vec2 gV = (0.5 / r + 0.5 / (r * r * r)) * s.q;
    Vec4 g;
    g[0] = 0.5 * A * s.q[0] * pp + gV[0];
    g[1] = 0.5 * A * s.q[1] * pp + gV[1];
    g[2] = 0.25 * A * A * s.p[0];
    g[3] = 0.25 * A * A * s.p[1];
    if (m == HamiltonianModel::kepler) {
        g[0] += -s.p[1];
        g[1] += s.p[0];
        g[2] += s.q[1];
        g[3] += -s.q[0];
    }
    return g;
}

inline Vec4 hamiltonian_vector_field(const PlanarPhaseState& s, HamiltonianModel m) {
    const Vec4 g = model_grad(s, m);
    return Vec4(g[2], g[3], -g[0], -g[1]);
}

enum class ChartTag { physical, regularized };

struct TrajectorySample {
    double t{0.0};
    double s{0.0};
    ChartTag chart{ChartTag::physical};
    Vec4 state{Vec4::Zero()};  // (q1, q2, p1, p2)
    Vec3 xi{Vec3::Zero()};
    Vec3 eta{Vec3::Zero()};
    double energy{0.0};
    double constraint_residual{0.0};
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    IntegratorStats stats;
    bool chart_switch_signaled{false};
    bool completed{false};
    double max_energy_drift{0.0};
    double max_constraint_drift{0.0};
};

struct PhysicalRunOptions {
    IntegratorOptions integ{};
    HamiltonianModel model{HamiltonianModel::full};
    double switch_radius{0.05};  // 0 disables chart-switch termination
    double sample_dt{0.0};       // 0: record every accepted step
};

inline Trajectory integrate_physical(const PlanarPhaseState& s0, double t0, double t1,
                                     const PhysicalRunOptions& opts = {}) {
    const HamiltonianModel m = opts.model;
    auto rhs = [m](double, const Vec4& z) {
        return hamiltonian_vector_field(PlanarPhaseState::from_vec4(z), m);
    };
    Dopri5<4> solver(rhs, opts.integ);

    Trajectory traj;
    const double H0 = model_energy(s0, m);
    auto push = [&](double t, const Vec4& z) {
        TrajectorySample smp;
        smp.t = t;
        smp.s = t;
        smp.chart = ChartTag::physical;
        smp.state = z;
        smp.energy = model_energy(PlanarPhaseState::from_vec4(z), m);
        traj.samples.push_back(smp);
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(smp.energy - H0));
    };
    push(t0, s0.to_vec4());

    double next_sample = t0 + opts.sample_dt;
    auto near_center = [&](const Vec4& z) {
        const Vec2 q(z[0], z[1]);
        if (opts.switch_radius <= 0.0) return false;
        if (m == HamiltonianModel::full) {
            return (q - primary_m1()).norm() < opts.switch_radius ||
                   (q - primary_m2()).norm() < opts.switch_radius;
        }
        return q.norm() < opts.switch_radius;
    };

    auto on_step = [&](const DenseStep<4>& ds, const Vec4& y) {
        if (opts.sample_dt > 0.0) {
            while (next_sample <= ds.t0 + ds.h + 1e-15) {
                push(next_sample, ds.eval(next_sample));
                next_sample += opts.sample_dt;
            }
        } else {
            push(ds.t0 + ds.h, y);
        }
        if (near_center(y)) {
            traj.chart_switch_signaled = true;
            return false;
        }
        return true;
    };

    solver.run(t0, s0.to_vec4(), t1, on_step);
    traj.stats = solver.stats;
    traj.completed = !traj.chart_switch_signaled;
    return traj;
}

// ---------------------------------------------------------------------------
// Regularized flow on the momentum sphere
// ---------------------------------------------------------------------------

enum class RegularizedModel { restricted, kepler, kepler_no_rotation };

namespace detail {

/// Complex-step gradient of the regularized Hamiltonian in the ambient R^6.
template <class F>
void complex_step_grad(F&& f, const Vec3& xi, const Vec3& eta, Vec3& fxi, Vec3& feta) {
    using C = std::complex<double>;
    const double h = 1e-100;
    C cxi[3], ceta[3];
    for (int i = 0; i < 3; ++i) {
        cxi[i] = C(xi[i], 0.0);
        ceta[i] = C(eta[i], 0.0);
    }
    for (int i = 0; i < 3; ++i) {
        cxi[i].imag(h);
        fxi[i] = f(cxi, ceta).imag() / h;
        cxi[i].imag(0.0);
        ceta[i].imag(h);
        feta[i] = f(cxi, ceta).imag() / h;
        ceta[i].imag(0.0);
    }
}

template <class T>
T regularized_value(const T xi[3], const T eta[3], double k, RegularizedModel m) {
    using std::sqrt;
    if (m == RegularizedModel::restricted) {
        return etilde_parts(xi, eta, k).value;
    }
    T f = kepler_f_factor(xi, eta, k);
    if (m == RegularizedModel::kepler_no_rotation) {
        const T e0 = T(1) - xi[0];
        f -= (xi[2] * eta[1] - xi[1] * eta[2]) * e0;
    }
    return sqrt(dot3(eta, eta)) * f - 0.5;
}

}  // namespace detail

inline double regularized_energy(const SphereCotangentState& s, double k, RegularizedModel m) {
    return detail::regularized_value(s.xi.data(), s.eta.data(), k, m);
}

struct RegularizedRunOptions {
    IntegratorOptions integ{};
    RegularizedModel model{RegularizedModel::restricted};
    double sample_ds{0.0};
    double stop_at_physical_time{-1.0};  // <0: run the full s-span
};

/// Flow of the regularized Hamiltonian on {|xi| = 1, xi.eta = 0} with
/// projection stabilization, tracking the physical time t' = (1 - xi0)|eta|.
inline Trajectory integrate_regularized(const SphereCotangentState& s0, double s_end,
                                        double k, const RegularizedRunOptions& opts = {}) {
    if (std::abs(regularized_energy(s0, k, opts.model)) > 1e-9) {
        throw std::invalid_argument("integrate_regularized: state not on the zero level set");
    }
    using Vec7 = Eigen::Matrix<double, 7, 1>;
    const RegularizedModel m = opts.model;

    auto rhs = [m, k](double, const Vec7& u) {
        Vec3 xi(u[0], u[1], u[2]), eta(u[3], u[4], u[5]);
        Vec3 fxi, feta;
        detail::complex_step_grad(
            [k, m](const std::complex<double> cxi[3], const std::complex<double> ceta[3]) {
                return detail::regularized_value(cxi, ceta, k, m);
            },
            xi, eta, fxi, feta);
        // constrained Hamiltonian field: multipliers keep |xi|=1, xi.eta=0
        const double b = xi.dot(feta);
        const double a = xi.dot(fxi) - eta.dot(feta);
        const Vec3 xid = feta - b * xi;
        const Vec3 etad = -fxi + a * xi + b * eta;
        Vec7 du;
        du << xid[0], xid[1], xid[2], etad[0], etad[1], etad[2],
            (1.0 - xi[0]) * eta.norm();
        return du;
    };

    Dopri5<7> solver(rhs, opts.integ);
    Vec7 u0;
    u0 << s0.xi[0], s0.xi[1], s0.xi[2], s0.eta[0], s0.eta[1], s0.eta[2], 0.0;

    Trajectory traj;
    const double F0 = regularized_energy(s0, k, m);
    auto push = [&](double s, const Vec7& u) {
        TrajectorySample smp;
        smp.s = s;
        smp.t = u[6];
        smp.chart = ChartTag::regularized;
        smp.xi = Vec3(u[0], u[1], u[2]);
        smp.eta = Vec3(u[3], u[4], u[5]);
        SphereCotangentState st{smp.xi, smp.eta};
        smp.energy = regularized_energy(st, k, m);
        smp.constraint_residual =
            std::max(st.sphere_residual(), st.orthogonality_residual());
        traj.samples.push_back(smp);
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(smp.energy - F0));
        traj.max_constraint_drift =
            std::max(traj.max_constraint_drift, smp.constraint_residual);
    };
    push(0.0, u0);

    auto project = [](const Vec7& u) {
        Vec3 xi(u[0], u[1], u[2]), eta(u[3], u[4], u[5]);
        xi.normalize();
        eta -= xi.dot(eta) * xi;
        Vec7 v = u;
        v << xi[0], xi[1], xi[2], eta[0], eta[1], eta[2], u[6];
        return v;
    };

    double next_sample = opts.sample_ds;
    auto on_step = [&](const DenseStep<7>& ds, const Vec7& u) {
        if (opts.sample_ds > 0.0) {
            while (next_sample <= ds.t0 + ds.h + 1e-15) {
                push(next_sample, project(ds.eval(next_sample)));
                next_sample += opts.sample_ds;
            }
        } else {
            push(ds.t0 + ds.h, u);
        }
        if (traj.max_constraint_drift > 1e-6) {
            throw std::runtime_error("integrate_regularized: constraint drift exceeded");
        }
        if (opts.stop_at_physical_time > 0.0 && u[6] >= opts.stop_at_physical_time) {
            return false;
        }
        return true;
    };

    solver.run(0.0, u0, s_end, on_step, project);
    traj.stats = solver.stats;
    traj.completed = true;
    return traj;
}

/// Chart map back to the physical state (q, p) relative to the given center.
inline PlanarPhaseState regularized_to_physical(const SphereCotangentState& s,
                                                const Vec2& center) {
    return unflip(moser_project(s), center);
}

// ---------------------------------------------------------------------------
// Periodic orbits by symmetric shooting on the q2 = 0 section
// ---------------------------------------------------------------------------

struct PeriodicOrbitResult {
    Vec4 initial_state{Vec4::Zero()};
    double period{0.0};
    double return_residual{0.0};
    double floquet_mod1{0.0}, floquet_mod2{0.0};
    double c{0.0};
    bool converged{false};
    int iterations{0};
};

namespace detail {

/// Momentum p2 on the section (q1, q2=0, p1=0) from H = c; sign selects the
/// branch of the completed-square root.
inline double section_p2(double q1, double c, int sign) {
    const Vec2 q(q1, 0.0);
    const double A = q.squaredNorm() + 1.0;
    const double gap = c - potential(q).U;
    if (gap < 0.0) {
        throw std::domain_error("section_p2: section point outside the Hill region");
    }
    return (4.0 * q1 / A + sign * std::sqrt(8.0 * gap)) / A;
}

/// Integrates from a perpendicular section state to the next q2 = 0 crossing.
struct HalfReturn {
    Vec4 state;
    double time;
};

inline HalfReturn half_return(const Vec4& z0, const IntegratorOptions& integ) {
    auto rhs = [](double, const Vec4& z) {
        return hamiltonian_vector_field(PlanarPhaseState::from_vec4(z),
                                        HamiltonianModel::full);
    };
    Dopri5<4> solver(rhs, integ);
    HalfReturn hr{};
    bool found = false;
    double t_guard = 1e-3;
    auto on_step = [&](const DenseStep<4>& ds, const Vec4& y) {
        const double t_end = ds.t0 + ds.h;
        if (t_end < t_guard) return true;
        const double a0 = ds.eval(std::max(ds.t0, t_guard))[1];
        const double a1 = y[1];
        if (a0 == 0.0 || (a0 < 0.0) == (a1 < 0.0)) return true;
        double lo = std::max(ds.t0, t_guard), hi = t_end;
        for (int it = 0; it < 90; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((ds.eval(mid)[1] < 0.0) == (a0 < 0.0) ? lo : hi) = mid;
        }
        hr.time = 0.5 * (lo + hi);
        hr.state = ds.eval(hr.time);
        found = true;
        return false;
    };
    solver.run(0.0, z0, 100.0, on_step);
    if (!found) throw std::runtime_error("half_return: no section crossing found");
    return hr;
}

}  // namespace detail

/// Finds a symmetric periodic orbit around a primary at energy c by a one-
/// dimensional shooting on the perpendicular section condition p1 = 0 at the
/// half-period crossing, with momenta closed by the energy constraint.
inline PeriodicOrbitResult find_periodic_orbit(double c, double q1_seed, int branch = 1,
                                               double certified_window = 0.05,
                                               const IntegratorOptions& integ = {}) {
    if (!(c < lagrange_energy || (c > lagrange_energy && c < lagrange_energy + certified_window))) {
        throw std::invalid_argument("find_periodic_orbit: energy outside certified regimes");
    }
    PeriodicOrbitResult res;
    res.c = c;

    auto shoot = [&](double q1) {
        Vec4 z0(q1, 0.0, 0.0, detail::section_p2(q1, c, branch));
        return detail::half_return(z0, integ);
    };
    auto miss = [&](double q1) { return shoot(q1).state[2]; };  // p1 at half crossing

    // secant iteration on the perpendicularity defect
    double x0 = q1_seed;
    double x1 = q1_seed * (1.0 + 1e-4) + 1e-6;
    double f0 = miss(x0);
    double f1 = miss(x1);
    for (res.iterations = 0; res.iterations < 60; ++res.iterations) {
        if (std::abs(f1) < 1e-12 || std::abs(x1 - x0) < 1e-15) break;
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = miss(x1);
    }

    const auto hr = detail::half_return(
        Vec4(x1, 0.0, 0.0, detail::section_p2(x1, c, branch)), integ);
    res.initial_state = Vec4(x1, 0.0, 0.0, detail::section_p2(x1, c, branch));
    res.period = 2.0 * hr.time;

    // full-period return residual of the found orbit
    auto rhs = [](double, const Vec4& z) {
        return hamiltonian_vector_field(PlanarPhaseState::from_vec4(z),
                                        HamiltonianModel::full);
    };
    Dopri5<4> solver(rhs, integ);
    const auto [tf, zf] = solver.run(0.0, res.initial_state, res.period);
    res.return_residual = (zf - res.initial_state).norm();
    res.converged = std::abs(f1) < 1e-10 && res.return_residual < 1e-8;

    // Floquet moduli of the reduced return map on the (q1, p1) section chart
    const double h = 1e-7;
    auto return_map = [&](double q1, double p1) {
        const double A = q1 * q1 + 1.0;
        // close the section chart with the energy constraint: H = c fixes p2
        const double disc = 8.0 * (c - potential(Vec2(q1, 0.0)).U) - sq(A * p1);
        if (disc < 0.0) throw std::domain_error("return_map: left the energy shell");
        const double p2 = (4.0 * q1 / A + branch * std::sqrt(disc)) / A;
        Vec4 z0(q1, 0.0, p1, p2);
        const auto a = detail::half_return(z0, integ);
        const auto b = detail::half_return(a.state, integ);
        return Vec2(b.state[0], b.state[2]);
    };
    const Vec2 fp(res.initial_state[0], res.initial_state[2]);
    Mat2 J;
    for (int col = 0; col < 2; ++col) {
        Vec2 dp = Vec2::Zero();
        dp[col] = h;
        const Vec2 plus = return_map(fp[0] + dp[0], fp[1] + dp[1]);
        const Vec2 minus = return_map(fp[0] - dp[0], fp[1] - dp[1]);
        J.col(col) = (plus - minus) / (2.0 * h);
    }
    const std::complex<double> tr(J.trace(), 0.0);
    const std::complex<double> det(J.determinant(), 0.0);
    const std::complex<double> rt = std::sqrt(tr * tr - 4.0 * det);
    res.floquet_mod1 = std::abs(0.5 * (tr + rt));
    res.floquet_mod2 = std::abs(0.5 * (tr - rt));
    return res;
}

}  // namespace srtbp

#endif  // SRTBP_DYNAMICS_HPP
