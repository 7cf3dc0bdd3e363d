#include <catch2/catch.hpp>

#include <srtbp/dynamics.hpp>

#include "testutil.hpp"

using namespace srtbp;

TEST_CASE("the Lagrange point is stationary") {
    PhysicalRunOptions opts;
    opts.switch_radius = 0.0;
    const auto traj = integrate_physical(PlanarPhaseState{}, 0.0, 10.0, opts);
    CHECK(traj.completed);
    for (const auto& smp : traj.samples) {
        CHECK(smp.state.norm() < 1e-12);
    }
}

TEST_CASE("energy conservation over 50 time units") {
    // a bound state inside the m1 lobe at c = -2
    const Vec2 q = primary_m1() + Vec2(0.08, 0.0);
    const auto s0 = fiber_state(q, -2.0, 0.7);
    PhysicalRunOptions opts;
    opts.switch_radius = 0.0;
    const auto traj = integrate_physical(s0, 0.0, 50.0, opts);
    CHECK(traj.completed);
    CHECK(traj.max_energy_drift < 1e-8);
}

TEST_CASE("fixed-step order sanity: halving the step cuts the drift by >= 4") {
    const Vec2 q = primary_m1() + Vec2(0.1, 0.02);
    const auto s0 = fiber_state(q, -2.0, 1.1);
    auto drift_at = [&](double h) {
        PhysicalRunOptions opts;
        opts.switch_radius = 0.0;
        opts.integ.rtol = 1e6;  // disables rejections: fixed-step mode
        opts.integ.atol = 1e6;
        opts.integ.h_init = h;
        opts.integ.h_max = h;
        return integrate_physical(s0, 0.0, 5.0, opts).max_energy_drift;
    };
    const double d1 = drift_at(2e-3);
    const double d2 = drift_at(1e-3);
    CHECK(d1 > 0.0);
    CHECK(d2 < d1 / 4.0);
}

TEST_CASE("chart-switch signal near a primary") {
    // aim a state at m1 so the trajectory enters the switch radius
    const Vec2 q = primary_m1() + Vec2(0.2, 0.0);
    PlanarPhaseState s0{q, fiber_floor_momentum(q)};
    s0.p += Vec2(-0.9, 0.15);  // push toward the primary
    PhysicalRunOptions opts;
    opts.switch_radius = 0.05;
    const auto traj = integrate_physical(s0, 0.0, 20.0, opts);
    CHECK(traj.chart_switch_signaled);
    const Vec2 last(traj.samples.back().state[0], traj.samples.back().state[1]);
    CHECK((last - primary_m1()).norm() < 0.06);
}

TEST_CASE("mirror symmetry of trajectories") {
    const Vec2 q = primary_m1() + Vec2(0.09, 0.03);
    const auto s0 = fiber_state(q, -2.0, 2.1);

    PhysicalRunOptions opts;
    opts.switch_radius = 0.0;
    opts.sample_dt = 0.25;
    const auto a = integrate_physical(s0, 0.0, 10.0, opts);

    SECTION("the point reflection swapping the primaries commutes with the flow") {
        PlanarPhaseState r0{-s0.q, -s0.p};
        const auto b = integrate_physical(r0, 0.0, 10.0, opts);
        REQUIRE(a.samples.size() == b.samples.size());
        for (size_t i = 0; i < a.samples.size(); ++i) {
            CHECK((a.samples[i].state + b.samples[i].state).norm() < 1e-7);
        }
    }

    SECTION("the q2-axis reflection conjugates the flow to its time reversal") {
        PlanarPhaseState m0{Vec2(-s0.q[0], s0.q[1]), Vec2(s0.p[0], -s0.p[1])};
        const auto b = integrate_physical(m0, 0.0, -10.0, opts);
        // compare a(t) with mu(b(-t)) on the step endpoints
        REQUIRE(!b.samples.empty());
        PhysicalRunOptions exact = opts;
        exact.sample_dt = 0.0;
        for (double t : {1.0, 4.0, 9.5}) {
            const Vec4 za = integrate_physical(s0, 0.0, t, exact).samples.back().state;
            const Vec4 zb = integrate_physical(m0, 0.0, -t, exact).samples.back().state;
            CHECK(std::abs(za[0] + zb[0]) < 1e-7);
            CHECK(std::abs(za[1] - zb[1]) < 1e-7);
            CHECK(std::abs(za[2] - zb[2]) < 1e-7);
            CHECK(std::abs(za[3] + zb[3]) < 1e-7);
        }
    }
}

TEST_CASE("regularized Kepler flow passes through the collision locus") {
    // radial infall in the rotation-free Kepler subproblem
    const PlanarPhaseState s0{Vec2(0.5, 0.0), Vec2(0.0, 0.0)};
    const double k = model_energy(s0, HamiltonianModel::kepler_no_rotation);
    CHECK(k < 0.0);

    // the physical chart blows up: integration stops near the center
    PhysicalRunOptions popts;
    popts.model = HamiltonianModel::kepler_no_rotation;
    popts.switch_radius = 1e-3;
    const auto phys = integrate_physical(s0, 0.0, 10.0, popts);
    CHECK(phys.chart_switch_signaled);
    const Vec4 zl = phys.samples.back().state;
    CHECK(Vec2(zl[2], zl[3]).norm() > 10.0);

    // the regularized chart continues smoothly through xi0 = 1
    const auto lifted = moser_lift(flip(s0, Vec2(0, 0)));
    RegularizedRunOptions ropts;
    ropts.model = RegularizedModel::kepler_no_rotation;
    ropts.sample_ds = 0.01;
    const auto reg = integrate_regularized(lifted, 6.0, k, ropts);
    CHECK(reg.max_constraint_drift < 1e-9);
    CHECK(reg.max_energy_drift < 1e-9);

    double min_gap = 2.0;
    size_t at = 0;
    for (size_t i = 0; i < reg.samples.size(); ++i) {
        const double gap = 1.0 - reg.samples[i].xi[0];
        if (gap < min_gap) {
            min_gap = gap;
            at = i;
        }
    }
    CHECK(min_gap < 1e-3);          // reaches the projection point
    CHECK(at + 5 < reg.samples.size());  // and keeps going afterwards
    CHECK(1.0 - reg.samples.back().xi[0] > 0.1);
}

TEST_CASE("two-chart agreement after time reparametrization") {
    const double k = -2.0;
    const Vec2 q = primary_m1() + Vec2(0.08, 0.01);
    const auto s0 = fiber_state(q, k, 0.4);
    REQUIRE(eval_H(s0).H == Approx(k).margin(1e-11));

    PhysicalRunOptions popts;
    popts.switch_radius = 0.0;
    const auto phys = integrate_physical(s0, 0.0, 2.0, popts);
    REQUIRE(phys.completed);

    const auto lifted = moser_lift(flip(s0, primary_m1()));
    RegularizedRunOptions ropts;
    ropts.model = RegularizedModel::restricted;
    ropts.sample_ds = 0.02;
    ropts.stop_at_physical_time = 2.0;
    const auto reg = integrate_regularized(lifted, 1e4, k, ropts);
    CHECK(reg.max_energy_drift < 1e-9);

    // rebuild the physical trajectory on the regularized sample times
    PhysicalRunOptions exact;
    exact.switch_radius = 0.0;
    int compared = 0;
    for (const auto& smp : reg.samples) {
        if (smp.t <= 1e-6 || smp.t > 1.9) continue;
        if ((1.0 - smp.xi[0]) < 1e-3) continue;
        const auto back =
            regularized_to_physical({smp.xi, smp.eta}, primary_m1());
        const auto ref = integrate_physical(s0, 0.0, smp.t, exact);
        const Vec4 expect = ref.samples.back().state;
        CHECK((back.to_vec4() - expect).norm() < 1e-6);
        ++compared;
        if (compared > 25) break;
    }
    CHECK(compared >= 20);
}

TEST_CASE("periodic orbits around both primaries at c = -3") {
    const double c = -3.0;
    // seed radius from the leading coulomb-like balance of the local potential
    const double mu = (2.0 - sqrt2) / 2.0;
    const double rho_seed = mu / (2.0 * (-0.25 - c));
    const double q1_seed = primary_m1()[0] + rho_seed;

    const auto orb1 = find_periodic_orbit(c, q1_seed, 1);
    CHECK(orb1.converged);
    CHECK(orb1.return_residual < 1e-8);
    CHECK(orb1.period > 0.0);

    // energy is conserved along the orbit
    const auto conf = integrate_physical(
        PlanarPhaseState::from_vec4(orb1.initial_state), 0.0, orb1.period,
        {{}, HamiltonianModel::full, 0.0, 0.0});
    CHECK(conf.max_energy_drift < 1e-9);
    CHECK(eval_H(PlanarPhaseState::from_vec4(orb1.initial_state)).H ==
          Approx(c).margin(1e-10));

    // the mirror orbit around m2
    const auto orb2 = find_periodic_orbit(c, -q1_seed, -1);
    CHECK(orb2.converged);
    CHECK(orb2.return_residual < 1e-8);
    CHECK(std::abs(orb2.initial_state[0] + orb1.initial_state[0]) < 1e-6);
    CHECK(std::abs(orb2.initial_state[3] + orb1.initial_state[3]) < 1e-6);
    CHECK(orb2.period == Approx(orb1.period).margin(1e-6));

    // persistence under tolerance tightening
    IntegratorOptions tight;
    tight.rtol = 5e-13;
    tight.atol = 5e-15;
    const auto orb1b = find_periodic_orbit(c, q1_seed, 1, 0.05, tight);
    CHECK(orb1b.converged);
    CHECK(std::abs(orb1b.period - orb1.period) < 1e-7);
}

TEST_CASE("unachievable integration reports an error") {
    // falling into the primary: the flow leaves the chart's domain
    PlanarPhaseState s0{primary_m1() + Vec2(0.05, 0.0), Vec2(0.0, 0.0)};
    s0.p = fiber_floor_momentum(s0.q) + Vec2(-2.0, 0.0);
    PhysicalRunOptions opts;
    opts.switch_radius = 0.0;
    CHECK_THROWS(integrate_physical(s0, 0.0, 10.0, opts));
}

TEST_CASE("orbit search rejects uncertified energies") {
    CHECK_THROWS_AS(find_periodic_orbit(-0.5, -0.3, 1), std::invalid_argument);
}
