#include <catch2/catch.hpp>

#include <srtbp/hamiltonian.hpp>

#include "testutil.hpp"

#include <future>
#include <vector>

using namespace srtbp;

namespace {

PlanarPhaseState random_state(std::mt19937_64& gen, double qbox = 0.8, double pbox = 2.0,
                              double min_dist = 0.05) {
    for (;;) {
        PlanarPhaseState s{Vec2(testutil::uniform(gen, -qbox, qbox), testutil::uniform(gen, -qbox, qbox)),
                           Vec2(testutil::uniform(gen, -pbox, pbox), testutil::uniform(gen, -pbox, pbox))};
        if ((s.q - primary_m1()).norm() > min_dist && (s.q - primary_m2()).norm() > min_dist) return s;
    }
}

double H_of_vec(const Vec4& z) { return eval_H(PlanarPhaseState::from_vec4(z)).H; }

}  // namespace

TEST_CASE("energy at the first Lagrange point") {
    const auto t = eval_H(PlanarPhaseState{});
    CHECK(t.K == 0.0);
    CHECK(t.U0 == 0.0);
    CHECK(t.U1 == Approx(-0.5).epsilon(1e-14));
    CHECK(t.U2 == Approx(-0.5).epsilon(1e-14));
    CHECK(t.H == Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("completed square equals the raw split") {
    auto gen = testutil::rng(23);
    for (int i = 0; i < 2000; ++i) {
        const auto s = random_state(gen);
        const auto t = eval_H(s);
        const double alt = eval_H_split(s);
        CHECK(t.H == Approx(alt).margin(1e-12 * (1.0 + std::abs(alt))));
        CHECK(t.H == Approx(t.K + t.U0 + t.U1 + t.U2).margin(1e-12));
        CHECK(t.K >= 0.0);
    }
}

TEST_CASE("product-of-distances rewrite agrees") {
    auto gen = testutil::rng(29);
    for (int i = 0; i < 2000; ++i) {
        const auto s = random_state(gen);
        const double a = eval_H(s).H;
        const double b = eval_H_product_form(s);
        CHECK(a == Approx(b).margin(1e-11 * (1.0 + std::abs(a))));
    }
}

TEST_CASE("kinetic oracle at q=0") {
    // At the origin the shifts vanish and K reduces to |p|^2/8.
    PlanarPhaseState s;
    s.p = Vec2(2.0, 0.0);
    const auto t = eval_H(s);
    CHECK(t.K == Approx(0.5).epsilon(1e-14));
    CHECK(t.H == Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("collision singularity guards") {
    PlanarPhaseState s;
    s.q = primary_m1();
    CHECK_THROWS_AS(eval_H(s), CollisionError);
    CHECK_THROWS_AS(eval_U_polar({0.0, 1.0}), CollisionError);

    // approaching m1 along theta=0 drives H to -infinity
    double prev = 0.0;
    for (double rho : {1e-2, 1e-4, 1e-6}) {
        const auto u = eval_U_polar({rho, 0.0});
        CHECK(u.U < prev);
        prev = u.U;
    }
    CHECK(prev < -1e5);
}

TEST_CASE("analytic gradient matches finite differences") {
    auto gen = testutil::rng(31);
    for (int i = 0; i < 300; ++i) {
        const auto s = random_state(gen);
        const Vec4 g = grad_H(s);
        const Vec4 fd = testutil::fd_gradient<4>(H_of_vec, s.to_vec4());
        for (int k = 0; k < 4; ++k) {
            CHECK(g[k] == Approx(fd[k]).margin(1e-6 * (1.0 + std::abs(fd[k]))));
        }
    }
}

TEST_CASE("the chart origin is a critical point") {
    const auto d = lagrange_point_data();
    CHECK(d.state.isZero(0.0));
    CHECK(d.energy == Approx(-1.0).epsilon(1e-13));
    CHECK(grad_H(PlanarPhaseState{}).norm() < 1e-10);
}

TEST_CASE("reflection symmetry of the equal-mass problem") {
    auto gen = testutil::rng(37);
    for (int i = 0; i < 500; ++i) {
        const auto s = random_state(gen);
        PlanarPhaseState m{Vec2(-s.q[0], s.q[1]), Vec2(s.p[0], -s.p[1])};
        const double a = eval_H(s).H;
        const double b = eval_H(m).H;
        CHECK(a == Approx(b).margin(1e-12 * (1.0 + std::abs(a))));

        // gradient transforms with the same reflection
        const Vec4 gs = grad_H(s);
        const Vec4 gm = grad_H(m);
        CHECK(gm[0] == Approx(-gs[0]).margin(1e-9 * (1 + std::abs(gs[0]))));
        CHECK(gm[1] == Approx(gs[1]).margin(1e-9 * (1 + std::abs(gs[1]))));
        CHECK(gm[2] == Approx(gs[2]).margin(1e-9 * (1 + std::abs(gs[2]))));
        CHECK(gm[3] == Approx(-gs[3]).margin(1e-9 * (1 + std::abs(gs[3]))));
    }
}

TEST_CASE("polar potential agrees with cartesian") {
    auto gen = testutil::rng(41);
    for (int i = 0; i < 1000; ++i) {
        const double rho = testutil::uniform(gen, 1e-3, primary_offset);
        const double theta = testutil::uniform(gen, 0.0, two_pi);
        const auto up = eval_U_polar({rho, theta});
        const auto uc = potential(chart_point_m1({rho, theta}));
        CHECK(up.U == Approx(uc.U).margin(1e-12 * (1.0 + std::abs(uc.U))));
    }
}

TEST_CASE("polar boundary values used by the containment lemma") {
    // L1's projection sits at distance sqrt(2)-1 from m1 along theta=0
    const auto u = eval_U_polar({primary_offset, 0.0});
    CHECK(u.U == Approx(-1.0).epsilon(1e-12));

    // the other side of the circle has strictly larger potential
    const auto upi = eval_U_polar({primary_offset, pi});
    CHECK(upi.U > u.U);
}

TEST_CASE("potential blows down uniformly near m1") {
    for (int j = 0; j < 720; ++j) {
        const double theta = two_pi * j / 720.0;
        CHECK(eval_U_polar({1e-4, theta}).U < -1000.0);
    }
}

TEST_CASE("radial derivative matches finite differences") {
    auto gen = testutil::rng(43);
    for (int i = 0; i < 300; ++i) {
        const double rho = testutil::uniform(gen, 0.05, primary_offset);
        const double theta = testutil::uniform(gen, 0.0, two_pi);
        const double h = 1e-6;
        const double fd = (eval_U_polar({rho + h, theta}).U - eval_U_polar({rho - h, theta}).U) / (2 * h);
        CHECK(dU_drho({rho, theta}) == Approx(fd).margin(1e-5 * (1.0 + std::abs(fd))));
    }
}

TEST_CASE("near-collision potential strength") {
    // brute-force limit of rho * U2 as rho -> 0+, by Richardson extrapolation
    for (double theta : {0.0, 1.0, pi}) {
        const double limit = testutil::richardson_limit(
            [theta](double rho) { return rho * eval_U_polar({rho, theta}).U2; }, 1e-2, 6);
        CHECK(limit == Approx(-(2.0 - sqrt2) / 2.0).margin(1e-9));
    }
}

TEST_CASE("full Hessian of H at the Lagrange point") {
    // independent central-difference oracle; the momentum block and the
    // cross terms match the quadratic model, the potential block is measured
    const auto hess = testutil::fd_hessian<4>(H_of_vec, Vec4::Zero(), 1e-4);
    CHECK(hess(0, 0) == Approx(-16.0).margin(1e-4));
    CHECK(hess(1, 1) == Approx(8.0).margin(1e-4));
    CHECK(hess(2, 2) == Approx(0.25).margin(1e-6));
    CHECK(hess(3, 3) == Approx(0.25).margin(1e-6));
    CHECK(hess(0, 3) == Approx(-1.0).margin(1e-6));
    CHECK(hess(1, 2) == Approx(1.0).margin(1e-6));
    CHECK(hess(0, 1) == Approx(0.0).margin(1e-6));
    CHECK((hess - hess.transpose()).norm() < 1e-8);
}

TEST_CASE("pure functions are safe under concurrent evaluation") {
    auto work = [](int offset) {
        double acc = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double x = 0.05 + 1e-4 * (i + offset);
            const PlanarPhaseState s{Vec2(x, -x / 2), Vec2(0.1, 0.2)};
            acc += eval_H(s).H + grad_H(s)[0];
            acc += moser_lift(flip(s, primary_m1())).eta.norm();
        }
        return acc;
    };
    const double serial = work(0) + work(1) + work(2) + work(3);
    std::vector<std::future<double>> futs;
    for (int k = 0; k < 4; ++k) {
        futs.push_back(std::async(std::launch::async, work, k));
    }
    double parallel = 0.0;
    for (auto& f : futs) parallel += f.get();
    CHECK(parallel == Approx(serial).epsilon(1e-15));
}

TEST_CASE("energy regimes relative to the critical value") {
    CHECK(EnergySpec::classify(-1.5).regime == EnergyRegime::below_L1);
    CHECK(EnergySpec::classify(-1.0).regime == EnergyRegime::at_L1);
    CHECK(EnergySpec::classify(-0.97).regime == EnergyRegime::above_L1);
}

TEST_CASE("fiber states satisfy the energy constraint") {
    auto gen = testutil::rng(47);
    for (int i = 0; i < 300; ++i) {
        const double rho = testutil::uniform(gen, 0.02, 0.15);
        const double theta = testutil::uniform(gen, 0.0, two_pi);
        const Vec2 q = chart_point_m1({rho, theta});
        const double c = -2.0;
        if (potential(q).U > c) continue;
        const double phi = testutil::uniform(gen, 0.0, two_pi);
        const auto s = fiber_state(q, c, phi);
        CHECK(eval_H(s).H == Approx(c).margin(1e-11));
    }
}
