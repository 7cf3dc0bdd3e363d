#include <catch2/catch.hpp>

#include <srtbp/regularizer.hpp>

#include "testutil.hpp"

using namespace srtbp;

namespace {

/// Random flip-chart state away from the images of the remaining singularities.
FlipState random_flip(std::mt19937_64& gen, double box = 1.5) {
    for (;;) {
        FlipState f{Vec2(testutil::uniform(gen, -box, box), testutil::uniform(gen, -box, box)),
                    Vec2(testutil::uniform(gen, -box, box), testutil::uniform(gen, -box, box))};
        const Vec2 y = f.y;
        if (y.norm() < 0.05) continue;
        if ((y - Vec2(2.0 * primary_offset, 0)).norm() < 0.1) continue;
        if ((y - Vec2(-2.0, 0)).norm() < 0.1) continue;
        if ((y - Vec2(2.0 * sqrt2, 0)).norm() < 0.1) continue;
        return f;
    }
}

}  // namespace

TEST_CASE("kepler Hamiltonian values") {
    CHECK(kepler_H({Vec2(1, 0), Vec2(0, 0)}) == Approx(0.0).margin(1e-14));
    CHECK(kepler_H({Vec2(1, 0), Vec2(0, 1)}) == Approx(-0.5).epsilon(1e-14));
    CHECK_THROWS_AS(kepler_H({Vec2(0, 0), Vec2(1, 1)}), CollisionError);

    double prev = 0.0;
    for (double r : {1e-2, 1e-4, 1e-6}) {
        const double h = kepler_H({Vec2(r, 0), Vec2(0.3, -0.2)});
        CHECK(h < prev);
        prev = h;
    }
    CHECK(prev < -1e5);
}

TEST_CASE("time-rescaled Kepler Hamiltonian") {
    SECTION("defining identity K = (H - k) |q|") {
        auto gen = testutil::rng(211);
        const double k = -2.0;
        for (int i = 0; i < 1000; ++i) {
            FlipState f{Vec2(testutil::uniform(gen, -2, 2), testutil::uniform(gen, -2, 2)),
                        Vec2(testutil::uniform(gen, -2, 2), testutil::uniform(gen, -2, 2))};
            if (f.y.norm() < 1e-3) continue;
            const PlanarPhaseState s{f.y, -f.x};
            const double lhs = kepler_K(f, k);
            const double rhs = (kepler_H(s) - k) * f.y.norm();
            CHECK(lhs == Approx(rhs).margin(1e-12 * (1.0 + std::abs(rhs))));
        }
    }
    SECTION("only the constant survives at y = 0") {
        CHECK(kepler_K({Vec2(3, -4), Vec2(0, 0)}, -2.0) == -0.5);
    }
    SECTION("hand-checked point") {
        CHECK(kepler_K({Vec2(0, 0), Vec2(1, 0)}, -2.0) == Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("compactified Kepler Hamiltonian Q") {
    const double k = -2.0;

    SECTION("vanishes on the zero section") {
        SphereCotangentState s{Vec3(0.2, std::sqrt(1.0 - 0.04), 0.0), Vec3::Zero()};
        CHECK(kepler_Q(s, k) == 0.0);
    }

    SECTION("K = 0 maps onto Q = 1/8") {
        auto gen = testutil::rng(223);
        int found = 0;
        while (found < 200) {
            const double ang_x = testutil::uniform(gen, 0.0, two_pi);
            const Vec2 xh(std::cos(ang_x), std::sin(ang_x));
            const Vec2 y(testutil::uniform(gen, -0.6, 0.6), testutil::uniform(gen, -0.6, 0.6));
            if (y.norm() < 0.05) continue;
            // root-solve K(s*xh, y) = 0 in the momentum magnitude s
            auto K_of = [&](double s) { return kepler_K({s * xh, y}, k); };
            const auto roots = ray_roots(K_of, 0.0, 30.0, 2000);
            if (roots.empty()) continue;
            ++found;
            const auto lifted = moser_lift({roots.front() * xh, y});
            CHECK(kepler_Q(lifted, k) == Approx(0.125).margin(1e-10));
            CHECK(std::abs(kepler_Ktilde(lifted, k)) < 1e-10);
        }
    }

    SECTION("Ktilde equals K through the chart") {
        auto gen = testutil::rng(227);
        for (int i = 0; i < 500; ++i) {
            FlipState f{Vec2(testutil::uniform(gen, -2, 2), testutil::uniform(gen, -2, 2)),
                        Vec2(testutil::uniform(gen, -2, 2), testutil::uniform(gen, -2, 2))};
            const double a = kepler_K(f, k);
            const double b = kepler_Ktilde(moser_lift(f), k);
            CHECK(a == Approx(b).margin(1e-11 * (1.0 + std::abs(a))));
        }
    }

    SECTION("constraint violation is rejected") {
        SphereCotangentState s{Vec3(0.5, 0.5, 0.5), Vec3(0, 0, 1)};
        CHECK_THROWS_AS(kepler_Q(s, k), std::domain_error);
    }
}

TEST_CASE("X(Q) matches the scaling finite difference") {
    auto gen = testutil::rng(229);
    const double k = -2.0;
    for (int i = 0; i < 300; ++i) {
        FlipState f{Vec2(testutil::uniform(gen, -2, 2), testutil::uniform(gen, -2, 2)),
                    Vec2(testutil::uniform(gen, -1, 1), testutil::uniform(gen, -1, 1))};
        const auto s = moser_lift(f);
        if (s.eta.norm() < 1e-3) continue;
        const double h = 1e-6;
        const SphereCotangentState sp{s.xi, (1.0 + h) * s.eta};
        const SphereCotangentState sm{s.xi, (1.0 - h) * s.eta};
        const double fd = (kepler_Q(sp, k) - kepler_Q(sm, k)) / (2.0 * h);
        CHECK(kepler_XQ(s, k) == Approx(fd).margin(1e-5 * (1.0 + std::abs(fd))));
    }
}

TEST_CASE("Kepler collision-locus scan") {
    const auto scan = kepler_collision_scan(-2.0, 1.0 / 16.0);
    CHECK(scan.samples > 500);
    CHECK(scan.pass);
    CHECK(scan.min_XQ > 0.0);
    CHECK(scan.max_eta_norm <= 8.0);
    CHECK(scan.max_constraint_residual < 1e-12);

    // where the eta-derivative of the bracket vanishes, X(Q) = 2Q = 1/4
    SphereCotangentState pole{Vec3(1, 0, 0), Vec3(0, 0, 0)};
    // at the pole with eta = 2 e_tangent the bracket is constant in eta
    // (all eta-dependent terms carry 1-xi0); f = 1/4 there and |eta| = 2
    pole.eta = Vec3(0, 2, 0);
    CHECK(kepler_Q(pole, -2.0) == Approx(0.125).epsilon(1e-12));
    CHECK(kepler_XQ(pole, -2.0) == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("restricted time-rescaled Hamiltonian E") {
    const double k = -2.0;

    SECTION("defining identity E = (H - k)|q - q_m1|") {
        auto gen = testutil::rng(233);
        for (int i = 0; i < 1000; ++i) {
            const auto f = random_flip(gen);
            const PlanarPhaseState s{f.y + primary_m1(), -f.x};
            const double lhs = restricted_E(f, k);
            const double rhs = (eval_H(s).H - k) * f.y.norm();
            CHECK(lhs == Approx(rhs).margin(1e-11 * (1.0 + std::abs(rhs))));
        }
    }

    SECTION("finite at the regularized collision, independent of x") {
        const double expect = -(2.0 * sqrt2 - 2.0) / (2.0 * sqrt2);
        CHECK(restricted_E({Vec2(0, 0), Vec2(0, 0)}, k) == Approx(expect).epsilon(1e-13));
        CHECK(restricted_E({Vec2(7, -3), Vec2(0, 0)}, k) == Approx(expect).epsilon(1e-13));
        for (double r : {1e-2, 1e-5}) {
            CHECK(std::isfinite(restricted_E({Vec2(1, 1), Vec2(r, r)}, k)));
        }
    }
}

TEST_CASE("regularized restricted Hamiltonian on the momentum sphere") {
    const double k = -2.0;

    SECTION("display form agrees with the pullback") {
        auto gen = testutil::rng(239);
        for (int i = 0; i < 1000; ++i) {
            const auto f = random_flip(gen);
            const auto s = moser_lift(f);
            const auto ev = restricted_Etilde(s, k);
            const double direct = restricted_E(f, k);
            CHECK(ev.value == Approx(direct).margin(1e-10 * (1.0 + std::abs(direct))));
            CHECK(ev.value ==
                  Approx(restricted_Etilde_pullback(s, k)).margin(1e-10 * (1 + std::abs(direct))));
        }
    }

    SECTION("zero section value is -g") {
        auto gen = testutil::rng(241);
        for (int i = 0; i < 50; ++i) {
            const double a = testutil::uniform(gen, 0.0, two_pi);
            const double b = testutil::uniform(gen, -1.0, 1.0);
            const double r = std::sqrt(1.0 - b * b);
            SphereCotangentState s{Vec3(b, r * std::cos(a), r * std::sin(a)), Vec3::Zero()};
            const auto ev = restricted_Etilde(s, k);
            CHECK(ev.value == Approx(-(1.0 - 1.0 / sqrt2)).epsilon(1e-12));
            CHECK(ev.g == Approx((2.0 * sqrt2 - 2.0) / (2.0 * sqrt2)).epsilon(1e-12));
        }
    }
}

TEST_CASE("X(Etilde) matches the scaling finite difference") {
    auto gen = testutil::rng(251);
    const double k = -2.0;
    int tested = 0;
    while (tested < 300) {
        const auto f = random_flip(gen);
        const auto s = moser_lift(f);
        if (s.eta.norm() < 1e-2) continue;
        ++tested;
        const double h = 1e-6;
        auto val = [&](double t) {
            const Vec3 eta = t * s.eta;
            return detail::etilde_parts(s.xi.data(), eta.data(), k).value;
        };
        const double fd = (val(1.0 + h) - val(1.0 - h)) / (2.0 * h);
        const double an = restricted_XEtilde(s, k);
        CHECK(an == Approx(fd).margin(1e-6 * (1.0 + std::abs(fd))));
    }
}

TEST_CASE("restricted collision-locus scan") {
    for (double k : {-1.5, -2.0, -3.0}) {
        const auto scan = restricted_collision_scan(k, 0.05);
        CAPTURE(k);
        CHECK(scan.samples > 500);
        CHECK(scan.pass);
        CHECK(scan.min_XE > 0.0);
        CHECK(scan.f_min > 0.2);
        CHECK(scan.max_eta_norm <= 1.5);
        CHECK(scan.g_min > 1.0 - sqrt2 / 2.0 - 0.1);
        CHECK(scan.g_max < 1.0 - sqrt2 / 2.0 + 0.1);
        CHECK(scan.min_eta_norm > 0.0);
        CHECK(std::isfinite(scan.c0_meas));
        CHECK(std::isfinite(scan.c1_meas));
        CHECK(std::isfinite(scan.c2_meas));
    }
    // epsilon sweep at the default energy
    for (double eps : {0.01, 1.0 / 16.0}) {
        const auto scan = restricted_collision_scan(-2.0, eps);
        CAPTURE(eps);
        CHECK(scan.pass);
    }
}

TEST_CASE("fiberwise star-shape evidence") {
    const auto rep = fiberwise_starshape_check(-2.0, 48, 48);
    CHECK(rep.rays_with_root > 1000);
    CHECK(rep.roots_with_nonpositive_slope == 0);
    CHECK(rep.rays_multi_root == 0);
    CHECK(rep.min_slope > 0.0);
    CHECK(rep.doubling_positive);
    CHECK(rep.pass);

    CHECK_THROWS_AS(fiberwise_starshape_check(-0.5), std::invalid_argument);
}
