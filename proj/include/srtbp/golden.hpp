#ifndef SRTBP_GOLDEN_HPP
#define SRTBP_GOLDEN_HPP

#include <srtbp/io.hpp>

#include <random>
#include <sstream>

namespace srtbp {

/// One acceptance-criterion row of the regression report. `computed` carries
/// the binding sub-value (the one closest to, or past, its bound).
struct GoldenRow {
    int id{0};
    std::string name;
    std::string reference;  // which published value or property the row pins
    double expected{0.0};
    double computed{0.0};
    double tolerance{0.0};
    bool pass{false};
    std::string detail;
};

inline void to_json(json& j, const GoldenRow& r) {
    j = json{{"id", r.id},         {"name", r.name},   {"reference", r.reference},
             {"expected", r.expected}, {"computed", r.computed}, {"tolerance", r.tolerance},
             {"pass", r.pass},     {"detail", r.detail}};
}

namespace golden_detail {

inline std::string num(double v) { return fmt17(v); }

struct Sub {
    std::string text;
    bool ok;
};

inline GoldenRow assemble(int id, std::string name, std::string reference, double expected,
                          double computed, double tol, const std::vector<Sub>& subs) {
    GoldenRow row;
    row.id = id;
    row.name = std::move(name);
    row.reference = std::move(reference);
    row.expected = expected;
    row.computed = computed;
    row.tolerance = tol;
    row.pass = true;
    for (const auto& s : subs) {
        row.pass = row.pass && s.ok;
        if (!row.detail.empty()) row.detail += "; ";
        row.detail += (s.ok ? "[ok] " : "[FAIL] ") + s.text;
    }
    return row;
}

// --- criterion implementations ---------------------------------------------

inline GoldenRow c1_critical_energy(const RunConfig&) {
    const double H = eval_H(PlanarPhaseState{}).H;
    return assemble(1, "critical-point energy", "published value -1 at the first Lagrange point",
                    -1.0, H, 1e-12,
                    {{"H(0,0,0,0) = " + num(H), std::abs(H + 1.0) < 1e-12}});
}

inline GoldenRow c2_critical_point(const RunConfig&) {
    const double g = grad_H(PlanarPhaseState{}).norm();
    return assemble(2, "critical point", "gradient vanishes at the chart origin", 0.0, g, 1e-10,
                    {{"|grad H(0)| = " + num(g), g < 1e-10}});
}

inline GoldenRow c3_boundary_profile(const RunConfig& cfg) {
    const auto prof = boundary_profile(primary_offset, cfg.theta_samples);
    const auto vrof = radial_derivative_profile(primary_offset, cfg.theta_samples);
    const double d2u = prof.second_derivative_at_zero;
    const double d2v = vrof.second_derivative_at_zero;
    const bool argmin_ok = prof.argmin_index == 0;
    const bool min_ok = std::abs(prof.min_value + 1.0) < 1e-9;
    const bool d2u_ok = std::abs(d2u - 2.06) < 0.05 * 2.06;
    const bool d2v_ok = std::abs(d2v - 18.225) < 0.05 * 18.225;
    return assemble(
        3, "boundary potential profile",
        "published profile minimum -1 at theta=0 and curvatures 2.06 / 18.225", 2.06, d2u,
        0.05 * 2.06,
        {{"argmin at theta = " + num(prof.argmin_theta), argmin_ok},
         {"min value = " + num(prof.min_value) + " (target -1 +- 1e-9)", min_ok},
         {"d2U/dtheta2(0) = " + num(d2u) + " (target 2.06 +- 5%)", d2u_ok},
         {"d2V/dtheta2(0) = " + num(d2v) + " (target 18.225 +- 5%)", d2v_ok}});
}

inline GoldenRow c4_disk_containment(const RunConfig& cfg) {
    std::vector<Sub> subs;
    double worst = 0.0;
    for (double c : {-1.0 - 1e-6, -1.5, -3.0}) {
        const auto mask = compute_hill_region(
            c, Primary::m1, GridSpec::square(cfg.hill_window, cfg.grid));
        const bool inside = mask.max_dist_from_primary < primary_offset &&
                            mask.label == ComponentLabel::m1;
        worst = std::max(worst, mask.max_dist_from_primary);
        subs.push_back({"c = " + num(c) + ": max dist " + num(mask.max_dist_from_primary) +
                            " of " + std::to_string(mask.cell_count) + " cells",
                        inside});
    }
    return assemble(4, "Hill region disk containment",
                    "sublevel component stays inside the critical disk for c < -1",
                    primary_offset, worst, 0.0, subs);
}

inline GoldenRow c5_certificate_arithmetic(const RunConfig&) {
    const auto strict = estimate_alpha_beta(primary_offset, 512, 512, AlphaMode::strict_87_85);
    const auto paper = estimate_alpha_beta(primary_offset, 64, 64, AlphaMode::paper_21_96);
    std::vector<Sub> subs;
    subs.push_back({"beta1 = " + num(strict.beta1) + " (46.43 +- 0.01)",
                    std::abs(strict.beta1 - 46.43) <= 0.01});
    subs.push_back({"beta2 = " + num(strict.beta2) + " (33.80 +- 0.01)",
                    std::abs(strict.beta2 - 33.80) <= 0.01});
    subs.push_back({"beta = " + num(strict.beta) + " (80.23 +- 0.02)",
                    std::abs(strict.beta - 80.23) <= 0.02});
    subs.push_back({"sup c1^2 = " + num(strict.sup_c1_sq) + " (< 10.99)",
                    strict.sup_c1_sq < 10.99});
    subs.push_back({"sup t = " + num(strict.sup_t) + " (< 2, certification mode 87.85; " +
                        "21.96 reading measures " + num(paper.sup_t) + ")",
                    strict.sup_t < 2.0});
    subs.push_back({"d1 in (" + num(strict.d1_min) + ", " + num(strict.d1_max) + ") vs (-3.5, 3.5)",
                    strict.d1_min > -3.5 && strict.d1_max < 3.5});
    subs.push_back({"d2 in (" + num(strict.d2_min) + ", " + num(strict.d2_max) + ") vs (-4, 2.5)",
                    strict.d2_min > -4.0 && strict.d2_max < 2.5});
    return assemble(5, "certificate arithmetic", "published constants 46.43 / 33.80 / 80.23",
                    80.23, strict.beta, 0.02, subs);
}

inline GoldenRow c6_limit_constant(const RunConfig&) {
    auto cert = estimate_alpha_beta(primary_offset, 64, 64, AlphaMode::paper_21_96);
    const auto lc = limit_constant(cert);
    const auto lau = laurent_check();
    const double mu = (2.0 - sqrt2) / 2.0;
    return assemble(
        6, "collision limit constant", "published closed form evaluating to 0.9705",
        0.9705, lc.closed_form, 1e-3,
        {{"closed form = " + num(lc.closed_form) + " (0.9705 +- 1e-3)",
          std::abs(lc.closed_form - 0.9705) <= 1e-3},
         {"extrapolated = " + num(lc.extrapolated) + " (match to 1e-4)",
          std::abs(lc.closed_form - lc.extrapolated) <= 1e-4},
         {"surd identity vs sqrt(alpha/2)(2-sqrt2)/2 to 1e-12",
          std::abs(lc.closed_form - lc.simple_form) <= 1e-12},
         {"Laurent coefficient = " + num(lau.u2_inverse_coeff) + " ((2-sqrt2)/2 +- 1e-4)",
          std::abs(lau.u2_inverse_coeff - mu) <= 1e-4}});
}

inline GoldenRow c7_contact_scan(const RunConfig& cfg) {
    std::vector<Sub> subs;
    double binding = 0.0;
    for (AlphaMode mode : {AlphaMode::strict_87_85, AlphaMode::paper_21_96}) {
        const auto cert = estimate_alpha_beta(primary_offset, 256, 256, mode);
        const auto at_crit = certify_contact(-1.0, cert, cfg.grid, cfg.grid, 16);
        const auto below = certify_contact(-2.0, cert, cfg.grid / 2, cfg.grid / 2, 16);
        if (mode == AlphaMode::strict_87_85) binding = at_crit.min_witness;
        subs.push_back({alpha_mode_name(mode) + ", c=-1: min witness " +
                            num(at_crit.min_witness) + " at (rho=" + num(at_crit.argmin.rho) +
                            ", theta=" + num(at_crit.argmin.theta) + "), nonpositive cells " +
                            std::to_string(at_crit.nonpositive_cells) +
                            " (required: >= 0 with equality only at the saddle cell)",
                        at_crit.pass});
        subs.push_back({alpha_mode_name(mode) + ", c=-1: direct X(H) route min " +
                            num(at_crit.direct_XH_min) + ", inner closure threshold " +
                            num(at_crit.inner_threshold),
                        at_crit.inner_closure_ok});
        subs.push_back({alpha_mode_name(mode) + ", c=-2: min witness " + num(below.min_witness) +
                            " (> 0 required)",
                        below.pass && below.min_witness > 0.0});
    }
    return assemble(7, "contact-condition scan",
                    "transversality witness over the Hill grid at c = -1 and c = -2", 0.0,
                    binding, 0.0, subs);
}

inline GoldenRow c8_moser_chart(const RunConfig& cfg) {
    std::mt19937_64 gen(cfg.seed + 8);
    std::uniform_real_distribution<double> box(-5.0, 5.0);
    double worst_constraint = 0.0, worst_roundtrip = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const FlipState f{Vec2(box(gen), box(gen)), Vec2(box(gen), box(gen))};
        const auto s = moser_lift(f);
        worst_constraint = std::max(
            worst_constraint,
            std::max(s.sphere_residual(), s.orthogonality_residual() / (1.0 + s.eta.norm())));
        const auto back = moser_project(s);
        worst_roundtrip = std::max(worst_roundtrip,
                                   std::max((back.x - f.x).norm() / (1.0 + f.x.norm()),
                                            (back.y - f.y).norm() / (1.0 + f.y.norm())));
    }
    // one-form pullback at two steps: second-order shrink confirms the identity
    auto residual_at = [&](double h) {
        std::mt19937_64 g2(cfg.seed + 88);
        std::uniform_real_distribution<double> b2(-2.0, 2.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const FlipState f{Vec2(b2(g2), b2(g2)), Vec2(b2(g2), b2(g2))};
            const Vec2 dx(b2(g2), b2(g2));
            const auto sp = moser_lift({f.x + h * dx, f.y});
            const auto sm = moser_lift({f.x - h * dx, f.y});
            const Vec3 dxi = (sp.xi - sm.xi) / (2.0 * h);
            worst = std::max(worst, std::abs(moser_lift(f).eta.dot(dxi) - f.y.dot(dx)));
        }
        return worst;
    };
    const double r1 = residual_at(1e-4);
    const double r2 = residual_at(5e-5);
    return assemble(8, "momentum-sphere chart",
                    "round trip, constraint manifold, canonical one-form pullback", 0.0,
                    std::max(worst_constraint, worst_roundtrip), 1e-12,
                    {{"worst constraint residual " + num(worst_constraint), worst_constraint < 1e-12},
                     {"worst round-trip residual " + num(worst_roundtrip), worst_roundtrip < 1e-12},
                     {"one-form residual " + num(r1) + " -> " + num(r2) +
                          " under step halving (second order)",
                      r2 < 0.3 * r1 && r1 < 1e-6}});
}

inline GoldenRow c9_kepler_regularization(const RunConfig& cfg) {
    const auto scan = kepler_collision_scan(cfg.regularization_k, 1.0 / 16.0, 32, 24, 24);
    return assemble(9, "Kepler regularization",
                    "transversality on the compactified level set near the collision", 0.0,
                    scan.min_XQ, 0.0,
                    {{"samples " + std::to_string(scan.samples), scan.samples > 1000},
                     {"min X(Q) = " + num(scan.min_XQ) + " (> 0)", scan.min_XQ > 0.0},
                     {"max |eta| = " + num(scan.max_eta_norm) + " (<= 8)",
                      scan.max_eta_norm <= 8.0}});
}

inline GoldenRow c10_restricted_regularization(const RunConfig& cfg) {
    std::mt19937_64 gen(cfg.seed + 10);
    std::uniform_real_distribution<double> box(-1.5, 1.5);
    const double k = cfg.regularization_k;
    double worst_identity = 0.0;
    int tested = 0;
    while (tested < 10000) {
        const FlipState f{Vec2(box(gen), box(gen)), Vec2(box(gen), box(gen))};
        if (f.y.norm() < 0.05 || (f.y - Vec2(2.0 * primary_offset, 0)).norm() < 0.1 ||
            (f.y - Vec2(-2.0, 0)).norm() < 0.1 || (f.y - Vec2(2.0 * sqrt2, 0)).norm() < 0.1) {
            continue;
        }
        ++tested;
        const PlanarPhaseState s{f.y + primary_m1(), -f.x};
        const double E = restricted_E(f, k);
        const double viaH = (eval_H(s).H - k) * f.y.norm();
        const double Et = restricted_Etilde(moser_lift(f), k).value;
        const double scale = 1.0 + std::abs(E);
        worst_identity = std::max(worst_identity, std::abs(E - viaH) / scale);
        worst_identity = std::max(worst_identity, std::abs(Et - E) / scale);
    }
    const auto scan = restricted_collision_scan(k, cfg.collision_eps, 32, 24, 24);
    const auto star = fiberwise_starshape_check(k, 48, 48);
    const double g_ref = 1.0 - sqrt2 / 2.0;
    return assemble(
        10, "restricted regularization",
        "pullback identities and near-collision window bounds", 0.0, worst_identity, 1e-10,
        {{"worst pullback identity residual " + num(worst_identity), worst_identity < 1e-10},
         {"g in [" + num(scan.g_min) + ", " + num(scan.g_max) + "] (0.2929 +- 0.1)",
          scan.g_min > g_ref - 0.1 && scan.g_max < g_ref + 0.1},
         {"min f = " + num(scan.f_min) + " (> 1/5)", scan.f_min > 0.2},
         {"max |eta| = " + num(scan.max_eta_norm) + " (<= 1.5)", scan.max_eta_norm <= 1.5},
         {"min X(Etilde) = " + num(scan.min_XE) + " (> 0)", scan.min_XE > 0.0},
         {"zero-section avoidance: min |eta| = " + num(scan.min_eta_norm),
          scan.min_eta_norm > 0.0},
         {"star-shape: " + std::to_string(star.rays_with_root) + " rays, min slope " +
              num(star.min_slope),
          star.pass}});
}

inline GoldenRow c11_neck(const RunConfig& cfg) {
    const auto yq = YQ_matrix(cfg.neck_a, cfg.neck_b);
    const bool eig_ok = yq.eigenvalues[0] > 0.0;

    std::mt19937_64 gen(cfg.seed + 11);
    std::uniform_real_distribution<double> box(-0.4, 0.4);
    double worst_dG = 0.0;
    for (int i = 0; i < 100; ++i) {
        const PlanarPhaseState s{Vec2(box(gen), box(gen)), Vec2(box(gen), box(gen))};
        Vec4 dir;
        for (int k = 0; k < 4; ++k) dir[k] = box(gen);
        auto G_of = [&](const Vec4& z) {
            return G_primitive(PlanarPhaseState::from_vec4(z), cfg.neck_a, cfg.neck_b);
        };
        const Vec4 z = s.to_vec4();
        auto fd = [&](double h) { return (G_of(z + h * dir) - G_of(z - h * dir)) / (2.0 * h); };
        const double dG = (4.0 * fd(5e-6) - fd(1e-5)) / 3.0;
        const double expect = (alpha1_form(s, cfg.neck_a, cfg.neck_b) - alpha0_form(s)).dot(dir);
        worst_dG = std::max(worst_dG, std::abs(dG - expect));
    }

    const auto collapse = ellipsoid_section(0.0);
    std::uniform_real_distribution<double> qbox(-2.0, 2.0);
    double worst_quadric = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 v(qbox(gen), qbox(gen), qbox(gen));
        const double delta = 0.5 * qbox(gen);
        const double a = quadric_value(v, delta);
        const double b = quadric_value_completed(v, delta);
        worst_quadric = std::max(worst_quadric, std::abs(a - b) / (1.0 + std::abs(a)));
    }

    const auto window = bisect_neck_window(cfg.neck_spec(), 72, 16);
    return assemble(
        11, "neck analysis",
        "Weinstein form positivity, exact primitive, quadric section, neck window", 1e-3,
        window.eps, 0.0,
        {{"Y(Q) eigenvalues at (-1/2, 1/2): min = " + num(yq.eigenvalues[0]), eig_ok},
         {"dG residual " + num(worst_dG) + " (< 1e-7)", worst_dG < 1e-7},
         {"delta=0 section collapses to a point", collapse.collapsed},
         {"quadric identity residual " + num(worst_quadric) + " (< 1e-12)",
          worst_quadric < 1e-12},
         {"bisected energy window eps = " + num(window.eps) + " (> 1e-3)",
          window.found && window.eps > 1e-3}});
}

inline GoldenRow c12_dynamics(const RunConfig& cfg) {
    std::vector<Sub> subs;

    // energy drift over 50 time units
    const Vec2 q0 = primary_m1() + Vec2(0.08, 0.0);
    PhysicalRunOptions opts;
    opts.switch_radius = 0.0;
    const auto traj = integrate_physical(fiber_state(q0, -2.0, 0.7), 0.0, 50.0, opts);
    subs.push_back({"energy drift over 50 tu = " + num(traj.max_energy_drift) + " (< 1e-8)",
                    traj.max_energy_drift < 1e-8});

    // two-chart overlap after time reparametrization
    const double k = cfg.regularization_k;
    const auto s0 = fiber_state(primary_m1() + Vec2(0.08, 0.01), k, 0.4);
    const auto lifted = moser_lift(flip(s0, primary_m1()));
    RegularizedRunOptions ropts;
    ropts.sample_ds = 0.02;
    ropts.stop_at_physical_time = 2.0;
    const auto reg = integrate_regularized(lifted, 1e4, k, ropts);
    double worst_overlap = 0.0;
    int compared = 0;
    for (const auto& smp : reg.samples) {
        if (smp.t <= 1e-6 || smp.t > 1.9 || (1.0 - smp.xi[0]) < 1e-3) continue;
        const auto back = regularized_to_physical({smp.xi, smp.eta}, primary_m1());
        const auto ref = integrate_physical(s0, 0.0, smp.t, opts);
        worst_overlap =
            std::max(worst_overlap, (back.to_vec4() - ref.samples.back().state).norm());
        if (++compared >= 20) break;
    }
    subs.push_back({"two-chart overlap deviation " + num(worst_overlap) + " over " +
                        std::to_string(compared) + " times (< 1e-6)",
                    compared >= 10 && worst_overlap < 1e-6});

    // regularized Kepler collision passage
    const PlanarPhaseState ck{Vec2(0.5, 0.0), Vec2(0.0, 0.0)};
    const double kk = model_energy(ck, HamiltonianModel::kepler_no_rotation);
    RegularizedRunOptions kopts;
    kopts.model = RegularizedModel::kepler_no_rotation;
    kopts.sample_ds = 0.01;
    const auto kreg = integrate_regularized(moser_lift(flip(ck, Vec2(0, 0))), 6.0, kk, kopts);
    double min_gap = 2.0;
    size_t at = 0;
    for (size_t i = 0; i < kreg.samples.size(); ++i) {
        if (1.0 - kreg.samples[i].xi[0] < min_gap) {
            min_gap = 1.0 - kreg.samples[i].xi[0];
            at = i;
        }
    }
    subs.push_back({"collision passage: min (1 - xi0) = " + num(min_gap) +
                        ", constraint drift " + num(kreg.max_constraint_drift),
                    min_gap < 1e-3 && at + 5 < kreg.samples.size() &&
                        kreg.max_constraint_drift < 1e-9});

    // periodic orbits around both primaries
    const double c = cfg.orbit_energy;
    const double mu = (2.0 - sqrt2) / 2.0;
    const double rho_seed = mu / (2.0 * (-0.25 - c));
    const auto orb1 = find_periodic_orbit(c, primary_m1()[0] + rho_seed, 1);
    const auto orb2 = find_periodic_orbit(c, -(primary_m1()[0] + rho_seed), -1);
    const double mirror_dev =
        std::max(std::abs(orb1.initial_state[0] + orb2.initial_state[0]),
                 std::abs(orb1.initial_state[3] + orb2.initial_state[3]));
    subs.push_back({"orbit around m1: period " + num(orb1.period) + ", residual " +
                        num(orb1.return_residual),
                    orb1.converged && orb1.return_residual < 1e-8});
    subs.push_back({"orbit around m2: period " + num(orb2.period) + ", residual " +
                        num(orb2.return_residual),
                    orb2.converged && orb2.return_residual < 1e-8});
    subs.push_back({"mirror-image deviation " + num(mirror_dev) + " (< 1e-6)",
                    mirror_dev < 1e-6 && std::abs(orb1.period - orb2.period) < 1e-6});

    GoldenRow row = assemble(12, "dynamics engine",
                             "conservation, chart consistency, collision passage, periodic orbits",
                             0.0, traj.max_energy_drift, 1e-8, subs);
    return row;
}

}  // namespace golden_detail

/// Rows 1..12 of the acceptance table (pure function of the configuration).
inline std::vector<GoldenRow> run_golden_once(const RunConfig& cfg) {
    using namespace golden_detail;
    return {c1_critical_energy(cfg),  c2_critical_point(cfg),
            c3_boundary_profile(cfg), c4_disk_containment(cfg),
            c5_certificate_arithmetic(cfg), c6_limit_constant(cfg),
            c7_contact_scan(cfg),     c8_moser_chart(cfg),
            c9_kepler_regularization(cfg), c10_restricted_regularization(cfg),
            c11_neck(cfg),            c12_dynamics(cfg)};
}

inline std::string golden_rows_to_string(const std::vector<GoldenRow>& rows) {
    json j = json::array();
    for (const auto& r : rows) j.push_back(r);
    return j.dump(2);
}

/// Full table: rows 1..12 plus the determinism row, which reruns the whole
/// evaluation and byte-compares the serialized reports.
inline std::vector<GoldenRow> run_golden(const RunConfig& cfg) {
    auto rows = run_golden_once(cfg);
    const std::string first = golden_rows_to_string(rows);
    const std::string second = golden_rows_to_string(run_golden_once(cfg));
    const bool identical = first == second;
    rows.push_back(golden_detail::assemble(
        13, "determinism", "repeated runs produce byte-identical reports", 0.0,
        identical ? 0.0 : 1.0, 0.0,
        {{"serialized reports of two full runs are byte-identical", identical}}));
    return rows;
}

inline std::string golden_csv(const std::vector<GoldenRow>& rows) {
    std::string out = "id,name,reference,expected,computed,tolerance,pass\n";
    for (const auto& r : rows) {
        out += std::to_string(r.id) + ",\"" + r.name + "\",\"" + r.reference + "\"," +
               fmt17(r.expected) + ',' + fmt17(r.computed) + ',' + fmt17(r.tolerance) + ',' +
               (r.pass ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace srtbp

#endif  // SRTBP_GOLDEN_HPP
