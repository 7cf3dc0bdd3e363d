// Command-line front end: every published number and scan behind one binary.

#include <srtbp/golden.hpp>
#include <srtbp/io.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace srtbp;

namespace {

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

int run_hill(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const auto mask = compute_hill_region(cfg.energy, Primary::m1,
                                          GridSpec::square(cfg.hill_window, cfg.grid));
    write_json(dir / "hill_summary.json", hill_summary_json(mask));
    write_text(dir / "hill_mask.csv", hill_mask_csv(mask, std::max(1, cfg.grid / 512)));

    const auto prof = boundary_profile(primary_offset, cfg.theta_samples);
    const auto vrof = radial_derivative_profile(primary_offset, cfg.theta_samples);
    std::string csv = "theta,U_boundary,dU_drho\n";
    for (int i = 0; i < cfg.theta_samples; ++i) {
        csv += fmt17(prof.theta[i]) + ',' + fmt17(prof.value[i]) + ',' + fmt17(vrof.value[i]) +
               '\n';
    }
    write_text(dir / "U_boundary_profile.csv", csv);
    std::cout << "hill: " << mask.cell_count << " cells, max distance "
              << mask.max_dist_from_primary << " (disk radius " << primary_offset << ")\n";
    return 0;
}

std::vector<AlphaMode> selected_modes(const RunConfig& cfg) {
    switch (cfg.alpha_mode) {
        case AlphaSelection::paper: return {AlphaMode::paper_21_96};
        case AlphaSelection::strict: return {AlphaMode::strict_87_85};
        case AlphaSelection::both: return {AlphaMode::strict_87_85, AlphaMode::paper_21_96};
    }
    return {};
}

int run_certify(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const double c = cfg.energy;
    json out = json::array();
    for (AlphaMode mode : selected_modes(cfg)) {
        auto cert = estimate_alpha_beta(primary_offset, 512, 512, mode);
        if (cfg.certificate_beta > 0.0) cert.beta = cfg.certificate_beta;
        const auto scan = certify_contact(c, cert, cfg.grid, cfg.grid, 16);
        json entry;
        entry["certificate"] = cert;
        entry["scan"] = scan;
        out.push_back(entry);
        std::cout << "certify [" << alpha_mode_name(mode) << "] c=" << c
                  << ": min witness " << scan.min_witness << " at (rho=" << scan.argmin.rho
                  << ", theta=" << scan.argmin.theta << "), pass=" << scan.pass
                  << ", direct X(H) min " << scan.direct_XH_min << "\n";
    }
    write_json(dir / "certify_report.json", out);
    return 0;
}

int run_kepler(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const auto scan = kepler_collision_scan(cfg.regularization_k, 1.0 / 16.0, 32, 24, 24);
    write_json(dir / "kepler_scan.json", json(scan));
    std::cout << "kepler: " << scan.samples << " samples, min X(Q) " << scan.min_XQ
              << ", max |eta| " << scan.max_eta_norm << ", pass=" << scan.pass << "\n";
    return 0;
}

int run_regularize(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    json sweeps = json::array();
    for (double k : {-1.5, cfg.regularization_k, -3.0}) {
        sweeps.push_back(json(restricted_collision_scan(k, cfg.collision_eps, 32, 24, 24)));
    }
    json out;
    out["scans"] = sweeps;
    out["star_shape"] = fiberwise_starshape_check(cfg.regularization_k, 48, 48);
    write_json(dir / "regularize_report.json", out);

    // level-set samples for plotting
    {
        const double k = cfg.regularization_k;
        std::string csv = "xi0,xi1,xi2,eta0,eta1,eta2,f,g,XE\n";
        for (int i = 0; i < 16; ++i) {
            const double sigma = std::sqrt(2.5 * cfg.collision_eps) * i / 16.0;
            for (int j = 0; j < (i == 0 ? 1 : 8); ++j) {
                for (int m = 0; m < 16; ++m) {
                    const auto rf =
                        collision_ray_frame(sigma, two_pi * j / 8.0, two_pi * m / 16.0);
                    auto value = [&](double t) {
                        const Vec3 eta = t * rf.eta_hat;
                        return detail::etilde_parts(rf.xi.data(), eta.data(), k).value;
                    };
                    for (double t : ray_roots(value, 0.0, 6.0)) {
                        SphereCotangentState s{rf.xi, t * rf.eta_hat};
                        if ((1.0 - s.xi[0]) * t >= cfg.collision_eps) continue;
                        const auto ev = restricted_Etilde(s, k);
                        for (int c = 0; c < 3; ++c) csv += fmt17(s.xi[c]) + ',';
                        for (int c = 0; c < 3; ++c) csv += fmt17(s.eta[c]) + ',';
                        csv += fmt17(ev.f) + ',' + fmt17(ev.g) + ',' +
                               fmt17(restricted_XEtilde(s, k)) + '\n';
                    }
                }
            }
        }
        write_text(dir / "levelset_samples.csv", csv);
    }
    const auto& main = sweeps[1];
    std::cout << "regularize: k=" << cfg.regularization_k << " min X(Etilde) "
              << main["min_XE"].get<double>() << ", g window [" << main["g_min"].get<double>()
              << ", " << main["g_max"].get<double>() << "], pass="
              << main["pass"].get<bool>() << "\n";
    return 0;
}

int run_neck(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    json out;
    out["quadratic_forms"] = quadratic_forms();
    const auto yq = YQ_matrix(cfg.neck_a, cfg.neck_b);
    out["YQ_eigenvalues"] = {yq.eigenvalues[0], yq.eigenvalues[1], yq.eigenvalues[2],
                             yq.eigenvalues[3]};
    const auto window = bisect_neck_window(cfg.neck_spec(), 72, 16);
    out["window"] = window;
    if (window.found) {
        out["scan_at_window"] = ZH_scan(-1.0 + 0.5 * window.eps, cfg.neck_spec(), 96, 24);
    }
    out["ellipsoid_delta_0"] = ellipsoid_section(0.0);
    out["ellipsoid_delta_1"] = ellipsoid_section(1.0);
    write_json(dir / "neck_report.json", out);

    // sample dump of the transversality scan across the neck
    if (window.found) {
        const double c = -1.0 + 0.5 * window.eps;
        const auto spec = cfg.neck_spec();
        std::string csv = "q1,q2,p1,p2,w,ZH\n";
        for (int i = 0; i < 48; ++i) {
            const double q1 = -0.4 + 0.8 * (i + 0.5) / 48;
            for (int j = 0; j < 48; ++j) {
                const double q2 = -0.4 + 0.8 * (j + 0.5) / 48;
                const Vec2 q(q1, q2);
                if (q.norm() > 0.4) continue;
                double gap;
                try {
                    gap = c - potential(q).U;
                } catch (const CollisionError&) {
                    continue;
                }
                if (gap < 0.0) continue;
                for (int m = 0; m < 8; ++m) {
                    const auto s = fiber_state(q, c, two_pi * m / 8.0);
                    if (s.to_vec4().norm() > 0.4) continue;
                    const double w = neck_variable(s);
                    if (std::abs(w) > 0.2) continue;
                    const double zh = grad_H(s).dot(Z_field_glued(s, spec));
                    for (int ci = 0; ci < 4; ++ci) csv += fmt17(s.to_vec4()[ci]) + ',';
                    csv += fmt17(w) + ',' + fmt17(zh) + '\n';
                }
            }
        }
        write_text(dir / "neck_scan_samples.csv", csv);
    }
    std::cout << "neck: bisected energy window eps = " << window.eps
              << ", Y(Q) min eigenvalue " << yq.eigenvalues[0] << "\n";
    return 0;
}

int run_orbit(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const double c = cfg.orbit_energy;
    const double mu = (2.0 - sqrt2) / 2.0;
    const double rho_seed = mu / (2.0 * (-0.25 - c));
    const auto orb1 = find_periodic_orbit(c, primary_m1()[0] + rho_seed, 1);
    const auto orb2 = find_periodic_orbit(c, -(primary_m1()[0] + rho_seed), -1);
    json out;
    out["m1"] = orb1;
    out["m2"] = orb2;
    write_json(dir / "orbits.json", out);

    PhysicalRunOptions opts;
    opts.switch_radius = 0.0;
    opts.sample_dt = orb1.period / 256.0;
    const auto traj = integrate_physical(PlanarPhaseState::from_vec4(orb1.initial_state), 0.0,
                                         orb1.period, opts);
    write_text(dir / "orbit_m1_trajectory.csv", trajectory_csv(traj));
    std::cout << "orbit: c=" << c << " m1 period " << orb1.period << " residual "
              << orb1.return_residual << "; m2 period " << orb2.period << " residual "
              << orb2.return_residual << "\n";
    return 0;
}

std::string grid_csv(const std::string& header,
                     const std::function<double(double, double)>& f, double rho_lo,
                     double rho_hi, int n_rho, int n_theta) {
    std::string out = header;
    for (int i = 0; i <= n_rho; ++i) {
        const double rho = rho_lo + (rho_hi - rho_lo) * i / n_rho;
        for (int j = 0; j < n_theta; ++j) {
            const double theta = two_pi * j / n_theta;
            double v;
            try {
                v = f(rho, theta);
            } catch (const std::exception&) {
                continue;
            }
            if (!std::isfinite(v)) continue;
            out += fmt17(rho) + ',' + fmt17(theta) + ',' + fmt17(v) + '\n';
        }
    }
    return out;
}

int run_figures(const RunConfig& cfg, const std::string& only) {
    const auto dir = ensure_out_dir(cfg);
    const double R = primary_offset;
    const auto paper_cert = estimate_alpha_beta(R, 256, 256, AlphaMode::paper_21_96);
    const std::vector<std::string> known = {"fig2",  "fig3a", "fig3b", "fig3c", "fig3d",
                                            "fig4a", "fig4b", "fig5",  "fig6",  "fig7",
                                            "fig8a", "fig8b", "fig9",  "fig10"};
    auto wanted = [&](const std::string& id) { return only.empty() || only == id; };
    if (!only.empty() && std::find(known.begin(), known.end(), only) == known.end()) {
        std::cerr << "unknown figure id '" << only << "'; valid:";
        for (const auto& k : known) std::cerr << ' ' << k;
        std::cerr << "\n";
        return 2;
    }

    if (wanted("fig2")) {
        const auto prof = boundary_profile(R, cfg.theta_samples);
        std::string csv = "theta,U_boundary\n";
        for (int i = 0; i < cfg.theta_samples; ++i) {
            csv += fmt17(prof.theta[i]) + ',' + fmt17(prof.value[i]) + '\n';
        }
        write_text(dir / "fig2_U_boundary_profile.csv", csv);
    }
    const auto root_fig = [&](const std::string& id, int which, bool plus) {
        const double alpha = paper_cert.alpha;
        write_text(dir / (id + "_root_" + (plus ? "plus" : "minus") + "_" +
                          std::to_string(which) + ".csv"),
                   grid_csv("rho,theta,root\n",
                            [&](double rho, double theta) {
                                if (!in_hill_region({rho, theta}, -1.0)) {
                                    throw std::domain_error("outside");
                                }
                                const auto rb = quadratic_root_bound({rho, theta}, alpha, which);
                                return plus ? rb.r_plus : rb.r_minus;
                            },
                            1e-3, R, 128, 128));
    };
    if (wanted("fig3a")) root_fig("fig3a", 1, true);
    if (wanted("fig3b")) root_fig("fig3b", 1, false);
    if (wanted("fig3c")) root_fig("fig3c", 2, true);
    if (wanted("fig3d")) root_fig("fig3d", 2, false);
    if (wanted("fig4a")) {
        write_text(dir / "fig4a_d1.csv",
                   grid_csv("rho,theta,d1\n",
                            [](double rho, double theta) {
                                return coefficients({rho, theta}).d1;
                            },
                            0.0, R, 128, 128));
    }
    if (wanted("fig4b")) {
        write_text(dir / "fig4b_d2.csv",
                   grid_csv("rho,theta,d2\n",
                            [](double rho, double theta) {
                                return coefficients({rho, theta}).d2;
                            },
                            0.0, R, 128, 128));
    }
    if (wanted("fig5")) {
        const auto vrof = radial_derivative_profile(R, cfg.theta_samples);
        std::string csv = "theta,V\n";
        for (int i = 0; i < cfg.theta_samples; ++i) {
            csv += fmt17(vrof.theta[i]) + ',' + fmt17(vrof.value[i]) + '\n';
        }
        write_text(dir / "fig5_V_profile.csv", csv);
    }
    if (wanted("fig6")) {
        std::string csv = "rho,witness\n";
        const int n = 1024;
        for (int i = 0; i <= n; ++i) {
            const double rho = 0.05 + (R - 0.05) * i / n;
            csv += fmt17(rho) + ',' +
                   fmt17(key_inequality({rho, 0.0}, -1.0, paper_cert)) + '\n';
        }
        write_text(dir / "fig6_witness_theta0.csv", csv);
    }
    if (wanted("fig7")) {
        write_text(dir / "fig7_witness_surface.csv",
                   grid_csv("rho,theta,witness\n",
                            [&](double rho, double theta) {
                                if (!in_hill_region({rho, theta}, -1.0)) {
                                    throw std::domain_error("outside");
                                }
                                return key_inequality({rho, theta}, -1.0, paper_cert);
                            },
                            0.05, 0.37, 128, 256));
    }
    if (wanted("fig8a")) {
        write_text(dir / "fig8a_U_minus_axis.csv",
                   grid_csv("rho,theta,U_diff\n",
                            [](double rho, double theta) {
                                return eval_U_polar({rho, theta}).U - eval_U_polar({rho, 0.0}).U;
                            },
                            1e-2, R, 128, 256));
    }
    if (wanted("fig8b")) {
        write_text(dir / "fig8b_dU_minus_axis.csv",
                   grid_csv("rho,theta,dU_diff\n",
                            [](double rho, double theta) {
                                return dU_drho({rho, theta}) - dU_drho({rho, 0.0});
                            },
                            1e-2, R, 128, 256));
    }
    if (wanted("fig9")) {
        std::string csv = "y_norm,eta_norm,XQ\n";
        const double k = cfg.regularization_k;
        for (int i = 0; i < 24; ++i) {
            const double sigma = std::sqrt(2.5 / 16.0) * i / 24.0;
            for (int m = 0; m < 24; ++m) {
                const auto rf = collision_ray_frame(sigma, 0.7, two_pi * m / 24.0);
                auto value = [&](double t) {
                    SphereCotangentState s{rf.xi, t * rf.eta_hat};
                    return kepler_Q(s, k);
                };
                for (double t : ray_roots(value, 0.125, 12.0)) {
                    SphereCotangentState s{rf.xi, t * rf.eta_hat};
                    if ((1.0 - s.xi[0]) * t >= 1.0 / 16.0) continue;
                    csv += fmt17((1.0 - s.xi[0]) * t) + ',' + fmt17(t) + ',' +
                           fmt17(kepler_XQ(s, k)) + '\n';
                }
            }
        }
        write_text(dir / "fig9_kepler_locus.csv", csv);
    }
    if (wanted("fig10")) {
        std::string csv = "y_norm,eta_norm,f,g,XE\n";
        const double k = cfg.regularization_k;
        for (int i = 0; i < 24; ++i) {
            const double sigma = std::sqrt(2.5 * cfg.collision_eps) * i / 24.0;
            for (int m = 0; m < 24; ++m) {
                const auto rf = collision_ray_frame(sigma, 0.7, two_pi * m / 24.0);
                auto value = [&](double t) {
                    const Vec3 eta = t * rf.eta_hat;
                    return detail::etilde_parts(rf.xi.data(), eta.data(), k).value;
                };
                for (double t : ray_roots(value, 0.0, 6.0)) {
                    SphereCotangentState s{rf.xi, t * rf.eta_hat};
                    if ((1.0 - s.xi[0]) * t >= cfg.collision_eps) continue;
                    const auto ev = restricted_Etilde(s, k);
                    csv += fmt17((1.0 - s.xi[0]) * t) + ',' + fmt17(t) + ',' + fmt17(ev.f) +
                           ',' + fmt17(ev.g) + ',' + fmt17(restricted_XEtilde(s, k)) + '\n';
                }
            }
        }
        write_text(dir / "fig10_restricted_locus.csv", csv);
    }
    std::cout << "figures written to " << dir.string() << "\n";
    return 0;
}

int run_golden_cmd(const RunConfig& cfg) {
    const auto dir = ensure_out_dir(cfg);
    const auto rows = run_golden(cfg);
    write_text(dir / "golden_report.json", golden_rows_to_string(rows) + "\n");
    write_text(dir / "golden_report.csv", golden_csv(rows));
    bool all = true;
    for (const auto& r : rows) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << "criterion " << r.id << " (" << r.name
                  << "): computed " << fmt17(r.computed) << " expected " << fmt17(r.expected)
                  << "\n";
        if (!r.pass) {
            std::cout << "      " << r.detail << "\n";
            all = false;
        }
    }
    std::cout << (all ? "golden: all rows pass\n" : "golden: some rows FAILED\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for the symmetric restricted three-body problem on the sphere"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir, alpha_mode, figure_id;
    uint64_t seed = 0;
    int grid = 0;
    double energy = 0.0;
    bool have_energy = false, have_seed = false, print_default = false;

    app.add_option("--config", config_path, "configuration file (JSON)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized checks")->each([&](const std::string&) {
        have_seed = true;
    });
    app.add_option("--grid", grid, "grid resolution");
    app.add_option("--energy", energy, "energy value c")->each([&](const std::string&) {
        have_energy = true;
    });
    app.add_option("--alpha-mode", alpha_mode, "paper-21.96 | strict-87.85 | both");
    app.add_flag("--print-default-config", print_default, "emit the default configuration");

    auto* s_hill = app.add_subcommand("hill", "Hill region masks and boundary profiles");
    auto* s_certify = app.add_subcommand("certify", "contact-condition certificates and scans");
    auto* s_kepler = app.add_subcommand("kepler", "regularized Kepler checks");
    auto* s_regularize = app.add_subcommand("regularize", "regularized restricted-problem scans");
    auto* s_neck = app.add_subcommand("neck", "neck analysis at the first Lagrange point");
    auto* s_orbit = app.add_subcommand("orbit", "trajectories and periodic orbit search");
    auto* s_figures = app.add_subcommand("figures", "figure data CSV emission");
    s_figures->add_option("--figure", figure_id, "emit a single figure id");
    auto* s_golden = app.add_subcommand("golden", "full golden-value regression report");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (have_seed) cfg.seed = seed;
        if (grid != 0) cfg.grid = grid;
        if (have_energy) cfg.energy = energy;
        if (!alpha_mode.empty()) cfg.alpha_mode = alpha_selection_from(alpha_mode);
        cfg.validate();

        if (print_default) {
            std::cout << json(RunConfig{}).dump(2) << "\n";
            return 0;
        }
        if (s_hill->parsed()) return run_hill(cfg);
        if (s_certify->parsed()) return run_certify(cfg);
        if (s_kepler->parsed()) return run_kepler(cfg);
        if (s_regularize->parsed()) return run_regularize(cfg);
        if (s_neck->parsed()) return run_neck(cfg);
        if (s_orbit->parsed()) return run_orbit(cfg);
        if (s_figures->parsed()) return run_figures(cfg, figure_id);
        if (s_golden->parsed()) return run_golden_cmd(cfg);
        std::cout << app.help();
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
