#ifndef SRTBP_IO_HPP
#define SRTBP_IO_HPP

#include <srtbp/certifier.hpp>
#include <srtbp/dynamics.hpp>
#include <srtbp/hill.hpp>
#include <srtbp/neck.hpp>
#include <srtbp/regularizer.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace srtbp {

using nlohmann::json;

/// Fixed 17-significant-digit rendering: byte-stable across IEEE platforms.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

enum class AlphaSelection { paper, strict, both };

inline std::string alpha_selection_name(AlphaSelection a) {
    switch (a) {
        case AlphaSelection::paper: return "paper-21.96";
        case AlphaSelection::strict: return "strict-87.85";
        case AlphaSelection::both: return "both";
    }
    return "both";
}

inline AlphaSelection alpha_selection_from(const std::string& s) {
    if (s == "paper-21.96") return AlphaSelection::paper;
    if (s == "strict-87.85") return AlphaSelection::strict;
    if (s == "both") return AlphaSelection::both;
    throw std::invalid_argument("unknown alpha mode: " + s);
}

struct RunConfig {
    uint64_t seed{20240817};
    int grid{1024};
    int theta_samples{720};
    double energy{-1.0};
    AlphaSelection alpha_mode{AlphaSelection::both};
    double certificate_beta{0.0};  // 0: use the derived constants
    double regularization_k{-2.0};
    double collision_eps{0.05};
    double neck_a{-0.5};
    double neck_b{0.5};
    double neck_eps1{0.02};
    double neck_eps2{0.05};
    double hill_window{1.0};
    double orbit_energy{-3.0};
    std::string out_dir{"out"};

    InterpolationSpec neck_spec() const { return {neck_a, neck_b, neck_eps1, neck_eps2}; }

    void validate() const {
        if (grid < 64 || grid > 8192) throw std::invalid_argument("config: grid outside [64, 8192]");
        if (theta_samples < 16) throw std::invalid_argument("config: theta_samples too small");
        if (energy >= 0.0) throw std::invalid_argument("config: energy must be negative");
        if (regularization_k >= -1.0) throw std::invalid_argument("config: regularization_k must be < -1");
        if (certificate_beta < 0.0) throw std::invalid_argument("config: certificate_beta must be >= 0");
        if (!(collision_eps > 0.0 && collision_eps <= 0.2)) {
            throw std::invalid_argument("config: collision_eps outside (0, 0.2]");
        }
        if (!(neck_a < 0.0 && neck_b > 0.0)) throw std::invalid_argument("config: need a < 0 < b");
        if (!(0.0 < neck_eps1 && neck_eps1 < neck_eps2 && neck_eps2 <= 0.2)) {
            throw std::invalid_argument("config: need 0 < eps1 < eps2 <= 0.2");
        }
        if (hill_window <= primary_offset) {
            throw std::invalid_argument("config: hill_window must exceed sqrt(2)-1");
        }
        if (orbit_energy >= -1.0 && orbit_energy <= -0.95) {
            // permitted neck band
        } else if (orbit_energy >= -1.0) {
            throw std::invalid_argument("config: orbit_energy outside certified regimes");
        }
    }
};

inline void to_json(json& j, const RunConfig& c) {
    j = json{{"seed", c.seed},
             {"grid", c.grid},
             {"theta_samples", c.theta_samples},
             {"energy", c.energy},
             {"alpha_mode", alpha_selection_name(c.alpha_mode)},
             {"certificate_beta", c.certificate_beta},
             {"regularization_k", c.regularization_k},
             {"collision_eps", c.collision_eps},
             {"neck", json{{"a", c.neck_a},
                           {"b", c.neck_b},
                           {"eps1", c.neck_eps1},
                           {"eps2", c.neck_eps2}}},
             {"hill_window", c.hill_window},
             {"orbit_energy", c.orbit_energy},
             {"out_dir", c.out_dir}};
}

inline void from_json(const json& j, RunConfig& c) {
    c.seed = j.value("seed", c.seed);
    c.grid = j.value("grid", c.grid);
    c.theta_samples = j.value("theta_samples", c.theta_samples);
    c.energy = j.value("energy", c.energy);
    c.alpha_mode = alpha_selection_from(j.value("alpha_mode", alpha_selection_name(c.alpha_mode)));
    c.certificate_beta = j.value("certificate_beta", c.certificate_beta);
    c.regularization_k = j.value("regularization_k", c.regularization_k);
    c.collision_eps = j.value("collision_eps", c.collision_eps);
    if (j.contains("neck")) {
        const auto& n = j.at("neck");
        c.neck_a = n.value("a", c.neck_a);
        c.neck_b = n.value("b", c.neck_b);
        c.neck_eps1 = n.value("eps1", c.neck_eps1);
        c.neck_eps2 = n.value("eps2", c.neck_eps2);
    }
    c.hill_window = j.value("hill_window", c.hill_window);
    c.orbit_energy = j.value("orbit_energy", c.orbit_energy);
    c.out_dir = j.value("out_dir", c.out_dir);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j;
    in >> j;
    RunConfig cfg = j.get<RunConfig>();
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline void to_json(json& j, const BoundCertificate& c) {
    j = json{{"alpha", c.alpha},
             {"alpha_mode", alpha_mode_name(c.mode)},
             {"alpha1", c.alpha1},
             {"alpha2", c.alpha2},
             {"beta1", c.beta1},
             {"beta2", c.beta2},
             {"beta", c.beta},
             {"momentum_cap", c.momentum_cap},
             {"rho_max", c.rho_max},
             {"reference_c", c.reference_c},
             {"evidence",
              json{{"n_rho", c.n_rho},
                   {"n_theta", c.n_theta},
                   {"sup_c1_sq", c.sup_c1_sq},
                   {"alpha_measured", c.alpha_measured},
                   {"sup_t", c.sup_t},
                   {"d1_min", c.d1_min},
                   {"d1_max", c.d1_max},
                   {"d2_min", c.d2_min},
                   {"d2_max", c.d2_max},
                   {"sup_g1_sq", c.sup_g1_sq},
                   {"sup_g2_sq", c.sup_g2_sq},
                   {"worst_dominance_margin", c.worst_dominance_margin}}}};
}

inline void to_json(json& j, const ContactScanReport& r) {
    j = json{{"c", r.c},
             {"alpha", r.alpha},
             {"beta", r.beta},
             {"alpha_mode", alpha_mode_name(r.mode)},
             {"n_rho", r.n_rho},
             {"n_theta", r.n_theta},
             {"rho_split", r.rho_split},
             {"rho_inner", r.rho_inner},
             {"cells_in_mask", r.cells_in_mask},
             {"min_witness", r.min_witness},
             {"argmin_rho", r.argmin.rho},
             {"argmin_theta", r.argmin.theta},
             {"min_outer", r.min_outer},
             {"min_mid", r.min_mid},
             {"min_inner_grid", r.min_inner_grid},
             {"nonpositive_cells", r.nonpositive_cells},
             {"witness_at_saddle", r.witness_at_saddle},
             {"only_saddle_nonpositive", r.only_saddle_nonpositive},
             {"inner_threshold", r.inner_threshold},
             {"inner_closure_ok", r.inner_closure_ok},
             {"direct_XH_min", r.direct_XH_min},
             {"direct_argmin_rho", r.direct_argmin.rho},
             {"direct_argmin_theta", r.direct_argmin.theta},
             {"pass", r.pass}};
}

inline void to_json(json& j, const KeplerLocusScan& s) {
    j = json{{"k", s.k},          {"eps", s.eps},
             {"samples", s.samples}, {"min_XQ", s.min_XQ},
             {"max_eta_norm", s.max_eta_norm},
             {"max_constraint_residual", s.max_constraint_residual},
             {"pass", s.pass}};
}

inline void to_json(json& j, const RestrictedLocusScan& s) {
    j = json{{"k", s.k},
             {"eps", s.eps},
             {"samples", s.samples},
             {"g_min", s.g_min},
             {"g_max", s.g_max},
             {"f_min", s.f_min},
             {"max_eta_norm", s.max_eta_norm},
             {"min_eta_norm", s.min_eta_norm},
             {"min_XE", s.min_XE},
             {"measured_suprema", json{{"c0", s.c0_meas}, {"c1", s.c1_meas}, {"c2", s.c2_meas}}},
             {"pass", s.pass}};
}

inline void to_json(json& j, const StarShapeReport& r) {
    j = json{{"k", r.k},
             {"rays", r.rays},
             {"rays_with_root", r.rays_with_root},
             {"rays_multi_root", r.rays_multi_root},
             {"roots_with_nonpositive_slope", r.roots_with_nonpositive_slope},
             {"min_slope", r.min_slope},
             {"doubling_positive", r.doubling_positive},
             {"pass", r.pass}};
}

inline void to_json(json& j, const NeckScanReport& r) {
    j = json{{"c", r.c},
             {"a", r.spec.a},
             {"b", r.spec.b},
             {"eps1", r.spec.eps1},
             {"eps2", r.spec.eps2},
             {"z_ball", r.z_ball},
             {"w_max", r.w_max},
             {"samples", r.samples},
             {"min_ZH", r.min_ZH},
             {"argmin_state", {r.argmin_state[0], r.argmin_state[1], r.argmin_state[2],
                               r.argmin_state[3]}},
             {"min_core", r.min_core},
             {"min_band", r.min_band},
             {"min_outer", r.min_outer},
             {"terms_at_argmin", json{{"radial", r.term_Z0}, {"weinstein", r.term_Y},
                                      {"cutoff", r.term_G}}},
             {"pass", r.pass}};
}

inline void to_json(json& j, const NeckWindowResult& r) {
    json probes = json::array();
    for (const auto& [eps, ok] : r.probes) probes.push_back(json{{"eps", eps}, {"pass", ok}});
    j = json{{"eps", r.eps}, {"found", r.found}, {"probes", probes}};
}

inline void to_json(json& j, const EllipsoidReport& r) {
    j = json{{"delta", r.delta},
             {"center", {r.center[0], r.center[1], r.center[2]}},
             {"rhs", r.rhs},
             {"semi_axes", {r.semi_axes[0], r.semi_axes[1], r.semi_axes[2]}},
             {"collapsed", r.collapsed}};
}

inline void to_json(json& j, const QuadraticForms& q) {
    j = json{{"C", q.C},
             {"Qtilde", {{q.Qtilde(0, 0), q.Qtilde(0, 1)}, {q.Qtilde(1, 0), q.Qtilde(1, 1)}}},
             {"hessian_max_dev", q.hessian_max_dev},
             {"hessian_matches", q.hessian_matches}};
    json qf = json::array(), fd = json::array();
    for (int i = 0; i < 4; ++i) {
        json row_q = json::array(), row_f = json::array();
        for (int k = 0; k < 4; ++k) {
            row_q.push_back(q.Qfull(i, k));
            row_f.push_back(q.fd_hessian(i, k));
        }
        qf.push_back(row_q);
        fd.push_back(row_f);
    }
    j["Qfull"] = qf;
    j["fd_hessian"] = fd;
}

inline void to_json(json& j, const PeriodicOrbitResult& r) {
    j = json{{"initial_state", {r.initial_state[0], r.initial_state[1], r.initial_state[2],
                                r.initial_state[3]}},
             {"period", r.period},
             {"return_residual", r.return_residual},
             {"floquet_moduli", {r.floquet_mod1, r.floquet_mod2}},
             {"c", r.c},
             {"converged", r.converged},
             {"iterations", r.iterations}};
}

inline json hill_summary_json(const HillRegionMask& m) {
    return json{{"c", m.c},
                {"primary", m.primary == Primary::m1 ? "m1" : "m2"},
                {"label", m.label == ComponentLabel::merged
                              ? "merged"
                              : (m.label == ComponentLabel::m1 ? "m1" : "m2")},
                {"cells", m.cell_count},
                {"area", m.area},
                {"max_dist_from_primary", m.max_dist_from_primary},
                {"containment_radius", primary_offset},
                {"min_U", m.min_U},
                {"argmin_U", {m.argmin_U[0], m.argmin_U[1]}},
                {"bbox", {m.bbox_xmin, m.bbox_xmax, m.bbox_ymin, m.bbox_ymax}}};
}

/// Cell centers + membership, for plotting.
inline std::string hill_mask_csv(const HillRegionMask& m, int stride = 1) {
    std::string out = "q1,q2,inside\n";
    for (int j = 0; j < m.grid.ny; j += stride) {
        for (int i = 0; i < m.grid.nx; i += stride) {
            const Vec2 q = m.grid.center(i, j);
            out += fmt17(q[0]);
            out += ',';
            out += fmt17(q[1]);
            out += ',';
            out += m.inside[m.grid.index(i, j)] ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

/// Trajectory export: t, s, chart, state, energy.
inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,s,chart,q1,q2,p1,p2,xi0,xi1,xi2,eta0,eta1,eta2,energy,constraint\n";
    for (const auto& smp : traj.samples) {
        out += fmt17(smp.t);
        out += ',';
        out += fmt17(smp.s);
        out += ',';
        out += smp.chart == ChartTag::physical ? "physical" : "regularized";
        for (int i = 0; i < 4; ++i) {
            out += ',';
            out += fmt17(smp.state[i]);
        }
        for (int i = 0; i < 3; ++i) {
            out += ',';
            out += fmt17(smp.xi[i]);
        }
        for (int i = 0; i < 3; ++i) {
            out += ',';
            out += fmt17(smp.eta[i]);
        }
        out += ',';
        out += fmt17(smp.energy);
        out += ',';
        out += fmt17(smp.constraint_residual);
        out += '\n';
    }
    return out;
}

}  // namespace srtbp

#endif  // SRTBP_IO_HPP
