#pragma once

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qplasm/config.hpp"
#include "qplasm/estimate.hpp"
#include "qplasm/io.hpp"
#include "qplasm/mc.hpp"
#include "qplasm/transduce.hpp"

namespace qplasm::cli {

inline constexpr const char* toolkit_version = "0.1.0";

struct ScenarioResult {
    std::string scenario;
    Table table;    // main output table
    Table summary;  // one-or-few-row digest used by parameter sweeps
    std::uint64_t seed = 0;
    bool seeded = false;
};

inline const std::set<std::string>& scenario_names() {
    static const std::set<std::string> names = {
        "reflectance-sweep", "sensitivity", "lsp", "bounds", "montecarlo", "compare"};
    return names;
}

namespace detail {

inline std::filesystem::path config_dir(const Config& cfg) {
    const std::filesystem::path p(cfg.name());
    return p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
}

inline transduce::MaterialModel parse_material(const Config& cfg,
                                               const std::string& section) {
    transduce::MaterialModel m;
    m.plasma_frequency = cfg.get_double(section + ".plasma_frequency_rad_s");
    m.damping = cfg.get_double(section + ".damping_rad_s");
    if (cfg.has(section + ".table")) {
        std::filesystem::path t(cfg.get_string(section + ".table"));
        if (t.is_relative()) t = config_dir(cfg) / t;
        m.table = transduce::load_material_table(t.string());
    }
    m.validate();
    return m;
}

inline transduce::LayerStack parse_stack(const Config& cfg) {
    transduce::LayerStack st;
    if (cfg.has("stack.prism_permittivity"))
        st.prism_permittivity = cfg.get_double("stack.prism_permittivity");
    else {
        const double n = cfg.get_double("stack.prism_index");
        st.prism_permittivity = n * n;
    }
    if (cfg.has("stack.analyte_permittivity"))
        st.analyte_permittivity = cfg.get_double("stack.analyte_permittivity");
    else {
        const double n = cfg.get_double("stack.analyte_index");
        st.analyte_permittivity = n * n;
    }
    st.metal_thickness_nm = cfg.get_double("stack.metal_thickness_nm");
    st.metal.plasma_frequency = cfg.get_double("stack.metal_plasma_frequency_rad_s");
    st.metal.damping = cfg.get_double("stack.metal_damping_rad_s");
    if (cfg.has("stack.metal_table")) {
        std::filesystem::path t(cfg.get_string("stack.metal_table"));
        if (t.is_relative()) t = config_dir(cfg) / t;
        st.metal.table = transduce::load_material_table(t.string());
    }
    st.validate();
    return st;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

inline void require_range(const Config& cfg, const std::string& key, double value,
                          double lo, double hi) {
    if (!(value >= lo && value <= hi))
        throw config_error(cfg.name() + ": " + key + " = " + format_double(value) +
                           " outside [" + format_double(lo) + ", " + format_double(hi) +
                           "]");
}

}  // namespace detail

// --- Scenario: reflectance-sweep ------------------------------------------

inline ScenarioResult run_reflectance_sweep(const Config& cfg, bool validate_only) {
    const auto stack = detail::parse_stack(cfg);
    const double lambda = cfg.get_double("sweep.lambda_nm");
    const double lo = cfg.get_double("sweep.theta_start_deg");
    const double hi = cfg.get_double("sweep.theta_stop_deg");
    const long points = cfg.get_long("sweep.points");
    if (!(lambda > 0.0)) throw config_error(cfg.name() + ": sweep.lambda_nm must be > 0");
    if (!(hi > lo)) throw config_error(cfg.name() + ": empty theta window");
    detail::require_range(cfg, "sweep.theta_start_deg", lo, 0.0, 90.0);
    detail::require_range(cfg, "sweep.theta_stop_deg", hi, 0.0, 90.0);
    if (points < 2) throw config_error(cfg.name() + ": sweep.points must be >= 2");

    ScenarioResult res;
    res.scenario = "reflectance-sweep";
    if (validate_only) return res;

    res.table.header = {"theta_deg", "R"};
    for (long i = 0; i < points; ++i) {
        const double th = lo + (hi - lo) * i / (points - 1);
        res.table.rows.push_back(
            {th, transduce::kretschmann_reflectance(th, lambda, stack).R});
    }
    const auto dip = transduce::find_resonance(
        stack, transduce::ResonanceMode::AngularAtFixedLambda, lambda, lo, hi);
    res.summary.header = {"theta_res_deg", "R_min"};
    res.summary.rows.push_back({dip.location, dip.R_min});
    return res;
}

// --- Scenario: sensitivity ---------------------------------------------------

inline ScenarioResult run_sensitivity(const Config& cfg, bool validate_only) {
    const auto stack = detail::parse_stack(cfg);
    const std::string kind = cfg.get_string("sensitivity.kind");
    if (kind != "angular" && kind != "spectral" && kind != "both")
        throw config_error(cfg.name() + ": sensitivity.kind must be angular|spectral|both");
    const double lo = cfg.get_double("sensitivity.lambda_start_nm");
    const double hi = cfg.get_double("sensitivity.lambda_stop_nm");
    const long points = cfg.get_long("sensitivity.points");
    const double dnp = cfg.get_double_or("sensitivity.dnp_dlambda_per_nm", 0.0);
    if (!(lo > 0.0 && hi > lo)) throw config_error(cfg.name() + ": bad lambda window");
    if (points < 2) throw config_error(cfg.name() + ": sensitivity.points must be >= 2");

    ScenarioResult res;
    res.scenario = "sensitivity";
    if (validate_only) return res;

    const bool want_ang = kind != "spectral";
    const bool want_spec = kind != "angular";
    res.table.header = {"lambda_nm", "eps_m_prime"};
    if (want_ang) res.table.header.push_back("s_angular_deg_per_riu");
    if (want_spec) res.table.header.push_back("s_spectral_nm_per_riu");

    const double n_p = stack.prism_index();
    const double n_a = stack.analyte_index();
    double s_ang_min = 0.0, s_ang_max = 0.0, s_spec_min = 0.0, s_spec_max = 0.0;
    bool first = true;
    for (long i = 0; i < points; ++i) {
        const double lam = lo + (hi - lo) * i / (points - 1);
        const double eps =
            transduce::permittivity_at(omega_from_lambda_nm(lam), stack.metal).real();
        std::vector<double> row{lam, eps};
        double s_ang = 0.0, s_spec = 0.0;
        if (want_ang) {
            s_ang = transduce::sensitivity_closed_form(
                transduce::SensitivityKind::Angular, n_a, n_p, eps);
            row.push_back(s_ang);
        }
        if (want_spec) {
            const double slope = transduce::permittivity_slope_at(lam, stack.metal);
            s_spec = transduce::sensitivity_closed_form(
                transduce::SensitivityKind::Spectral, n_a, n_p, eps, slope, dnp);
            row.push_back(s_spec);
        }
        res.table.rows.push_back(row);
        if (first) {
            s_ang_min = s_ang_max = s_ang;
            s_spec_min = s_spec_max = s_spec;
            first = false;
        } else {
            s_ang_min = std::min(s_ang_min, s_ang);
            s_ang_max = std::max(s_ang_max, s_ang);
            s_spec_min = std::min(s_spec_min, s_spec);
            s_spec_max = std::max(s_spec_max, s_spec);
        }
    }
    if (want_ang) {
        res.summary.header.push_back("s_angular_min");
        res.summary.header.push_back("s_angular_max");
    }
    if (want_spec) {
        res.summary.header.push_back("s_spectral_min");
        res.summary.header.push_back("s_spectral_max");
    }
    std::vector<double> srow;
    if (want_ang) {
        srow.push_back(s_ang_min);
        srow.push_back(s_ang_max);
    }
    if (want_spec) {
        srow.push_back(s_spec_min);
        srow.push_back(s_spec_max);
    }
    res.summary.rows.push_back(srow);
    return res;
}

// --- Scenario: lsp ------------------------------------------------------------

inline ScenarioResult run_lsp(const Config& cfg, bool validate_only) {
    const auto metal = detail::parse_material(cfg, "material");
    const double eps_d = cfg.get_double("lsp.eps_d");
    const double radius_nm = cfg.get_double("lsp.particle_radius_nm");
    const double w_lo = cfg.get_double("lsp.omega_start_rad_s");
    const double w_hi = cfg.get_double("lsp.omega_stop_rad_s");
    const long points = cfg.get_long("lsp.points");
    if (!(eps_d > 0.0)) throw config_error(cfg.name() + ": lsp.eps_d must be > 0");
    if (!(radius_nm > 0.0))
        throw config_error(cfg.name() + ": lsp.particle_radius_nm must be > 0");
    if (!(w_hi > w_lo && w_lo > 0.0)) throw config_error(cfg.name() + ": bad omega window");
    if (points < 2) throw config_error(cfg.name() + ": lsp.points must be >= 2");

    ScenarioResult res;
    res.scenario = "lsp";
    if (validate_only) return res;

    const double r_m = radius_nm * 1e-9;
    const double volume = 4.0 / 3.0 * pi * r_m * r_m * r_m;
    res.table.header = {"omega_rad_s", "sigma_sca_m2", "sigma_abs_m2"};
    double peak_w = w_lo, peak_abs = -1.0;
    for (long i = 0; i < points; ++i) {
        const double w = w_lo + (w_hi - w_lo) * i / (points - 1);
        const auto cs = transduce::lsp_cross_sections(w, eps_d, metal, volume);
        res.table.rows.push_back({w, cs.sigma_sca, cs.sigma_abs});
        if (cs.sigma_abs > peak_abs) {
            peak_abs = cs.sigma_abs;
            peak_w = w;
        }
    }
    res.summary.header = {"omega_dipole_rad_s", "omega_inf_rad_s", "omega_abs_peak_rad_s"};
    res.summary.rows.push_back({transduce::lsp_resonance(1, eps_d, metal),
                                transduce::lsp_resonance(0, eps_d, metal), peak_w});
    return res;
}

// --- Scenario: bounds -----------------------------------------------------------

inline ScenarioResult run_bounds(const Config& cfg, bool validate_only) {
    const std::string entries_str = cfg.get_string("bounds.entries");
    std::vector<std::string> entries = entries_str == "all"
                                           ? estimate::bound_catalog_entries()
                                           : detail::split_list(entries_str);
    if (entries.empty()) throw config_error(cfg.name() + ": bounds.entries is empty");
    for (const auto& e : entries) {
        const auto& all = estimate::bound_catalog_entries();
        if (std::find(all.begin(), all.end(), e) == all.end())
            throw config_error(cfg.name() + ": unknown bound entry '" + e + "'");
    }
    estimate::Params params;
    for (const auto& key : cfg.section_keys("params"))
        params[key.substr(std::string("params.").size())] = cfg.get_double(key);
    params["nu"] = static_cast<double>(cfg.get_long_or("bounds.nu", 1));

    ScenarioResult res;
    res.scenario = "bounds";
    if (validate_only) return res;

    res.table.label_header = "name";
    res.table.header = {"value", "nu"};
    for (const auto& e : entries) {
        const auto b = estimate::bound_catalog(e, params);
        res.table.row_labels.push_back(b.name);
        res.table.rows.push_back({b.value, b.nu});
    }
    res.summary = res.table;
    return res;
}

// --- Scenario: montecarlo (transmittance, fock vs coherent) ---------------------

inline ScenarioResult run_montecarlo(const Config& cfg, bool validate_only,
                                     std::uint64_t stream_base = 0) {
    mc::TransmittanceConfig base;
    base.N = cfg.get_double("experiment.N");
    base.T = cfg.get_double("experiment.T");
    base.eta = cfg.get_double("experiment.eta");
    base.nu = cfg.get_long_or("experiment.nu", 1);
    base.samples = cfg.get_long_or("experiment.samples", 1000);
    base.seed = static_cast<std::uint64_t>(cfg.get_long_or("experiment.seed", 1));
    base.stream_base = stream_base;
    detail::require_range(cfg, "experiment.T", base.T, 0.0, 1.0);
    detail::require_range(cfg, "experiment.eta", base.eta, 0.0, 1.0);
    if (!(base.eta > 0.0)) throw config_error(cfg.name() + ": experiment.eta must be > 0");
    if (base.N <= 0.0) throw config_error(cfg.name() + ": experiment.N must be > 0");

    const auto probes = detail::split_list(cfg.get_string_or("experiment.probes",
                                                             "fock,coherent"));
    if (probes.empty())
        throw config_error(cfg.name() + ": experiment.probes is empty");
    std::vector<mc::TransmittanceConfig> cfgs;
    for (const auto& p : probes) {
        mc::TransmittanceConfig c = base;
        if (p == "fock")
            c.probe = mc::ProbeKind::Fock;
        else if (p == "coherent")
            c.probe = mc::ProbeKind::Coherent;
        else
            throw config_error(cfg.name() + ": montecarlo probes must be fock|coherent");
        cfgs.push_back(c);
    }

    ScenarioResult res;
    res.scenario = "montecarlo";
    res.seed = base.seed;
    res.seeded = true;
    if (validate_only) return res;

    const auto rows = mc::compare_strategies(cfgs);
    res.table.label_header = "label";
    res.table.header = {"empirical_std", "analytic_bound", "ratio", "tolerance_3se",
                        "pass"};
    for (const auto& r : rows) {
        res.table.row_labels.push_back(r.label);
        res.table.rows.push_back(
            {r.empirical, r.analytic, r.ratio, r.tolerance, r.pass ? 1.0 : 0.0});
    }
    res.summary = res.table;
    return res;
}

// --- Scenario: compare (differential detection, tf vs pc) ------------------------

inline ScenarioResult run_compare(const Config& cfg, bool validate_only,
                                  std::uint64_t stream_base = 0) {
    mc::DifferentialConfig base;
    base.N = cfg.get_double("experiment.N");
    base.T = cfg.get_double("experiment.T");
    base.eta_a = cfg.get_double("experiment.eta_a");
    base.eta_b = cfg.get_double("experiment.eta_b");
    base.samples = cfg.get_long_or("experiment.samples", 100000);
    base.seed = static_cast<std::uint64_t>(cfg.get_long_or("experiment.seed", 1));
    base.stream_base = stream_base;
    detail::require_range(cfg, "experiment.T", base.T, 0.0, 1.0);
    detail::require_range(cfg, "experiment.eta_a", base.eta_a, 0.0, 1.0);
    detail::require_range(cfg, "experiment.eta_b", base.eta_b, 0.0, 1.0);
    if (base.N <= 0.0 || base.N != std::floor(base.N))
        throw config_error(cfg.name() + ": experiment.N must be a positive integer");

    const auto probes = detail::split_list(cfg.get_string_or("experiment.probes", "tf,pc"));
    if (probes.empty()) throw config_error(cfg.name() + ": experiment.probes is empty");
    for (const auto& p : probes)
        if (p != "tf" && p != "pc")
            throw config_error(cfg.name() + ": compare probes must be tf|pc");

    ScenarioResult res;
    res.scenario = "compare";
    res.seed = base.seed;
    res.seeded = true;
    if (validate_only) return res;

    res.table.label_header = "probe";
    res.table.header = {"sigma_out_empirical", "sigma_out_analytic", "se", "pass"};
    for (const auto& p : probes) {
        mc::DifferentialConfig c = base;
        c.probe = p == "tf" ? mc::ProbeKind::TwinFock : mc::ProbeKind::ProductCoherent;
        const auto emp = mc::sample_differential_nrf(c);
        const auto probe_kind = p == "tf" ? estimate::DifferentialProbe::TwinFock
                                          : estimate::DifferentialProbe::ProductCoherent;
        estimate::DifferentialParams dp;
        dp.N = base.N;
        const auto fig = estimate::differential_intensity_figures(probe_kind, base.T,
                                                                  base.eta_a, base.eta_b,
                                                                  dp);
        const bool pass = std::fabs(emp.sigma_out - fig.sigma_out) <= 3.0 * emp.se;
        res.table.row_labels.push_back(p);
        res.table.rows.push_back({emp.sigma_out, fig.sigma_out, emp.se, pass ? 1.0 : 0.0});
    }
    res.summary = res.table;
    return res;
}

// --- Dispatcher --------------------------------------------------------------

inline ScenarioResult run_scenario(const Config& cfg, bool validate_only = false,
                                   std::uint64_t stream_base = 0) {
    const std::string scenario = cfg.get_string("scenario");
    if (!scenario_names().count(scenario))
        throw config_error(cfg.name() + ": unknown scenario '" + scenario + "'");
    if (scenario == "reflectance-sweep") return run_reflectance_sweep(cfg, validate_only);
    if (scenario == "sensitivity") return run_sensitivity(cfg, validate_only);
    if (scenario == "lsp") return run_lsp(cfg, validate_only);
    if (scenario == "bounds") return run_bounds(cfg, validate_only);
    if (scenario == "montecarlo") return run_montecarlo(cfg, validate_only, stream_base);
    return run_compare(cfg, validate_only, stream_base);
}

}  // namespace qplasm::cli
