#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qplasm/errors.hpp"
#include "qplasm/units.hpp"

namespace qplasm::transduce {

// One row of a tabulated permittivity file.
struct PermittivitySample {
    double lambda_nm;
    complexd eps;
};

// How permittivity queries resolve when a table is attached.
enum class PermittivityPolicy {
    TableInsideRange,  // interpolate when the query is inside the table
    DrudeOnly,         // ignore the table
};

// Drude metal, optionally overridden by tabulated data.
struct MaterialModel {
    double plasma_frequency = 0.0;  // rad/s
    double damping = 0.0;           // rad/s
    std::vector<PermittivitySample> table;  // strictly increasing lambda
    PermittivityPolicy policy = PermittivityPolicy::TableInsideRange;

    void validate() const {
        if (!(plasma_frequency > 0.0))
            throw domain_error("MaterialModel: plasma_frequency must be > 0");
        if (damping < 0.0)
            throw domain_error("MaterialModel: damping must be >= 0");
        for (std::size_t i = 1; i < table.size(); ++i)
            if (!(table[i].lambda_nm > table[i - 1].lambda_nm))
                throw domain_error(
                    "MaterialModel: table wavelengths must be strictly increasing");
    }
};

// eps_m(omega) = 1 - wp^2 / (omega^2 + i*gamma*omega).
// e^{-i omega t} convention: lossy metals get a positive imaginary part.
inline complexd drude_permittivity(double omega, const MaterialModel& m) {
    if (!(omega > 0.0)) throw domain_error("drude_permittivity: omega must be > 0");
    m.validate();
    const complexd denom(omega * omega, m.damping * omega);
    return 1.0 - m.plasma_frequency * m.plasma_frequency / denom;
}

// Permittivity lookup honoring the table-over-Drude policy.
inline complexd permittivity_at(double omega, const MaterialModel& m) {
    if (!(omega > 0.0)) throw domain_error("permittivity_at: omega must be > 0");
    if (m.policy == PermittivityPolicy::TableInsideRange && m.table.size() >= 2) {
        const double lam = lambda_nm_from_omega(omega);
        if (lam >= m.table.front().lambda_nm && lam <= m.table.back().lambda_nm) {
            auto hi = std::lower_bound(
                m.table.begin(), m.table.end(), lam,
                [](const PermittivitySample& s, double v) { return s.lambda_nm < v; });
            if (hi == m.table.begin()) return hi->eps;
            auto lo = hi - 1;
            if (hi == m.table.end()) return lo->eps;
            const double t = (lam - lo->lambda_nm) / (hi->lambda_nm - lo->lambda_nm);
            return lo->eps + t * (hi->eps - lo->eps);
        }
    }
    return drude_permittivity(omega, m);
}

// d eps'/d lambda (per nm) of the effective permittivity, centered difference.
inline double permittivity_slope_at(double lambda_nm, const MaterialModel& m,
                                    double step_nm = 0.5) {
    const double ep = permittivity_at(omega_from_lambda_nm(lambda_nm + step_nm), m).real();
    const double em = permittivity_at(omega_from_lambda_nm(lambda_nm - step_nm), m).real();
    return (ep - em) / (2.0 * step_nm);
}

// omega_sp = wp / sqrt(1 + eps_d).
inline double surface_plasma_frequency(const MaterialModel& m, double eps_d) {
    if (eps_d < 0.0) throw domain_error("surface_plasma_frequency: eps_d must be >= 0");
    m.validate();
    return m.plasma_frequency / std::sqrt(1.0 + eps_d);
}

// Columnar table: lambda_nm eps_real eps_imag, '#' comments.
inline std::vector<PermittivitySample> parse_material_table(std::istream& in,
                                                            const std::string& name) {
    std::vector<PermittivitySample> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double lam, re, im;
        if (!(ss >> lam)) continue;  // blank or comment-only line
        if (!(ss >> re >> im))
            throw config_error(name + ":" + std::to_string(lineno) +
                               ": expected 'wavelength_nm eps_real eps_imag'");
        if (!rows.empty() && !(lam > rows.back().lambda_nm))
            throw config_error(name + ":" + std::to_string(lineno) +
                               ": wavelengths must be strictly increasing");
        rows.push_back({lam, complexd(re, im)});
    }
    return rows;
}

inline std::vector<PermittivitySample> load_material_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open material table: " + path);
    return parse_material_table(in, path);
}

}  // namespace qplasm::transduce
