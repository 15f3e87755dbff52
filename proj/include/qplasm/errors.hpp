#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qplasm {

// Base for all toolkit errors so callers can catch one type at the CLI edge.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input values (out-of-range parameters, unphysical states).
struct domain_error : error {
    using error::error;
};

// Exact pole hit (e.g. eps_d + eps_m = 0 in the SPP dispersion).
struct pole_error : error {
    using error::error;
};

// Closed-form denominator vanishes; message names the pole location.
struct singularity_error : error {
    using error::error;
};

// A search window contained zero or multiple dips; candidates listed.
struct ambiguity_error : error {
    ambiguity_error(const std::string& msg, std::vector<double> cands)
        : error(msg), candidates(std::move(cands)) {}
    std::vector<double> candidates;
};

// Requested truncation exceeds the configured hard cap.
struct resource_error : error {
    using error::error;
};

// Unknown catalog entry; message lists the available names.
struct catalog_error : error {
    using error::error;
};

// Probability model violates normalization or shape requirements.
struct model_error : error {
    using error::error;
};

// Finite-difference stencil rejected (norm drift, unstable step).
struct differentiation_error : error {
    using error::error;
};

// Two-mode input degenerate for the requested statistic.
struct degenerate_input_error : error {
    using error::error;
};

// Parameter on a boundary where a bound diverges or degenerates.
struct boundary_error : error {
    using error::error;
};

// Bad run configuration (schema, units, physics constraints).
struct config_error : error {
    using error::error;
};

// Requested formula does not apply to the given probe.
struct asymmetric_probe_error : error {
    using error::error;
};

}  // namespace qplasm
