#ifndef TOPO_CHECKGRAD_HPP
#define TOPO_CHECKGRAD_HPP

#include "topo/types.hpp"

#include <string>
#include <vector>

namespace topo {

/// Result of one analytic-vs-central-difference gradient audit. The error
/// is the max-norm difference relative to the largest finite-difference
/// component; the step is 1e-6 on each design variable.
struct GradientAudit {
    std::string name;
    Real max_rel_error = 0.0;
    Real tolerance = 0.0;
    int n_vars = 0;
    Real seconds = 0.0;
    bool passed() const { return max_rel_error < tolerance; }
};

/// `problem` is one of: compliance (12x6), inverter (12x6),
/// nonlinear (8x2, moderate load), vibration (8x4), buckling (12x12).
GradientAudit run_gradient_audit(const std::string& problem);

std::vector<GradientAudit> run_all_gradient_audits();

}  // namespace topo

#endif
