#ifndef TOPO_ACTIVE_MODEL_HPP
#define TOPO_ACTIVE_MODEL_HPP

#include "topo/mesh.hpp"
#include "topo/types.hpp"

#include <utility>
#include <vector>

namespace topo {

/// Per-iteration reduced analysis model. An element is inactive when its
/// density fell at or below the removal threshold; a DOF is eliminated when
/// every element incident to its node is inactive. Structurally fixed DOFs
/// are excluded from the free set separately.
struct ActiveModel {
    Real rho_t = 0.0;
    std::vector<uint8_t> element_active;  // length m
    std::vector<uint8_t> dof_eliminated;  // length n*dim, removal-driven only
    std::vector<int> full_to_red;         // -1 when fixed or eliminated
    std::vector<int> red_to_full;
    int n_active = 0;  // free active DOFs == reduced dimension

    bool all_active() const;
};

/// Step (1) of the iteration loop: zero out densities at or below rho_t and
/// mark those elements for removal. Throws for rho_t outside [0,1).
std::pair<Vector, std::vector<uint8_t>> detect_and_zero(const Vector& rho, Real rho_t);

/// Step (2): fictitious nodal boundary conditions on fully surrounded nodes
/// and construction of the reduced<->full index maps.
ActiveModel build_active_model(const StructuredMesh& mesh, const std::vector<uint8_t>& element_active,
                               const std::vector<uint8_t>& fixed_dofs, Real rho_t = 0.0);

/// Convenience: the no-removal model (all elements active).
ActiveModel full_active_model(const StructuredMesh& mesh, const std::vector<uint8_t>& fixed_dofs);

Vector reduce_vector(const ActiveModel& am, const Vector& full);
Vector expand_vector(const ActiveModel& am, const Vector& reduced);

struct ReintroductionDelta {
    int reintroduced = 0;
    int removed = 0;
};

/// Mask set-differences between two iterations on the same mesh.
ReintroductionDelta reintroduction_delta(const ActiveModel& previous, const ActiveModel& current);

/// rho_t continuation: initial value raised by `increment` every `interval`
/// iterations from `start_iter` on, capped at `cap`.
struct ThresholdSchedule {
    Real initial = 0.0;
    Real increment = 0.0;
    int interval = 1;
    Real cap = 0.0;
    int start_iter = 0;

    Real value_at(int iteration) const;
};

}  // namespace topo

#endif
