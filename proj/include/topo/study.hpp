#ifndef TOPO_STUDY_HPP
#define TOPO_STUDY_HPP

#include "topo/design.hpp"
#include "topo/filter.hpp"
#include "topo/mesh.hpp"
#include "topo/types.hpp"

namespace topo {

/// Fixed setup of the propagation study: 40x20 cantilever, rmin = 2.5 h,
/// eta = 3, beta = 40 for the projected schemes, threshold 0.5.
struct StudySetup {
    int nx = 40;
    int ny = 20;
    Real rmin_elems = 2.5;
    Real eta = 3.0;
    Real beta = 40.0;
    Real threshold = 0.5;
};

/// One row of the comparison figure: the density map (a), strain energies
/// (b,c), density- and design-space sensitivities (d,e), and the region of
/// potential topological growth (f), stored raw. Columns b-e are plotted
/// max-normalized; `max_*` carry the normalization constants.
struct PropagationReport {
    Scheme scheme;
    StructuredMesh mesh;
    Vector rho;         // (a)
    Vector energy_nd;   // (b)
    Vector energy;      // (c)
    Vector dc_drho;     // (d)
    Vector dc_dphi;     // (e)
    Vector growth;      // (f), raw; clamp to [0,1] for rendering only
    Real max_energy_nd = 0.0;
    Real max_energy = 0.0;
    Real max_dc_drho = 0.0;
    Real max_dc_dphi = 0.0;
};

/// Solid lower half / void upper half design for the given scheme; the HPM
/// variant offsets the design two layers below the centerline so the
/// projected topology matches the others.
DesignState build_study_design(Scheme scheme, const FilterOperator& filter,
                               const StudySetup& setup = {});

/// Full column set for one scheme.
PropagationReport propagation_maps(Scheme scheme, const StudySetup& setup = {});

/// Max centroid distance from the support of `map` to the elements where
/// `rho` >= 0.5. The default eps_rel = 0 measures the exact nonzero
/// support; a positive value measures the reach of entries above eps_rel
/// of the map maximum.
Real support_reach(const StructuredMesh& mesh, const Vector& map, const Vector& rho,
                   Real eps_rel = 0.0);

}  // namespace topo

#endif
