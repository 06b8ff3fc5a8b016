#ifndef TOPO_IO_HPP
#define TOPO_IO_HPP

#include "topo/problem.hpp"
#include "topo/run_loop.hpp"
#include "topo/types.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace topo {

/// Thrown on malformed configs; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration. Values mirror the documented key set; unknown
/// keys are rejected. rmin is given in element lengths.
struct RunConfig {
    std::string preset;  // cantilever2d | cantilever3d | inverter |
                         // nonlinear-cantilever | clamped-vibration |
                         // column-buckling | study
    std::vector<int> dims;
    Real rmin_elems = 2.4;
    Real vmax = -1.0;                    // preset default when negative
    std::string rhot_mode = "none";      // none | fixed | schedule
    Real rhot = 0.0;
    ThresholdSchedule rhot_schedule{0.0, 0.02, 50, 0.1, 0};
    std::optional<ContinuationSchedule> eta_schedule;
    std::optional<ContinuationSchedule> beta_schedule;
    std::string optimizer;  // preset default when empty
    int max_iters = -1;
    std::string scheme = "A4";
    Real load_scale = 1.0;
    Real emin_scale = -1.0;  // Emin/E0 for the standard approach; preset default when negative
    std::string out_dir = "out";
    int snapshot_every = 0;

    std::map<std::string, std::string> raw;  // echo of all parsed keys
};

/// Parses the `key = value` config text (with # comments). Unknown keys or
/// out-of-range values raise ConfigError with the line number.
RunConfig parse_config(const std::string& text);

/// Applies one `key=value` override on top of a parsed config.
void apply_override(RunConfig& cfg, const std::string& key_value);

/// Instantiates the benchmark a config describes.
ProblemSpec make_problem(const RunConfig& cfg);

/// One-line-per-key echo of the effective configuration; parseable by
/// parse_config (round trip).
std::string config_echo(const RunConfig& cfg);

/// Density-field file: header `dims: nx ny [nz]`, then values in element-id
/// order (row-major over the dimension tuple) at full precision.
void write_density_field(std::ostream& os, const Vector& field, const std::vector<int>& dims);
void write_density_field(const std::string& path, const Vector& field,
                         const std::vector<int>& dims);
struct DensityField {
    std::vector<int> dims;
    Vector values;
};
DensityField read_density_field(std::istream& is);
DensityField read_density_field(const std::string& path);

/// Iteration log as CSV with the fixed documented header.
void write_iteration_log(std::ostream& os, const std::vector<IterationRecord>& records);
void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& records);
std::vector<IterationRecord> read_iteration_log(const std::string& path);

/// 8-bit binary PGM (P5), v = round(255 (1 - rho)); solid renders black.
/// 2D fields only; throws InvalidSpecError for 3D (use VTK there).
void export_image(const std::string& path, const Vector& field, const std::vector<int>& dims);

/// Legacy-ASCII VTK structured points: densities as CELL_DATA, optional
/// displacements as POINT_DATA vectors.
void export_vtk(const std::string& path, const StructuredMesh& mesh, const Vector& rho,
                const Vector* displacement = nullptr);

}  // namespace topo

#endif
