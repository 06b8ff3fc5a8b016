#include "topo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace topo {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Real parse_real(const std::string& v, const std::string& key, int line) {
    try {
        size_t used = 0;
        const Real x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': not a number: '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& key, int line) {
    try {
        size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': not an integer: '" + v + "'");
    }
}

// "init:inc:interval:cap[:start]" or a plain number for a constant.
ContinuationSchedule parse_schedule(const std::string& v, const std::string& key, int line) {
    ContinuationSchedule s;
    s.param = key;
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(trim(tok));
    if (parts.size() == 1) {
        s.initial = s.cap = parse_real(parts[0], key, line);
        s.increment = 0.0;
        return s;
    }
    if (parts.size() != 4 && parts.size() != 5)
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': expected init:inc:interval:cap[:start]");
    s.initial = parse_real(parts[0], key, line);
    s.increment = parse_real(parts[1], key, line);
    s.interval = parse_int(parts[2], key, line);
    s.cap = parse_real(parts[3], key, line);
    s.start_iter = parts.size() == 5 ? parse_int(parts[4], key, line) : 0;
    if (s.increment < 0.0)
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': negative increment");
    if (s.interval <= 0)
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "': interval must be positive");
    return s;
}

void assign_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
    auto err = [&](const std::string& msg) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': " + msg);
    };
    if (key == "preset") {
        cfg.preset = value;
    } else if (key == "dims") {
        cfg.dims.clear();
        std::stringstream ss(value);
        std::string tok;
        while (ss >> tok) cfg.dims.push_back(parse_int(tok, key, line));
        if (cfg.dims.size() != 2 && cfg.dims.size() != 3) err("need 2 or 3 dimensions");
    } else if (key == "rmin") {
        cfg.rmin_elems = parse_real(value, key, line);
        if (cfg.rmin_elems <= 0.0) err("must be positive");
    } else if (key == "vmax") {
        cfg.vmax = parse_real(value, key, line);
        if (cfg.vmax <= 0.0 || cfg.vmax > 1.0) err("must be in (0,1]");
    } else if (key == "rhot") {
        if (value == "none" || value == "n.a." || value == "na") {
            cfg.rhot_mode = "none";
        } else if (value == "schedule") {
            cfg.rhot_mode = "schedule";
        } else {
            cfg.rhot_mode = "fixed";
            cfg.rhot = parse_real(value, key, line);
            if (cfg.rhot < 0.0 || cfg.rhot >= 1.0) err("threshold outside [0,1)");
        }
    } else if (key == "rhot_schedule") {
        const auto s = parse_schedule(value, key, line);
        cfg.rhot_schedule = {s.initial, s.increment, s.interval, s.cap, s.start_iter};
        if (s.initial < 0.0 || s.cap >= 1.0) err("schedule outside [0,1)");
    } else if (key == "eta") {
        cfg.eta_schedule = parse_schedule(value, key, line);
    } else if (key == "beta") {
        cfg.beta_schedule = parse_schedule(value, key, line);
        if (cfg.beta_schedule->initial < 0.0) err("beta must be nonnegative");
    } else if (key == "optimizer") {
        if (value != "oc" && value != "mma") err("expected oc or mma");
        cfg.optimizer = value;
    } else if (key == "max_iters") {
        cfg.max_iters = parse_int(value, key, line);
        if (cfg.max_iters < 0) err("must be nonnegative");
    } else if (key == "scheme") {
        if (value != "A1" && value != "A2" && value != "A3" && value != "A4")
            err("expected A1..A4");
        cfg.scheme = value;
    } else if (key == "load_scale") {
        cfg.load_scale = parse_real(value, key, line);
    } else if (key == "emin") {
        cfg.emin_scale = parse_real(value, key, line);
        if (cfg.emin_scale < 0.0 || cfg.emin_scale >= 1.0) err("Emin/E0 outside [0,1)");
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "snapshot_every") {
        cfg.snapshot_every = parse_int(value, key, line);
        if (cfg.snapshot_every < 0) err("must be nonnegative");
    } else if (key == "initial_field") {
        cfg.raw["initial_field"] = value;  // consumed by make_problem
        return;
    } else {
        err("unknown key");
    }
    cfg.raw[key] = value;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        assign_key(cfg, key, value, lineno);
    }
    if (cfg.preset.empty()) throw ConfigError("missing required key 'preset'");
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos) throw ConfigError("override: expected key=value");
    assign_key(cfg, trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)), 0);
}

std::string config_echo(const RunConfig& cfg) {
    std::ostringstream os;
    os << "preset = " << cfg.preset << "\n";
    for (const auto& [k, v] : cfg.raw)
        if (k != "preset") os << k << " = " << v << "\n";
    return os.str();
}

namespace {

void format_value(std::ostream& os, Real v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

void write_density_field(std::ostream& os, const Vector& field, const std::vector<int>& dims) {
    long long prod = 1;
    for (int d : dims) prod *= d;
    if ((dims.size() != 2 && dims.size() != 3) || prod != field.size())
        throw InvalidSpecError("write_density_field: dims do not match field length");
    os << "dims:";
    for (int d : dims) os << " " << d;
    os << "\n";
    for (Eigen::Index i = 0; i < field.size(); ++i) {
        format_value(os, field[i]);
        os << (i + 1 == field.size() ? "\n" : " ");
    }
}

void write_density_field(const std::string& path, const Vector& field,
                         const std::vector<int>& dims) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_density_field(f, field, dims);
}

DensityField read_density_field(std::istream& is) {
    std::string tag;
    is >> tag;
    if (tag != "dims:") throw InvalidSpecError("read_density_field: malformed header");
    std::string rest;
    std::getline(is, rest);
    std::stringstream hs(rest);
    DensityField out;
    int d;
    while (hs >> d) out.dims.push_back(d);
    if (out.dims.size() != 2 && out.dims.size() != 3)
        throw InvalidSpecError("read_density_field: header needs 2 or 3 dims");
    long long prod = 1;
    for (int dd : out.dims) prod *= dd;
    out.values.resize(prod);
    for (long long i = 0; i < prod; ++i)
        if (!(is >> out.values[i]))
            throw InvalidSpecError("read_density_field: truncated value list");
    return out;
}

DensityField read_density_field(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_density_field(f);
}

static const char* kLogHeader =
    "k,g0,tau_phi,tau_g0,V,n_active,reduced_dim,reintroduced,removed,eta,beta,rho_t,"
    "phi_rat_flags,seconds,c_pre,eigen_min,ks_bound";

void write_iteration_log(std::ostream& os, const std::vector<IterationRecord>& records) {
    os << kLogHeader << "\n";
    for (const auto& r : records) {
        os << r.k << ",";
        format_value(os, r.g0);
        os << ",";
        format_value(os, r.tau_phi);
        os << ",";
        format_value(os, r.tau_g0);
        os << ",";
        format_value(os, r.volume);
        os << "," << r.n_active << "," << r.reduced_dim << "," << r.reintroduced << ","
           << r.removed << ",";
        format_value(os, r.eta);
        os << ",";
        format_value(os, r.beta);
        os << ",";
        format_value(os, r.rho_t);
        os << "," << r.phi_rat_flags << ",";
        format_value(os, r.seconds);
        os << ",";
        format_value(os, r.constraint2);
        os << ",";
        format_value(os, r.eigen_min);
        os << ",";
        format_value(os, r.ks_bound);
        os << "\n";
    }
}

void write_iteration_log(const std::string& path, const std::vector<IterationRecord>& records) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_iteration_log(f, records);
}

std::vector<IterationRecord> read_iteration_log(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line) || line != kLogHeader)
        throw InvalidSpecError("read_iteration_log: unexpected header");
    std::vector<IterationRecord> out;
    while (std::getline(f, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() != 17) throw InvalidSpecError("read_iteration_log: bad column count");
        IterationRecord r;
        r.k = std::stoi(cols[0]);
        r.g0 = std::stod(cols[1]);
        r.tau_phi = std::stod(cols[2]);
        r.tau_g0 = std::stod(cols[3]);
        r.volume = std::stod(cols[4]);
        r.n_active = std::stoi(cols[5]);
        r.reduced_dim = std::stoi(cols[6]);
        r.reintroduced = std::stoi(cols[7]);
        r.removed = std::stoi(cols[8]);
        r.eta = std::stod(cols[9]);
        r.beta = std::stod(cols[10]);
        r.rho_t = std::stod(cols[11]);
        r.phi_rat_flags = std::stoi(cols[12]);
        r.seconds = std::stod(cols[13]);
        r.constraint2 = std::stod(cols[14]);
        r.eigen_min = std::stod(cols[15]);
        r.ks_bound = std::stod(cols[16]);
        out.push_back(r);
    }
    return out;
}

void export_image(const std::string& path, const Vector& field, const std::vector<int>& dims) {
    if (dims.size() != 2)
        throw InvalidSpecError("export_image: 2D fields only (emit VTK for 3D)");
    const int nx = dims[0], ny = dims[1];
    if (static_cast<long long>(nx) * ny != field.size())
        throw InvalidSpecError("export_image: dims do not match field length");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "P5\n" << nx << " " << ny << "\n255\n";
    for (int iy = ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < nx; ++ix) {
            const Real rho = field[static_cast<long long>(ix) * ny + iy];
            const int v = static_cast<int>(std::lround(255.0 * (1.0 - std::min(1.0, std::max(0.0, rho)))));
            f.put(static_cast<char>(v));
        }
}

void export_vtk(const std::string& path, const StructuredMesh& mesh, const Vector& rho,
                const Vector* displacement) {
    if (rho.size() != mesh.elem_count) throw InvalidSpecError("export_vtk: field length mismatch");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const int nnx = mesh.dims[0] + 1, nny = mesh.dims[1] + 1;
    const int nnz = mesh.dim == 3 ? mesh.dims[2] + 1 : 1;
    const int nz = mesh.dim == 3 ? mesh.dims[2] : 1;
    f << "# vtk DataFile Version 3.0\ndensity field\nASCII\nDATASET STRUCTURED_POINTS\n";
    f << "DIMENSIONS " << nnx << " " << nny << " " << nnz << "\n";
    f << "ORIGIN 0 0 0\n";
    f << "SPACING ";
    format_value(f, mesh.h);
    f << " ";
    format_value(f, mesh.h);
    f << " ";
    format_value(f, mesh.h);
    f << "\n";
    f << "CELL_DATA " << mesh.elem_count << "\n";
    f << "SCALARS density double 1\nLOOKUP_TABLE default\n";
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < mesh.dims[1]; ++iy)
            for (int ix = 0; ix < mesh.dims[0]; ++ix) {
                format_value(f, rho[mesh.elem_id(ix, iy, iz)]);
                f << "\n";
            }
    if (displacement) {
        if (displacement->size() != mesh.total_dofs())
            throw InvalidSpecError("export_vtk: displacement length mismatch");
        f << "POINT_DATA " << mesh.node_count << "\n";
        f << "VECTORS displacement double\n";
        for (int iz = 0; iz < nnz; ++iz)
            for (int iy = 0; iy < nny; ++iy)
                for (int ix = 0; ix < nnx; ++ix) {
                    const int node = mesh.node_id(ix, iy, mesh.dim == 3 ? iz : 0);
                    for (int c = 0; c < 3; ++c) {
                        if (c < mesh.dofs_per_node)
                            format_value(f, (*displacement)[mesh.dof(node, c)]);
                        else
                            f << "0";
                        f << (c == 2 ? "\n" : " ");
                    }
                }
    }
}

}  // namespace topo
