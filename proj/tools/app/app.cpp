#include "app.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fbsurf/atomic_write.hpp"
#include "fbsurf/error.hpp"
#include "fbsurf/laplacian.hpp"
#include "fbsurf/mesh.hpp"
#include "fbsurf/spectral.hpp"
#include "fbsurf/synthesis.hpp"
#include "fbsurf/verify.hpp"
#include "field_io.hpp"

namespace fbsurf::app {

namespace fs = std::filesystem;

namespace {

struct MeshSource {
    std::string path;
    std::string shape;
    std::vector<std::string> params;
};

void add_mesh_source(CLI::App* cmd, MeshSource& src) {
    cmd->add_option("--mesh", src.path, "Input mesh (.off or .obj)");
    cmd->add_option("--shape", src.shape, "Generated mesh: interval, disk, disk-holes, cylinder, sphere");
    cmd->add_option("--params", src.params, "Generator parameters as key=value");
}

class Params {
public:
    Params(const std::string& shape, const std::vector<std::string>& items) : shape_(shape) {
        for (const auto& item : items) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw Error(ErrorCategory::Configuration, "generator parameter '" + item + "' is not key=value");
            }
            values_[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }

    double number(const std::string& key, double fallback) {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        used_.push_back(key);
        try {
            std::size_t n = 0;
            const double v = std::stod(it->second, &n);
            if (n == it->second.size()) return v;
        } catch (const std::exception&) {
        }
        throw Error(ErrorCategory::Configuration, "parameter " + key + " must be numeric");
    }

    int integer(const std::string& key, int fallback) {
        const double v = number(key, fallback);
        if (v != std::floor(v)) throw Error(ErrorCategory::Configuration, "parameter " + key + " must be an integer");
        return static_cast<int>(v);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    void finish() const {
        for (const auto& [k, v] : values_) {
            if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
                throw Error(ErrorCategory::Configuration, "parameter '" + k + "' does not apply to shape " + shape_);
            }
        }
    }

private:
    std::string shape_;
    std::map<std::string, std::string> values_;
    std::vector<std::string> used_;
};

Mesh generate_shape(const std::string& shape, const std::vector<std::string>& items) {
    Params p(shape, items);
    std::optional<Mesh> mesh;
    if (shape == "interval") {
        mesh.emplace(generate_interval(p.integer("n", 101)));
    } else if (shape == "disk") {
        mesh.emplace(generate_disk(p.integer("rings", 12)));
    } else if (shape == "disk-holes") {
        const auto holes = default_disk_holes();
        mesh.emplace(generate_disk(p.integer("rings", 16), holes));
    } else if (shape == "cylinder") {
        const double length = p.number("length", 2.0);
        const int n_circ = p.integer("n_circ", 32);
        const int n_len = p.has("n_len") ? p.integer("n_len", 0) : default_cylinder_rings(length, n_circ);
        mesh.emplace(generate_cylinder(length, n_circ, n_len));
    } else if (shape == "sphere") {
        mesh.emplace(generate_sphere(p.integer("subdivisions", 3)));
    } else {
        throw Error(ErrorCategory::Configuration, "unknown shape '" + shape + "'");
    }
    p.finish();
    return std::move(*mesh);
}

bool has_mesh(const MeshSource& src) { return !src.path.empty() || !src.shape.empty(); }

Mesh resolve_mesh(const MeshSource& src) {
    if (!src.path.empty() && !src.shape.empty()) {
        throw Error(ErrorCategory::Configuration, "give either --mesh or --shape, not both");
    }
    if (!src.path.empty()) {
        if (!src.params.empty()) throw Error(ErrorCategory::Configuration, "--params only applies with --shape");
        return load_mesh(src.path);
    }
    if (!src.shape.empty()) return generate_shape(src.shape, src.params);
    throw Error(ErrorCategory::Configuration, "a mesh source is required (--mesh or --shape)");
}

BoundaryCondition resolve_bc(const std::string& text, const Mesh& mesh) {
    if (text == "auto") return mesh.num_boundary() > 0 ? BoundaryCondition::Dirichlet : BoundaryCondition::Closed;
    return parse_boundary_condition(text);
}

std::string describe(const SpectralData& d) {
    return fmt::format("source={} spectra_hash={} scheme={} bc={} n_modes={}", to_string(d.source),
                       hash_to_hex(d.mesh_hash), to_string(d.scheme), to_string(d.bc), d.n_computed());
}

// Cached spectra are reused only when they were computed for this exact
// system, hold enough modes, and meet the requested tolerance.
std::optional<SpectralData> try_cache(const fs::path& path, std::uint64_t expected, Eigen::Index count, double tol,
                                      std::ostream& err) {
    if (path.empty() || !fs::exists(path)) return std::nullopt;
    try {
        CachedSpectra c = load_spectral_cache(path, expected);
        if (c.spectra.n_computed() >= count && c.spectra.residual_tol <= tol) return std::move(c.spectra);
        err << fmt::format("note: cache {} holds {} modes at tol {:g}; recomputing\n", path.string(),
                           c.spectra.n_computed(), c.spectra.residual_tol);
    } catch (const Error& e) {
        err << "note: ignoring cache " << path.string() << " (" << category_name(e.category()) << ": " << e.what()
            << ")\n";
    }
    return std::nullopt;
}

struct SpectraRequest {
    WeightScheme scheme = WeightScheme::InverseSquareDistance;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    bool analytic = false;
    Eigen::Index count = 0;
    double tol = 1e-10;
    fs::path cache;
};

SpectralData obtain_spectra(const Mesh& mesh, const SpectraRequest& req, std::ostream& err) {
    if (req.analytic) {
        SpectralData d = analytic_interval_spectra(mesh, req.bc, req.count);
        if (!req.cache.empty()) store_spectral_cache(req.cache, d, mesh);
        return d;
    }
    const LaplacianSystem sys = assemble(mesh, req.scheme, req.bc);
    if (auto cached = try_cache(req.cache, sys.mesh_hash, req.count, req.tol, err)) return std::move(*cached);
    SpectralData d = smallest_eigenpairs(sys, req.count, req.tol);
    if (!req.cache.empty()) store_spectral_cache(req.cache, d, mesh);
    return d;
}

void require_extension(const fs::path& path, const std::string& ext, const std::string& what) {
    if (path.extension() != ext) {
        throw Error(ErrorCategory::Configuration, what + " must be written to a " + ext + " file: " + path.string());
    }
}

// ---------------------------------------------------------------------------

struct MeshCmd {
    MeshSource src;
    std::string out;
};

int cmd_mesh(const MeshCmd& c, std::ostream& out) {
    if (c.src.shape.empty() || !c.src.path.empty()) {
        throw Error(ErrorCategory::Configuration, "mesh needs --shape (and optional --params)");
    }
    const Mesh mesh = generate_shape(c.src.shape, c.src.params);
    const MeshFormat fmt = mesh_format_from_path(c.out);
    save_mesh(c.out, mesh, fmt);
    out << fmt::format("mesh_hash={} dim={} vertices={} faces={} edges={} boundary={} out={}\n",
                       hash_to_hex(mesh.content_hash()), mesh.dim(), mesh.num_vertices(), mesh.num_faces(),
                       mesh.num_edges(), mesh.num_boundary(), c.out);
    return 0;
}

struct EigsCmd {
    MeshSource src;
    std::string scheme = "invsq";
    std::string bc = "auto";
    Eigen::Index n_modes = 0;
    double tol = 1e-10;
    std::string cache;
    bool analytic = false;
    std::string eigenvalues_json;
    std::string matrix_market;
};

int cmd_eigs(const EigsCmd& c, std::ostream& out, std::ostream& err) {
    const Mesh mesh = resolve_mesh(c.src);
    SpectraRequest req;
    req.scheme = parse_weight_scheme(c.scheme);
    req.bc = resolve_bc(c.bc, mesh);
    req.analytic = c.analytic;
    req.count = c.n_modes;
    req.tol = c.tol;
    req.cache = c.cache;
    const SpectralData d = obtain_spectra(mesh, req, err);
    if (!c.matrix_market.empty()) write_matrix_market(c.matrix_market, assemble(mesh, req.scheme, req.bc).matrix);
    if (!c.eigenvalues_json.empty()) write_file_atomic(c.eigenvalues_json, eigenvalues_json(d));
    out << fmt::format("mesh_hash={} {} lambda_first={:.17g} lambda_last={:.17g} cache={}\n",
                       hash_to_hex(mesh.content_hash()), describe(d), d.eigenvalues[0],
                       d.eigenvalues[d.n_computed() - 1], c.cache);
    return 0;
}

struct SynthCmd {
    MeshSource src;
    std::string cache;
    std::string analytic;
    std::string scheme = "invsq";
    std::string bc = "auto";
    double tol = 1e-10;
    double alpha = 0.5;
    Eigen::Index n_terms = 0;
    std::uint64_t seed = 0;
    std::optional<int> origin;
    unsigned threads = 1;
    std::string out;
    std::string export_mode = "scalar";
    std::optional<double> gain;
};

int cmd_synth(const SynthCmd& c, std::ostream& out, std::ostream& err) {
    validate_alpha(c.alpha);
    if (c.n_terms < 1) throw Error(ErrorCategory::InvalidParameter, "--n-terms must be at least 1");
    const ExportMode mode = parse_export_mode(c.export_mode);

    std::optional<Mesh> mesh;
    SpectralData spectra;
    if (!has_mesh(c.src)) {
        if (c.cache.empty()) throw Error(ErrorCategory::Configuration, "synth needs --cache or a mesh source");
        if (!c.analytic.empty()) throw Error(ErrorCategory::Configuration, "--analytic needs a mesh source");
        CachedSpectra cached = load_spectral_cache(c.cache);
        mesh.emplace(std::move(cached.mesh));
        spectra = std::move(cached.spectra);
    } else {
        mesh.emplace(resolve_mesh(c.src));
        SpectraRequest req;
        req.scheme = parse_weight_scheme(c.scheme);
        req.tol = c.tol;
        req.cache = c.cache;
        if (!c.analytic.empty()) {
            req.analytic = true;
            req.bc = parse_boundary_condition(c.analytic);
        } else {
            req.bc = resolve_bc(c.bc, *mesh);
        }
        // Closed spectra carry one kernel mode ahead of the N0 nonzero ones.
        req.count = c.n_terms + (req.bc == BoundaryCondition::Closed ? 1 : 0);
        spectra = obtain_spectra(*mesh, req, err);
    }

    SynthesisConfig cfg;
    cfg.alpha = c.alpha;
    cfg.n_terms = c.n_terms;
    cfg.seed = c.seed;
    cfg.origin = c.origin;
    cfg.threads = c.threads;
    const bool riesz = spectra.bc == BoundaryCondition::Closed;
    if (riesz && !cfg.origin) cfg.origin = 0;
    const FieldSample field = riesz ? synthesize_riesz_field(spectra, cfg) : synthesize_boundary_field(spectra, cfg);

    const Metadata meta = field_metadata(field);
    if (mesh->dim() == 1) {
        if (mode == ExportMode::Displace) {
            throw Error(ErrorCategory::Configuration, "displacement export needs a surface mesh");
        }
        require_extension(c.out, ".csv", "curve fields");
        write_field_csv(c.out, curve_parameter(*mesh), field.values, meta);
    } else {
        require_extension(c.out, ".ply", "surface fields");
        export_ply(c.out, *mesh, field.values, mode, c.gain, meta);
    }
    out << fmt::format("mesh_hash={} {} alpha={:g} n_terms={} seed={} tail_relative={:.3e} out={}\n",
                       hash_to_hex(mesh->content_hash()), describe(spectra), c.alpha, c.n_terms, c.seed,
                       field.truncation_tail_estimate.relative_tail, c.out);
    return 0;
}

struct RescaleCmd {
    std::string in;
    std::string out;
    double c = 1.0;
    std::optional<double> alpha;
};

int cmd_rescale(const RescaleCmd& c, std::ostream& out) {
    FieldFile ff = read_field_file(c.in);
    const fs::path out_path = c.out;
    if (out_path.extension() != fs::path(c.in).extension()) {
        throw Error(ErrorCategory::Configuration, "rescale keeps the file type of its input");
    }
    if (ff.is_ply && ff.meta.count("export") && ff.meta.at("export") == "displace") {
        throw Error(ErrorCategory::Configuration, "displaced PLY positions cannot be rescaled; export scalar fields");
    }
    std::optional<double> alpha = c.alpha;
    if (ff.meta.count("alpha")) {
        const double stored = std::stod(ff.meta.at("alpha"));
        if (alpha && *alpha != stored) {
            throw Error(ErrorCategory::Configuration,
                        fmt::format("--alpha {:g} disagrees with the field's alpha {:g}", *alpha, stored));
        }
        alpha = stored;
    }
    if (!alpha) throw Error(ErrorCategory::Configuration, "--alpha is required for fields without metadata");

    FieldSample sample;
    sample.values = ff.values;
    sample.config.alpha = *alpha;
    sample.scale = ff.meta.count("scale") ? std::stod(ff.meta.at("scale")) : 1.0;
    const FieldSample scaled = rescale_field(sample, c.c);

    Metadata meta = ff.meta;
    meta["alpha"] = fmt::format("{:.17g}", *alpha);
    meta["scale"] = fmt::format("{:.17g}", scaled.scale);
    if (ff.is_ply) {
        for (auto& p : ff.vertices) p *= c.c;
        const Mesh mesh = Mesh::surface(std::move(ff.vertices), std::move(ff.faces));
        export_ply(out_path, mesh, scaled.values, ExportMode::Scalar, std::nullopt, meta);
    } else {
        for (double& t : ff.t) t *= c.c;
        write_field_csv(out_path, ff.t, scaled.values, meta);
    }
    out << fmt::format("rescaled {} values by c={:g}^alpha={:g} scale={:.17g} out={}\n", scaled.values.size(), c.c,
                       *alpha, scaled.scale, c.out);
    return 0;
}

// ---------------------------------------------------------------------------

struct VerifyCmd {
    std::string check;
    std::string report;
    std::string cache;
    std::optional<double> alpha;
    std::optional<Eigen::Index> n_terms;
    std::optional<std::string> bc;
    std::string scheme = "invsq";
    std::optional<std::string> target;
    Eigen::Index samples = 20000;
    std::uint64_t seed = 0;
    std::optional<int> grid_points;
    std::vector<int> resolutions;
    std::optional<Eigen::Index> n_modes;
    int subdivisions = 3;
    double tol = 1e-10;
    std::optional<double> tolerance;
    std::optional<std::string> domain;
    std::optional<Eigen::Index> n;
};

struct VerifyOutcome {
    nlohmann::json report;
    bool passed = false;
    std::string summary;
};

VerifyOutcome verify_covariance(const VerifyCmd& c) {
    const double alpha = c.alpha.value_or(0.5);
    const BoundaryCondition bc = parse_boundary_condition(c.bc.value_or("mixed"));
    const Eigen::Index n_terms = c.n_terms.value_or(500);
    const int points = c.grid_points.value_or(101);
    const double tolerance = c.tolerance.value_or(0.02);

    const Mesh grid_mesh = generate_interval(points);
    const SpectralData spectra = analytic_interval_spectra(grid_mesh, bc, n_terms);
    std::vector<double> grid(static_cast<std::size_t>(points));
    std::vector<int> vertices(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = grid_mesh.vertex(i).x();
        vertices[i] = static_cast<int>(i);
    }

    const bool closed_form = alpha == 0.5;
    const std::string target = c.target.value_or(closed_form ? "kernel" : "truncated");
    const PathGenerator gen = spectral_path_generator(spectra, alpha, n_terms, vertices);
    CovarianceReport rep;
    if (target == "kernel") {
        if (!closed_form) throw Error(ErrorCategory::Configuration, "a closed-form kernel exists only for alpha 0.5");
        const Kernel kernel = bc == BoundaryCondition::Mixed
                                  ? Kernel(min_kernel)
                                  : Kernel([](double s, double t) { return std::min(s, t) - s * t; });
        rep = covariance_test(gen, kernel, grid, c.samples, c.seed);
    } else if (target == "truncated") {
        rep = covariance_test(gen, truncated_covariance(spectra, alpha, n_terms, vertices), grid, c.samples, c.seed);
    } else {
        throw Error(ErrorCategory::Configuration, "--target must be kernel or truncated");
    }

    VerifyOutcome o;
    o.report = nlohmann::json::parse(to_json(rep));
    o.passed = rep.max_abs_error <= tolerance;
    o.report["target"] = target;
    o.report["alpha"] = alpha;
    o.report["bc"] = std::string(to_string(bc));
    o.report["n_terms"] = n_terms;
    o.report["tolerance"] = tolerance;
    o.summary = fmt::format("max_abs_error={:.4g} tolerance={:g} min_eigenvalue={:.3g}", rep.max_abs_error, tolerance,
                            rep.min_eigenvalue);
    return o;
}

VerifyOutcome verify_interval_convergence(const VerifyCmd& c) {
    const BoundaryCondition bc = parse_boundary_condition(c.bc.value_or("dirichlet"));
    const WeightScheme scheme = parse_weight_scheme(c.scheme);
    const std::vector<int> res = c.resolutions.empty() ? std::vector<int>{51, 101, 201, 401, 1001} : c.resolutions;
    const Eigen::Index modes = c.n_modes.value_or(10);
    const double rate_tol = c.tolerance.value_or(0.3);
    const ConvergenceReport rep = spectral_convergence_study(ShapeFamily::Interval, res, modes, bc, scheme, c.tol);

    bool ok = std::all_of(rep.failures.begin(), rep.failures.end(), [](const auto& f) { return f.empty(); });
    bool monotone = ok;
    for (std::size_t i = 1; ok && i < res.size(); ++i) {
        for (Eigen::Index k = 0; k < modes; ++k) {
            if (!(rep.eigenvalue_errors[i][k] < rep.eigenvalue_errors[i - 1][k])) monotone = false;
        }
    }
    bool rates_ok = ok && !rep.fitted_rates.empty();
    for (double r : rep.fitted_rates) {
        if (!(std::abs(r - 2.0) <= rate_tol)) rates_ok = false;
    }
    double worst_rel = 0.0;
    if (ok) {
        const Mesh finest = generate_interval(res.back());
        const SpectralData exact = analytic_interval_spectra(finest, bc, modes);
        for (Eigen::Index k = 0; k < modes; ++k) {
            worst_rel = std::max(worst_rel, rep.eigenvalue_errors.back()[k] / exact.eigenvalues[k]);
        }
    }
    const bool rel_ok = ok && worst_rel <= 1e-3;

    VerifyOutcome o;
    o.report = nlohmann::json::parse(to_json(rep));
    o.report["bc"] = std::string(to_string(bc));
    o.report["scheme"] = std::string(to_string(scheme));
    o.report["finest_max_relative_error"] = worst_rel;
    o.report["criteria"] = {{"monotone_errors", monotone},
                            {"rates_within_tolerance", rates_ok},
                            {"finest_relative_error_below_1e-3", rel_ok}};
    o.report["rate_tolerance"] = rate_tol;
    o.passed = monotone && rates_ok && rel_ok;
    std::string rates;
    for (double r : rep.fitted_rates) rates += fmt::format(" {:.3f}", r);
    o.summary = fmt::format("finest_max_relative_error={:.3e} rates=[{} ]", worst_rel, rates);
    return o;
}

SpectralData sphere_spectra(const VerifyCmd& c, Eigen::Index count) {
    if (!c.cache.empty()) return load_spectral_cache(c.cache).spectra;
    const Mesh mesh = generate_sphere(c.subdivisions);
    return smallest_eigenpairs(assemble(mesh, parse_weight_scheme(c.scheme), BoundaryCondition::Closed), count,
                               c.tol);
}

VerifyOutcome verify_sphere_clusters(const VerifyCmd& c) {
    const ClusterReport rep = sphere_multiplicity_check(sphere_spectra(c, c.n_modes.value_or(9)));
    VerifyOutcome o;
    o.report = nlohmann::json::parse(to_json(rep));
    o.passed = rep.passed();
    o.summary = fmt::format("kernel={:.3e} bound={:.3e} ratio={:.4f}", rep.kernel_eigenvalue, rep.kernel_bound,
                            rep.ratio);
    return o;
}

VerifyOutcome verify_weyl_tail(const VerifyCmd& c) {
    const double alpha = c.alpha.value_or(0.5);
    const double tolerance = c.tolerance.value_or(0.2);
    SpectralData spectra;
    int dim = 0;
    const std::string domain = c.domain.value_or(c.cache.empty() ? "sphere" : "cache");
    if (domain == "interval") {
        const Eigen::Index terms = c.n_terms.value_or(200);
        spectra = analytic_interval_spectra(generate_interval(c.grid_points.value_or(1001)),
                                            parse_boundary_condition(c.bc.value_or("dirichlet")), terms);
        dim = 1;
    } else if (domain == "sphere") {
        spectra = sphere_spectra(c, c.n_modes.value_or(101));
        dim = 2;
    } else if (domain == "cache") {
        spectra = load_spectral_cache(c.cache).spectra;
        dim = spectra.dim;
    } else {
        throw Error(ErrorCategory::Configuration, "--domain must be interval or sphere");
    }
    Eigen::Index nonzero = 0;
    for (Eigen::Index k = 0; k < spectra.n_computed(); ++k) nonzero += spectra.eigenvalues[k] > 0.0 ? 1 : 0;
    const Eigen::Index n = c.n.value_or(nonzero / 2);
    const WeylTailReport rep = weyl_tail_check(spectra, alpha, dim, n);
    VerifyOutcome o;
    o.report = nlohmann::json::parse(to_json(rep));
    o.report["tolerance"] = tolerance;
    o.passed = rep.relative_error <= tolerance;
    o.summary = fmt::format("fitted={:.4f} predicted={:.4f} relative_error={:.3f}", rep.fitted_exponent,
                            rep.predicted_exponent, rep.relative_error);
    return o;
}

int cmd_verify(const VerifyCmd& c, std::ostream& out) {
    VerifyOutcome o;
    if (c.check == "covariance") o = verify_covariance(c);
    else if (c.check == "interval-convergence") o = verify_interval_convergence(c);
    else if (c.check == "sphere-clusters") o = verify_sphere_clusters(c);
    else if (c.check == "weyl-tail") o = verify_weyl_tail(c);
    else throw Error(ErrorCategory::Configuration, "unknown check '" + c.check + "'");
    o.report["passed"] = o.passed;
    write_file_atomic(c.report, o.report.dump(2) + "\n");
    out << fmt::format("check={} passed={} {} report={}\n", c.check, o.passed, o.summary, c.report);
    return o.passed ? 0 : exit_code(ErrorCategory::VerificationFailed);
}

// Unsectioned keys in a config file belong to the subcommand being run.
class ScopedTomlConfig : public CLI::ConfigTOML {
public:
    explicit ScopedTomlConfig(std::string scope) : scope_(std::move(scope)) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::vector<CLI::ConfigItem> items = CLI::ConfigTOML::from_config(input);
        for (auto& item : items) {
            if (item.parents.empty()) item.parents.push_back(scope_);
        }
        return items;
    }

private:
    std::string scope_;
};

// Config files are only read by the top-level parser, so a --config given
// after the subcommand name is moved in front of it.
std::vector<std::string> hoist_config(const std::vector<std::string>& args) {
    std::vector<std::string> config, rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = {args[i], args[i + 1]};
            ++i;
        } else if (args[i].starts_with("--config=")) {
            config = {args[i]};
        } else {
            rest.push_back(args[i]);
        }
    }
    config.insert(config.end(), rest.begin(), rest.end());
    return config;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral synthesis of fractional Brownian fields on intervals and surfaces", "fbsurf"};
    app.set_config("--config", "", "Read flags from a TOML/INI file; command-line flags take precedence");
    app.require_subcommand(1);

    MeshCmd mesh_cmd;
    auto* mesh = app.add_subcommand("mesh", "Generate a mesh and write it as OFF or OBJ");
    add_mesh_source(mesh, mesh_cmd.src);
    mesh->add_option("--out", mesh_cmd.out, "Output mesh path")->required();

    EigsCmd eigs_cmd;
    auto* eigs = app.add_subcommand("eigs", "Solve for the lowest Laplacian eigenpairs and store a cache");
    add_mesh_source(eigs, eigs_cmd.src);
    eigs->add_option("--scheme", eigs_cmd.scheme, "Edge weights: invsq or cotan")->capture_default_str();
    eigs->add_option("--bc", eigs_cmd.bc, "dirichlet, closed, mixed or auto")->capture_default_str();
    eigs->add_option("--n-modes", eigs_cmd.n_modes, "Number of eigenpairs")->required();
    eigs->add_option("--tol", eigs_cmd.tol, "Relative residual tolerance")->capture_default_str();
    eigs->add_option("--cache", eigs_cmd.cache, "Spectral cache path")->required();
    eigs->add_flag("--analytic", eigs_cmd.analytic, "Closed-form spectra (unit interval only)");
    eigs->add_option("--eigenvalues-json", eigs_cmd.eigenvalues_json, "Also write eigenvalues as JSON");
    eigs->add_option("--matrix-market", eigs_cmd.matrix_market, "Also write the assembled matrix");

    SynthCmd synth_cmd;
    auto* synth = app.add_subcommand("synth", "Synthesize a field sample");
    add_mesh_source(synth, synth_cmd.src);
    synth->add_option("--cache", synth_cmd.cache, "Spectral cache to read or refresh");
    synth->add_option("--analytic", synth_cmd.analytic, "Closed-form interval spectra: dirichlet or mixed");
    synth->add_option("--scheme", synth_cmd.scheme, "Edge weights when solving")->capture_default_str();
    synth->add_option("--bc", synth_cmd.bc, "Boundary condition when solving")->capture_default_str();
    synth->add_option("--tol", synth_cmd.tol, "Solver tolerance")->capture_default_str();
    synth->add_option("--alpha", synth_cmd.alpha, "Regularity index in (0, 1)")->required();
    synth->add_option("--n-terms", synth_cmd.n_terms, "Series truncation N0")->required();
    synth->add_option("--seed", synth_cmd.seed, "Random seed")->capture_default_str();
    synth->add_option("--origin", synth_cmd.origin, "Origin vertex for closed domains (default 0)");
    synth->add_option("--threads", synth_cmd.threads, "Worker threads")->capture_default_str();
    synth->add_option("--out", synth_cmd.out, "Output .csv (curves) or .ply (surfaces)")->required();
    synth->add_option("--export", synth_cmd.export_mode, "scalar or displace")->capture_default_str();
    synth->add_option("--gain", synth_cmd.gain, "Displacement gain");

    RescaleCmd rescale_cmd;
    auto* rescale = app.add_subcommand("rescale", "Apply the self-similar scaling to a field file");
    rescale->add_option("--in", rescale_cmd.in, "Input field file")->required();
    rescale->add_option("--c", rescale_cmd.c, "Domain scale factor")->required();
    rescale->add_option("--alpha", rescale_cmd.alpha, "Regularity index (defaults to the file's)");
    rescale->add_option("--out", rescale_cmd.out, "Output field file")->required();

    VerifyCmd verify_cmd;
    auto* verify = app.add_subcommand("verify", "Run a verification check and write a JSON report");
    verify->add_option("--check", verify_cmd.check, "covariance, interval-convergence, sphere-clusters, weyl-tail")
        ->required();
    verify->add_option("--report", verify_cmd.report, "JSON report path")->required();
    verify->add_option("--cache", verify_cmd.cache, "Use stored spectra");
    verify->add_option("--alpha", verify_cmd.alpha);
    verify->add_option("--n-terms", verify_cmd.n_terms);
    verify->add_option("--bc", verify_cmd.bc);
    verify->add_option("--scheme", verify_cmd.scheme)->capture_default_str();
    verify->add_option("--target", verify_cmd.target, "covariance target: kernel or truncated");
    verify->add_option("--samples", verify_cmd.samples)->capture_default_str();
    verify->add_option("--seed", verify_cmd.seed, "Base seed")->capture_default_str();
    verify->add_option("--grid-points", verify_cmd.grid_points);
    verify->add_option("--resolutions", verify_cmd.resolutions);
    verify->add_option("--n-modes", verify_cmd.n_modes);
    verify->add_option("--subdivisions", verify_cmd.subdivisions)->capture_default_str();
    verify->add_option("--tol", verify_cmd.tol, "Solver tolerance")->capture_default_str();
    verify->add_option("--tolerance", verify_cmd.tolerance, "Pass threshold of the check");
    verify->add_option("--domain", verify_cmd.domain, "weyl-tail domain: interval or sphere");
    verify->add_option("--n", verify_cmd.n, "weyl-tail start index");

    const std::vector<std::string> ordered = hoist_config(args);
    for (const auto& a : ordered) {
        if (a == "mesh" || a == "eigs" || a == "synth" || a == "rescale" || a == "verify") {
            app.config_formatter(std::make_shared<ScopedTomlConfig>(a));
            break;
        }
    }

    std::vector<const char*> argv{"fbsurf"};
    for (const auto& a : ordered) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "fbsurf: " << category_name(ErrorCategory::Configuration) << ": " << e.what() << "\n";
        return exit_code(ErrorCategory::Configuration);
    }

    try {
        if (mesh->parsed()) return cmd_mesh(mesh_cmd, out);
        if (eigs->parsed()) return cmd_eigs(eigs_cmd, out, err);
        if (synth->parsed()) return cmd_synth(synth_cmd, out, err);
        if (rescale->parsed()) return cmd_rescale(rescale_cmd, out);
        return cmd_verify(verify_cmd, out);
    } catch (const Error& e) {
        err << "fbsurf: " << category_name(e.category()) << ": " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        err << "fbsurf: " << category_name(ErrorCategory::Io) << ": " << e.what() << "\n";
        return exit_code(ErrorCategory::Io);
    }
}

}  // namespace fbsurf::app
