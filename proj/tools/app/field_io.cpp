#include "field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fbsurf/atomic_write.hpp"
#include "fbsurf/error.hpp"
#include "fbsurf/spectral.hpp"

namespace fbsurf::app {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

double parse_double(const std::string& token, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw FormatError("expected a number, found '" + token + "'", line);
    }
}

void add_meta_line(Metadata& meta, const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) return;
    meta[text.substr(0, eq)] = text.substr(eq + 1);
}

}  // namespace

ExportMode parse_export_mode(const std::string& text) {
    if (text == "scalar") return ExportMode::Scalar;
    if (text == "displace" || text == "normal-displacement") return ExportMode::Displace;
    throw Error(ErrorCategory::Configuration, "unknown export mode '" + text + "' (scalar, displace)");
}

Metadata field_metadata(const FieldSample& f) {
    Metadata m;
    m["alpha"] = num(f.config.alpha);
    m["n_terms"] = std::to_string(f.config.n_terms);
    m["seed"] = std::to_string(f.config.seed);
    m["origin"] = f.config.origin ? std::to_string(*f.config.origin) : "none";
    m["bc"] = std::string(to_string(f.bc));
    m["dim"] = std::to_string(f.dim);
    m["mesh_hash"] = hash_to_hex(f.mesh_hash);
    m["num_vertices"] = std::to_string(f.num_vertices);
    m["scale"] = num(f.scale);
    m["tail_relative"] = num(f.truncation_tail_estimate.relative_tail);
    return m;
}

std::vector<double> curve_parameter(const Mesh& curve) {
    const auto n = curve.num_vertices();
    std::vector<double> t(n);
    const bool on_axis = std::all_of(curve.vertices().begin(), curve.vertices().end(),
                                     [](const Vec3& p) { return p.y() == 0.0 && p.z() == 0.0; });
    if (on_axis) {
        for (std::size_t i = 0; i < n; ++i) t[i] = curve.vertex(i).x();
        return t;
    }
    std::vector<std::vector<int>> nbr(n);
    for (const Edge& e : curve.edges()) {
        nbr[e[0]].push_back(e[1]);
        nbr[e[1]].push_back(e[0]);
    }
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (curve.is_boundary(i)) {
            start = i;
            break;
        }
    }
    std::vector<char> seen(n, 0);
    int prev = -1, cur = static_cast<int>(start);
    double s = 0.0;
    seen[cur] = 1;
    t[cur] = 0.0;
    for (;;) {
        int next = -1;
        for (int w : nbr[cur]) {
            if (w != prev && !seen[w]) next = w;
        }
        if (next < 0) break;
        s += (curve.vertex(next) - curve.vertex(cur)).norm();
        t[next] = s;
        seen[next] = 1;
        prev = cur;
        cur = next;
    }
    return t;
}

void write_field_csv(const std::filesystem::path& path, std::span<const double> t, std::span<const double> values,
                     const Metadata& meta) {
    std::string out = "# fbsurf-field\n";
    for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
    out += "t,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) out += num(t[i]) + "," + num(values[i]) + "\n";
    write_file_atomic(path, out);
}

void export_ply(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> values, ExportMode mode,
                std::optional<double> gain, Metadata meta) {
    if (mesh.dim() != 2) {
        throw Error(ErrorCategory::Configuration, "PLY export needs a surface mesh; curves are written as CSV");
    }
    if (values.size() != mesh.num_vertices()) {
        throw Error(ErrorCategory::InvalidParameter, "field does not cover every mesh vertex");
    }
    std::vector<Vec3> pos(mesh.vertices().begin(), mesh.vertices().end());
    if (mode == ExportMode::Displace) {
        double g = 0.0;
        if (gain) {
            g = *gain;
        } else {
            double peak = 0.0;
            for (double v : values) peak = std::max(peak, std::abs(v));
            if (peak > 0.0) g = 0.1 * mesh.bounding_box_diagonal() / peak;
        }
        const auto normals = mesh.vertex_normals();
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] += (g * values[i]) * normals[i];
        meta["export"] = "displace";
        meta["gain"] = num(g);
    } else {
        meta["export"] = "scalar";
    }

    std::string out = "ply\nformat ascii 1.0\ncomment fbsurf-field\n";
    for (const auto& [k, v] : meta) out += "comment " + k + "=" + v + "\n";
    out += fmt::format("element vertex {}\n", pos.size());
    out += "property double x\nproperty double y\nproperty double z\nproperty double field\n";
    out += fmt::format("element face {}\n", mesh.num_faces());
    out += "property list uchar int vertex_indices\nend_header\n";
    for (std::size_t i = 0; i < pos.size(); ++i) {
        out += num(pos[i].x()) + " " + num(pos[i].y()) + " " + num(pos[i].z()) + " " + num(values[i]) + "\n";
    }
    for (const Face& f : mesh.faces()) out += fmt::format("3 {} {} {}\n", f[0], f[1], f[2]);
    write_file_atomic(path, out);
}

namespace {

FieldFile read_csv(std::istream& in) {
    FieldFile ff;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.find_first_not_of("# ");
            if (body != std::string::npos) add_meta_line(ff.meta, line.substr(body));
            continue;
        }
        if (!header) {
            if (line != "t,value") throw FormatError("expected CSV header 't,value'", lineno);
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError("expected two CSV columns", lineno);
        ff.t.push_back(parse_double(line.substr(0, comma), lineno));
        ff.values.push_back(parse_double(line.substr(comma + 1), lineno));
    }
    if (!header) throw FormatError("missing CSV header", lineno);
    return ff;
}

FieldFile read_ply(std::istream& in) {
    FieldFile ff;
    ff.is_ply = true;
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw FormatError("unexpected end of PLY file", lineno);
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };
    next_line();
    if (line != "ply") throw FormatError("missing 'ply' magic", lineno);
    next_line();
    if (line != "format ascii 1.0") throw FormatError("only ASCII PLY is supported", lineno);

    std::size_t n_vertices = 0, n_faces = 0;
    std::vector<std::string> vprops;
    std::string element;
    for (;;) {
        next_line();
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "comment") {
            std::string rest;
            std::getline(ls >> std::ws, rest);
            add_meta_line(ff.meta, rest);
        } else if (word == "element") {
            std::size_t count = 0;
            ls >> element >> count;
            if (element == "vertex") n_vertices = count;
            else if (element == "face") n_faces = count;
            else throw FormatError("unsupported PLY element '" + element + "'", lineno);
        } else if (word == "property") {
            std::string type, name;
            ls >> type;
            if (element == "vertex") {
                ls >> name;
                vprops.push_back(name);
            }
        } else {
            throw FormatError("unexpected PLY header line", lineno);
        }
    }
    auto prop = [&](const std::string& name) {
        const auto it = std::find(vprops.begin(), vprops.end(), name);
        if (it == vprops.end()) throw FormatError("PLY vertex property '" + name + "' missing", lineno);
        return static_cast<std::size_t>(it - vprops.begin());
    };
    const std::size_t ix = prop("x"), iy = prop("y"), iz = prop("z"), ifield = prop("field");

    std::vector<std::string> tok;
    for (std::size_t i = 0; i < n_vertices; ++i) {
        next_line();
        std::istringstream ls(line);
        tok.clear();
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.size() != vprops.size()) throw FormatError("wrong number of vertex properties", lineno);
        ff.vertices.emplace_back(parse_double(tok[ix], lineno), parse_double(tok[iy], lineno),
                                 parse_double(tok[iz], lineno));
        ff.values.push_back(parse_double(tok[ifield], lineno));
    }
    for (std::size_t i = 0; i < n_faces; ++i) {
        next_line();
        std::istringstream ls(line);
        int count = 0;
        Face f{};
        if (!(ls >> count >> f[0] >> f[1] >> f[2]) || count != 3) {
            throw FormatError("expected a triangle face", lineno);
        }
        ff.faces.push_back(f);
    }
    return ff;
}

}  // namespace

FieldFile read_field_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open field file " + path.string());
    const auto ext = path.extension().string();
    if (ext == ".ply") return read_ply(in);
    if (ext == ".csv") return read_csv(in);
    throw Error(ErrorCategory::Configuration, "field files must end in .csv or .ply");
}

}  // namespace fbsurf::app
