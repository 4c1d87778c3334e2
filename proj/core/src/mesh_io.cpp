#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "fbsurf/atomic_write.hpp"
#include "fbsurf/error.hpp"
#include "fbsurf/mesh.hpp"

namespace fbsurf {

namespace {

struct Token {
    std::string text;
    long line;
};

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(std::string line) {
    const auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    return line;
}

double parse_double(const std::string& s, long line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("expected a number, got '" + s + "'", line);
    return v;
}

long parse_long(const std::string& s, long line) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("expected an integer, got '" + s + "'", line);
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open " + path.string());
    return in;
}

Mesh read_off(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<Token> tokens;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (auto& t : split_ws(strip_comment(line))) tokens.push_back({std::move(t), line_no});
    }
    std::size_t pos = 0;
    auto next = [&]() -> const Token& {
        if (pos >= tokens.size()) throw FormatError("unexpected end of file", line_no);
        return tokens[pos++];
    };

    const Token& header = next();
    if (header.text != "OFF") throw FormatError("missing OFF header", header.line);
    const Token& nv_tok = next();
    const long nv = parse_long(nv_tok.text, nv_tok.line);
    const Token& nf_tok = next();
    const long nf = parse_long(nf_tok.text, nf_tok.line);
    const Token& ne_tok = next();
    parse_long(ne_tok.text, ne_tok.line);
    if (nv < 0 || nf < 0) throw FormatError("negative element count", nv_tok.line);

    std::vector<Vec3> v;
    v.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        Vec3 p;
        for (int c = 0; c < 3; ++c) {
            const Token& t = next();
            p[c] = parse_double(t.text, t.line);
        }
        v.push_back(p);
    }
    std::vector<Face> f;
    f.reserve(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        const Token& k = next();
        if (parse_long(k.text, k.line) != 3) throw FormatError("only triangular faces are supported", k.line);
        Face face;
        for (int c = 0; c < 3; ++c) {
            const Token& t = next();
            face[c] = static_cast<int>(parse_long(t.text, t.line));
            if (face[c] < 0 || face[c] >= nv) throw FormatError("face index out of range", t.line);
        }
        f.push_back(face);
    }
    if (nf == 0) throw FormatError("OFF file has no faces", header.line);
    return Mesh::surface(std::move(v), std::move(f));
}

int obj_index(const std::string& tok, long nv, long line) {
    const std::string head = tok.substr(0, tok.find('/'));
    const long raw = parse_long(head, line);
    const long idx = raw < 0 ? nv + raw : raw - 1;
    if (idx < 0 || idx >= nv) throw FormatError("vertex index out of range", line);
    return static_cast<int>(idx);
}

Mesh read_obj(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<Vec3> v;
    std::vector<Face> f;
    std::vector<Edge> segments;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_ws(strip_comment(line));
        if (toks.empty()) continue;
        const std::string& kind = toks[0];
        if (kind == "v") {
            if (toks.size() < 4) throw FormatError("vertex needs three coordinates", line_no);
            v.emplace_back(parse_double(toks[1], line_no), parse_double(toks[2], line_no),
                           parse_double(toks[3], line_no));
        } else if (kind == "f") {
            if (toks.size() != 4) throw FormatError("only triangular faces are supported", line_no);
            const long nv = static_cast<long>(v.size());
            f.push_back({obj_index(toks[1], nv, line_no), obj_index(toks[2], nv, line_no),
                         obj_index(toks[3], nv, line_no)});
        } else if (kind == "l") {
            if (toks.size() < 3) throw FormatError("line element needs two vertices", line_no);
            const long nv = static_cast<long>(v.size());
            for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
                segments.push_back({obj_index(toks[i], nv, line_no), obj_index(toks[i + 1], nv, line_no)});
            }
        }
        // vn, vt, g, o, s, usemtl, mtllib: ignored
    }
    if (!f.empty()) return Mesh::surface(std::move(v), std::move(f));
    if (!segments.empty()) return Mesh::polyline(std::move(v), std::move(segments));
    throw FormatError("OBJ file has no faces or line elements", line_no);
}

}  // namespace

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".off") return MeshFormat::Off;
    if (ext == ".obj") return MeshFormat::Obj;
    throw Error(ErrorCategory::InvalidParameter, "unknown mesh extension '" + ext + "' (expected .off or .obj)");
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    return format == MeshFormat::Off ? read_off(path) : read_obj(path);
}

Mesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, mesh_format_from_path(path)); }

void save_mesh(const std::filesystem::path& path, const Mesh& mesh, MeshFormat format) {
    std::string out;
    auto append_vertex = [&](const char* prefix, const Vec3& p) {
        out += fmt::format("{}{:.17g} {:.17g} {:.17g}\n", prefix, p.x(), p.y(), p.z());
    };
    if (format == MeshFormat::Off) {
        if (mesh.dim() != 2) {
            throw Error(ErrorCategory::Configuration, "curve meshes can only be written as OBJ polylines");
        }
        out += fmt::format("OFF\n{} {} {}\n", mesh.num_vertices(), mesh.num_faces(), mesh.num_edges());
        for (const auto& p : mesh.vertices()) append_vertex("", p);
        for (const Face& f : mesh.faces()) out += fmt::format("3 {} {} {}\n", f[0], f[1], f[2]);
    } else {
        for (const auto& p : mesh.vertices()) append_vertex("v ", p);
        if (mesh.dim() == 2) {
            for (const Face& f : mesh.faces()) out += fmt::format("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
        } else {
            for (const Edge& e : mesh.edges()) out += fmt::format("l {} {}\n", e[0] + 1, e[1] + 1);
        }
    }
    write_file_atomic(path, out);
}

}  // namespace fbsurf
