#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "detail/hash.hpp"
#include "fbsurf/atomic_write.hpp"
#include "fbsurf/error.hpp"
#include "fbsurf/spectral.hpp"

namespace fbsurf {

namespace {

static_assert(std::endian::native == std::endian::little, "cache payload is written in host byte order");

constexpr char kMagic[8] = {'F', 'B', 'S', 'P', 'E', 'C', 'T', '\n'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    out.append(p, sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        T v;
        need(sizeof(T));
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string get_string(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw FormatError("spectral cache is truncated", 0);
    }

    const std::string& bytes_;
    std::size_t pos_ = 0;
};

std::uint64_t spectra_hash(const Mesh& mesh, WeightScheme scheme, BoundaryCondition bc, bool analytic) {
    if (!analytic) return system_hash(mesh, scheme, bc);
    detail::Fnv1a h;
    h.value(mesh.content_hash());
    h.string("analytic");
    h.string(to_string(bc));
    return h.digest();
}

}  // namespace

std::string hash_to_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

void store_spectral_cache(const std::filesystem::path& path, const SpectralData& data, const Mesh& mesh) {
    const auto rows = data.eigenvectors.rows();
    const auto modes = data.eigenvectors.cols();
    if (static_cast<std::size_t>(rows) != data.interior_map.size() || modes != data.eigenvalues.size()) {
        throw Error(ErrorCategory::InvalidParameter, "spectral data arrays disagree in size");
    }
    if (mesh.num_vertices() != data.num_vertices) {
        throw Error(ErrorCategory::InvalidParameter, "mesh does not match the spectral data");
    }

    nlohmann::json header = {
        {"format", "fbsurf-spectral-cache"},
        {"version", kVersion},
        {"mesh_hash", hash_to_hex(data.mesh_hash)},
        {"scheme", to_string(data.scheme)},
        {"bc", to_string(data.bc)},
        {"origin", data.source == SpectralSource::Analytic ? "analytic" : "iterative-solver"},
        {"residual_tol", data.residual_tol},
        {"dim", mesh.dim()},
        {"n_rows", rows},
        {"n_modes", modes},
        {"n_vertices", mesh.num_vertices()},
        {"n_faces", mesh.num_faces()},
        {"n_segments", mesh.dim() == 1 ? mesh.num_edges() : 0},
    };
    const std::string header_text = header.dump();

    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, static_cast<std::uint64_t>(header_text.size()));
    out += header_text;
    for (Eigen::Index k = 0; k < modes; ++k) put(out, data.eigenvalues[k]);
    out.append(reinterpret_cast<const char*>(data.eigenvectors.data()),
               static_cast<std::size_t>(rows * modes) * sizeof(double));
    for (std::size_t k = 0; k < data.residuals.size() && k < static_cast<std::size_t>(modes); ++k) {
        put(out, data.residuals[k]);
    }
    for (std::size_t k = data.residuals.size(); k < static_cast<std::size_t>(modes); ++k) put(out, 0.0);
    for (int r : data.interior_map) put(out, static_cast<std::int64_t>(r));
    for (const auto& p : mesh.vertices()) {
        put(out, p.x());
        put(out, p.y());
        put(out, p.z());
    }
    if (mesh.dim() == 2) {
        for (const Face& f : mesh.faces()) {
            for (int c : f) put(out, static_cast<std::int64_t>(c));
        }
    } else {
        for (const Edge& e : mesh.edges()) {
            for (int c : e) put(out, static_cast<std::int64_t>(c));
        }
    }
    detail::Fnv1a check;
    check.bytes(out.data(), out.size());
    put(out, check.digest());
    write_file_atomic(path, out);
}

CachedSpectra load_spectral_cache(const std::filesystem::path& path, std::optional<std::uint64_t> expected_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCategory::Io, "cannot open spectral cache " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not a spectral cache file", 0);
    }
    {
        detail::Fnv1a check;
        check.bytes(bytes.data(), bytes.size() - 8);
        std::uint64_t stored = 0;
        std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
        if (stored != check.digest()) throw FormatError("spectral cache checksum mismatch (corrupt file)", 0);
    }

    Reader rd(bytes);
    rd.get_string(sizeof(kMagic));
    const auto version = rd.get<std::uint32_t>();
    if (version != kVersion) throw FormatError("unsupported spectral cache version " + std::to_string(version), 0);
    const auto header_len = rd.get<std::uint64_t>();
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(rd.get_string(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("spectral cache header: ") + e.what(), 0);
    }

    SpectralData d;
    Eigen::Index rows = 0, modes = 0;
    std::size_t nv = 0, nf = 0, ns = 0;
    int dim = 0;
    std::string stored_hash;
    bool analytic = false;
    try {
        stored_hash = header.at("mesh_hash").get<std::string>();
        d.scheme = parse_weight_scheme(header.at("scheme").get<std::string>());
        d.bc = parse_boundary_condition(header.at("bc").get<std::string>());
        analytic = header.at("origin").get<std::string>() == "analytic";
        d.residual_tol = header.at("residual_tol").get<double>();
        dim = header.at("dim").get<int>();
        rows = header.at("n_rows").get<Eigen::Index>();
        modes = header.at("n_modes").get<Eigen::Index>();
        nv = header.at("n_vertices").get<std::size_t>();
        nf = header.at("n_faces").get<std::size_t>();
        ns = header.at("n_segments").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("spectral cache header: ") + e.what(), 0);
    }
    if (dim != 1 && dim != 2) throw FormatError("spectral cache has invalid dimension", 0);

    const std::size_t expected = static_cast<std::size_t>(modes) * 8 * (2 + rows) + static_cast<std::size_t>(rows) * 8 +
                                 nv * 24 + (dim == 2 ? nf * 24 : ns * 16) + 8;
    if (rd.remaining() != expected) throw FormatError("spectral cache payload has the wrong size", 0);

    d.eigenvalues.resize(modes);
    for (Eigen::Index k = 0; k < modes; ++k) d.eigenvalues[k] = rd.get<double>();
    d.eigenvectors.resize(rows, modes);
    std::memcpy(d.eigenvectors.data(), bytes.data() + rd.pos(), static_cast<std::size_t>(rows * modes) * 8);
    rd.get_string(static_cast<std::size_t>(rows * modes) * 8);
    d.residuals.resize(static_cast<std::size_t>(modes));
    for (auto& r : d.residuals) r = rd.get<double>();
    d.interior_map.resize(static_cast<std::size_t>(rows));
    for (auto& r : d.interior_map) {
        const auto v = rd.get<std::int64_t>();
        if (v < 0 || static_cast<std::size_t>(v) >= nv) throw FormatError("spectral cache row map out of range", 0);
        r = static_cast<int>(v);
    }
    std::vector<Vec3> verts(nv);
    for (auto& p : verts) {
        p.x() = rd.get<double>();
        p.y() = rd.get<double>();
        p.z() = rd.get<double>();
    }
    auto index = [&]() {
        const auto v = rd.get<std::int64_t>();
        if (v < 0 || static_cast<std::size_t>(v) >= nv) throw FormatError("spectral cache mesh index out of range", 0);
        return static_cast<int>(v);
    };
    std::optional<Mesh> mesh;
    if (dim == 2) {
        std::vector<Face> faces(nf);
        for (auto& f : faces) f = {index(), index(), index()};
        mesh.emplace(Mesh::surface(std::move(verts), std::move(faces)));
    } else {
        std::vector<Edge> segs(ns);
        for (auto& s : segs) s = {index(), index()};
        mesh.emplace(Mesh::polyline(std::move(verts), std::move(segs)));
    }

    d.mesh_hash = spectra_hash(*mesh, d.scheme, d.bc, analytic);
    if (hash_to_hex(d.mesh_hash) != stored_hash) {
        throw Error(ErrorCategory::StaleCache, "spectral cache hash " + stored_hash +
                                                   " does not match its embedded mesh (" + hash_to_hex(d.mesh_hash) +
                                                   ")");
    }
    if (expected_hash && *expected_hash != d.mesh_hash) {
        throw Error(ErrorCategory::StaleCache, "spectral cache " + path.string() + " was computed for mesh " +
                                                   stored_hash + ", expected " + hash_to_hex(*expected_hash));
    }
    d.num_vertices = nv;
    d.dim = dim;
    d.source = SpectralSource::Cache;
    d.row_weights.resize(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) d.row_weights[r] = mesh->vertex_weight(d.interior_map[r]);
    return {std::move(*mesh), std::move(d)};
}

std::string eigenvalues_json(const SpectralData& data) {
    nlohmann::json j = {
        {"mesh_hash", hash_to_hex(data.mesh_hash)},
        {"scheme", to_string(data.scheme)},
        {"bc", to_string(data.bc)},
        {"source", to_string(data.source)},
        {"residual_tol", data.residual_tol},
        {"n_computed", data.n_computed()},
        {"eigenvalues", std::vector<double>(data.eigenvalues.data(), data.eigenvalues.data() + data.n_computed())},
    };
    return j.dump(2) + "\n";
}

}  // namespace fbsurf
