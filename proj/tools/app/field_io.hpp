#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fbsurf/mesh.hpp"
#include "fbsurf/synthesis.hpp"

namespace fbsurf::app {

enum class ExportMode { Scalar, Displace };

ExportMode parse_export_mode(const std::string& text);

using Metadata = std::map<std::string, std::string>;

/// Key/value description of a sample, written as comment lines in CSV and PLY output.
Metadata field_metadata(const FieldSample& field);

/// Curve parameter for CSV output: the x coordinate for meshes on the x-axis,
/// arc length along the polyline otherwise.
std::vector<double> curve_parameter(const Mesh& curve);

void write_field_csv(const std::filesystem::path& path, std::span<const double> t, std::span<const double> values,
                     const Metadata& meta);

/// ASCII PLY with a double `field` vertex property. Displace mode moves each
/// vertex by gain * value along its unit normal; without a gain the default
/// 0.1 * bounding-box diagonal / max |value| is used.
void export_ply(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> values, ExportMode mode,
                std::optional<double> gain, Metadata meta);

struct FieldFile {
    bool is_ply = false;
    Metadata meta;
    std::vector<double> t;                 // CSV only
    std::vector<Vec3> vertices;            // PLY only
    std::vector<Face> faces;               // PLY only
    std::vector<double> values;
};

FieldFile read_field_file(const std::filesystem::path& path);

}  // namespace fbsurf::app
