#include <cmath>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "app/app.hpp"
#include "app/field_io.hpp"
#include "fbsurf/error.hpp"
#include "fbsurf/mesh.hpp"
#include "test_util.hpp"

using fbsurf::ErrorCategory;
using fbsurf::exit_code;
using testutil::TempDir;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = fbsurf::app::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string field_of(const std::string& text, const std::string& key) {
    const std::regex re(key + "=([^ \n]+)");
    std::smatch m;
    return std::regex_search(text, m, re) ? m[1].str() : std::string();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#' || line == "t,value") continue;
        const auto comma = line.find(',');
        rows.push_back({line.substr(0, comma), line.substr(comma + 1)});
    }
    return rows;
}

TEST(Cli, MeshThenEigsKeepsTheMeshHash) {
    TempDir dir;
    const auto mesh = cli({"mesh", "--shape", "disk-holes", "--params", "rings=10", "--out", (dir / "d.off").string()});
    ASSERT_EQ(mesh.code, 0) << mesh.err;
    const auto eigs = cli({"eigs", "--mesh", (dir / "d.off").string(), "--n-modes", "6", "--cache",
                           (dir / "d.fbs").string()});
    ASSERT_EQ(eigs.code, 0) << eigs.err;
    EXPECT_EQ(field_of(mesh.out, "mesh_hash"), field_of(eigs.out, "mesh_hash"));
    EXPECT_EQ(field_of(eigs.out, "source"), "iterative-solver");
    EXPECT_EQ(field_of(eigs.out, "bc"), "dirichlet");
    const auto again = cli({"eigs", "--mesh", (dir / "d.off").string(), "--n-modes", "4", "--cache",
                            (dir / "d.fbs").string()});
    EXPECT_EQ(field_of(again.out, "source"), "cache");
    const auto tighter = cli({"eigs", "--mesh", (dir / "d.off").string(), "--n-modes", "4", "--tol", "1e-12",
                              "--cache", (dir / "d.fbs").string()});
    EXPECT_EQ(field_of(tighter.out, "source"), "iterative-solver");
}

TEST(Cli, EigsWritesJsonAndMatrixMarket) {
    TempDir dir;
    const auto r = cli({"eigs", "--shape", "sphere", "--params", "subdivisions=1", "--n-modes", "4", "--cache",
                        (dir / "s.fbs").string(), "--eigenvalues-json", (dir / "e.json").string(), "--matrix-market",
                        (dir / "a.mtx").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(field_of(r.out, "bc"), "closed");
    EXPECT_NE(testutil::slurp(dir / "e.json").find("\"eigenvalues\""), std::string::npos);
    EXPECT_EQ(testutil::slurp(dir / "a.mtx").rfind("%%MatrixMarket", 0), 0u);
}

TEST(Cli, BridgeCsvIsPinnedAtBothEnds) {
    TempDir dir;
    const auto r = cli({"synth", "--shape", "interval", "--params", "n=101", "--analytic", "dirichlet", "--alpha",
                        "0.5", "--n-terms", "500", "--seed", "42", "--out", (dir / "b.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(field_of(r.out, "source"), "analytic");
    const auto rows = csv_rows(testutil::slurp(dir / "b.csv"));
    ASSERT_EQ(rows.size(), 101u);
    EXPECT_EQ(rows.front()[0], "0");
    EXPECT_EQ(rows.front()[1], "0");
    EXPECT_EQ(rows.back()[0], "1");
    EXPECT_EQ(rows.back()[1], "0");
}

TEST(Cli, SphereRieszPlyVanishesAtOrigin) {
    TempDir dir;
    const auto out = dir / "s.ply";
    const auto r = cli({"synth", "--shape", "sphere", "--params", "subdivisions=3", "--alpha", "0.9", "--n-terms", "20",
                        "--origin", "0", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ff = fbsurf::app::read_field_file(out);
    ASSERT_EQ(ff.values.size(), 642u);
    EXPECT_EQ(ff.values[0], 0.0);
    EXPECT_EQ(ff.faces.size(), 1280u);
    EXPECT_EQ(ff.meta.at("origin"), "0");
    EXPECT_EQ(ff.meta.at("export"), "scalar");
}

TEST(Cli, IdenticalInvocationsAreByteIdentical) {
    TempDir dir;
    for (const char* name : {"a.ply", "b.ply"}) {
        const auto r = cli({"synth", "--shape", "disk", "--params", "rings=8", "--alpha", "0.3", "--n-terms", "15",
                            "--seed", "9", "--export", "displace", "--out", (dir / name).string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    EXPECT_EQ(testutil::slurp(dir / "a.ply"), testutil::slurp(dir / "b.ply"));
}

TEST(Cli, SecondSynthReusesTheCache) {
    TempDir dir;
    const std::vector<std::string> args = {"synth", "--shape", "cylinder", "--params", "n_circ=12", "--alpha", "0.5",
                                           "--n-terms", "8", "--cache", (dir / "c.fbs").string(), "--out",
                                           (dir / "c.ply").string()};
    const auto first = cli(args);
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_EQ(field_of(first.out, "source"), "iterative-solver");
    const std::string bytes = testutil::slurp(dir / "c.ply");
    const auto second = cli(args);
    EXPECT_EQ(field_of(second.out, "source"), "cache");
    EXPECT_EQ(testutil::slurp(dir / "c.ply"), bytes);
    const auto from_cache = cli({"synth", "--cache", (dir / "c.fbs").string(), "--alpha", "0.5", "--n-terms", "8",
                                 "--out", (dir / "d.ply").string()});
    ASSERT_EQ(from_cache.code, 0) << from_cache.err;
    EXPECT_EQ(testutil::slurp(dir / "d.ply"), bytes);
}

TEST(Cli, RescaleCsvMultipliesAndRoundTrips) {
    TempDir dir;
    ASSERT_EQ(cli({"synth", "--shape", "interval", "--analytic", "mixed", "--alpha", "0.5", "--n-terms", "100", "--seed",
                   "1", "--out", (dir / "f.csv").string()})
                  .code,
              0);
    ASSERT_EQ(cli({"rescale", "--in", (dir / "f.csv").string(), "--c", "2", "--alpha", "0.5", "--out",
                   (dir / "g.csv").string()})
                  .code,
              0);
    ASSERT_EQ(cli({"rescale", "--in", (dir / "g.csv").string(), "--c", "0.5", "--out", (dir / "h.csv").string()}).code,
              0);
    const auto f = fbsurf::app::read_field_file(dir / "f.csv");
    const auto g = fbsurf::app::read_field_file(dir / "g.csv");
    const auto h = fbsurf::app::read_field_file(dir / "h.csv");
    const double factor = std::pow(2.0, 0.5);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        EXPECT_EQ(g.values[i], f.values[i] * factor);
        EXPECT_EQ(g.t[i], 2.0 * f.t[i]);
        EXPECT_LE(std::abs(h.values[i] - f.values[i]),
                  std::abs(std::nextafter(f.values[i], INFINITY) - f.values[i]));
    }
    EXPECT_EQ(g.meta.at("scale"), "2");
    EXPECT_EQ(h.meta.at("scale"), "1");
    const auto mismatch = cli({"rescale", "--in", (dir / "f.csv").string(), "--c", "2", "--alpha", "0.7", "--out",
                               (dir / "x.csv").string()});
    EXPECT_EQ(mismatch.code, exit_code(ErrorCategory::Configuration));
}

TEST(Cli, DisplacedPlyCannotBeRescaled) {
    TempDir dir;
    ASSERT_EQ(cli({"synth", "--shape", "disk", "--params", "rings=4", "--alpha", "0.5", "--n-terms", "5", "--export",
                   "displace", "--out", (dir / "d.ply").string()})
                  .code,
              0);
    const auto r = cli({"rescale", "--in", (dir / "d.ply").string(), "--c", "2", "--out", (dir / "e.ply").string()});
    EXPECT_EQ(r.code, exit_code(ErrorCategory::Configuration));
    EXPECT_NE(r.err.find("configuration-error"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "e.ply"));
}

TEST(Cli, ConfigFileSuppliesFlagsAndCommandLineOverrides) {
    TempDir dir;
    testutil::spit(dir / "run.toml", "shape = \"interval\"\nparams = [\"n=31\"]\nanalytic = \"dirichlet\"\n"
                                     "alpha = 0.5\nn-terms = 30\nseed = 3\n");
    const auto a = cli({"synth", "--config", (dir / "run.toml").string(), "--out", (dir / "a.csv").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(field_of(a.out, "seed"), "3");
    const auto b = cli({"synth", "--config", (dir / "run.toml").string(), "--seed", "4", "--out",
                        (dir / "b.csv").string()});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(field_of(b.out, "seed"), "4");
    EXPECT_NE(testutil::slurp(dir / "a.csv"), testutil::slurp(dir / "b.csv"));
}

TEST(Cli, ErrorsCarryCategoryAndExitCode) {
    TempDir dir;
    const auto unknown = cli({"synth", "--bogus"});
    EXPECT_EQ(unknown.code, exit_code(ErrorCategory::Configuration));
    const auto missing = cli({"eigs", "--mesh", (dir / "none.off").string(), "--n-modes", "3", "--cache",
                              (dir / "x.fbs").string()});
    EXPECT_EQ(missing.code, exit_code(ErrorCategory::Io));
    EXPECT_NE(missing.err.find("io-error"), std::string::npos);
    const auto curve_displace = cli({"synth", "--shape", "interval", "--analytic", "dirichlet", "--alpha", "0.5",
                                     "--n-terms", "5", "--export", "displace", "--out", (dir / "c.csv").string()});
    EXPECT_EQ(curve_displace.code, exit_code(ErrorCategory::Configuration));
    const auto bad_alpha = cli({"synth", "--shape", "interval", "--analytic", "dirichlet", "--alpha", "1.2",
                                "--n-terms", "5", "--out", (dir / "c.csv").string()});
    EXPECT_EQ(bad_alpha.code, exit_code(ErrorCategory::InvalidParameter));
    const auto riesz_on_disk = cli({"synth", "--shape", "disk", "--params", "rings=4", "--alpha", "0.5", "--n-terms",
                                    "4", "--origin", "0", "--out", (dir / "d.ply").string()});
    EXPECT_EQ(riesz_on_disk.code, exit_code(ErrorCategory::Configuration));
    const auto bad_param = cli({"mesh", "--shape", "sphere", "--params", "rings=3", "--out", (dir / "s.off").string()});
    EXPECT_EQ(bad_param.code, exit_code(ErrorCategory::Configuration));
    const auto both = cli({"eigs", "--shape", "sphere", "--mesh", "x.off", "--n-modes", "3", "--cache", "x.fbs"});
    EXPECT_EQ(both.code, exit_code(ErrorCategory::Configuration));
    EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, StaleCacheIsRecomputed) {
    TempDir dir;
    const auto cache = (dir / "s.fbs").string();
    ASSERT_EQ(cli({"eigs", "--shape", "sphere", "--params", "subdivisions=1", "--n-modes", "4", "--cache", cache}).code, 0);
    const auto r = cli({"eigs", "--shape", "sphere", "--params", "subdivisions=2", "--n-modes", "4", "--cache", cache});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(field_of(r.out, "source"), "iterative-solver");
    EXPECT_NE(r.err.find("stale-cache"), std::string::npos);
}

TEST(Cli, VerifyWritesReportAndSignalsFailure) {
    TempDir dir;
    const auto ok = cli({"verify", "--check", "sphere-clusters", "--subdivisions", "3", "--report",
                         (dir / "r.json").string()});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(testutil::slurp(dir / "r.json").find("\"passed\": true"), std::string::npos);
    const auto strict = cli({"verify", "--check", "weyl-tail", "--domain", "sphere", "--subdivisions", "2",
                             "--n-modes", "41", "--tolerance", "1e-6", "--report", (dir / "w.json").string()});
    EXPECT_EQ(strict.code, exit_code(ErrorCategory::VerificationFailed));
    EXPECT_NE(testutil::slurp(dir / "w.json").find("\"passed\": false"), std::string::npos);
    const auto unknown = cli({"verify", "--check", "holder", "--report", (dir / "x.json").string()});
    EXPECT_EQ(unknown.code, exit_code(ErrorCategory::Configuration));
}

class ExportPly : public ::testing::Test {
protected:
    TempDir dir;
    fbsurf::Mesh mesh = fbsurf::generate_sphere(1);
};

TEST_F(ExportPly, ZeroFieldOrZeroGainLeavesPositions) {
    const std::vector<double> zero(mesh.num_vertices(), 0.0);
    const std::vector<double> ones(mesh.num_vertices(), 1.0);
    using fbsurf::app::ExportMode;
    fbsurf::app::export_ply(dir / "z.ply", mesh, zero, ExportMode::Displace, std::nullopt, {});
    fbsurf::app::export_ply(dir / "g.ply", mesh, ones, ExportMode::Displace, 0.0, {});
    for (const char* name : {"z.ply", "g.ply"}) {
        const auto ff = fbsurf::app::read_field_file(dir / name);
        ASSERT_EQ(ff.vertices.size(), mesh.num_vertices());
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) EXPECT_EQ(ff.vertices[i], mesh.vertex(i)) << name;
    }
}

TEST_F(ExportPly, ScalarKeepsStructureAndDisplaceMovesAlongNormals) {
    std::vector<double> f(mesh.num_vertices());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = mesh.vertex(i).z();
    using fbsurf::app::ExportMode;
    fbsurf::app::export_ply(dir / "s.ply", mesh, f, ExportMode::Scalar, std::nullopt, {});
    const auto s = fbsurf::app::read_field_file(dir / "s.ply");
    EXPECT_EQ(s.vertices.size(), mesh.num_vertices());
    EXPECT_EQ(s.faces.size(), mesh.num_faces());
    EXPECT_EQ(s.values, f);
    fbsurf::app::export_ply(dir / "d.ply", mesh, f, ExportMode::Displace, std::nullopt, {});
    const auto d = fbsurf::app::read_field_file(dir / "d.ply");
    const double gain = std::stod(d.meta.at("gain"));
    double peak = 0.0;
    for (double v : f) peak = std::max(peak, std::abs(v));
    EXPECT_NEAR(gain, 0.1 * mesh.bounding_box_diagonal() / peak, 1e-12);
    const auto normals = mesh.vertex_normals();
    for (std::size_t i = 0; i < f.size(); ++i) {
        EXPECT_NEAR((d.vertices[i] - (mesh.vertex(i) + gain * f[i] * normals[i])).norm(), 0.0, 1e-14);
    }
    EXPECT_FBSURF_ERROR(fbsurf::app::export_ply(dir / "c.ply", fbsurf::generate_interval(5),
                                                std::vector<double>(5, 0.0), ExportMode::Displace, std::nullopt, {}),
                        ErrorCategory::Configuration);
}

}  // namespace
