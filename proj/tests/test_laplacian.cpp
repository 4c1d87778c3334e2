#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fbsurf/laplacian.hpp"
#include "fbsurf/mesh.hpp"
#include "test_util.hpp"

using namespace fbsurf;

namespace {

Mesh unit_square() {
    return Mesh::surface({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

TEST(EdgeWeights, InverseSquareDistance) {
    const Mesh m = unit_square();
    const auto w = edge_weights(m, WeightScheme::InverseSquareDistance);
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        const double len2 = (m.vertex(ed[0]) - m.vertex(ed[1])).squaredNorm();
        EXPECT_DOUBLE_EQ(w[e], 1.0 / len2);
    }
}

TEST(EdgeWeights, CotangentOnSplitSquare) {
    // Sides see a 45 degree angle (cot = 1, weight 1/2); the diagonal sees two right angles.
    const Mesh m = unit_square();
    const auto w = edge_weights(m, WeightScheme::Cotangent);
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
        const Edge& ed = m.edges()[e];
        const bool diagonal = ed == Edge{0, 2};
        EXPECT_NEAR(w[e], diagonal ? 0.0 : 0.5, 1e-15) << ed[0] << "-" << ed[1];
    }
}

TEST(GraphLaplacian, SymmetricWithZeroRowSums) {
    for (auto scheme : {WeightScheme::InverseSquareDistance, WeightScheme::Cotangent}) {
        const Mesh m = generate_disk(5);
        const Eigen::MatrixXd l = Eigen::MatrixXd(graph_laplacian(m, scheme));
        EXPECT_NEAR((l - l.transpose()).cwiseAbs().maxCoeff(), 0.0, 0.0);
        EXPECT_LT(l.rowwise().sum().cwiseAbs().maxCoeff(), 1e-10 * l.cwiseAbs().maxCoeff());
    }
}

TEST(Assemble, IntervalDirichletIsSecondDifference) {
    const int n = 11;
    const Mesh m = generate_interval(n);
    const auto sys = assemble(m, WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet);
    ASSERT_EQ(sys.size(), n - 2);
    EXPECT_EQ(sys.interior_map.front(), 1);
    EXPECT_EQ(sys.row_of_vertex[0], -1);
    EXPECT_EQ(sys.row_of_vertex[n - 1], -1);
    const Eigen::MatrixXd a(sys.matrix);
    for (int i = 0; i < n - 2; ++i) {
        EXPECT_NEAR(a(i, i), 200.0, 1e-9);
        if (i + 1 < n - 2) EXPECT_NEAR(a(i, i + 1), -100.0, 1e-9);
    }
    EXPECT_NEAR(inf_norm(sys.matrix), 400.0, 1e-9);
}

TEST(Assemble, MixedPinsTheFirstEndpoint) {
    const Mesh m = generate_interval(11);
    const auto sys = assemble(m, WeightScheme::InverseSquareDistance, BoundaryCondition::Mixed);
    EXPECT_EQ(sys.size(), 10);
    EXPECT_EQ(sys.row_of_vertex[0], -1);
    EXPECT_GE(sys.row_of_vertex[10], 0);
}

TEST(Assemble, CotangentIsMassNormalized) {
    const Mesh m = generate_interval(11);
    const auto sys = assemble(m, WeightScheme::Cotangent, BoundaryCondition::Dirichlet);
    ASSERT_EQ(sys.nodal_scale.size(), sys.size());
    // Uniform interior weight h: M^-1/2 C M^-1/2 equals the second difference divided by h^2.
    const Eigen::MatrixXd a(sys.matrix);
    EXPECT_NEAR(a(3, 3), 200.0, 1e-9);
    EXPECT_NEAR(a(3, 4), -100.0, 1e-9);
    EXPECT_NEAR(sys.nodal_scale[0], 1.0 / std::sqrt(0.1), 1e-12);
}

TEST(Assemble, ClosedKeepsEveryVertex) {
    const Mesh m = generate_sphere(1);
    const auto sys = assemble(m, WeightScheme::InverseSquareDistance, BoundaryCondition::Closed);
    EXPECT_EQ(static_cast<std::size_t>(sys.size()), m.num_vertices());
    EXPECT_EQ(sys.dim, 2);
}

TEST(Assemble, BoundaryConditionMismatchesAreConfigurationErrors) {
    EXPECT_FBSURF_ERROR(assemble(generate_sphere(1), WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet),
                        ErrorCategory::Configuration);
    EXPECT_FBSURF_ERROR(assemble(generate_disk(4), WeightScheme::InverseSquareDistance, BoundaryCondition::Closed),
                        ErrorCategory::Configuration);
    EXPECT_FBSURF_ERROR(assemble(generate_disk(4), WeightScheme::Cotangent, BoundaryCondition::Mixed),
                        ErrorCategory::Configuration);
}

TEST(SystemHash, DependsOnMeshSchemeAndBc) {
    const Mesh a = generate_interval(21);
    const auto h = system_hash(a, WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet);
    EXPECT_EQ(h, system_hash(generate_interval(21), WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet));
    EXPECT_NE(h, system_hash(a, WeightScheme::Cotangent, BoundaryCondition::Dirichlet));
    EXPECT_NE(h, system_hash(a, WeightScheme::InverseSquareDistance, BoundaryCondition::Mixed));
    EXPECT_NE(h, system_hash(generate_interval(22), WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet));
    EXPECT_EQ(assemble(a, WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet).mesh_hash, h);
}

TEST(Parsing, NamesRoundTrip) {
    for (auto s : {WeightScheme::InverseSquareDistance, WeightScheme::Cotangent}) {
        EXPECT_EQ(parse_weight_scheme(to_string(s)), s);
    }
    for (auto b : {BoundaryCondition::Dirichlet, BoundaryCondition::Closed, BoundaryCondition::Mixed}) {
        EXPECT_EQ(parse_boundary_condition(to_string(b)), b);
    }
    EXPECT_EQ(to_string(WeightScheme::InverseSquareDistance), "invsq");
    EXPECT_FBSURF_ERROR(parse_weight_scheme("umbrella"), ErrorCategory::InvalidParameter);
    EXPECT_FBSURF_ERROR(parse_boundary_condition("neumann"), ErrorCategory::InvalidParameter);
}

TEST(MatrixMarket, ExactRoundTrip) {
    testutil::TempDir dir;
    const auto sys = assemble(generate_disk(4), WeightScheme::Cotangent, BoundaryCondition::Dirichlet);
    write_matrix_market(dir / "a.mtx", sys.matrix);
    const auto text = testutil::slurp(dir / "a.mtx");
    EXPECT_EQ(text.rfind("%%MatrixMarket matrix coordinate real symmetric", 0), 0u);
    const SparseMatrix back = read_matrix_market(dir / "a.mtx");
    EXPECT_EQ(Eigen::MatrixXd(back), Eigen::MatrixXd(sys.matrix));
}

}  // namespace
