#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <tuple>

#include "dense.hpp"
#include "oracle.hpp"

using namespace iopeg;
using testing_util::dense;

namespace {

ModelProblem problem_with(double kappa0) {
  ModelProblem p;
  p.kappa0 = kappa0;
  return p;
}

double max_abs_diff(const Eigen::MatrixXd& a, const std::vector<double>& b_rowmajor) {
  double m = 0.0;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m = std::max(m, std::abs(a(i, j) - b_rowmajor[i * n + j]));
  return m;
}

}  // namespace

// (k, alpha, kappa0)
class AssemblyCase : public ::testing::TestWithParam<std::tuple<int, double, double>> {
 protected:
  int k() const { return std::get<0>(GetParam()); }
  double alpha() const { return std::get<1>(GetParam()); }
  double kappa0() const { return std::get<2>(GetParam()); }
};

TEST_P(AssemblyCase, MatchesTermByTermOracleOnTwoByTwoMesh) {
  const TriMesh mesh = build_structured_mesh(2);
  const EGSpace space(mesh, k());
  const PenaltyParams pen(10.0, alpha());
  const auto A = assemble_matrix(mesh, space, problem_with(kappa0()), pen);
  const auto ref = oracle::bilinear_form(mesh, k(), kappa0(), 10.0, 10.0, alpha());
  EXPECT_LE(max_abs_diff(dense(A), ref), 1e-12);
}

TEST_P(AssemblyCase, BlocksAreDiagonalRestrictions) {
  const TriMesh mesh = build_structured_mesh(3);
  const EGSpace space(mesh, k());
  const PenaltyParams pen(10.0, alpha());
  const ModelProblem prob = problem_with(kappa0());
  const Eigen::MatrixXd A = dense(assemble_matrix(mesh, space, prob, pen));
  const Eigen::MatrixXd Mc = dense(assemble_matrix(mesh, space, prob, pen, Block::Continuous));
  const Eigen::MatrixXd M0 = dense(assemble_matrix(mesh, space, prob, pen, Block::Constant));
  const Index nc = space.cont().ndofs(), n0 = space.constants().ndofs();
  const double scale = A.cwiseAbs().maxCoeff();
  EXPECT_LE((A.topLeftCorner(nc, nc) - Mc).cwiseAbs().maxCoeff(), 1e-13 * scale);
  EXPECT_LE((A.bottomRightCorner(n0, n0) - M0).cwiseAbs().maxCoeff(), 1e-13 * scale);
}

TEST_P(AssemblyCase, SymmetricWithKernelAndPositiveSemidefinite) {
  const TriMesh mesh = build_structured_mesh(4);
  const EGSpace space(mesh, k());
  const auto A = assemble_matrix(mesh, space, problem_with(kappa0()), PenaltyParams(10.0, alpha()));
  const double scale = A.max_abs();
  EXPECT_LE(A.max_asymmetry(), 1e-12 * scale);

  const auto kernel = space.kernel_vector();
  const auto Ak = A.multiply(kernel);
  double worst = 0.0;
  for (double v : Ak) worst = std::max(worst, std::abs(v));
  EXPECT_LE(worst, 1e-12 * scale);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(A), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  EXPECT_GE(ev(0), -1e-11 * scale);
  // Exactly one zero eigenvalue.
  EXPECT_GT(ev(1), 1e-8 * ev(ev.size() - 1));
}

INSTANTIATE_TEST_SUITE_P(Grid, AssemblyCase,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(0.0, 1.0, 2.0),
                                            ::testing::Values(1.0, 10.0)));

class LoadVector : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(LoadVector, MatchesOracleWithMixedBoundary) {
  const auto [k, kappa0] = GetParam();
  ModelProblem prob;
  prob.kappa0 = kappa0;
  prob.f = [](const Vec2& x) { return 1.0 + x[0] - 2.0 * x[1]; };
  prob.u_D = [](const Vec2& x) { return x[0] * x[1] + 0.5 * x[1] * x[1]; };
  prob.u_N = [](const Vec2& x) { return 2.0 - x[1]; };
  prob.dirichlet_region = [](const Vec2& x) { return x[0] < 1.0 - 1e-12; };
  const TriMesh mesh = apply_boundary(build_structured_mesh(2), prob);
  const EGSpace space(mesh, k);
  const PenaltyParams pen(10.0, 1.0);
  const auto b = assemble_rhs(mesh, space, prob, pen);
  const auto ref = oracle::load_vector(mesh, k, kappa0, 10.0, prob.f, prob.u_D, prob.u_N);
  ASSERT_EQ(b.size(), ref.size());
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(b[i], ref[i], 1e-12) << "dof " << i;

  // Neumann facets drop out of the matrix as well.
  const auto A = assemble_matrix(mesh, space, prob, pen);
  EXPECT_LE(max_abs_diff(dense(A), oracle::bilinear_form(mesh, k, kappa0, 10.0, 10.0, 1.0)),
            1e-12);
}

INSTANTIATE_TEST_SUITE_P(Grid, LoadVector,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(1.0, 10.0)));

// With u = x in the discrete space, A u_I = F holds exactly (consistency).
TEST(Assembly, GalerkinConsistencyForLinearSolution) {
  for (int k : {1, 2}) {
    ModelProblem prob;
    prob.kappa0 = 3.0;
    prob.u_D = [](const Vec2& x) { return x[0] - 0.25 * x[1]; };
    const TriMesh mesh = build_structured_mesh(4);
    const EGSpace space(mesh, k);
    const PenaltyParams pen(10.0, 1.0);
    const auto A = assemble_matrix(mesh, space, prob, pen);
    const auto b = assemble_rhs(mesh, space, prob, pen);
    std::vector<double> u(space.total_ndofs(), 0.0);
    const auto uc = interpolate(space.cont(), prob.u_D);
    std::copy(uc.begin(), uc.end(), u.begin());
    const auto Au = A.multiply(u);
    for (std::size_t i = 0; i < b.size(); ++i)
      EXPECT_NEAR(Au[i], b[i], 1e-10 * A.max_abs()) << "k=" << k << " dof " << i;
  }
}

TEST(Assembly, JumpAndAverageConventions) {
  const Vec2 n{0.6, 0.8};
  const ScalarJump s = jump_avg(3.0, 1.0, n);
  EXPECT_DOUBLE_EQ(s.jump[0], 2.0 * 0.6);
  EXPECT_DOUBLE_EQ(s.jump[1], 2.0 * 0.8);
  EXPECT_DOUBLE_EQ(s.average, 2.0);
  const ScalarJump b = jump_avg(3.0, std::nullopt, n);
  EXPECT_DOUBLE_EQ(b.average, 3.0);
  EXPECT_DOUBLE_EQ(b.jump[0], 3.0 * 0.6);
  const VectorJump v = jump_avg(Vec2{1.0, 2.0}, Vec2{0.0, 1.0}, n);
  EXPECT_DOUBLE_EQ(v.jump, 0.6 * 1.0 + 0.8 * 1.0);
  EXPECT_DOUBLE_EQ(v.average[0], 0.5);
  EXPECT_DOUBLE_EQ(v.average[1], 1.5);
}

TEST(Assembly, RejectsInvalidParameters) {
  EXPECT_THROW(PenaltyParams(0.0, 1.0).validate(), Error);
  EXPECT_THROW(PenaltyParams(10.0, -1.0).validate(), Error);
  EXPECT_THROW(problem_with(0.0).validate(), Error);
}

TEST(ManufacturedSolution, SourceIsMinusDivergenceOfFlux) {
  for (double kappa0 : {1.0, 10.0}) {
    const ManufacturedSolution ms{kappa0};
    const double h = 1e-4;
    for (const Vec2 x : {Vec2{0.3, 0.4}, Vec2{0.7, 0.15}}) {
      const double dxx =
          (ms.u({x[0] + h, x[1]}) - 2 * ms.u(x) + ms.u({x[0] - h, x[1]})) / (h * h);
      const double dyy =
          (ms.u({x[0], x[1] + h}) - 2 * ms.u(x) + ms.u({x[0], x[1] - h})) / (h * h);
      EXPECT_NEAR(ms.f(x), -(kappa0 * dxx + dyy), 1e-5 * kappa0);
      const Vec2 g = ms.grad(x);
      EXPECT_NEAR(g[0], (ms.u({x[0] + h, x[1]}) - ms.u({x[0] - h, x[1]})) / (2 * h), 1e-7);
      EXPECT_NEAR(g[1], (ms.u({x[0], x[1] + h}) - ms.u({x[0], x[1] - h})) / (2 * h), 1e-7);
    }
    EXPECT_NEAR(ms.u({0.0, 0.5}), 0.0, 1e-15);
    EXPECT_NEAR(ms.u({0.5, 1.0}), 0.0, 1e-15);
  }
}
