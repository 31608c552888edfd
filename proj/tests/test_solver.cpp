#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "dense.hpp"
#include "solver.hpp"

using namespace iopeg;
using testing_util::dense;
using testing_util::laplacian_1d;
using testing_util::random_vector;

namespace {

struct EGSystem {
  TriMesh mesh;
  EGSpace space;
  SparseSymMatrix A, Mc, M0;
  std::vector<double> b, kernel;

  EGSystem(Index n, int k, double alpha, double kappa0 = 1.0)
      : mesh(build_structured_mesh(n)), space(mesh, k) {
    const ManufacturedSolution ms{kappa0};
    const ModelProblem prob = ms.problem();
    const PenaltyParams pen(10.0, alpha);
    A = assemble_matrix(mesh, space, prob, pen);
    Mc = assemble_matrix(mesh, space, prob, pen, Block::Continuous);
    M0 = assemble_matrix(mesh, space, prob, pen, Block::Constant);
    b = assemble_rhs(mesh, space, prob, pen);
    kernel = space.kernel_vector();
    project_out(b, kernel);
  }
};

double residual_norm(const SparseSymMatrix& A, std::span<const double> x, std::span<const double> b) {
  auto r = A.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r);
}

}  // namespace

TEST(SpdFactor, SolvesTridiagonalSystem) {
  const auto L = laplacian_1d(50);
  const auto x_true = random_vector(50, 1);
  const auto b = L.multiply(x_true);
  const auto x = factorize_spd(L).solve(b);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], x_true[i], 1e-11);
}

TEST(SpdFactor, IndefiniteMatrixIsRejected) {
  auto L = laplacian_1d(5);
  for (auto& v : L.values()) v = -v;
  try {
    factorize_spd(L);
    FAIL() << "expected NotSpd";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSpd);
  }
}

TEST(Minres, AgreesWithDirectSolveOnSpdSystem) {
  const auto L = laplacian_1d(80);
  const auto b = random_vector(80, 2);
  SolveReport rep;
  const auto x = minres(L, b, BlockPreconditioner(80), rep, {1e-13, 1000});
  const auto xd = factorize_spd(L).solve(b);
  ASSERT_TRUE(rep.converged);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], xd[i], 1e-9);
}

TEST(Minres, IndefiniteSymmetricSystem) {
  std::vector<Index> rp{0}, cols;
  std::vector<double> vals;
  const double diag[6] = {4, -3, 2, -1, 5, -2};
  for (Index i = 0; i < 6; ++i) {
    for (Index j = std::max<Index>(0, i - 1); j <= std::min<Index>(5, i + 1); ++j) {
      cols.push_back(j);
      vals.push_back(i == j ? diag[i] : 0.5);
    }
    rp.push_back(static_cast<Index>(cols.size()));
  }
  const auto A = SparseSymMatrix::from_csr(6, rp, cols, vals);
  const auto b = random_vector(6, 3);
  SolveReport rep;
  const auto x = minres(A, b, BlockPreconditioner(6), rep, {1e-14, 100});
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(residual_norm(A, x, b), 1e-12);
}

class EGMinres : public ::testing::TestWithParam<std::tuple<int, double, PrecondMode>> {};

TEST_P(EGMinres, ConsistentSingularSystemConvergesWithMonotoneResiduals) {
  const auto [k, alpha, mode] = GetParam();
  EGSystem sys(6, k, alpha);
  const auto P = build_block_preconditioner(sys.Mc, sys.M0, mode);
  SolveReport rep;
  MinresOptions opt;
  opt.tol = 1e-11;
  opt.kernel = sys.kernel;
  const auto x = minres(sys.A, sys.b, P, rep, opt);
  ASSERT_TRUE(rep.converged);
  EXPECT_EQ(rep.residual_history.size(), static_cast<std::size_t>(rep.iterations) + 1);
  for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
    EXPECT_LE(rep.residual_history[i], rep.residual_history[i - 1] * (1.0 + 1e-12)) << "step " << i;
  EXPECT_LE(residual_norm(sys.A, x, sys.b), 1e-7 * norm2(sys.b));
}

INSTANTIATE_TEST_SUITE_P(Modes, EGMinres,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(0.0, 1.0, 2.0),
                                            ::testing::Values(PrecondMode::ExactBlock,
                                                              PrecondMode::JacobiBlock)));

TEST(Minres, SolutionIsUniqueUpToTheKernel) {
  EGSystem sys(5, 1, 1.0);
  const auto P = build_block_preconditioner(sys.Mc, sys.M0, PrecondMode::ExactBlock);
  MinresOptions opt;
  opt.tol = 1e-13;
  opt.kernel = sys.kernel;
  SolveReport r1, r2;
  const auto x1 = minres(sys.A, sys.b, P, r1, opt);
  std::vector<double> start(sys.kernel);
  for (auto& v : start) v *= 3.0;
  const auto x2 = minres(sys.A, sys.b, P, r2, opt, start);
  // The difference is a multiple of the kernel vector.
  const double c = (x2[0] - x1[0]);
  for (std::size_t i = 0; i < x1.size(); ++i)
    EXPECT_NEAR(x2[i] - x1[i], c * sys.kernel[i], 1e-8) << "dof " << i;
}

TEST(Minres, InterpolantOfInSpaceSolutionIsRecovered) {
  for (int k : {1, 2}) {
    const TriMesh mesh = build_structured_mesh(6);
    const EGSpace space(mesh, k);
    const PenaltyParams pen(10.0, 1.0);
    ModelProblem prob;
    prob.kappa0 = 2.0;
    const ScalarFn u = k == 1 ? ScalarFn([](const Vec2& x) { return 1.0 + x[0] - 2.0 * x[1]; })
                              : ScalarFn([](const Vec2& x) { return x[0] * x[0] - x[0] * x[1]; });
    prob.u_D = u;
    // -div(kappa grad u): zero for the linear case, -(2 kappa0) for x^2 - xy.
    prob.f = k == 1 ? ScalarFn([](const Vec2&) { return 0.0; })
                    : ScalarFn([](const Vec2&) { return -4.0; });
    const auto A = assemble_matrix(mesh, space, prob, pen);
    auto b = assemble_rhs(mesh, space, prob, pen);
    const auto kernel = space.kernel_vector();
    project_out(b, kernel);
    const auto P = build_block_preconditioner(
        assemble_matrix(mesh, space, prob, pen, Block::Continuous),
        assemble_matrix(mesh, space, prob, pen, Block::Constant), PrecondMode::ExactBlock);
    SolveReport rep;
    MinresOptions opt;
    opt.tol = 1e-14;
    opt.kernel = kernel;
    auto x = minres(A, b, P, rep, opt);
    // Remove the kernel component so the constants vanish.
    const double shift = x[space.const_offset()];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += shift * kernel[i];
    const auto ui = interpolate(space.cont(), u);
    for (Index i = 0; i < space.cont().ndofs(); ++i) EXPECT_NEAR(x[i], ui[i], 1e-10) << "k=" << k;
    for (Index i = space.const_offset(); i < space.total_ndofs(); ++i) EXPECT_NEAR(x[i], 0.0, 1e-10);
  }
}

TEST(Minres, StopsAtIterationCap) {
  EGSystem sys(8, 1, 0.0);
  const auto P = build_block_preconditioner(sys.Mc, sys.M0, PrecondMode::ExactBlock);
  SolveReport rep;
  MinresOptions opt;
  opt.max_iters = 3;
  opt.kernel = sys.kernel;
  minres(sys.A, sys.b, P, rep, opt);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 3);
}

TEST(Minres, RejectsAsymmetricMatrix) {
  auto L = laplacian_1d(4);
  L.values()[1] = -1.5;  // entry (0, 1)
  SolveReport rep;
  try {
    minres(L, std::vector<double>(4, 1.0), BlockPreconditioner(4), rep);
    FAIL() << "expected NotSymmetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Minres, RejectsDimensionMismatch) {
  SolveReport rep;
  EXPECT_THROW(minres(laplacian_1d(4), std::vector<double>(3, 1.0), BlockPreconditioner(4), rep),
               Error);
}

TEST(Minres, ZeroRightHandSideReturnsZero) {
  SolveReport rep;
  const auto x = minres(laplacian_1d(5), std::vector<double>(5, 0.0), BlockPreconditioner(5), rep);
  EXPECT_TRUE(rep.converged);
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(BlockPreconditioner, IsSymmetricPositiveDefinite) {
  EGSystem sys(4, 2, 1.0);
  for (PrecondMode mode : {PrecondMode::ExactBlock, PrecondMode::JacobiBlock, PrecondMode::None}) {
    const auto P = build_block_preconditioner(sys.Mc, sys.M0, mode);
    const auto r1 = random_vector(sys.A.dim(), 4), r2 = random_vector(sys.A.dim(), 5);
    const auto z1 = P.apply(r1), z2 = P.apply(r2);
    const double a = dot(z1, r2), b = dot(r1, z2);
    EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
    EXPECT_GT(dot(z1, r1), 0.0);
  }
}

TEST(BlockPreconditioner, ExactBlockInvertsBlockDiagonal) {
  EGSystem sys(4, 1, 1.0);
  const auto D = block_diagonal(sys.Mc, sys.M0);
  const auto P = build_block_preconditioner(sys.Mc, sys.M0, PrecondMode::ExactBlock);
  const auto r = random_vector(D.dim(), 6);
  const auto back = D.multiply(P.apply(r));
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(back[i], r[i], 1e-9);
}

TEST(BlockDiagonal, PlacesBlocksAndDropsCoupling) {
  EGSystem sys(3, 1, 1.0);
  const auto D = dense(block_diagonal(sys.Mc, sys.M0));
  const Index nc = sys.Mc.dim();
  EXPECT_EQ(D.rows(), sys.A.dim());
  EXPECT_EQ((D.topLeftCorner(nc, nc) - dense(sys.Mc)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((D.bottomRightCorner(sys.M0.dim(), sys.M0.dim()) - dense(sys.M0)).cwiseAbs().maxCoeff(),
            0.0);
  EXPECT_EQ(D.topRightCorner(nc, sys.M0.dim()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BlockCorrection, ZeroesTheConstantRowsOfTheResidual) {
  EGSystem sys(5, 1, 2.0);
  std::vector<double> x = random_vector(sys.A.dim(), 7);
  block_correction(sys.A, sys.b, x, sys.space.const_offset(), factorize_spd(sys.M0));
  auto r = sys.A.multiply(x);
  for (Index i = sys.space.const_offset(); i < sys.A.dim(); ++i)
    EXPECT_NEAR(r[i] - sys.b[i], 0.0, 1e-10 * sys.A.max_abs());
}

TEST(ProjectOut, RemovesKernelComponent) {
  std::vector<double> kernel{1, 1, -1}, b{1, 2, 3};
  project_out(b, kernel);
  EXPECT_NEAR(b[0] + b[1] - b[2], 0.0, 1e-15);
}

TEST(SpectralEquivalence, DenseAndLanczosAgree) {
  for (int k : {1, 2})
    for (double alpha : {0.0, 1.0}) {
      EGSystem sys(4, k, alpha);
      const auto Atil = block_diagonal(sys.Mc, sys.M0);
      SpectralOptions dense_opt, lanczos_opt;
      dense_opt.method = EigenMethod::Dense;
      lanczos_opt.method = EigenMethod::Lanczos;
      const auto d = spectral_equivalence(sys.A, Atil, sys.kernel, dense_opt);
      const auto l = spectral_equivalence(sys.A, Atil, sys.kernel, lanczos_opt);
      EXPECT_TRUE(l.converged);
      EXPECT_NEAR(l.lambda_min, d.lambda_min, 1e-6 * d.lambda_min) << "k=" << k << " a=" << alpha;
      EXPECT_NEAR(l.lambda_max, d.lambda_max, 1e-6 * d.lambda_max);
      // A = Atil + off-diagonal coupling of a PSD form: eigenvalues lie in (0, 2].
      EXPECT_GT(d.lambda_min, 0.0);
      EXPECT_LE(d.lambda_max, 2.0 + 1e-10);
    }
}
