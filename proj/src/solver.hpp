#pragma once

#include <memory>
#include <optional>

#include "sparse.hpp"

namespace iopeg {

/// Sparse Cholesky factor of an SPD matrix.
class SpdFactor {
 public:
  explicit SpdFactor(const SparseSymMatrix& m);
  ~SpdFactor();
  SpdFactor(SpdFactor&&) noexcept;
  SpdFactor& operator=(SpdFactor&&) noexcept;

  [[nodiscard]] Index dim() const { return dim_; }
  void solve(std::span<const double> b, std::span<double> x) const;
  [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  Index dim_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// Throws ErrorCode::NotSpd on a non-positive pivot.
SpdFactor factorize_spd(const SparseSymMatrix& m);

enum class PrecondMode { ExactBlock, JacobiBlock, None };

/// blockdiag(M_c, M_0)^{-1} (exact), its diagonal counterpart, or identity.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const SparseSymMatrix& m_c, const SparseSymMatrix& m_0, PrecondMode mode);
  /// Identity preconditioner of the given dimension.
  BlockPreconditioner(Index dim);

  [[nodiscard]] PrecondMode mode() const { return mode_; }
  [[nodiscard]] Index dim() const { return dim_c_ + dim_0_; }
  void apply(std::span<const double> r, std::span<double> z) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> r) const;

 private:
  PrecondMode mode_;
  Index dim_c_ = 0, dim_0_ = 0;
  std::optional<SpdFactor> factor_c_, factor_0_;
  std::vector<double> inv_diag_;
};

BlockPreconditioner build_block_preconditioner(const SparseSymMatrix& m_c,
                                               const SparseSymMatrix& m_0, PrecondMode mode);

struct SolveReport {
  Index iterations = 0;
  /// Preconditioned residual norms ||r||_{P^{-1}}, starting with the initial one.
  std::vector<double> residual_history;
  bool converged = false;
  bool breakdown = false;
  double final_relative_residual = 0.0;
};

struct MinresOptions {
  double tol = 1e-12;
  Index max_iters = 10000;
  /// Reject matrices whose asymmetry exceeds this times max |A_ij|.
  double symmetry_tol = 1e-12;
  /// Null vector of A, if any. The Lanczos residuals are kept orthogonal to
  /// it so rounding cannot pump the iterate along the kernel.
  std::span<const double> kernel = {};
};

/// Preconditioned MINRES (Paige-Saunders recurrences). Stops when the
/// preconditioned residual drops below tol times its initial value.
std::vector<double> minres(const SparseSymMatrix& A, std::span<const double> b,
                           const BlockPreconditioner& P, SolveReport& report,
                           const MinresOptions& options = {},
                           std::span<const double> x0 = {});

/// Removes the component of b along `kernel` (Euclidean), making b exactly
/// consistent for a symmetric matrix whose null space is spanned by kernel.
void project_out(std::vector<double>& b, std::span<const double> kernel);

/// x[begin:] += D^{-1} (b - A x)[begin:] with D the factored diagonal block
/// of A on [begin, dim). Afterwards those residual rows vanish to rounding.
void block_correction(const SparseSymMatrix& A, std::span<const double> b, std::vector<double>& x,
                      Index begin, const SpdFactor& diagonal_block);

struct SpectralBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Index steps = 0;
  bool converged = false;
  [[nodiscard]] double condition() const { return lambda_max / lambda_min; }
};

enum class EigenMethod { Auto, Dense, Lanczos };

struct SpectralOptions {
  EigenMethod method = EigenMethod::Auto;
  /// Krylov dimension cap for Lanczos.
  Index max_steps = 800;
  double tol = 1e-9;
  /// Auto switches to Lanczos above this dimension.
  Index dense_limit = 1200;
  unsigned seed = 12345;
};

/// Extreme eigenvalues of A x = lambda A_tilde x on the A_tilde-orthogonal
/// complement of `kernel` (A kernel = 0, A_tilde SPD).
SpectralBounds spectral_equivalence(const SparseSymMatrix& A, const SparseSymMatrix& A_tilde,
                                    std::span<const double> kernel,
                                    const SpectralOptions& options = {});

/// blockdiag(M_c, M_0) as one matrix.
SparseSymMatrix block_diagonal(const SparseSymMatrix& m_c, const SparseSymMatrix& m_0);

}  // namespace iopeg
