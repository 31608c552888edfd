#include "solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <limits>
#include <random>

namespace iopeg {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, long>;

EigenSparse to_eigen(const SparseSymMatrix& m) {
  // CSR of a symmetric matrix is the CSC of its transpose, i.e. itself.
  std::vector<Eigen::Triplet<double, long>> trips;
  trips.reserve(static_cast<std::size_t>(m.nnz()));
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (Index r = 0; r < m.dim(); ++r)
    for (Index p = rp[static_cast<std::size_t>(r)]; p < rp[static_cast<std::size_t>(r) + 1]; ++p)
      trips.emplace_back(r, ci[static_cast<std::size_t>(p)], v[static_cast<std::size_t>(p)]);
  EigenSparse e(m.dim(), m.dim());
  e.setFromTriplets(trips.begin(), trips.end());
  return e;
}

Eigen::MatrixXd to_dense(const SparseSymMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.dim(), m.dim());
  const auto& rp = m.row_offsets();
  const auto& ci = m.column_indices();
  const auto& v = m.values();
  for (Index r = 0; r < m.dim(); ++r)
    for (Index p = rp[static_cast<std::size_t>(r)]; p < rp[static_cast<std::size_t>(r) + 1]; ++p)
      d(r, ci[static_cast<std::size_t>(p)]) = v[static_cast<std::size_t>(p)];
  return d;
}

}  // namespace

struct SpdFactor::Impl {
  Eigen::SimplicialLLT<EigenSparse, Eigen::Lower, Eigen::AMDOrdering<long>> llt;
};

SpdFactor::SpdFactor(const SparseSymMatrix& m) : dim_(m.dim()), impl_(std::make_unique<Impl>()) {
  if (dim_ == 0) return;
  impl_->llt.compute(to_eigen(m));
  require(impl_->llt.info() == Eigen::Success, ErrorCode::NotSpd,
          "matrix is not symmetric positive definite (non-positive pivot)");
}

SpdFactor::~SpdFactor() = default;
SpdFactor::SpdFactor(SpdFactor&&) noexcept = default;
SpdFactor& SpdFactor::operator=(SpdFactor&&) noexcept = default;

void SpdFactor::solve(std::span<const double> b, std::span<double> x) const {
  require(static_cast<Index>(b.size()) == dim_ && static_cast<Index>(x.size()) == dim_,
          ErrorCode::DimensionMismatch, "factor solve dimension mismatch");
  if (dim_ == 0) return;
  Eigen::Map<const Eigen::VectorXd> bb(b.data(), dim_);
  Eigen::Map<Eigen::VectorXd> xx(x.data(), dim_);
  xx = impl_->llt.solve(bb);
}

std::vector<double> SpdFactor::solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  solve(b, x);
  return x;
}

SpdFactor factorize_spd(const SparseSymMatrix& m) { return SpdFactor(m); }

BlockPreconditioner::BlockPreconditioner(const SparseSymMatrix& m_c, const SparseSymMatrix& m_0,
                                         PrecondMode mode)
    : mode_(mode), dim_c_(m_c.dim()), dim_0_(m_0.dim()) {
  switch (mode) {
    case PrecondMode::ExactBlock:
      factor_c_.emplace(m_c);
      factor_0_.emplace(m_0);
      break;
    case PrecondMode::JacobiBlock: {
      auto dc = m_c.diagonal();
      auto d0 = m_0.diagonal();
      dc.insert(dc.end(), d0.begin(), d0.end());
      inv_diag_.reserve(dc.size());
      for (double d : dc) {
        require(d > 0.0, ErrorCode::NotSpd, "Jacobi preconditioner needs a positive diagonal");
        inv_diag_.push_back(1.0 / d);
      }
      break;
    }
    case PrecondMode::None:
      break;
  }
}

BlockPreconditioner::BlockPreconditioner(Index dim) : mode_(PrecondMode::None), dim_c_(dim) {}

void BlockPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  require(static_cast<Index>(r.size()) == dim() && static_cast<Index>(z.size()) == dim(),
          ErrorCode::DimensionMismatch, "preconditioner dimension mismatch");
  switch (mode_) {
    case PrecondMode::ExactBlock: {
      const auto nc = static_cast<std::size_t>(dim_c_);
      factor_c_->solve(r.subspan(0, nc), z.subspan(0, nc));
      factor_0_->solve(r.subspan(nc), z.subspan(nc));
      break;
    }
    case PrecondMode::JacobiBlock:
      for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
      break;
    case PrecondMode::None:
      std::copy(r.begin(), r.end(), z.begin());
      break;
  }
}

std::vector<double> BlockPreconditioner::apply(std::span<const double> r) const {
  std::vector<double> z(r.size());
  apply(r, z);
  return z;
}

BlockPreconditioner build_block_preconditioner(const SparseSymMatrix& m_c,
                                               const SparseSymMatrix& m_0, PrecondMode mode) {
  return {m_c, m_0, mode};
}

void project_out(std::vector<double>& b, std::span<const double> kernel) {
  const double kk = dot(kernel, kernel);
  if (kk == 0.0) return;
  const double s = dot(kernel, b) / kk;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= s * kernel[i];
}

std::vector<double> minres(const SparseSymMatrix& A, std::span<const double> b,
                           const BlockPreconditioner& P, SolveReport& report,
                           const MinresOptions& options, std::span<const double> x0) {
  const auto n = static_cast<std::size_t>(A.dim());
  require(b.size() == n && static_cast<std::size_t>(P.dim()) == n, ErrorCode::DimensionMismatch,
          "minres dimension mismatch");
  require(x0.empty() || x0.size() == n, ErrorCode::DimensionMismatch,
          "minres initial guess dimension mismatch");
  require(A.max_asymmetry() <= options.symmetry_tol * A.max_abs(), ErrorCode::NotSymmetric,
          "minres requires a symmetric matrix");
  report = SolveReport{};

  std::vector<double> x(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), x.begin());
  std::vector<double> r1(b.begin(), b.end());
  if (!x0.empty()) {
    const auto ax = A.multiply(x);
    for (std::size_t i = 0; i < n; ++i) r1[i] -= ax[i];
  }
  require(options.kernel.empty() || options.kernel.size() == n, ErrorCode::DimensionMismatch,
          "minres kernel dimension mismatch");
  if (!options.kernel.empty()) project_out(r1, options.kernel);
  std::vector<double> y = P.apply(r1);
  const double beta1_sq = dot(r1, y);
  require(beta1_sq >= 0.0, ErrorCode::NotSpd, "preconditioner is not positive definite");
  const double beta1 = std::sqrt(beta1_sq);
  report.residual_history.push_back(beta1);
  if (beta1 == 0.0) {
    report.converged = true;
    return x;
  }

  std::vector<double> r2 = r1, v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (Index itn = 1; itn <= options.max_iters; ++itn) {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
    A.multiply(v, y);
    if (itn >= 2)
      for (std::size_t i = 0; i < n; ++i) y[i] -= (beta / oldb) * r1[i];
    const double alfa = dot(v, y);
    for (std::size_t i = 0; i < n; ++i) y[i] -= (alfa / beta) * r2[i];
    r1.swap(r2);
    r2 = y;
    if (!options.kernel.empty()) project_out(r2, options.kernel);
    P.apply(r2, y);
    oldb = beta;
    const double beta_sq = dot(r2, y);
    require(beta_sq >= -eps * oldb * oldb, ErrorCode::NotSpd,
            "preconditioner is not positive definite");
    beta = std::sqrt(std::max(beta_sq, 0.0));

    // Apply the previous rotation, then build the next one.
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const double denom = 1.0 / gamma;
    w1.swap(w2);
    w2.swap(w);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
      x[i] += phi * w[i];
    }

    report.iterations = itn;
    report.residual_history.push_back(phibar);
    report.final_relative_residual = phibar / beta1;
    if (phibar <= options.tol * beta1) {
      report.converged = true;
      break;
    }
    if (beta <= eps * beta1) {
      // Invariant Krylov subspace: x is the minimiser over the whole space.
      report.breakdown = true;
      report.converged = phibar <= options.tol * beta1;
      break;
    }
  }
  return x;
}

void block_correction(const SparseSymMatrix& A, std::span<const double> b, std::vector<double>& x,
                      Index begin, const SpdFactor& diagonal_block) {
  const auto n = static_cast<std::size_t>(A.dim());
  require(b.size() == n && x.size() == n && begin >= 0 &&
              diagonal_block.dim() == A.dim() - begin,
          ErrorCode::DimensionMismatch, "block correction dimension mismatch");
  auto r = A.multiply(x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const auto off = static_cast<std::size_t>(begin);
  const auto d = diagonal_block.solve(std::span<const double>(r).subspan(off));
  for (std::size_t i = 0; i < d.size(); ++i) x[off + i] += d[i];
}

SparseSymMatrix block_diagonal(const SparseSymMatrix& m_c, const SparseSymMatrix& m_0) {
  std::vector<Index> rp(m_c.row_offsets());
  std::vector<Index> ci(m_c.column_indices());
  std::vector<double> v(m_c.values());
  const Index shift = m_c.dim(), nnz = m_c.nnz();
  for (std::size_t r = 1; r < m_0.row_offsets().size(); ++r)
    rp.push_back(m_0.row_offsets()[r] + nnz);
  for (Index c : m_0.column_indices()) ci.push_back(c + shift);
  v.insert(v.end(), m_0.values().begin(), m_0.values().end());
  return SparseSymMatrix::from_csr(m_c.dim() + m_0.dim(), std::move(rp), std::move(ci),
                                   std::move(v));
}

namespace {

SpectralBounds dense_bounds(const SparseSymMatrix& A, const SparseSymMatrix& At,
                            std::span<const double> kernel) {
  const Eigen::MatrixXd a = to_dense(A);
  const Eigen::MatrixXd at = to_dense(At);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, at);
  require(es.info() == Eigen::Success, ErrorCode::NotConverged,
          "dense generalized eigensolver failed");
  const Eigen::Map<const Eigen::VectorXd> k(kernel.data(), A.dim());
  const Eigen::VectorXd atk = at * k;
  const double knorm = std::sqrt(k.dot(atk));
  // Eigenvectors are A_tilde-orthonormal; drop the one aligned with the kernel.
  Index skip = 0;
  double best = -1.0;
  for (Index i = 0; i < A.dim(); ++i) {
    const double overlap = std::abs(es.eigenvectors().col(i).dot(atk)) / knorm;
    if (overlap > best) {
      best = overlap;
      skip = i;
    }
  }
  SpectralBounds out;
  out.lambda_min = std::numeric_limits<double>::infinity();
  out.lambda_max = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < A.dim(); ++i) {
    if (i == skip) continue;
    out.lambda_min = std::min(out.lambda_min, es.eigenvalues()(i));
    out.lambda_max = std::max(out.lambda_max, es.eigenvalues()(i));
  }
  out.steps = A.dim();
  out.converged = true;
  return out;
}

SpectralBounds lanczos_bounds(const SparseSymMatrix& A, const SparseSymMatrix& At,
                              std::span<const double> kernel, const SpectralOptions& opt) {
  const auto n = static_cast<std::size_t>(A.dim());
  const SpdFactor factor(At);
  const std::vector<double> kv(kernel.begin(), kernel.end());
  const std::vector<double> atk = At.multiply(kv);
  const double kk = dot(kv, atk);
  // Removes the A_tilde-projection onto the kernel.
  auto deflate = [&](std::vector<double>& x) {
    const double s = dot(atk, x) / kk;
    for (std::size_t i = 0; i < n; ++i) x[i] -= s * kv[i];
  };

  std::mt19937 gen(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> q(n);
  for (auto& e : q) e = dist(gen);
  deflate(q);
  {
    const double nq = std::sqrt(At.quadratic_form(q, q));
    for (auto& e : q) e /= nq;
  }

  const Index max_steps = std::min<Index>(opt.max_steps, A.dim() - 1);
  std::vector<std::vector<double>> Q;      // Lanczos vectors
  std::vector<std::vector<double>> AtQ;    // A_tilde times Lanczos vectors
  std::vector<double> alphas, betas;
  SpectralBounds out;
  double prev_min = 0.0, prev_max = 0.0;

  for (Index j = 0; j < max_steps; ++j) {
    Q.push_back(q);
    AtQ.push_back(At.multiply(q));
    const auto aq = A.multiply(q);
    std::vector<double> w = factor.solve(aq);
    const double a = dot(q, aq);
    alphas.push_back(a);
    for (std::size_t i = 0; i < n; ++i) w[i] -= a * q[i];
    if (j > 0)
      for (std::size_t i = 0; i < n; ++i) w[i] -= betas.back() * Q[Q.size() - 2][i];
    // Full reorthogonalisation in the A_tilde inner product, twice.
    for (int pass = 0; pass < 2; ++pass) {
      deflate(w);
      for (std::size_t m = 0; m < Q.size(); ++m) {
        const double c = dot(AtQ[m], w);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * Q[m][i];
      }
    }
    const double b = std::sqrt(std::max(At.quadratic_form(w, w), 0.0));

    const auto m = static_cast<Index>(alphas.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      T(i, i) = alphas[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = betas[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(m - 1);
    // Ritz residual bounds |b * last component of the Ritz vector|.
    const double res_lo = std::abs(b * es.eigenvectors()(m - 1, 0));
    const double res_hi = std::abs(b * es.eigenvectors()(m - 1, m - 1));
    out.lambda_min = lo;
    out.lambda_max = hi;
    out.steps = m;
    const bool small_res = res_lo <= opt.tol * std::abs(hi) && res_hi <= opt.tol * std::abs(hi);
    const bool stable = j > 10 && std::abs(lo - prev_min) <= opt.tol * std::abs(lo) &&
                        std::abs(hi - prev_max) <= opt.tol * std::abs(hi);
    if (b <= 1e-14 * std::abs(hi) || (small_res && stable)) {
      out.converged = true;
      break;
    }
    prev_min = lo;
    prev_max = hi;
    betas.push_back(b);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
  }
  return out;
}

}  // namespace

SpectralBounds spectral_equivalence(const SparseSymMatrix& A, const SparseSymMatrix& A_tilde,
                                    std::span<const double> kernel,
                                    const SpectralOptions& options) {
  require(A.dim() == A_tilde.dim() && static_cast<Index>(kernel.size()) == A.dim(),
          ErrorCode::DimensionMismatch, "spectral_equivalence dimension mismatch");
  require(A.dim() >= 2, ErrorCode::InvalidArgument, "spectral_equivalence needs dim >= 2");
  const bool dense = options.method == EigenMethod::Dense ||
                     (options.method == EigenMethod::Auto && A.dim() <= options.dense_limit);
  if (dense) return dense_bounds(A, A_tilde, kernel);
  auto out = lanczos_bounds(A, A_tilde, kernel, options);
  require(out.converged, ErrorCode::NotConverged,
          "Lanczos did not converge within " + std::to_string(options.max_steps) + " steps");
  return out;
}

}  // namespace iopeg
