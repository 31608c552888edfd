#include "sparse.hpp"

#include <algorithm>
#include <ostream>

namespace iopeg {

namespace {

void compact(std::vector<Index>& row) {
  std::sort(row.begin(), row.end());
  row.erase(std::unique(row.begin(), row.end()), row.end());
}

}  // namespace

SparseSymMatrix SparseSymMatrix::from_groups(Index dim,
                                             const std::vector<std::vector<Index>>& groups) {
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(dim));
  std::vector<std::size_t> compacted(static_cast<std::size_t>(dim), 0);
  for (const auto& g : groups)
    for (Index r : g) {
      require(r >= 0 && r < dim, ErrorCode::DimensionMismatch, "dof index out of range");
      auto& row = rows[static_cast<std::size_t>(r)];
      row.insert(row.end(), g.begin(), g.end());
      auto& seen = compacted[static_cast<std::size_t>(r)];
      if (row.size() > 4 * seen + 64) {
        compact(row);
        seen = row.size();
      }
    }
  SparseSymMatrix m;
  m.dim_ = dim;
  m.row_ptr_.assign(1, 0);
  for (auto& row : rows) {
    compact(row);
    m.cols_.insert(m.cols_.end(), row.begin(), row.end());
    m.row_ptr_.push_back(static_cast<Index>(m.cols_.size()));
    std::vector<Index>().swap(row);
  }
  m.vals_.assign(m.cols_.size(), 0.0);
  return m;
}

SparseSymMatrix SparseSymMatrix::from_csr(Index dim, std::vector<Index> row_ptr,
                                          std::vector<Index> cols, std::vector<double> vals) {
  require(static_cast<Index>(row_ptr.size()) == dim + 1 && cols.size() == vals.size() &&
              row_ptr.back() == static_cast<Index>(cols.size()),
          ErrorCode::DimensionMismatch, "inconsistent CSR arrays");
  SparseSymMatrix m;
  m.dim_ = dim;
  m.row_ptr_ = std::move(row_ptr);
  m.cols_ = std::move(cols);
  m.vals_ = std::move(vals);
  return m;
}

Index SparseSymMatrix::find(Index row, Index col) const {
  const auto b = cols_.begin() + row_ptr_[static_cast<std::size_t>(row)];
  const auto e = cols_.begin() + row_ptr_[static_cast<std::size_t>(row) + 1];
  const auto it = std::lower_bound(b, e, col);
  if (it == e || *it != col) return -1;
  return static_cast<Index>(it - cols_.begin());
}

void SparseSymMatrix::add(Index row, Index col, double v) {
  const Index p = find(row, col);
  require(p >= 0, ErrorCode::Internal, "entry outside sparsity pattern");
  vals_[static_cast<std::size_t>(p)] += v;
}

double SparseSymMatrix::at(Index row, Index col) const {
  const Index p = find(row, col);
  return p < 0 ? 0.0 : vals_[static_cast<std::size_t>(p)];
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require(static_cast<Index>(x.size()) == dim_ && static_cast<Index>(y.size()) == dim_,
          ErrorCode::DimensionMismatch, "matvec dimension mismatch");
  for (Index r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (Index p = row_ptr_[static_cast<std::size_t>(r)];
         p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p)
      s += vals_[static_cast<std::size_t>(p)] * x[static_cast<std::size_t>(cols_[static_cast<std::size_t>(p)])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(dim_));
  multiply(x, y);
  return y;
}

double SparseSymMatrix::quadratic_form(std::span<const double> x,
                                       std::span<const double> y) const {
  return dot(x, multiply(y));
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(dim_));
  for (Index r = 0; r < dim_; ++r) d[static_cast<std::size_t>(r)] = at(r, r);
  return d;
}

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

void SparseSymMatrix::symmetrize() {
  for (Index r = 0; r < dim_; ++r)
    for (Index p = row_ptr_[static_cast<std::size_t>(r)];
         p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p) {
      const Index c = cols_[static_cast<std::size_t>(p)];
      if (c <= r) continue;
      const Index t = find(c, r);
      require(t >= 0, ErrorCode::NotSymmetric, "sparsity pattern is not symmetric");
      const double m = 0.5 * (vals_[static_cast<std::size_t>(p)] + vals_[static_cast<std::size_t>(t)]);
      vals_[static_cast<std::size_t>(p)] = m;
      vals_[static_cast<std::size_t>(t)] = m;
    }
}

double SparseSymMatrix::max_asymmetry() const {
  double m = 0.0;
  for (Index r = 0; r < dim_; ++r)
    for (Index p = row_ptr_[static_cast<std::size_t>(r)];
         p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p) {
      const Index c = cols_[static_cast<std::size_t>(p)];
      m = std::max(m, std::abs(vals_[static_cast<std::size_t>(p)] - at(c, r)));
    }
  return m;
}

SparseSymMatrix SparseSymMatrix::block(Index begin, Index end) const {
  require(0 <= begin && begin <= end && end <= dim_, ErrorCode::DimensionMismatch,
          "block range out of bounds");
  SparseSymMatrix b;
  b.dim_ = end - begin;
  b.row_ptr_.assign(1, 0);
  for (Index r = begin; r < end; ++r) {
    for (Index p = row_ptr_[static_cast<std::size_t>(r)];
         p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p) {
      const Index c = cols_[static_cast<std::size_t>(p)];
      if (c < begin || c >= end) continue;
      b.cols_.push_back(c - begin);
      b.vals_.push_back(vals_[static_cast<std::size_t>(p)]);
    }
    b.row_ptr_.push_back(static_cast<Index>(b.cols_.size()));
  }
  return b;
}

void SparseSymMatrix::write_matrix_market(std::ostream& os) const {
  Index lower = 0;
  for (Index r = 0; r < dim_; ++r)
    for (Index p = row_ptr_[static_cast<std::size_t>(r)];
         p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p)
      if (cols_[static_cast<std::size_t>(p)] <= r) ++lower;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << dim_ << ' ' << dim_ << ' ' << lower << '\n';
  os.precision(17);
  for (Index r = 0; r < dim_; ++r)
    for (Index p = row_ptr_[static_cast<std::size_t>(r)];
         p < row_ptr_[static_cast<std::size_t>(r) + 1]; ++p) {
      const Index c = cols_[static_cast<std::size_t>(p)];
      if (c <= r) os << r + 1 << ' ' << c + 1 << ' ' << vals_[static_cast<std::size_t>(p)] << '\n';
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::DimensionMismatch, "dot dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace iopeg
