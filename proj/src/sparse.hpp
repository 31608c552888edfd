#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "common.hpp"

namespace iopeg {

/// Compressed sparse row matrix holding both triangles of a symmetric
/// operator. Column indices are sorted within each row.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  /// Pattern from element dof groups: every pair inside a group is coupled.
  static SparseSymMatrix from_groups(Index dim, const std::vector<std::vector<Index>>& groups);

  /// Takes ownership of raw CSR arrays (columns sorted per row).
  static SparseSymMatrix from_csr(Index dim, std::vector<Index> row_ptr, std::vector<Index> cols,
                                  std::vector<double> vals);

  [[nodiscard]] Index dim() const { return dim_; }
  [[nodiscard]] Index nnz() const { return static_cast<Index>(cols_.size()); }
  [[nodiscard]] const std::vector<Index>& row_offsets() const { return row_ptr_; }
  [[nodiscard]] const std::vector<Index>& column_indices() const { return cols_; }
  [[nodiscard]] const std::vector<double>& values() const { return vals_; }
  [[nodiscard]] std::vector<double>& values() { return vals_; }

  /// Adds to an entry that must exist in the pattern.
  void add(Index row, Index col, double v);
  /// Entry value, 0 outside the pattern.
  [[nodiscard]] double at(Index row, Index col) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  [[nodiscard]] double quadratic_form(std::span<const double> x, std::span<const double> y) const;

  [[nodiscard]] std::vector<double> diagonal() const;
  [[nodiscard]] double max_abs() const;
  /// Replaces each off-diagonal pair by its mean so the stored values are
  /// exactly symmetric.
  void symmetrize();
  /// max |A_ij - A_ji|.
  [[nodiscard]] double max_asymmetry() const;

  /// Rows/columns [begin, end) as a new matrix.
  [[nodiscard]] SparseSymMatrix block(Index begin, Index end) const;

  /// MatrixMarket coordinate, symmetric (lower triangle, 1-based).
  void write_matrix_market(std::ostream& os) const;

 private:
  Index find(Index row, Index col) const;

  Index dim_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> vals_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace iopeg
