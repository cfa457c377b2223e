#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "platevi/common.hpp"

namespace platevi {

class SparseSymMatrix;

/// Symmetric linear map v -> A v on R^n.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  [[nodiscard]] virtual Index size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  /// "explicit matrix" or "mixed composite".
  [[nodiscard]] virtual std::string_view kind() const = 0;
  /// An explicit SPD matrix spectrally equivalent to this operator (the
  /// operator itself when explicit), or nullptr. Used for preconditioning.
  [[nodiscard]] virtual const SparseSymMatrix* approximation() const { return nullptr; }
  /// y = |A| |x| (or an estimate of it), the scale of rounding errors in A x.
  /// Returns false when the operator cannot provide one.
  virtual bool abs_apply(std::span<const double> /*x*/, std::span<double> /*y*/) const { return false; }

  [[nodiscard]] Vector operator()(std::span<const double> x) const;
};

/// Row-wise sorted column structure shared by both triangles of a symmetric matrix.
class SparsityPattern {
 public:
  explicit SparsityPattern(Index n) : rows_(static_cast<std::size_t>(n)) {}

  /// Couple every pair of (non-negative) indices in the clique.
  void add_clique(std::span<const Index> indices);
  void add(Index i, Index j);

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(rows_.size()); }

 private:
  friend class SparseSymMatrix;
  std::vector<std::vector<Index>> rows_;
};

/// Compressed-row storage of a symmetric matrix. Both triangles are stored
/// so structural symmetry is exact; contributions accumulate in call order,
/// so identical assembly sequences give bit-identical matrices.
class SparseSymMatrix final : public LinearOperator {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(SparsityPattern pattern);
  /// Diagonal matrix.
  static SparseSymMatrix diagonal(std::span<const double> d);

  [[nodiscard]] Index size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;
  [[nodiscard]] std::string_view kind() const override { return "explicit matrix"; }
  [[nodiscard]] const SparseSymMatrix* approximation() const override { return this; }
  bool abs_apply(std::span<const double> x, std::span<double> y) const override;

  /// Add v to entry (i,j). The entry must be in the pattern. Negative indices are ignored.
  void add(Index i, Index j, double v);
  [[nodiscard]] double at(Index i, Index j) const;

  [[nodiscard]] Vector diagonal_values() const;
  [[nodiscard]] std::size_t nonzeros() const noexcept { return cols_.size(); }
  [[nodiscard]] std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  [[nodiscard]] std::span<const Index> cols() const noexcept { return cols_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }

  /// max |A_ij - A_ji|
  [[nodiscard]] double asymmetry() const;
  /// x^T A y
  [[nodiscard]] double form(std::span<const double> x, std::span<const double> y) const;

 private:
  [[nodiscard]] std::size_t find(Index i, Index j) const;

  Index n_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace platevi
