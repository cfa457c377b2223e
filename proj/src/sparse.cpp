#include "platevi/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace platevi {

Vector LinearOperator::operator()(std::span<const double> x) const {
  Vector y(static_cast<std::size_t>(size()));
  apply(x, y);
  return y;
}

void SparsityPattern::add(Index i, Index j) {
  if (i < 0 || j < 0) return;
  rows_[static_cast<std::size_t>(i)].push_back(j);
  rows_[static_cast<std::size_t>(j)].push_back(i);
}

void SparsityPattern::add_clique(std::span<const Index> indices) {
  for (Index i : indices) {
    if (i < 0) continue;
    auto& row = rows_[static_cast<std::size_t>(i)];
    for (Index j : indices) {
      if (j >= 0) row.push_back(j);
    }
  }
}

SparseSymMatrix::SparseSymMatrix(SparsityPattern pattern) : n_(pattern.size()) {
  row_ptr_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (Index i = 0; i < n_; ++i) {
    auto& row = pattern.rows_[static_cast<std::size_t>(i)];
    row.push_back(i);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    row_ptr_[static_cast<std::size_t>(i) + 1] = row_ptr_[static_cast<std::size_t>(i)] + static_cast<Index>(row.size());
  }
  cols_.reserve(static_cast<std::size_t>(row_ptr_.back()));
  for (auto& row : pattern.rows_) {
    cols_.insert(cols_.end(), row.begin(), row.end());
    std::vector<Index>().swap(row);
  }
  values_.assign(cols_.size(), 0.0);
}

SparseSymMatrix SparseSymMatrix::diagonal(std::span<const double> d) {
  SparsityPattern p(static_cast<Index>(d.size()));
  SparseSymMatrix m(std::move(p));
  for (std::size_t i = 0; i < d.size(); ++i) m.values_[i] = d[i];
  return m;
}

std::size_t SparseSymMatrix::find(Index i, Index j) const {
  const auto begin = cols_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto end = cols_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) {
    throw InvalidArgument("entry (" + std::to_string(i) + "," + std::to_string(j) + ") not in sparsity pattern");
  }
  return static_cast<std::size_t>(it - cols_.begin());
}

void SparseSymMatrix::add(Index i, Index j, double v) {
  if (i < 0 || j < 0) return;
  values_[find(i, j)] += v;
}

double SparseSymMatrix::at(Index i, Index j) const {
  const auto begin = cols_.begin() + row_ptr_[static_cast<std::size_t>(i)];
  const auto end = cols_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseSymMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (Index i = 0; i < n_; ++i) {
    long double s = 0.0L;
    for (Index k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
      s += static_cast<long double>(values_[static_cast<std::size_t>(k)]) *
           x[static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = static_cast<double>(s);
  }
}

bool SparseSymMatrix::abs_apply(std::span<const double> x, std::span<double> y) const {
  for (Index i = 0; i < n_; ++i) {
    double s = 0.0;
    for (Index k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
      s += std::abs(values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)])]);
    }
    y[static_cast<std::size_t>(i)] = s;
  }
  return true;
}

Vector SparseSymMatrix::diagonal_values() const {
  Vector d(static_cast<std::size_t>(n_));
  for (Index i = 0; i < n_; ++i) d[static_cast<std::size_t>(i)] = at(i, i);
  return d;
}

double SparseSymMatrix::asymmetry() const {
  double worst = 0.0;
  for (Index i = 0; i < n_; ++i) {
    for (Index k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
      const Index j = cols_[static_cast<std::size_t>(k)];
      worst = std::max(worst, std::abs(values_[static_cast<std::size_t>(k)] - at(j, i)));
    }
  }
  return worst;
}

double SparseSymMatrix::form(std::span<const double> x, std::span<const double> y) const {
  Vector ay(static_cast<std::size_t>(n_));
  apply(y, ay);
  return dot(x, ay);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace platevi
