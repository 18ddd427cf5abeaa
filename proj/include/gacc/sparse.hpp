#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gacc {

/// Dense index of an actor within a snapshot's registry.
using ActorIndex = std::uint32_t;

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  double value;
};

// Compressed sparse row matrix with non-negative entries. The storage is
// canonical: rows in order, columns strictly increasing within each row, no
// explicit zeros and no duplicates, so operator== is semantic equality.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), rowPtr_(rows + 1, 0) {}

  static SparseMatrix fromTriplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets) {
      if (t.row >= rows || t.col >= cols) {
        throw std::invalid_argument("sparse entry (" + std::to_string(t.row) +
                                    "," + std::to_string(t.col) +
                                    ") outside " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " matrix");
      }
      if (t.value < 0.0) {
        throw std::invalid_argument("negative sparse entry at (" +
                                    std::to_string(t.row) + "," +
                                    std::to_string(t.col) + ")");
      }
    }
    // stable: duplicates accumulate in insertion order, so symmetric inputs
    // stay bit-symmetric
    std::stable_sort(triplets.begin(), triplets.end(),
                     [](const Triplet& a, const Triplet& b) {
                       return a.row != b.row ? a.row < b.row : a.col < b.col;
                     });
    SparseMatrix m(rows, cols);
    m.colIdx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t i = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      while (i < triplets.size() && triplets[i].row == r) {
        const std::uint32_t c = triplets[i].col;
        double v = 0.0;
        while (i < triplets.size() && triplets[i].row == r &&
               triplets[i].col == c) {
          v += triplets[i].value;  // duplicates accumulate
          ++i;
        }
        if (v != 0.0) {
          m.colIdx_.push_back(c);
          m.values_.push_back(v);
        }
      }
      m.rowPtr_[r + 1] = m.colIdx_.size();
    }
    return m;
  }

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    m.colIdx_.resize(n);
    m.values_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      m.colIdx_[i] = static_cast<std::uint32_t>(i);
      m.rowPtr_[i + 1] = i + 1;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonZeroCount() const { return values_.size(); }

  double at(std::uint32_t row, std::uint32_t col) const {
    const auto begin = colIdx_.begin() + rowBegin(row);
    const auto end = colIdx_.begin() + rowEnd(row);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - colIdx_.begin())];
  }

  std::size_t rowBegin(std::uint32_t row) const { return rowPtr_.at(row); }
  std::size_t rowEnd(std::uint32_t row) const { return rowPtr_.at(row + 1); }
  std::span<const std::uint32_t> rowCols(std::uint32_t row) const {
    return {colIdx_.data() + rowBegin(row), colIdx_.data() + rowEnd(row)};
  }
  std::span<const double> rowValues(std::uint32_t row) const {
    return {values_.data() + rowBegin(row), values_.data() + rowEnd(row)};
  }

  template <typename Fn>  // Fn(col, value)
  void forEachInRow(std::uint32_t row, Fn&& fn) const {
    for (std::size_t k = rowBegin(row); k < rowEnd(row); ++k) {
      fn(colIdx_[k], values_[k]);
    }
  }

  template <typename Fn>  // Fn(row, col, value)
  void forEach(Fn&& fn) const {
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) {
        fn(static_cast<std::uint32_t>(r), colIdx_[k], values_[k]);
      }
    }
  }

  SparseMatrix transpose() const {
    std::vector<Triplet> t;
    t.reserve(values_.size());
    forEach([&](std::uint32_t r, std::uint32_t c, double v) {
      t.push_back({c, r, v});
    });
    return fromTriplets(cols_, rows_, std::move(t));
  }

  bool isSymmetric() const {
    if (rows_ != cols_) return false;
    return *this == transpose();
  }

  std::vector<double> rowSums() const {
    std::vector<double> s(rows_, 0.0);
    forEach([&](std::uint32_t r, std::uint32_t, double v) { s[r] += v; });
    return s;
  }

  std::vector<double> colSums() const {
    std::vector<double> s(cols_, 0.0);
    forEach([&](std::uint32_t, std::uint32_t c, double v) { s[c] += v; });
    return s;
  }

  std::vector<double> multiplyVector(std::span<const double> x) const {
    std::vector<double> y(rows_);
    multiplyVectorInto(x, y);
    return y;
  }

  void multiplyVectorInto(std::span<const double> x,
                          std::vector<double>& y) const {
    if (x.size() != cols_) {
      throw std::invalid_argument("matvec dimension mismatch");
    }
    y.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (std::size_t k = rowPtr_[r]; k < rowPtr_[r + 1]; ++k) {
        acc += values_[k] * x[colIdx_[k]];
      }
      y[r] = acc;
    }
  }

  SparseMatrix scaled(double factor) const {
    if (factor < 0.0) throw std::invalid_argument("negative scale factor");
    SparseMatrix m = *this;
    if (factor == 0.0) {
      m.colIdx_.clear();
      m.values_.clear();
      std::fill(m.rowPtr_.begin(), m.rowPtr_.end(), 0);
      return m;
    }
    for (double& v : m.values_) v *= factor;
    return m;
  }

  // Principal submatrix on the given strictly increasing index set.
  SparseMatrix principalSubmatrix(std::span<const std::uint32_t> keep) const {
    std::vector<std::int64_t> toLocal(rows_, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      toLocal[keep[i]] = static_cast<std::int64_t>(i);
    }
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      forEachInRow(keep[i], [&](std::uint32_t c, double v) {
        if (toLocal[c] >= 0) {
          t.push_back({static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(toLocal[c]), v});
        }
      });
    }
    return fromTriplets(keep.size(), keep.size(), std::move(t));
  }

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> rowPtr_;
  std::vector<std::uint32_t> colIdx_;
  std::vector<double> values_;

  friend SparseMatrix multiply(const SparseMatrix&, const SparseMatrix&);
  friend SparseMatrix addScaled(const SparseMatrix&, double,
                                const SparseMatrix&, double);
};

// Row-by-row sparse product with a dense accumulator (Gustavson). All inputs
// are non-negative so no cancellation to zero can occur.
inline SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("spmm dimension mismatch: " +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()));
  }
  SparseMatrix out(a.rows(), b.cols());
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<std::uint32_t> touched;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    touched.clear();
    for (std::size_t ka = a.rowPtr_[r]; ka < a.rowPtr_[r + 1]; ++ka) {
      const std::uint32_t k = a.colIdx_[ka];
      const double av = a.values_[ka];
      for (std::size_t kb = b.rowPtr_[k]; kb < b.rowPtr_[k + 1]; ++kb) {
        const std::uint32_t c = b.colIdx_[kb];
        if (acc[c] == 0.0) touched.push_back(c);
        acc[c] += av * b.values_[kb];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::uint32_t c : touched) {
      if (acc[c] != 0.0) {
        out.colIdx_.push_back(c);
        out.values_.push_back(acc[c]);
      }
      acc[c] = 0.0;
    }
    out.rowPtr_[r + 1] = out.colIdx_.size();
  }
  return out;
}

// wa*a + wb*b with non-negative weights.
inline SparseMatrix addScaled(const SparseMatrix& a, double wa,
                              const SparseMatrix& b, double wb) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("sparse add dimension mismatch");
  }
  if (wa < 0.0 || wb < 0.0) {
    throw std::invalid_argument("negative weight in sparse add");
  }
  SparseMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::size_t ia = a.rowPtr_[r], ib = b.rowPtr_[r];
    const std::size_t ea = a.rowPtr_[r + 1], eb = b.rowPtr_[r + 1];
    while (ia < ea || ib < eb) {
      std::uint32_t c;
      double v = 0.0;
      if (ib >= eb || (ia < ea && a.colIdx_[ia] < b.colIdx_[ib])) {
        c = a.colIdx_[ia];
        v = wa * a.values_[ia++];
      } else if (ia >= ea || b.colIdx_[ib] < a.colIdx_[ia]) {
        c = b.colIdx_[ib];
        v = wb * b.values_[ib++];
      } else {
        c = a.colIdx_[ia];
        v = wa * a.values_[ia++] + wb * b.values_[ib++];
      }
      if (v != 0.0) {
        out.colIdx_.push_back(c);
        out.values_.push_back(v);
      }
    }
    out.rowPtr_[r + 1] = out.colIdx_.size();
  }
  return out;
}

}  // namespace gacc
