#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dlnsd {

/// Compressed sparse rows; column indices sorted and unique within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Stored value at (r, c), or 0.
  double at(std::size_t r, std::size_t c) const;

  std::vector<double> multiply(std::span<const double> x) const;
  void multiply_add(std::span<const double> x, std::span<double> y, double scale = 1.0) const;
  double quadratic_form(std::span<const double> x, std::span<const double> y) const;

  SparseMatrix transposed() const;
  SparseMatrix scaled(double s) const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) entries; duplicates are summed on build().
class TripletBuilder {
 public:
  TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(std::size_t r, std::size_t c, double v);
  void reserve(std::size_t n) { entries_.reserve(n); }
  void append(const SparseMatrix& m, double scale = 1.0);
  SparseMatrix build() const;

 private:
  struct Entry {
    std::size_t r, c;
    double v;
  };
  std::size_t rows_, cols_;
  std::vector<Entry> entries_;
};

/// sum_i scale_i * m_i over matrices of equal shape.
SparseMatrix linear_combination(std::span<const SparseMatrix* const> mats,
                                std::span<const double> scales);

/// Symmetry defect max |a_ij - a_ji| / max |a_ij|.
double symmetry_defect(const SparseMatrix& m);

void write_matrix_market(std::ostream& os, const SparseMatrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace dlnsd
