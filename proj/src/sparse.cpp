#include "dlnsd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace dlnsd {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
      row_ptr_.back() != values_.size())
    throw std::invalid_argument("inconsistent CSR arrays");
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw std::invalid_argument("CSR column out of range");
      if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
        throw std::invalid_argument("CSR columns must be sorted and unique");
    }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1), ci(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(ci.begin(), ci.end(), 0);
  return SparseMatrix(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  multiply_add(x, y);
  return y;
}

void SparseMatrix::multiply_add(std::span<const double> x, std::span<double> y,
                                double scale) const {
  if (x.size() != cols_ || y.size() != rows_) throw std::invalid_argument("matvec size mismatch");
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[r] += scale * s;
  }
}

double SparseMatrix::quadratic_form(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != rows_ || y.size() != cols_) throw std::invalid_argument("form size mismatch");
  double s = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double row = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) row += values_[k] * y[col_idx_[k]];
    s += x[r] * row;
  }
  return s;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<std::size_t> rp(cols_ + 1, 0);
  for (auto c : col_idx_) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<std::size_t> ci(values_.size());
  std::vector<double> v(values_.size());
  std::vector<std::size_t> cursor(rp.begin(), rp.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t dst = cursor[col_idx_[k]]++;
      ci[dst] = r;
      v[dst] = values_[k];
    }
  return SparseMatrix(cols_, rows_, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (auto& v : out.values_) v *= s;
  return out;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void TripletBuilder::add(std::size_t r, std::size_t c, double v) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("triplet index out of range");
  entries_.push_back({r, c, v});
}

void TripletBuilder::append(const SparseMatrix& m, double scale) {
  if (m.rows() != rows_ || m.cols() != cols_) throw std::invalid_argument("shape mismatch");
  const auto& rp = m.row_ptr();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
      entries_.push_back({r, m.col_idx()[k], scale * m.values()[k]});
}

SparseMatrix TripletBuilder::build() const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    return ea.r != eb.r ? ea.r < eb.r : ea.c < eb.c;
  });
  std::vector<std::size_t> rp(rows_ + 1, 0), ci;
  std::vector<double> vals;
  ci.reserve(entries_.size());
  vals.reserve(entries_.size());
  std::size_t last_r = rows_, last_c = cols_;
  for (auto idx : order) {
    const auto& e = entries_[idx];
    if (e.r == last_r && e.c == last_c) {
      vals.back() += e.v;
      continue;
    }
    ci.push_back(e.c);
    vals.push_back(e.v);
    ++rp[e.r + 1];
    last_r = e.r;
    last_c = e.c;
  }
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  return SparseMatrix(rows_, cols_, std::move(rp), std::move(ci), std::move(vals));
}

SparseMatrix linear_combination(std::span<const SparseMatrix* const> mats,
                                std::span<const double> scales) {
  if (mats.empty() || mats.size() != scales.size())
    throw std::invalid_argument("linear_combination needs matching matrices and scales");
  const std::size_t rows = mats[0]->rows(), cols = mats[0]->cols();
  for (const auto* m : mats)
    if (m->rows() != rows || m->cols() != cols) throw std::invalid_argument("shape mismatch");

  std::vector<std::size_t> rp(rows + 1, 0), ci;
  std::vector<double> vals;
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t r = 0; r < rows; ++r) {
    row.clear();
    for (std::size_t i = 0; i < mats.size(); ++i) {
      const auto& m = *mats[i];
      for (std::size_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
        row.emplace_back(m.col_idx()[k], scales[i] * m.values()[k]);
    }
    std::stable_sort(row.begin(), row.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0 && row[k].first == row[k - 1].first) {
        vals.back() += row[k].second;
        continue;
      }
      ci.push_back(row[k].first);
      vals.push_back(row[k].second);
    }
    rp[r + 1] = vals.size();
  }
  return SparseMatrix(rows, cols, std::move(rp), std::move(ci), std::move(vals));
}

double symmetry_defect(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("symmetry defect of non-square matrix");
  const double scale = m.max_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  const auto& rp = m.row_ptr();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
      worst = std::max(worst, std::abs(m.values()[k] - m.at(m.col_idx()[k], r)));
  return worst / scale;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonzeros() << '\n';
  os << std::setprecision(17);
  const auto& rp = m.row_ptr();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
      os << r + 1 << ' ' << m.col_idx()[k] + 1 << ' ' << m.values()[k] << '\n';
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot size mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace dlnsd
