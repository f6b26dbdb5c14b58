#pragma once

// Direct sparse LU for the implicit stage systems.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlnsd/sparse.hpp"

namespace dlnsd {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, long pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  /// Column of the failed pivot, or -1 when unknown.
  long pivot() const { return pivot_; }

 private:
  long pivot_;
};

/// Immutable LU factorization; solve() is const and may be called concurrently.
class Factorization {
 public:
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;
  ~Factorization();

  std::size_t size() const { return n_; }
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  friend Factorization factorize(const SparseMatrix& s);
  struct Impl;
  explicit Factorization(std::unique_ptr<Impl> impl, std::size_t n);
  std::unique_ptr<Impl> impl_;
  std::size_t n_ = 0;
};

Factorization factorize(const SparseMatrix& s);

inline std::vector<double> solve(const Factorization& f, std::span<const double> rhs) {
  return f.solve(rhs);
}

/// ||S x - b|| / ||b|| (or ||S x|| when b = 0).
double relative_residual(const SparseMatrix& s, std::span<const double> x, std::span<const double> b);

}  // namespace dlnsd
