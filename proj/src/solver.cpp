#include "dlnsd/solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <regex>
#include <sstream>

namespace dlnsd {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct Factorization::Impl {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
};

Factorization::Factorization(std::unique_ptr<Impl> impl, std::size_t n)
    : impl_(std::move(impl)), n_(n) {}
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;
Factorization::~Factorization() = default;

std::vector<double> Factorization::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("rhs dimension does not match factorization");
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success) throw std::runtime_error("sparse LU solve failed");
  return {x.data(), x.data() + x.size()};
}

Factorization factorize(const SparseMatrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("factorize needs a square matrix");
  std::vector<Eigen::Triplet<double, int>> trips;
  trips.reserve(s.nonzeros());
  const auto& rp = s.row_ptr();
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
      trips.emplace_back(static_cast<int>(r), static_cast<int>(s.col_idx()[k]), s.values()[k]);
  EigenSparse m(static_cast<Eigen::Index>(s.rows()), static_cast<Eigen::Index>(s.cols()));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  auto impl = std::make_unique<Factorization::Impl>();
  impl->lu.analyzePattern(m);
  impl->lu.factorize(m);
  if (impl->lu.info() != Eigen::Success) {
    const std::string msg = impl->lu.lastErrorMessage();
    long pivot = -1;
    std::smatch match;
    if (std::regex_search(msg, match, std::regex("AT\\s+(\\d+)"))) pivot = std::stol(match[1]);
    throw SingularMatrixError("sparse LU factorization failed: " + msg, pivot);
  }
  return Factorization(std::move(impl), s.rows());
}

double relative_residual(const SparseMatrix& s, std::span<const double> x, std::span<const double> b) {
  auto r = s.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

}  // namespace dlnsd
