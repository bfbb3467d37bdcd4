#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace wavespec {

inline constexpr double kDefaultRankTol = 1e-8;

// A closed subspace of R^n, stored as a column-orthonormal basis matrix.
// dim() == 0 encodes the zero subspace {0}; the basis matrix is then n x 0.
//
// All factory routes canonicalize deterministically, so identical inputs
// (in any order) produce bit-identical bases.
class Subspace {
 public:
  static Subspace zero(Eigen::Index ambient_dim, double rank_tol = kDefaultRankTol) {
    check_params(ambient_dim, rank_tol);
    return Subspace(ambient_dim, Eigen::MatrixXd(ambient_dim, 0), rank_tol);
  }

  static Subspace full(Eigen::Index ambient_dim, double rank_tol = kDefaultRankTol) {
    check_params(ambient_dim, rank_tol);
    return Subspace(ambient_dim, Eigen::MatrixXd::Identity(ambient_dim, ambient_dim), rank_tol);
  }

  // Span of the given columns. Rank is decided by discarding singular values
  // below rank_tol times the largest one. Columns are sorted by an exact
  // lexicographic fingerprint first so that the result does not depend on
  // input order.
  static Subspace span_of(const Eigen::MatrixXd& columns, double rank_tol = kDefaultRankTol) {
    check_params(columns.rows(), rank_tol);
    if (columns.cols() == 0) return zero(columns.rows(), rank_tol);

    Eigen::MatrixXd sorted = sort_columns(columns);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sorted, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return zero(columns.rows(), rank_tol);

    const double cut = rank_tol * sv(0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) >= cut) ++rank;
    return Subspace(columns.rows(), svd.matrixU().leftCols(rank), rank_tol);
  }

  static Subspace span_of(const std::vector<Eigen::VectorXd>& vectors,
                          Eigen::Index ambient_dim, double rank_tol = kDefaultRankTol) {
    Eigen::MatrixXd m(ambient_dim, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (vectors[j].size() != ambient_dim)
        throw std::invalid_argument("span_of: vector dimension mismatch");
      m.col(static_cast<Eigen::Index>(j)) = vectors[j];
    }
    return span_of(m, rank_tol);
  }

  // Wraps a matrix whose columns are already orthonormal (validated).
  static Subspace from_orthonormal(Eigen::MatrixXd basis, double rank_tol = kDefaultRankTol) {
    check_params(basis.rows(), rank_tol);
    if (basis.cols() > 0) {
      Eigen::MatrixXd gram = basis.transpose() * basis;
      gram -= Eigen::MatrixXd::Identity(basis.cols(), basis.cols());
      if (gram.cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("from_orthonormal: columns not orthonormal");
    }
    const Eigen::Index n = basis.rows();
    return Subspace(n, std::move(basis), rank_tol);
  }

  Eigen::Index ambient_dim() const { return ambient_; }
  Eigen::Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_; }
  double rank_tol() const { return tol_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

  // diag(P) without forming P; cheap fingerprint for dedup prescreens.
  Eigen::VectorXd projector_diagonal() const { return basis_.rowwise().squaredNorm(); }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    if (x.size() != ambient_) throw std::invalid_argument("project: dimension mismatch");
    if (dim() == 0) return Eigen::VectorXd::Zero(ambient_);
    return basis_ * (basis_.transpose() * x);
  }

 private:
  friend class GrowingBasis;

  Subspace(Eigen::Index n, Eigen::MatrixXd b, double tol)
      : ambient_(n), basis_(std::move(b)), tol_(tol) {}

  static void check_params(Eigen::Index n, double tol) {
    if (n <= 0) throw std::invalid_argument("Subspace: ambient dimension must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("Subspace: rank tolerance must be positive");
  }

  static bool column_lex_less(const Eigen::MatrixXd& m, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, a) < m(i, b)) return true;
      if (m(i, a) > m(i, b)) return false;
    }
    return false;
  }

  static Eigen::MatrixXd sort_columns(const Eigen::MatrixXd& m) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(),
                     [&m](Eigen::Index a, Eigen::Index b) { return column_lex_less(m, a, b); });
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t j = 0; j < order.size(); ++j)
      out.col(static_cast<Eigen::Index>(j)) = m.col(order[j]);
    return out;
  }

  Eigen::Index ambient_;
  Eigen::MatrixXd basis_;
  double tol_;
};

// Incremental orthonormal span builder: columns are folded in a fixed order,
// with a two-pass projection; a column is accepted when the orthogonal
// remainder exceeds tol times the column norm. Snapshots of the growing basis
// are exactly nested, which several monotonicity contracts rely on.
class GrowingBasis {
 public:
  GrowingBasis(Eigen::Index ambient_dim, double tol)
      : ambient_(ambient_dim), tol_(tol), q_(ambient_dim, 0) {
    if (ambient_dim <= 0) throw std::invalid_argument("GrowingBasis: bad ambient dimension");
    if (!(tol > 0.0)) throw std::invalid_argument("GrowingBasis: bad tolerance");
  }

  bool add_column(const Eigen::VectorXd& v) {
    if (v.size() != ambient_) throw std::invalid_argument("GrowingBasis: dimension mismatch");
    const double nv = v.norm();
    if (nv == 0.0 || q_.cols() == ambient_) return false;
    Eigen::VectorXd r = v;
    if (q_.cols() > 0) {
      r -= q_ * (q_.transpose() * r);
      r -= q_ * (q_.transpose() * r);
    }
    const double nr = r.norm();
    if (nr <= tol_ * nv) return false;
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = r / nr;
    return true;
  }

  Eigen::Index dim() const { return q_.cols(); }
  Eigen::Index ambient_dim() const { return ambient_; }

  Subspace snapshot(double rank_tol) const { return Subspace(ambient_, q_, rank_tol); }

 private:
  Eigen::Index ambient_;
  double tol_;
  Eigen::MatrixXd q_;
};

namespace detail {

inline void check_same_ambient(const Subspace& a, const Subspace& b, const char* who) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument(std::string(who) + ": ambient dimension mismatch");
}

}  // namespace detail

// Intersection. Principal directions between the two bases are kept when the
// corresponding singular value of A^T B lies within 10 * rank_tol of 1.
// Span of a nonempty vector list (ambient dimension read off the first entry).
inline Subspace span(const std::vector<Eigen::VectorXd>& vectors,
                     double rank_tol = kDefaultRankTol) {
  if (vectors.empty()) throw std::invalid_argument("span: need the ambient dimension, list is empty");
  return Subspace::span_of(vectors, vectors.front().size(), rank_tol);
}

inline Subspace meet(const Subspace& a, const Subspace& b) {
  detail::check_same_ambient(a, b, "meet");
  const double rt = std::min(a.rank_tol(), b.rank_tol());
  if (a.is_zero() || b.is_zero()) return Subspace::zero(a.ambient_dim(), rt);
  if (a.is_full()) return Subspace::from_orthonormal(b.basis(), rt);
  if (b.is_full()) return Subspace::from_orthonormal(a.basis(), rt);

  Eigen::MatrixXd m = a.basis().transpose() * b.basis();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index count = 0;
  while (count < sv.size() && std::abs(sv(count) - 1.0) < 10.0 * rt) ++count;
  if (count == 0) return Subspace::zero(a.ambient_dim(), rt);
  Eigen::MatrixXd basis = a.basis() * svd.matrixU().leftCols(count);
  return Subspace::from_orthonormal(std::move(basis), rt);
}

// Closed linear hull: span of the concatenated bases.
inline Subspace join(const Subspace& a, const Subspace& b) {
  detail::check_same_ambient(a, b, "join");
  const double rt = std::min(a.rank_tol(), b.rank_tol());
  if (a.is_zero()) return Subspace::from_orthonormal(b.basis(), rt);
  if (b.is_zero()) return Subspace::from_orthonormal(a.basis(), rt);
  Eigen::MatrixXd m(a.ambient_dim(), a.dim() + b.dim());
  m.leftCols(a.dim()) = a.basis();
  m.rightCols(b.dim()) = b.basis();
  return Subspace::span_of(m, rt);
}

// Orthogonal complement via the trailing columns of a full Householder Q.
inline Subspace complement(const Subspace& a) {
  const Eigen::Index n = a.ambient_dim();
  if (a.is_zero()) return Subspace::full(n, a.rank_tol());
  if (a.is_full()) return Subspace::zero(n, a.rank_tol());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.basis());
  Eigen::MatrixXd q = qr.householderQ();
  return Subspace::from_orthonormal(q.rightCols(n - a.dim()), a.rank_tol());
}

// Largest singular value of (I - P_b) restricted to a, i.e. the worst-case
// distance from a unit vector of a to b. Computed from the residual matrix
// itself so that near-containment is not lost to cancellation.
inline double leq_residual(const Subspace& a, const Subspace& b) {
  detail::check_same_ambient(a, b, "leq");
  if (a.is_zero()) return 0.0;
  if (b.is_zero()) return 1.0;
  if (a.dim() > b.dim()) return 1.0;
  Eigen::MatrixXd r = a.basis() - b.basis() * (b.basis().transpose() * a.basis());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(r);
  return std::min(svd.singularValues()(0), 1.0);
}

inline bool leq(const Subspace& a, const Subspace& b, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("leq: tolerance must be positive");
  return leq_residual(a, b) <= tol;
}

// Operator-norm gap between the two orthogonal projectors. Equals the sine of
// the largest principal angle when dim(a) == dim(b), and 1 otherwise.
inline double subspace_distance(const Subspace& a, const Subspace& b) {
  detail::check_same_ambient(a, b, "subspace_distance");
  if (a.is_zero() && b.is_zero()) return 0.0;
  Eigen::MatrixXd d = a.projector() - b.projector();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

// Frobenius-norm gap between projectors, computed without forming them.
// Dominates the operator-norm gap; used as a conservative dedup metric.
inline double frobenius_gap(const Subspace& a, const Subspace& b) {
  detail::check_same_ambient(a, b, "frobenius_gap");
  const double cross = (a.basis().transpose() * b.basis()).squaredNorm();
  const double g2 = static_cast<double>(a.dim() + b.dim()) - 2.0 * cross;
  return std::sqrt(std::max(0.0, g2));
}

}  // namespace wavespec
