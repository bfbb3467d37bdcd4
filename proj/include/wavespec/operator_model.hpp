#pragma once

#include "wavespec/subspace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace wavespec {

// Finite-dimensional stand-in for a positive definite operator L together
// with a distinguished "boundary data" subspace K. The eigendecomposition is
// computed once and reused by every spectral function evaluation.
struct OperatorModel {
  Eigen::Index dim = 0;
  Eigen::MatrixXd L;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
  Subspace K = Subspace::zero(1);
  double kappa = 0.0;  // smallest eigenvalue
  std::string label;

  Eigen::VectorXd project_K(const Eigen::VectorXd& x) const { return K.project(x); }
  Eigen::VectorXd project_K_perp(const Eigen::VectorXd& x) const { return x - K.project(x); }
};

// Triple (y0, g, h): y0 is the "regular" component with L y0 orthogonal to K,
// and g, h live in K. The represented element is y0 + L^{-1} g + h.
struct VishikElement {
  Eigen::VectorXd y0;
  Eigen::VectorXd g;
  Eigen::VectorXd h;
};

enum class SpectralFn { inverse, inv_sqrt, sine_prop, cosine_prop, one_minus_cos };

namespace detail {

inline double spectral_value(SpectralFn fn, double lambda, double t) {
  const double r = std::sqrt(lambda);
  switch (fn) {
    case SpectralFn::inverse: return 1.0 / lambda;
    case SpectralFn::inv_sqrt: return 1.0 / r;
    case SpectralFn::sine_prop: return std::sin(t * r) / r;
    case SpectralFn::cosine_prop: return std::cos(t * r);
    case SpectralFn::one_minus_cos: return 1.0 - std::cos(t * r);
  }
  throw std::logic_error("spectral_value: bad tag");
}

inline bool needs_time(SpectralFn fn) {
  return fn == SpectralFn::sine_prop || fn == SpectralFn::cosine_prop ||
         fn == SpectralFn::one_minus_cos;
}

}  // namespace detail

// Per-eigenvalue multipliers of f(L) (f at time t for propagator tags).
inline Eigen::VectorXd spectral_multipliers(const OperatorModel& model, SpectralFn fn,
                                            double t = 0.0) {
  if (detail::needs_time(fn) && t < 0.0)
    throw std::invalid_argument("spectral_multipliers: negative time");
  Eigen::VectorXd m(model.eigenvalues.size());
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m(i) = detail::spectral_value(fn, model.eigenvalues(i), t);
  return m;
}

inline Eigen::VectorXd apply_function(const OperatorModel& model, SpectralFn fn,
                                      const Eigen::VectorXd& x, double t = 0.0) {
  if (x.size() != model.dim) throw std::invalid_argument("apply_function: dimension mismatch");
  Eigen::VectorXd coeffs = model.eigenvectors.transpose() * x;
  coeffs.array() *= spectral_multipliers(model, fn, t).array();
  return model.eigenvectors * coeffs;
}

// Builds a model from an explicit symmetric positive definite matrix and a
// matrix whose columns span K.
inline OperatorModel make_custom_model(const Eigen::MatrixXd& L, const Eigen::MatrixXd& k_columns,
                                       std::string label = "custom",
                                       double rank_tol = kDefaultRankTol) {
  if (L.rows() != L.cols() || L.rows() == 0)
    throw std::invalid_argument("make_custom_model: L must be square and nonempty");
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("make_custom_model: L is not symmetric");
  if (k_columns.rows() != L.rows())
    throw std::invalid_argument("make_custom_model: K columns have wrong length");

  OperatorModel m;
  m.dim = L.rows();
  m.L = 0.5 * (L + L.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.L);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("make_custom_model: eigendecomposition failed");
  m.eigenvalues = es.eigenvalues();
  m.eigenvectors = es.eigenvectors();
  m.kappa = m.eigenvalues(0);
  if (!(m.kappa > 0.0))
    throw std::invalid_argument("make_custom_model: L is not positive definite");

  Eigen::MatrixXd recon = m.eigenvectors * m.eigenvalues.asDiagonal() * m.eigenvectors.transpose();
  if ((recon - m.L).norm() > 1e-10 * std::max(1.0, m.L.norm()))
    throw std::runtime_error("make_custom_model: eigendecomposition reconstruction too loose");

  m.K = Subspace::span_of(k_columns, rank_tol);
  if (m.K.dim() == 0)
    throw std::invalid_argument("make_custom_model: K must be nontrivial");
  m.label = std::move(label);
  return m;
}

// Dirichlet Laplacian on N interior nodes of a unit interval:
// L = (N+1)^2 tridiag(-1, 2, -1). K is the null space of the deep-interior
// stencil rows (rows 2..N-1), i.e. the discrete linear profiles a + b*i.
inline OperatorModel make_interval_model(int N, double rank_tol = kDefaultRankTol) {
  if (N < 5) throw std::invalid_argument("make_interval_model: N must be at least 5");
  const double s = static_cast<double>(N + 1) * static_cast<double>(N + 1);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    L(i, i) = 2.0 * s;
    if (i + 1 < N) {
      L(i, i + 1) = -s;
      L(i + 1, i) = -s;
    }
  }

  Eigen::MatrixXd interior = L.block(1, 0, N - 2, N);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(interior, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(N - 3) <= 1e-6 * sv(0))
    throw std::runtime_error("make_interval_model: unexpected interior stencil rank");
  Eigen::MatrixXd null_basis = svd.matrixV().rightCols(2);

  return make_custom_model(L, null_basis, "interval(" + std::to_string(N) + ")", rank_tol);
}

// Block-diagonal sum of two models; K is the first block's K embedded in the
// sum. Waves driven from K can never reach the second block.
inline OperatorModel make_block_model(const OperatorModel& a, const OperatorModel& b,
                                      double rank_tol = kDefaultRankTol) {
  const Eigen::Index n = a.dim + b.dim;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  L.topLeftCorner(a.dim, a.dim) = a.L;
  L.bottomRightCorner(b.dim, b.dim) = b.L;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, a.K.dim());
  k.topRows(a.dim) = a.K.basis();
  return make_custom_model(L, k, "block(" + a.label + "," + b.label + ")", rank_tol);
}

// Random SPD matrix with log-uniform spectrum in [1, 100] and a random K.
inline OperatorModel make_random_model(Eigen::Index dim, Eigen::Index k_dim,
                                       std::mt19937_64& rng, std::string label = "random",
                                       double rank_tol = kDefaultRankTol) {
  if (dim < 2 || k_dim < 1 || k_dim > dim)
    throw std::invalid_argument("make_random_model: bad dimensions");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd lam(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    lam(i) = std::exp(std::log(100.0) * unif(rng));
  Eigen::MatrixXd L = q * lam.asDiagonal() * q.transpose();
  L = 0.5 * (L + L.transpose());

  Eigen::MatrixXd k(dim, k_dim);
  for (Eigen::Index j = 0; j < k_dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) k(i, j) = gauss(rng);
  return make_custom_model(L, k, std::move(label), rank_tol);
}

// --- Vishik triples and the Green pairing -------------------------------

inline void validate_vishik(const OperatorModel& model, const VishikElement& y,
                            double tol = 1e-8) {
  if (y.y0.size() != model.dim || y.g.size() != model.dim || y.h.size() != model.dim)
    throw std::invalid_argument("validate_vishik: component dimension mismatch");
  const double gs = std::max(1.0, y.g.norm());
  if ((y.g - model.project_K(y.g)).norm() > 1e-10 * gs)
    throw std::invalid_argument("validate_vishik: g is not in K");
  const double hs = std::max(1.0, y.h.norm());
  if ((y.h - model.project_K(y.h)).norm() > 1e-10 * hs)
    throw std::invalid_argument("validate_vishik: h is not in K");
  Eigen::VectorXd ly0 = model.L * y.y0;
  if (model.project_K(ly0).norm() > tol * std::max(1.0, ly0.norm()))
    throw std::invalid_argument("validate_vishik: L y0 is not orthogonal to K");
}

namespace detail {
inline void check_triple_dims(const OperatorModel& model, const VishikElement& y,
                              const char* who) {
  if (y.y0.size() != model.dim || y.g.size() != model.dim || y.h.size() != model.dim)
    throw std::invalid_argument(std::string(who) + ": component dimension mismatch");
}
}  // namespace detail

// Action of the adjoint on the triple: L y0 + g. Like the traces below this
// evaluates the formula as given; admissibility is a separate concern
// (validate_vishik), so defect measurements still work on corrupted input.
inline Eigen::VectorXd adjoint_action(const OperatorModel& model, const VishikElement& y) {
  detail::check_triple_dims(model, y, "adjoint_action");
  return model.L * y.y0 + y.g;
}

// Ambient vector represented by the triple: y0 + L^{-1} g + h.
inline Eigen::VectorXd embed(const OperatorModel& model, const VishikElement& y) {
  detail::check_triple_dims(model, y, "embed");
  return y.y0 + apply_function(model, SpectralFn::inverse, y.g) + y.h;
}

// First boundary trace, L^{-1} (L y0 + g) - (y0 + L^{-1} g + h) = -h.
inline Eigen::VectorXd gamma1(const OperatorModel& model, const VishikElement& y) {
  detail::check_triple_dims(model, y, "gamma1");
  return -y.h;
}

// Second boundary trace, the K component of the adjoint action: g.
inline Eigen::VectorXd gamma2(const OperatorModel& model, const VishikElement& y) {
  detail::check_triple_dims(model, y, "gamma2");
  return y.g;
}

struct GreenDefectReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect = 0.0;
  double scale = 0.0;
};

// Defect of the Green identity
//   (L0* u, v) - (u, L0* v) = (G1 u, G2 v) - (G2 u, G1 v)
// for two triples; exact zero in exact arithmetic.
inline GreenDefectReport green_defect_report(const OperatorModel& model, const VishikElement& u,
                                             const VishikElement& v) {
  const Eigen::VectorXd au = adjoint_action(model, u);
  const Eigen::VectorXd av = adjoint_action(model, v);
  const Eigen::VectorXd ue = embed(model, u);
  const Eigen::VectorXd ve = embed(model, v);
  const double t1 = au.dot(ve);
  const double t2 = ue.dot(av);
  const double t3 = gamma1(model, u).dot(gamma2(model, v));
  const double t4 = gamma2(model, u).dot(gamma1(model, v));
  GreenDefectReport r;
  r.lhs = t1 - t2;
  r.rhs = t3 - t4;
  r.defect = std::abs(r.lhs - r.rhs);
  r.scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
  return r;
}

inline double green_defect(const OperatorModel& model, const VishikElement& u,
                           const VishikElement& v) {
  return green_defect_report(model, u, v).defect;
}

// Random admissible triple: y0 = L^{-1} (I - P_K) z with z Gaussian, and
// Gaussian K components for g and h.
inline VishikElement random_vishik(const OperatorModel& model, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    return v;
  };
  VishikElement y;
  y.y0 = apply_function(model, SpectralFn::inverse, model.project_K_perp(draw(model.dim)));
  y.g = model.project_K(draw(model.dim));
  y.h = model.project_K(draw(model.dim));
  return y;
}

}  // namespace wavespec
