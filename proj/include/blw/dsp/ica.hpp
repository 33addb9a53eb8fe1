#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "blw/dsp/padding.hpp"
#include "blw/error.hpp"

namespace blw::dsp {

/// Excess kurtosis m4 / m2^2 - 3 from central moments.
inline double kurtosis(std::span<const double> x) {
  if (x.size() < 4) throw ParameterError("kurtosis needs at least four samples");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= static_cast<double>(x.size());
  m4 /= static_cast<double>(x.size());
  if (!(m2 > 0.0)) throw ParameterError("kurtosis undefined for zero variance");
  return m4 / (m2 * m2) - 3.0;
}

/// Pseudo multichannel matrix built from delayed copies of one signal.
/// Row k holds x[m - delays[k]]; samples before the record start are mirrored.
struct DelayEmbedding {
  Eigen::MatrixXd rows;
  std::vector<std::size_t> delays;
};

inline DelayEmbedding delay_embed(std::span<const double> x, std::size_t channels, std::size_t delay_step) {
  if (channels < 2) throw ParameterError("delay embedding needs at least two channels");
  if (delay_step < 1) throw ParameterError("delay step must be at least one sample");
  const std::size_t n = x.size();
  DelayEmbedding emb;
  emb.rows.resize(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < channels; ++k) {
    const std::size_t delay = k * delay_step;
    emb.delays.push_back(delay);
    for (std::size_t m = 0; m < n; ++m) {
      const long long src = static_cast<long long>(m) - static_cast<long long>(delay);
      emb.rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = x[symmetric_index(src, n)];
    }
  }
  return emb;
}

struct FastIcaOptions {
  std::uint64_t seed = 42;
  std::size_t max_iter = 200;
  double tol = 1e-4;
  /// Eigenvalues below this fraction of the largest are dropped during whitening.
  double rank_tol = 1e-10;
};

struct FastIcaResult {
  Eigen::MatrixXd components;  // k x n, unit variance
  Eigen::MatrixXd mixing;      // rows x k: centred input ~= mixing * components
  Eigen::MatrixXd unmixing;    // k x k, orthogonal, acts on whitened data
  Eigen::MatrixXd whitening;   // k x rows
  Eigen::VectorXd mean;        // per-row mean removed before whitening
  bool converged = false;
  std::size_t iterations = 0;
};

namespace detail {

// W <- (W W^T)^{-1/2} W
inline Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

}  // namespace detail

/// Symmetric FastICA with the tanh (log-cosh) contrast.
///
/// Rows are centred and whitened by PCA, then all unmixing vectors are
/// updated in parallel by the fixed-point rule and re-orthogonalized each
/// iteration. On non-convergence the last iterate is returned with
/// `converged == false`.
inline FastIcaResult fastica(const Eigen::MatrixXd& mixed, const FastIcaOptions& opt = {}) {
  const Eigen::Index r = mixed.rows();
  const Eigen::Index n = mixed.cols();
  if (r < 2) throw ParameterError("FastICA needs at least two rows");
  if (n <= r) throw ParameterError("FastICA needs more columns than rows");

  FastIcaResult res;
  res.mean = mixed.rowwise().mean();
  Eigen::MatrixXd xc = mixed.colwise() - res.mean;
  const Eigen::VectorXd var = xc.rowwise().squaredNorm() / static_cast<double>(n);
  if (var.minCoeff() <= 1e-14 * std::max(1.0, var.maxCoeff()))
    throw ParameterError("FastICA input has a constant row; whitening impossible");

  const Eigen::MatrixXd cov = xc * xc.transpose() / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double top = ev(r - 1);
  Eigen::Index first = 0;
  while (first < r && ev(first) <= opt.rank_tol * top) ++first;
  const Eigen::Index k = r - first;
  if (k < 2) throw ParameterError("FastICA input has rank below two");
  const Eigen::MatrixXd e = es.eigenvectors().rightCols(k);
  const Eigen::VectorXd d = ev.tail(k);
  res.whitening = d.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
  const Eigen::MatrixXd z = res.whitening * xc;
  xc.resize(0, 0);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) w(i, j) = normal(rng);
  w = detail::symmetric_decorrelation(w);

  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd g(k, n);
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    g.noalias() = w * z;
    Eigen::VectorXd gprime_mean = Eigen::VectorXd::Zero(k);
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index i = 0; i < k; ++i) {
        const double t = std::tanh(g(i, c));
        g(i, c) = t;
        gprime_mean(i) += 1.0 - t * t;
      }
    }
    gprime_mean *= inv_n;
    Eigen::MatrixXd w_new = (g * z.transpose()) * inv_n - gprime_mean.asDiagonal() * w;
    w_new = detail::symmetric_decorrelation(w_new);
    const double lim = ((w_new * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = std::move(w_new);
    res.iterations = it;
    if (lim < opt.tol) {
      res.converged = true;
      break;
    }
  }
  res.unmixing = w;
  res.components = w * z;
  // Dewhitening: xc = E D^{1/2} z and z = W^T s.
  res.mixing = e * d.cwiseSqrt().asDiagonal() * w.transpose();
  return res;
}

}  // namespace blw::dsp
