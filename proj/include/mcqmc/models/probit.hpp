#pragma once

// Probit regression with latent Z_i = x_i'beta + eps_i, flat prior on beta,
// sampled by the two-block data-augmentation Gibbs sampler.
// State layout: (beta_1..beta_p, Z_1..Z_n). Innovations: u_1..u_n drive Z,
// u_{n+1}..u_{n+p} drive beta.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcqmc/samplers.hpp"

namespace mcqmc {

class ProbitModel {
 public:
  /// Throws Config unless X is n x p with rank p and y is 0/1 of length n.
  ProbitModel(Eigen::MatrixXd X, std::vector<int> y);
  /// CSV with header "y,x1,...,xp"; lines starting with '#' are skipped.
  static ProbitModel from_csv(const std::string& path);

  std::size_t n() const noexcept { return static_cast<std::size_t>(X_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(X_.cols()); }
  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const std::vector<int>& y() const noexcept { return y_; }
  const Eigen::MatrixXd& xtx() const noexcept { return xtx_; }
  const Eigen::MatrixXd& xtx_inv() const noexcept { return xtx_inv_; }
  /// (X'X)^{-1} X'
  const Eigen::MatrixXd& projector() const noexcept { return proj_; }
  /// Symmetric square root of (X'X)^{-1}.
  const Eigen::MatrixXd& xtx_inv_sqrt() const noexcept { return xtx_inv_sqrt_; }

  Eigen::VectorXd z_update(const Eigen::VectorXd& beta, ConstVec u) const;
  Eigen::VectorXd beta_update(const Eigen::VectorXd& z, ConstVec u) const;
  /// The uniforms that z_update would need to produce z from beta.
  std::vector<double> recover_u(const Eigen::VectorXd& beta, const Eigen::VectorXd& z) const;

  /// dZ_i/d(x_i'beta) for the Z update driven by u.
  std::vector<double> lambda(const Eigen::VectorXd& beta, const Eigen::VectorXd& z, ConstVec u) const;
  /// Same quantity through tau(x) = phi(x)/Phi(x): 1 - lambda_i is
  /// tau(m_i)/tau(m_i - Z_i) for y_i = 1 and tau(-m_i)/tau(Z_i - m_i) for y_i = 0.
  std::vector<double> lambda_mills(const Eigen::VectorXd& beta, const Eigen::VectorXd& z) const;

  double d1(const Eigen::VectorXd& beta_a, const Eigen::VectorXd& beta_b) const;
  static double d2(const Eigen::VectorXd& z_a, const Eigen::VectorXd& z_b);
  /// max(d1, d2) on packed states.
  double metric(ConstVec a, ConstVec b) const;

  bool sign_consistent(const Eigen::VectorXd& z) const;

  std::size_t state_dim() const noexcept { return n() + p(); }
  std::size_t innovation_dim() const noexcept { return n() + p(); }
  State pack(const Eigen::VectorXd& beta, const Eigen::VectorXd& z) const;
  Eigen::VectorXd beta_of(ConstVec state) const;
  Eigen::VectorXd z_of(ConstVec state) const;
  /// beta = 0 and Z at its conditional medians.
  State initial_state() const;

  void step(ConstVec x, ConstVec u, MutVec out) const;
  /// Update function holding a shared copy of the model.
  UpdateFunction gibbs_update() const;
  std::vector<std::string> parameter_names() const;

 private:
  Eigen::MatrixXd X_;
  std::vector<int> y_;
  Eigen::MatrixXd xtx_, xtx_inv_, proj_, xtx_inv_sqrt_;
};

}  // namespace mcqmc
