#include "mcqmc/models/probit.hpp"

#include <cmath>

#include "mcqmc/csv.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/generators.hpp"

namespace mcqmc {

namespace {

double tau(double x) { return normal_pdf(x) / normal_cdf(x); }

}  // namespace

ProbitModel::ProbitModel(Eigen::MatrixXd X, std::vector<int> y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() == 0 || X_.cols() == 0) throw Error(ErrorKind::Config, "probit design is empty");
  if (static_cast<std::size_t>(X_.rows()) != y_.size()) throw Error(ErrorKind::Config, "probit X and y lengths differ");
  for (int v : y_) {
    if (v != 0 && v != 1) throw Error(ErrorKind::Config, "probit responses must be 0 or 1");
  }
  xtx_ = X_.transpose() * X_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(xtx_);
  const Eigen::VectorXd ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff() * static_cast<double>(p()))) {
    throw Error(ErrorKind::Config, "probit design matrix must have full column rank");
  }
  const Eigen::MatrixXd& V = eig.eigenvectors();
  xtx_inv_ = V * ev.cwiseInverse().asDiagonal() * V.transpose();
  xtx_inv_sqrt_ = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
  proj_ = xtx_inv_ * X_.transpose();
}

ProbitModel ProbitModel::from_csv(const std::string& path) {
  const auto t = read_csv(path);
  if (t.header.size() < 2 || t.header[0] != "y") throw Error(ErrorKind::Config, path + ": expected header y,x1,...");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto p = static_cast<Eigen::Index>(t.header.size() - 1);
  Eigen::MatrixXd X(n, p);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = t.rows[static_cast<std::size_t>(i)];
    y.push_back(static_cast<int>(parse_double(r[0], path)));
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = parse_double(r[static_cast<std::size_t>(j + 1)], path);
  }
  return ProbitModel(std::move(X), std::move(y));
}

Eigen::VectorXd ProbitModel::z_update(const Eigen::VectorXd& beta, ConstVec u) const {
  if (u.size() != n()) throw Error(ErrorKind::DimensionMismatch, "Z update needs n uniforms");
  const Eigen::VectorXd m = X_ * beta;
  Eigen::VectorXd z(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const auto side = y_[static_cast<std::size_t>(i)] == 1 ? TruncSide::Positive : TruncSide::Negative;
    z[i] = truncated_normal_inverse(m[i], side, u[static_cast<std::size_t>(i)]);
  }
  return z;
}

Eigen::VectorXd ProbitModel::beta_update(const Eigen::VectorXd& z, ConstVec u) const {
  if (u.size() != p()) throw Error(ErrorKind::DimensionMismatch, "beta update needs p uniforms");
  Eigen::VectorXd g(static_cast<Eigen::Index>(p()));
  for (std::size_t j = 0; j < p(); ++j) g[static_cast<Eigen::Index>(j)] = normal_quantile(u[j]);
  return proj_ * z + xtx_inv_sqrt_ * g;
}

std::vector<double> ProbitModel::recover_u(const Eigen::VectorXd& beta, const Eigen::VectorXd& z) const {
  const Eigen::VectorXd m = X_ * beta;
  std::vector<double> u(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (y_[i] == 1) {
      // (Phi(Z-m) - Phi(-m)) / Phi(m), via upper tails for precision
      u[i] = 1.0 - normal_cdf(m[ii] - z[ii]) / normal_cdf(m[ii]);
    } else {
      u[i] = normal_cdf(z[ii] - m[ii]) / normal_cdf(-m[ii]);
    }
  }
  return u;
}

std::vector<double> ProbitModel::lambda(const Eigen::VectorXd& beta, const Eigen::VectorXd& z, ConstVec u) const {
  if (u.size() < n()) throw Error(ErrorKind::DimensionMismatch, "lambda needs the n Z-uniforms");
  const Eigen::VectorXd m = X_ * beta;
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double r = z[ii] - m[ii];
    const double ratio = std::exp(0.5 * (r * r - m[ii] * m[ii]));  // phi(m)/phi(Z-m)
    out[i] = 1.0 - (y_[i] == 1 ? 1.0 - u[i] : u[i]) * ratio;
  }
  return out;
}

std::vector<double> ProbitModel::lambda_mills(const Eigen::VectorXd& beta, const Eigen::VectorXd& z) const {
  const Eigen::VectorXd m = X_ * beta;
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double one_minus =
        y_[i] == 1 ? tau(m[ii]) / tau(m[ii] - z[ii]) : tau(-m[ii]) / tau(z[ii] - m[ii]);
    out[i] = 1.0 - one_minus;
  }
  return out;
}

double ProbitModel::d1(const Eigen::VectorXd& beta_a, const Eigen::VectorXd& beta_b) const {
  return (X_ * (beta_a - beta_b)).norm();
}

double ProbitModel::d2(const Eigen::VectorXd& z_a, const Eigen::VectorXd& z_b) { return (z_a - z_b).norm(); }

double ProbitModel::metric(ConstVec a, ConstVec b) const {
  return std::max(d1(beta_of(a), beta_of(b)), d2(z_of(a), z_of(b)));
}

bool ProbitModel::sign_consistent(const Eigen::VectorXd& z) const {
  for (std::size_t i = 0; i < n(); ++i) {
    const double v = z[static_cast<Eigen::Index>(i)];
    if (y_[i] == 1 ? !(v > 0.0) : !(v <= 0.0)) return false;
  }
  return true;
}

State ProbitModel::pack(const Eigen::VectorXd& beta, const Eigen::VectorXd& z) const {
  State s(state_dim());
  for (std::size_t j = 0; j < p(); ++j) s[j] = beta[static_cast<Eigen::Index>(j)];
  for (std::size_t i = 0; i < n(); ++i) s[p() + i] = z[static_cast<Eigen::Index>(i)];
  return s;
}

Eigen::VectorXd ProbitModel::beta_of(ConstVec state) const {
  return Eigen::Map<const Eigen::VectorXd>(state.data(), static_cast<Eigen::Index>(p()));
}

Eigen::VectorXd ProbitModel::z_of(ConstVec state) const {
  return Eigen::Map<const Eigen::VectorXd>(state.data() + p(), static_cast<Eigen::Index>(n()));
}

State ProbitModel::initial_state() const {
  const Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p()));
  const std::vector<double> half(n(), 0.5);
  return pack(beta, z_update(beta, half));
}

void ProbitModel::step(ConstVec x, ConstVec u, MutVec out) const {
  if (x.size() != state_dim() || u.size() != innovation_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "probit step dimensions");
  }
  const Eigen::VectorXd z = z_update(beta_of(x), u.first(n()));
  const Eigen::VectorXd beta = beta_update(z, u.subspan(n(), p()));
  const State s = pack(beta, z);
  std::copy(s.begin(), s.end(), out.begin());
}

UpdateFunction ProbitModel::gibbs_update() const {
  auto self = std::make_shared<const ProbitModel>(*this);
  return {state_dim(), innovation_dim(), UpdateKind::Gibbs,
          [self](ConstVec x, ConstVec u, MutVec out) { self->step(x, u, out); }};
}

std::vector<std::string> ProbitModel::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p(); ++j) names.push_back("beta" + std::to_string(j + 1));
  for (std::size_t i = 0; i < n(); ++i) names.push_back("Z" + std::to_string(i + 1));
  return names;
}

}  // namespace mcqmc
