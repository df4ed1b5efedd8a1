#include "mcqmc/models/pump.hpp"

#include <memory>
#include <sstream>

#include "mcqmc/csv.hpp"
#include "mcqmc/error.hpp"
#include "mcqmc/generators.hpp"

namespace mcqmc {

PumpData load_pump_csv(const std::string& path) {
  const auto t = read_csv(path);
  if (t.header.size() != 3 || t.header[1] != "failures" || t.header[2] != "time") {
    throw Error(ErrorKind::Config, path + ": expected header pump,failures,time");
  }
  PumpData d;
  for (const auto& r : t.rows) {
    d.failures.push_back(parse_double(r[1], path));
    d.times.push_back(parse_double(r[2], path));
  }
  for (const auto& c : t.comments) {
    if (c.find("alpha=") == std::string::npos) continue;
    std::stringstream ss(c);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      auto key = item.substr(0, eq);
      key.erase(0, key.find_first_not_of(' '));
      const double v = parse_double(item.substr(eq + 1), path);
      if (key == "alpha") d.alpha = v;
      else if (key == "gamma") d.gamma = v;
      else if (key == "delta") d.delta = v;
    }
  }
  return d;
}

PumpModel::PumpModel(PumpData data) : data_(std::move(data)) {
  if (data_.failures.empty() || data_.failures.size() != data_.times.size()) {
    throw Error(ErrorKind::Config, "pump data needs matching, non-empty failures and times");
  }
  for (std::size_t i = 0; i < k(); ++i) {
    if (!(data_.failures[i] >= 0.0) || !(data_.times[i] > 0.0)) {
      throw Error(ErrorKind::Config, "pump counts must be >= 0 and times > 0");
    }
  }
  if (!(data_.alpha > 0 && data_.gamma > 0 && data_.delta > 0)) {
    throw Error(ErrorKind::Config, "pump hyperparameters must be positive");
  }
}

State PumpModel::initial_state() const {
  State x(state_dim());
  for (std::size_t i = 0; i < k(); ++i) x[i] = data_.failures[i] > 0 ? data_.failures[i] / data_.times[i] : 1.0;
  x[k()] = 1.0;
  return x;
}

void PumpModel::step(ConstVec x, ConstVec u, MutVec out) const {
  if (x.size() != state_dim() || u.size() != innovation_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "pump step dimensions");
  }
  const double beta = x[k()];
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidState, "pump state needs beta > 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < k(); ++i) {
    out[i] = gamma_quantile(data_.alpha + data_.failures[i], data_.times[i] + beta, u[i]);
    sum += out[i];
  }
  out[k()] = gamma_quantile(data_.gamma + static_cast<double>(k()) * data_.alpha, data_.delta + sum, u[k()]);
}

UpdateFunction PumpModel::gibbs_update() const {
  auto self = std::make_shared<const PumpModel>(*this);
  return {state_dim(), innovation_dim(), UpdateKind::Gibbs,
          [self](ConstVec x, ConstVec u, MutVec out) { self->step(x, u, out); }};
}

std::vector<std::string> PumpModel::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k(); ++i) names.push_back("lambda" + std::to_string(i + 1));
  names.push_back("beta");
  return names;
}

}  // namespace mcqmc
