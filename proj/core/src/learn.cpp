#include "topotrail/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "topotrail/error.hpp"

namespace topotrail {
namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SplitIndices train_test_split(std::span<const LabeledSample> samples,
                              double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  const std::size_t n = samples.size();
  if (n < 2) throw ValidationError("split needs at least two samples");
  const auto train_total =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 0.5));
  if (train_total == 0 || train_total == n) {
    throw ValidationError("train fraction leaves one side of the split empty");
  }

  std::vector<std::size_t> by_label[2];
  for (std::size_t i = 0; i < n; ++i) {
    const int y = samples[i].label;
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    by_label[y].push_back(i);
  }

  std::size_t quota[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(by_label[c].size()) * train_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += quota[c];
  }
  // Largest remainder first; label 0 wins ties.
  const int order[2] = {remainder[1] > remainder[0] ? 1 : 0,
                        remainder[1] > remainder[0] ? 0 : 1};
  for (int k = 0; assigned < train_total; k = (k + 1) % 2) {
    const int c = order[k];
    if (quota[c] < by_label[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  std::mt19937_64 rng(seed);
  SplitIndices split;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_label[c];
    if (idx.empty()) continue;
    std::shuffle(idx.begin(), idx.end(), rng);
    if (quota[c] == 0 || quota[c] == idx.size()) {
      throw ValidationError("label " + std::to_string(c) +
                            " is missing from one side of the split; choose a "
                            "different train fraction");
    }
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + quota[c]);
    split.test.insert(split.test.end(), idx.begin() + quota[c], idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<LabeledSample> select(std::span<const LabeledSample> samples,
                                  std::span<const std::size_t> indices) {
  std::vector<LabeledSample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(samples[i]);
  return out;
}

LogisticObjective::LogisticObjective(std::span<const std::vector<double>> features,
                                     std::span<const int> labels, double C)
    : features_(features), labels_(labels), C_(C),
      dim_(features.empty() ? 0 : features.front().size()) {
  if (features.size() != labels.size()) {
    throw ValidationError("feature and label counts differ");
  }
}

double LogisticObjective::value(std::span<const double> params) const {
  const auto w = params.first(dim_);
  const double c = params[dim_];
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const double s = labels_[i] == 1 ? 1.0 : -1.0;
    loss += softplus(-s * (dot(features_[i], w) + c));
  }
  return 0.5 * dot(w, w) + C_ * loss;
}

double LogisticObjective::value_and_gradient(std::span<const double> params,
                                             std::span<double> grad) const {
  const auto w = params.first(dim_);
  const double c = params[dim_];
  std::copy(w.begin(), w.end(), grad.begin());
  grad[dim_] = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const double s = labels_[i] == 1 ? 1.0 : -1.0;
    const double margin = s * (dot(features_[i], w) + c);
    loss += softplus(-margin);
    // d/dm softplus(-m) = -sigmoid(-m)
    const double coef = -C_ * s * sigmoid(-margin);
    const auto& x = features_[i];
    for (std::size_t j = 0; j < dim_; ++j) grad[j] += coef * x[j];
    grad[dim_] += coef;
  }
  return 0.5 * dot(w, w) + C_ * loss;
}

void standardization(std::span<const LabeledSample> samples, std::vector<double>& mean,
                     std::vector<double>& scale) {
  const std::size_t d = samples.empty() ? 0 : samples.front().features.size();
  mean.assign(d, 0.0);
  scale.assign(d, 0.0);
  const double n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += s.features[j];
  }
  for (double& m : mean) m /= n;
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = s.features[j] - mean[j];
      scale[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(scale[j] / n);
    // Treat spreads at rounding level as constant columns.
    scale[j] = sd > 1e-12 * std::max(1.0, std::abs(mean[j])) ? sd : 0.0;
  }
}

std::vector<double> standardize(const LogisticModel& model, std::span<const double> x) {
  if (x.size() != model.feature_length()) {
    throw ValidationError("feature length " + std::to_string(x.size()) +
                          " does not match model length " +
                          std::to_string(model.feature_length()));
  }
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    z[j] = model.scale[j] > 0.0 ? (x[j] - model.mean[j]) / model.scale[j] : 0.0;
  }
  return z;
}

LogisticModel fit(std::span<const LabeledSample> train, const FitOptions& options) {
  if (train.empty()) throw ValidationError("training set is empty");
  if (!(options.C > 0.0)) throw ValidationError("C must be positive");
  if (options.max_iter < 1 || !(options.tol > 0.0)) {
    throw ValidationError("max_iter must be >= 1 and tol positive");
  }
  const std::size_t d = train.front().features.size();
  bool has[2] = {false, false};
  for (const auto& s : train) {
    if (s.features.size() != d) throw ValidationError("inconsistent feature lengths");
    if (s.label != 0 && s.label != 1) throw ValidationError("labels must be 0 or 1");
    for (double v : s.features) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
    }
    has[s.label] = true;
  }
  if (!has[0] || !has[1]) throw ValidationError("training set contains a single class");

  LogisticModel model;
  model.inverse_regularization = options.C;
  standardization(train, model.mean, model.scale);
  model.weights.assign(d, 0.0);

  std::vector<std::vector<double>> z;
  std::vector<int> y;
  z.reserve(train.size());
  for (const auto& s : train) {
    z.push_back(standardize(model, s.features));
    y.push_back(s.label);
  }
  const LogisticObjective objective(z, y, options.C);

  std::vector<double> x(d + 1, 0.0);
  if (options.initial_params) {
    if (options.initial_params->size() != d + 1) {
      throw ValidationError("initial parameters must have feature_length + 1 entries");
    }
    x = *options.initial_params;
  }
  std::vector<double> g(d + 1), x_new(d + 1), g_new(d + 1);
  double f = objective.value_and_gradient(x, g);
  if (!std::isfinite(f)) throw NumericError("non-finite objective at iteration 0");

  // Lipschitz bound of the gradient for standardized data.
  double sq = 0.0;
  for (const auto& row : z) sq += dot(row, row) + 1.0;
  double step = 1.0 / (1.0 + 0.25 * options.C * sq);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    if (max_abs(g) < options.tol) break;
    const double gg = dot(g, g);
    double t = step;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t k = 0; k <= d; ++k) x_new[k] = x[k] - t * g[k];
      f_new = objective.value_and_gradient(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f - 1e-4 * t * gg) {
        accepted = true;
        break;
      }
      // Within rounding of f the Armijo test is meaningless; accept a step
      // that still shrinks the gradient.
      if (std::isfinite(f_new) && f_new <= f + 1e-14 * std::abs(f) &&
          max_abs(g_new) < max_abs(g)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!std::isfinite(f_new)) {
      throw NumericError("non-finite objective at iteration " + std::to_string(iter));
    }
    if (!accepted) break;

    double sy = 0.0, ss = 0.0;
    for (std::size_t k = 0; k <= d; ++k) {
      const double s = x_new[k] - x[k];
      sy += s * (g_new[k] - g[k]);
      ss += s * s;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 2.0 * t;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
  }

  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d), model.weights.begin());
  model.intercept = x[d];
  return model;
}

Prediction predict(const LogisticModel& model, std::span<const double> features) {
  const auto z = standardize(model, features);
  const double p = sigmoid(dot(z, model.weights) + model.intercept);
  return {p >= 0.5 ? 1 : 0, p};
}

double accuracy(const LogisticModel& model, std::span<const LabeledSample> test) {
  if (test.empty()) throw ValidationError("accuracy needs a non-empty test set");
  std::size_t correct = 0;
  for (const auto& s : test) {
    if (predict(model, s.features).label == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::string model_to_json(const LogisticModel& model) {
  nlohmann::json j;
  j["weights"] = model.weights;
  j["intercept"] = model.intercept;
  j["C"] = model.inverse_regularization;
  j["means"] = model.mean;
  j["scales"] = model.scale;
  j["feature_length"] = model.feature_length();
  return j.dump(2);
}

LogisticModel model_from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    LogisticModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.inverse_regularization = j.at("C").get<double>();
    m.mean = j.at("means").get<std::vector<double>>();
    m.scale = j.at("scales").get<std::vector<double>>();
    const auto len = j.at("feature_length").get<std::size_t>();
    if (m.weights.size() != len || m.mean.size() != len || m.scale.size() != len) {
      throw ValidationError("model JSON vector lengths disagree with feature_length");
    }
    if (!(m.inverse_regularization > 0.0)) throw ValidationError("model C must be positive");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace topotrail
