#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topotrail {

struct LabeledSample {
  std::vector<double> features;
  int label = 0;  // 0 or 1
};

// L2-penalized logistic model. Weights act on standardized features:
// z_j = (x_j - mean_j) / scale_j, or 0 where scale_j == 0.
struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0.0;
  double inverse_regularization = 1.0;  // C
  std::vector<double> mean;
  std::vector<double> scale;

  std::size_t feature_length() const noexcept { return weights.size(); }
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Stratified, seeded split. The train size is n * fraction rounded half up;
// per-label train counts are allotted by largest remainder. Throws
// ValidationError if a present label ends up absent from either side.
SplitIndices train_test_split(std::span<const LabeledSample> samples,
                              double train_fraction, std::uint64_t seed);

std::vector<LabeledSample> select(std::span<const LabeledSample> samples,
                                  std::span<const std::size_t> indices);

// f(w, c) = 1/2 |w|^2 + C * sum_i log(1 + exp(-s_i (x_i . w + c))), with
// s_i = 2 y_i - 1. Parameters are packed as [w_0 .. w_{d-1}, c].
class LogisticObjective {
 public:
  LogisticObjective(std::span<const std::vector<double>> features,
                    std::span<const int> labels, double C);

  std::size_t dimension() const noexcept { return dim_ + 1; }
  double value(std::span<const double> params) const;
  // Writes the gradient into `grad` (size dimension()) and returns f.
  double value_and_gradient(std::span<const double> params, std::span<double> grad) const;

 private:
  std::span<const std::vector<double>> features_;
  std::span<const int> labels_;
  double C_;
  std::size_t dim_;
};

struct FitOptions {
  double C = 1.0;
  int max_iter = 5000;
  double tol = 1e-6;  // on the max-norm of the gradient
  std::optional<std::vector<double>> initial_params;
};

// Per-coordinate mean and population standard deviation (0 for constant
// coordinates).
void standardization(std::span<const LabeledSample> samples, std::vector<double>& mean,
                     std::vector<double>& scale);
std::vector<double> standardize(const LogisticModel& model, std::span<const double> x);

// Full-batch gradient descent with Armijo backtracking; each trial step
// starts from the Barzilai-Borwein estimate. Throws ValidationError for an
// empty or single-class training set and NumericError if the objective
// becomes non-finite.
LogisticModel fit(std::span<const LabeledSample> train, const FitOptions& options = {});

struct Prediction {
  int label = 0;
  double probability = 0.5;  // P(label = 1)
};

Prediction predict(const LogisticModel& model, std::span<const double> features);

double accuracy(const LogisticModel& model, std::span<const LabeledSample> test);

std::string model_to_json(const LogisticModel& model);
LogisticModel model_from_json(std::string_view json);

}  // namespace topotrail
