// Copyright 2026 The dyndp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Desk-scale classifiers with exact per-sample gradients by manual
// backpropagation.
//
// Parameter layouts (row-major):
//   logistic regression, 2 classes:  [w (d), b]
//   logistic regression, K > 2:      [W (K x d), b (K)]      softmax
//   one-hidden-layer MLP:            [W1 (H x d), b1 (H), W2 (K x H), b2 (K)]
//                                    tanh hidden units, softmax output
// All use the cross-entropy loss.

#ifndef DYNDP_MODELS_H_
#define DYNDP_MODELS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "dyndp/dataset.h"
#include "dyndp/dp_mech.h"

namespace dyndp {

enum class ModelKind { kLogisticRegression, kMlp };

absl::StatusOr<ModelKind> ParseModelKind(const std::string& name);
std::string ModelKindName(ModelKind kind);

struct ModelParams {
  std::vector<double> theta;
  std::int64_t step_count = 0;
};

struct Model {
  ModelKind kind = ModelKind::kLogisticRegression;
  int input_dim = 0;
  int hidden = 0;
  int num_classes = 2;
  ModelParams params;

  int NumParams() const;
  bool IsBinaryLogistic() const {
    return kind == ModelKind::kLogisticRegression && num_classes == 2;
  }
};

// Logistic models start at zero. MLP weights are N(0, 1/fan_in) from the
// kInit stream of `seed`; biases start at zero.
absl::StatusOr<Model> MakeModel(ModelKind kind, int input_dim, int num_classes,
                                int hidden, std::uint64_t seed);

// Exact per-sample gradients and losses at the model's current parameters.
GradientBatch PerSampleGradients(const Model& model, const Dataset& data,
                                 absl::Span<const int> indices);

double SampleLoss(const Model& model, absl::Span<const double> x, int label);
int Predict(const Model& model, absl::Span<const double> x);

double MeanLoss(const Model& model, const Dataset& data);
double Accuracy(const Model& model, const Dataset& data);

// Gradient of the mean loss over the full dataset, accumulated layer-wise
// over the whole batch instead of row by row.
std::vector<double> FullBatchGradient(const Model& model, const Dataset& data);

// Upper bound on ||g_x|| for inputs with ||x|| <= input_norm_bound. Exact for
// the logistic models; for the MLP it depends on the current output weights.
double GradientNormBound(const Model& model, double input_norm_bound);

}  // namespace dyndp

#endif  // DYNDP_MODELS_H_
