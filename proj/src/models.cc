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

#include "dyndp/models.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/rng.h"

namespace dyndp {
namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z).
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// In-place softmax; returns log-sum-exp of the input logits.
double SoftmaxInPlace(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return top + std::log(sum);
}

// Views into the MLP parameter vector.
struct MlpLayout {
  int d, h, k;
  size_t w1() const { return 0; }
  size_t b1() const { return static_cast<size_t>(h) * d; }
  size_t w2() const { return b1() + h; }
  size_t b2() const { return w2() + static_cast<size_t>(k) * h; }
  size_t total() const { return b2() + k; }
};

MlpLayout Layout(const Model& m) { return {m.input_dim, m.hidden, m.num_classes}; }

struct MlpForward {
  std::vector<double> hidden;  // tanh activations
  std::vector<double> probs;
  double log_norm = 0.0;
  std::vector<double> logits;
};

MlpForward ForwardMlp(const Model& m, absl::Span<const double> x) {
  const MlpLayout L = Layout(m);
  const std::vector<double>& th = m.params.theta;
  MlpForward f;
  f.hidden.resize(L.h);
  for (int j = 0; j < L.h; ++j) {
    double a = th[L.b1() + j];
    const double* w = &th[L.w1() + static_cast<size_t>(j) * L.d];
    for (int i = 0; i < L.d; ++i) a += w[i] * x[i];
    f.hidden[j] = std::tanh(a);
  }
  f.logits.resize(L.k);
  for (int c = 0; c < L.k; ++c) {
    double z = th[L.b2() + c];
    const double* w = &th[L.w2() + static_cast<size_t>(c) * L.h];
    for (int j = 0; j < L.h; ++j) z += w[j] * f.hidden[j];
    f.logits[c] = z;
  }
  f.probs = f.logits;
  f.log_norm = SoftmaxInPlace(f.probs);
  return f;
}

std::vector<double> SoftmaxLogits(const Model& m, absl::Span<const double> x) {
  const int d = m.input_dim;
  const std::vector<double>& th = m.params.theta;
  const size_t bias = static_cast<size_t>(m.num_classes) * d;
  std::vector<double> z(m.num_classes);
  for (int c = 0; c < m.num_classes; ++c) {
    double v = th[bias + c];
    const double* w = &th[static_cast<size_t>(c) * d];
    for (int i = 0; i < d; ++i) v += w[i] * x[i];
    z[c] = v;
  }
  return z;
}

double BinaryLogit(const Model& m, absl::Span<const double> x) {
  const std::vector<double>& th = m.params.theta;
  double z = th[m.input_dim];
  for (int i = 0; i < m.input_dim; ++i) z += th[i] * x[i];
  return z;
}

// Writes the gradient of the per-sample loss into `out` and returns the loss.
double SampleGradient(const Model& m, absl::Span<const double> x, int y,
                      absl::Span<double> out) {
  const int d = m.input_dim;
  if (m.IsBinaryLogistic()) {
    const double z = BinaryLogit(m, x);
    const double r = Sigmoid(z) - y;
    for (int i = 0; i < d; ++i) out[i] = r * x[i];
    out[d] = r;
    return Softplus(z) - y * z;
  }
  if (m.kind == ModelKind::kLogisticRegression) {
    std::vector<double> p = SoftmaxLogits(m, x);
    const double zy = p[y];
    const double lse = SoftmaxInPlace(p);
    p[y] -= 1.0;
    const size_t bias = static_cast<size_t>(m.num_classes) * d;
    for (int c = 0; c < m.num_classes; ++c) {
      double* g = &out[static_cast<size_t>(c) * d];
      for (int i = 0; i < d; ++i) g[i] = p[c] * x[i];
      out[bias + c] = p[c];
    }
    return lse - zy;
  }
  const MlpLayout L = Layout(m);
  const std::vector<double>& th = m.params.theta;
  MlpForward f = ForwardMlp(m, x);
  const double loss = f.log_norm - f.logits[y];
  std::vector<double> dz = f.probs;
  dz[y] -= 1.0;
  std::vector<double> da(L.h, 0.0);
  for (int c = 0; c < L.k; ++c) {
    const double* w = &th[L.w2() + static_cast<size_t>(c) * L.h];
    double* g = &out[L.w2() + static_cast<size_t>(c) * L.h];
    for (int j = 0; j < L.h; ++j) {
      g[j] = dz[c] * f.hidden[j];
      da[j] += w[j] * dz[c];
    }
    out[L.b2() + c] = dz[c];
  }
  for (int j = 0; j < L.h; ++j) {
    da[j] *= 1.0 - f.hidden[j] * f.hidden[j];
    double* g = &out[L.w1() + static_cast<size_t>(j) * L.d];
    for (int i = 0; i < L.d; ++i) g[i] = da[j] * x[i];
    out[L.b1() + j] = da[j];
  }
  return loss;
}

}  // namespace

absl::StatusOr<ModelKind> ParseModelKind(const std::string& name) {
  if (name == "logistic_regression" || name == "logistic") {
    return ModelKind::kLogisticRegression;
  }
  if (name == "mlp" || name == "mlp_1hidden") return ModelKind::kMlp;
  return absl::InvalidArgumentError(absl::StrFormat("unknown model kind '%s'", name));
}

std::string ModelKindName(ModelKind kind) {
  return kind == ModelKind::kMlp ? "mlp_1hidden" : "logistic_regression";
}

int Model::NumParams() const {
  if (IsBinaryLogistic()) return input_dim + 1;
  if (kind == ModelKind::kLogisticRegression) return num_classes * (input_dim + 1);
  return static_cast<int>(Layout(*this).total());
}

absl::StatusOr<Model> MakeModel(ModelKind kind, int input_dim, int num_classes,
                                int hidden, std::uint64_t seed) {
  if (input_dim < 1) return absl::InvalidArgumentError("input dimension must be >= 1");
  if (num_classes < 2) return absl::InvalidArgumentError("need at least two classes");
  if (kind == ModelKind::kMlp && hidden < 1) {
    return absl::InvalidArgumentError("MLP needs at least one hidden unit");
  }
  Model m;
  m.kind = kind;
  m.input_dim = input_dim;
  m.num_classes = num_classes;
  m.hidden = kind == ModelKind::kMlp ? hidden : 0;
  m.params.theta.assign(m.NumParams(), 0.0);
  if (kind == ModelKind::kMlp) {
    const MlpLayout L = Layout(m);
    Rng rng = MakeStream(seed, Stream::kInit, 0);
    std::normal_distribution<double> w1(0.0, 1.0 / std::sqrt(static_cast<double>(L.d)));
    std::normal_distribution<double> w2(0.0, 1.0 / std::sqrt(static_cast<double>(L.h)));
    for (size_t i = L.w1(); i < L.b1(); ++i) m.params.theta[i] = w1(rng);
    for (size_t i = L.w2(); i < L.b2(); ++i) m.params.theta[i] = w2(rng);
  }
  return m;
}

GradientBatch PerSampleGradients(const Model& model, const Dataset& data,
                                 absl::Span<const int> indices) {
  GradientBatch batch;
  batch.dim = model.NumParams();
  batch.sample_ids.assign(indices.begin(), indices.end());
  batch.values.assign(indices.size() * static_cast<size_t>(batch.dim), 0.0);
  batch.losses.resize(indices.size());
  for (size_t r = 0; r < indices.size(); ++r) {
    const int i = indices[r];
    absl::Span<double> out =
        absl::MakeSpan(batch.values).subspan(r * batch.dim, batch.dim);
    batch.losses[r] = SampleGradient(model, data.row(i), data.labels[i], out);
  }
  return batch;
}

double SampleLoss(const Model& model, absl::Span<const double> x, int label) {
  if (model.IsBinaryLogistic()) {
    const double z = BinaryLogit(model, x);
    return Softplus(z) - label * z;
  }
  if (model.kind == ModelKind::kLogisticRegression) {
    std::vector<double> z = SoftmaxLogits(model, x);
    const double zy = z[label];
    return SoftmaxInPlace(z) - zy;
  }
  MlpForward f = ForwardMlp(model, x);
  return f.log_norm - f.logits[label];
}

int Predict(const Model& model, absl::Span<const double> x) {
  if (model.IsBinaryLogistic()) return BinaryLogit(model, x) > 0.0 ? 1 : 0;
  std::vector<double> z = model.kind == ModelKind::kLogisticRegression
                              ? SoftmaxLogits(model, x)
                              : ForwardMlp(model, x).logits;
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double MeanLoss(const Model& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < data.size(); ++i) s += SampleLoss(model, data.row(i), data.labels[i]);
  return s / data.size();
}

double Accuracy(const Model& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) {
    correct += Predict(model, data.row(i)) == data.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / data.size();
}

std::vector<double> FullBatchGradient(const Model& model, const Dataset& data) {
  const int n = data.size();
  const int d = model.input_dim;
  std::vector<double> grad(model.NumParams(), 0.0);
  if (n == 0) return grad;
  const double inv_n = 1.0 / n;

  if (model.IsBinaryLogistic()) {
    std::vector<double> residual(n);
    for (int i = 0; i < n; ++i) {
      residual[i] = Sigmoid(BinaryLogit(model, data.row(i))) - data.labels[i];
    }
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += residual[i] * data.features[static_cast<size_t>(i) * d + j];
      grad[j] = s * inv_n;
    }
    double s = 0.0;
    for (double r : residual) s += r;
    grad[d] = s * inv_n;
    return grad;
  }

  // Output-layer error for every sample: probs - onehot.
  const int k = model.num_classes;
  std::vector<double> delta(static_cast<size_t>(n) * k);
  std::vector<double> hidden;
  const int h = model.hidden;
  if (model.kind == ModelKind::kMlp) hidden.resize(static_cast<size_t>(n) * h);
  for (int i = 0; i < n; ++i) {
    std::vector<double> p;
    if (model.kind == ModelKind::kMlp) {
      MlpForward f = ForwardMlp(model, data.row(i));
      std::copy(f.hidden.begin(), f.hidden.end(), hidden.begin() + static_cast<size_t>(i) * h);
      p = std::move(f.probs);
    } else {
      p = SoftmaxLogits(model, data.row(i));
      SoftmaxInPlace(p);
    }
    p[data.labels[i]] -= 1.0;
    std::copy(p.begin(), p.end(), delta.begin() + static_cast<size_t>(i) * k);
  }

  if (model.kind == ModelKind::kLogisticRegression) {
    const size_t bias = static_cast<size_t>(k) * d;
    for (int c = 0; c < k; ++c) {
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          s += delta[static_cast<size_t>(i) * k + c] * data.features[static_cast<size_t>(i) * d + j];
        }
        grad[static_cast<size_t>(c) * d + j] = s * inv_n;
      }
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += delta[static_cast<size_t>(i) * k + c];
      grad[bias + c] = s * inv_n;
    }
    return grad;
  }

  const MlpLayout L = Layout(model);
  const std::vector<double>& th = model.params.theta;
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < h; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += delta[static_cast<size_t>(i) * k + c] * hidden[static_cast<size_t>(i) * h + j];
      }
      grad[L.w2() + static_cast<size_t>(c) * h + j] = s * inv_n;
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += delta[static_cast<size_t>(i) * k + c];
    grad[L.b2() + c] = s * inv_n;
  }
  // Back-propagated hidden error, n x h.
  std::vector<double> dh(static_cast<size_t>(n) * h, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      double s = 0.0;
      for (int c = 0; c < k; ++c) {
        s += th[L.w2() + static_cast<size_t>(c) * h + j] * delta[static_cast<size_t>(i) * k + c];
      }
      const double a = hidden[static_cast<size_t>(i) * h + j];
      dh[static_cast<size_t>(i) * h + j] = s * (1.0 - a * a);
    }
  }
  for (int j = 0; j < h; ++j) {
    for (int q = 0; q < d; ++q) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += dh[static_cast<size_t>(i) * h + j] * data.features[static_cast<size_t>(i) * d + q];
      }
      grad[L.w1() + static_cast<size_t>(j) * d + q] = s * inv_n;
    }
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += dh[static_cast<size_t>(i) * h + j];
    grad[L.b1() + j] = s * inv_n;
  }
  return grad;
}

double GradientNormBound(const Model& model, double input_norm_bound) {
  const double x_aug = std::sqrt(input_norm_bound * input_norm_bound + 1.0);
  if (model.IsBinaryLogistic()) return x_aug;
  // ||probs - onehot||_2 <= sqrt(2).
  const double err = std::sqrt(2.0);
  if (model.kind == ModelKind::kLogisticRegression) return err * x_aug;
  const MlpLayout L = Layout(model);
  double w2_sq = 0.0;
  for (size_t i = L.w2(); i < L.b2(); ++i) {
    w2_sq += model.params.theta[i] * model.params.theta[i];
  }
  const double output_part = err * std::sqrt(L.h + 1.0);
  const double hidden_part = err * std::sqrt(w2_sq) * x_aug;
  return std::sqrt(output_part * output_part + hidden_part * hidden_part);
}

}  // namespace dyndp
