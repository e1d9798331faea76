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

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dyndp/dataset.h"
#include "gtest/gtest.h"

namespace dyndp {
namespace {

Dataset RandomData(int n, int d, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, k - 1);
  Dataset data;
  data.dim = d;
  data.num_classes = k;
  for (int i = 0; i < n * d; ++i) data.features.push_back(g(rng));
  for (int i = 0; i < n; ++i) data.labels.push_back(lab(rng));
  return data;
}

void Randomize(Model& m, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  for (double& v : m.params.theta) v = g(rng);
}

std::vector<double> FiniteDifference(Model m, absl::Span<const double> x, int y) {
  const double h = 1e-5;
  std::vector<double> out(m.NumParams());
  for (int j = 0; j < m.NumParams(); ++j) {
    const double keep = m.params.theta[j];
    m.params.theta[j] = keep + h;
    const double up = SampleLoss(m, x, y);
    m.params.theta[j] = keep - h;
    const double down = SampleLoss(m, x, y);
    m.params.theta[j] = keep;
    out[j] = (up - down) / (2 * h);
  }
  return out;
}

double RelativeError(absl::Span<const double> got, absl::Span<const double> want) {
  double diff = 0, norm = 0;
  for (size_t j = 0; j < got.size(); ++j) {
    diff += (got[j] - want[j]) * (got[j] - want[j]);
    norm += want[j] * want[j];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

TEST(PerSampleGradientsTest, BinaryLogisticAtOrigin) {
  const Dataset data = RandomData(6, 3, 2, 1);
  absl::StatusOr<Model> m = MakeModel(ModelKind::kLogisticRegression, 3, 2, 0, 1);
  ASSERT_TRUE(m.ok());
  std::vector<int> idx(6);
  std::iota(idx.begin(), idx.end(), 0);
  const GradientBatch b = PerSampleGradients(*m, data, idx);
  ASSERT_EQ(b.dim, 4);
  for (int i = 0; i < 6; ++i) {
    const double r = 0.5 - data.labels[i];
    for (int j = 0; j < 3; ++j) EXPECT_EQ(b.row(i)[j], r * data.row(i)[j]);
    EXPECT_EQ(b.row(i)[3], r);
    EXPECT_NEAR(b.losses[i], std::log(2.0), 1e-15);
  }
}

TEST(PerSampleGradientsTest, MatchFiniteDifferences) {
  struct Case { ModelKind kind; int k; int hidden; };
  int trial = 0;
  for (Case c : {Case{ModelKind::kLogisticRegression, 2, 0},
                 Case{ModelKind::kLogisticRegression, 4, 0}, Case{ModelKind::kMlp, 3, 5},
                 Case{ModelKind::kMlp, 2, 3}}) {
    for (int rep = 0; rep < 5; ++rep, ++trial) {
      const Dataset data = RandomData(4, 3, c.k, 100 + trial);
      absl::StatusOr<Model> m = MakeModel(c.kind, 3, c.k, c.hidden, trial);
      ASSERT_TRUE(m.ok());
      Randomize(*m, 200 + trial, 0.7);
      const std::vector<int> idx = {0, 1, 2, 3};
      const GradientBatch b = PerSampleGradients(*m, data, idx);
      for (int i = 0; i < 4; ++i) {
        const std::vector<double> fd = FiniteDifference(*m, data.row(i), data.labels[i]);
        EXPECT_LT(RelativeError(b.row(i), fd), 1e-6) << trial << " row " << i;
        EXPECT_NEAR(b.losses[i], SampleLoss(*m, data.row(i), data.labels[i]), 1e-15);
      }
    }
  }
}

TEST(FullBatchGradientTest, EqualsMeanOfRows) {
  for (ModelKind kind : {ModelKind::kLogisticRegression, ModelKind::kMlp}) {
    for (int k : {2, 5}) {
      const Dataset data = RandomData(50, 6, k, 9);
      absl::StatusOr<Model> m = MakeModel(kind, 6, k, 7, 4);
      ASSERT_TRUE(m.ok());
      Randomize(*m, 3, 0.5);
      std::vector<int> idx(50);
      std::iota(idx.begin(), idx.end(), 0);
      const GradientBatch b = PerSampleGradients(*m, data, idx);
      const std::vector<double> full = FullBatchGradient(*m, data);
      ASSERT_EQ(full.size(), static_cast<size_t>(b.dim));
      for (int j = 0; j < b.dim; ++j) {
        double mean = 0;
        for (int i = 0; i < 50; ++i) mean += b.row(i)[j];
        EXPECT_NEAR(full[j], mean / 50, 1e-10);
      }
      double loss = 0;
      for (double l : b.losses) loss += l;
      EXPECT_NEAR(MeanLoss(*m, data), loss / 50, 1e-12);
    }
  }
}

TEST(GradientNormBoundTest, BoundsEveryRow) {
  for (ModelKind kind : {ModelKind::kLogisticRegression, ModelKind::kMlp}) {
    for (int k : {2, 3}) {
      const Dataset data = RandomData(200, 5, k, 21);
      absl::StatusOr<Model> m = MakeModel(kind, 5, k, 6, 2);
      ASSERT_TRUE(m.ok());
      Randomize(*m, 8, 1.5);
      std::vector<int> idx(200);
      std::iota(idx.begin(), idx.end(), 0);
      const GradientBatch b = PerSampleGradients(*m, data, idx);
      const double g = GradientNormBound(*m, data.MaxRowNorm());
      for (int i = 0; i < 200; ++i) {
        double s = 0;
        for (double v : b.row(i)) s += v * v;
        EXPECT_LE(std::sqrt(s), g * (1 + 1e-12));
      }
    }
  }
}

TEST(MakeModelTest, LayoutsAndInit) {
  absl::StatusOr<Model> lr = MakeModel(ModelKind::kLogisticRegression, 10, 2, 0, 1);
  ASSERT_TRUE(lr.ok());
  EXPECT_EQ(lr->NumParams(), 11);
  absl::StatusOr<Model> sm = MakeModel(ModelKind::kLogisticRegression, 10, 4, 0, 1);
  EXPECT_EQ(sm->NumParams(), 44);
  absl::StatusOr<Model> mlp = MakeModel(ModelKind::kMlp, 10, 3, 8, 1);
  ASSERT_TRUE(mlp.ok());
  EXPECT_EQ(mlp->NumParams(), 8 * 10 + 8 + 3 * 8 + 3);
  EXPECT_EQ(mlp->params.theta, MakeModel(ModelKind::kMlp, 10, 3, 8, 1)->params.theta);
  EXPECT_NE(mlp->params.theta, MakeModel(ModelKind::kMlp, 10, 3, 8, 2)->params.theta);
  EXPECT_FALSE(MakeModel(ModelKind::kMlp, 10, 3, 0, 1).ok());
  EXPECT_FALSE(MakeModel(ModelKind::kLogisticRegression, 0, 2, 0, 1).ok());
  EXPECT_FALSE(MakeModel(ModelKind::kLogisticRegression, 3, 1, 0, 1).ok());
}

TEST(PredictTest, AccuracyOfPerfectSeparator) {
  Dataset data;
  data.dim = 1;
  data.features = {-2.0, -1.0, 1.0, 3.0};
  data.labels = {0, 0, 1, 1};
  absl::StatusOr<Model> m = MakeModel(ModelKind::kLogisticRegression, 1, 2, 0, 1);
  m->params.theta = {5.0, 0.0};
  EXPECT_EQ(Accuracy(*m, data), 1.0);
  EXPECT_EQ(Predict(*m, data.row(0)), 0);
  m->params.theta = {-5.0, 0.0};
  EXPECT_EQ(Accuracy(*m, data), 0.0);
}

TEST(ModelKindTest, ParseAndName) {
  EXPECT_EQ(*ParseModelKind("mlp"), ModelKind::kMlp);
  EXPECT_EQ(ModelKindName(*ParseModelKind("logistic")), "logistic_regression");
  EXPECT_FALSE(ParseModelKind("cnn").ok());
}

}  // namespace
}  // namespace dyndp
