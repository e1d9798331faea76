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

#ifndef DYNDP_DATASET_H_
#define DYNDP_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace dyndp {

enum class Split { kTrain, kTest };

struct Dataset {
  int dim = 0;
  int num_classes = 2;
  // Row-major, size() x dim.
  std::vector<double> features;
  std::vector<int> labels;
  Split split = Split::kTrain;

  int size() const { return static_cast<int>(labels.size()); }
  absl::Span<const double> row(int i) const {
    return absl::MakeConstSpan(features).subspan(static_cast<size_t>(i) * dim, dim);
  }
  // Largest l2 norm of any feature row.
  double MaxRowNorm() const;
  absl::Status Validate() const;
};

// Two Gaussian blobs N(+-separation/2 * u, I) with u = (1,...,1)/sqrt(d) and
// labels drawn uniformly from {0, 1}. Bayes accuracy is Phi(separation/2).
Dataset GenerateSynthetic(int n, int dim, double separation, std::uint64_t seed);

// First n - test_count rows become the train split, the rest the test split.
std::pair<Dataset, Dataset> SplitTrainTest(const Dataset& data, int test_count);

// A parsed IDX tensor of unsigned bytes.
struct IdxTensor {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;
};

inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;

// Parses the big-endian IDX layout: 4-byte magic (0x00 0x00 type ndim), ndim
// 4-byte sizes, then the raw bytes. Only unsigned-byte payloads (type 0x08)
// are accepted. Errors name the byte offset and the number of missing bytes.
absl::StatusOr<IdxTensor> ParseIdx(absl::Span<const std::uint8_t> bytes);
absl::StatusOr<IdxTensor> ReadIdxFile(const std::string& path);

// Pairs an image file (0x803) with a label file (0x801). Pixels are scaled by
// 1/255. num_classes is max(label) + 1 unless given.
absl::StatusOr<Dataset> LoadIdxDataset(const std::string& images_path,
                                       const std::string& labels_path,
                                       Split split, int num_classes = 0);
absl::StatusOr<Dataset> DatasetFromIdx(const IdxTensor& images,
                                       const IdxTensor& labels, Split split,
                                       int num_classes = 0);

}  // namespace dyndp

#endif  // DYNDP_DATASET_H_
