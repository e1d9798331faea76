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

#include "dyndp/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyndp/rng.h"

namespace dyndp {

double Dataset::MaxRowNorm() const {
  double best = 0.0;
  for (int i = 0; i < size(); ++i) {
    double s = 0.0;
    for (double x : row(i)) s += x * x;
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

absl::Status Dataset::Validate() const {
  if (dim <= 0) return absl::InvalidArgumentError("dataset dimension must be positive");
  if (num_classes < 2) return absl::InvalidArgumentError("need at least two classes");
  if (features.size() != labels.size() * static_cast<size_t>(dim)) {
    return absl::InvalidArgumentError("feature matrix does not match label count");
  }
  for (double x : features) {
    if (!std::isfinite(x)) return absl::InvalidArgumentError("non-finite feature");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrFormat("label %d outside [0, %d)", y, num_classes));
    }
  }
  return absl::OkStatus();
}

Dataset GenerateSynthetic(int n, int dim, double separation, std::uint64_t seed) {
  Dataset data;
  data.dim = dim;
  data.num_classes = 2;
  data.features.resize(static_cast<size_t>(n) * dim);
  data.labels.resize(n);
  Rng rng = MakeStream(seed, Stream::kData, 0);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double offset = 0.5 * separation / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < n; ++i) {
    const int y = coin(rng) ? 1 : 0;
    data.labels[i] = y;
    const double sign = y == 1 ? 1.0 : -1.0;
    for (int j = 0; j < dim; ++j) {
      data.features[static_cast<size_t>(i) * dim + j] = sign * offset + gauss(rng);
    }
  }
  return data;
}

std::pair<Dataset, Dataset> SplitTrainTest(const Dataset& data, int test_count) {
  test_count = std::clamp(test_count, 0, data.size());
  const int train_count = data.size() - test_count;
  auto take = [&data](int begin, int end, Split split) {
    Dataset part;
    part.dim = data.dim;
    part.num_classes = data.num_classes;
    part.split = split;
    part.labels.assign(data.labels.begin() + begin, data.labels.begin() + end);
    part.features.assign(data.features.begin() + static_cast<size_t>(begin) * data.dim,
                         data.features.begin() + static_cast<size_t>(end) * data.dim);
    return part;
  };
  return {take(0, train_count, Split::kTrain),
          take(train_count, data.size(), Split::kTest)};
}

namespace {

class ByteReader {
 public:
  explicit ByteReader(absl::Span<const std::uint8_t> bytes) : bytes_(bytes) {}

  absl::Status Need(size_t count, const char* what) const {
    if (bytes_.size() - offset_ < count) {
      return absl::DataLossError(absl::StrFormat(
          "IDX truncated at byte offset %d reading %s: missing %d bytes", offset_,
          what, count - (bytes_.size() - offset_)));
    }
    return absl::OkStatus();
  }

  std::uint32_t BigEndian32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[offset_++];
    return v;
  }

  absl::Span<const std::uint8_t> Take(size_t count) {
    absl::Span<const std::uint8_t> out = bytes_.subspan(offset_, count);
    offset_ += count;
    return out;
  }

  size_t offset() const { return offset_; }
  size_t remaining() const { return bytes_.size() - offset_; }

 private:
  absl::Span<const std::uint8_t> bytes_;
  size_t offset_ = 0;
};

}  // namespace

absl::StatusOr<IdxTensor> ParseIdx(absl::Span<const std::uint8_t> bytes) {
  ByteReader reader(bytes);
  if (absl::Status s = reader.Need(4, "magic"); !s.ok()) return s;
  IdxTensor tensor;
  tensor.magic = reader.BigEndian32();
  const std::uint32_t zero_prefix = tensor.magic >> 16;
  const std::uint32_t type_code = (tensor.magic >> 8) & 0xff;
  const std::uint32_t ndim = tensor.magic & 0xff;
  if (zero_prefix != 0 || type_code != 0x08 || ndim == 0) {
    return absl::DataLossError(absl::StrFormat(
        "bad IDX magic 0x%08x at byte offset 0 (expected 0x000008NN)", tensor.magic));
  }
  if (absl::Status s = reader.Need(4 * static_cast<size_t>(ndim), "dimension sizes"); !s.ok()) {
    return s;
  }
  // Sizes are multiplied in long double so absurd headers cannot wrap around.
  long double count_ld = 1;
  for (std::uint32_t d = 0; d < ndim; ++d) {
    tensor.dims.push_back(reader.BigEndian32());
    count_ld *= tensor.dims.back();
  }
  if (count_ld > 0x1p62L) {
    return absl::DataLossError(absl::StrFormat(
        "IDX payload of %.0Lf bytes declared at byte offset %d is not addressable",
        count_ld, reader.offset()));
  }
  const size_t count = static_cast<size_t>(count_ld);
  if (absl::Status s = reader.Need(count, "payload"); !s.ok()) return s;
  absl::Span<const std::uint8_t> payload = reader.Take(count);
  tensor.data.assign(payload.begin(), payload.end());
  if (reader.remaining() != 0) {
    return absl::DataLossError(absl::StrFormat(
        "IDX has %d trailing bytes after payload at byte offset %d",
        reader.remaining(), reader.offset()));
  }
  return tensor;
}

absl::StatusOr<IdxTensor> ReadIdxFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrFormat("cannot open %s", path));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  absl::StatusOr<IdxTensor> tensor = ParseIdx(bytes);
  if (!tensor.ok()) {
    return absl::Status(tensor.status().code(),
                        absl::StrFormat("%s: %s", path, tensor.status().message()));
  }
  return tensor;
}

absl::StatusOr<Dataset> DatasetFromIdx(const IdxTensor& images,
                                       const IdxTensor& labels, Split split,
                                       int num_classes) {
  if (images.magic != kIdxImageMagic) {
    return absl::InvalidArgumentError(
        absl::StrFormat("image tensor magic 0x%08x, expected 0x%08x", images.magic,
                        kIdxImageMagic));
  }
  if (labels.magic != kIdxLabelMagic) {
    return absl::InvalidArgumentError(
        absl::StrFormat("label tensor magic 0x%08x, expected 0x%08x", labels.magic,
                        kIdxLabelMagic));
  }
  if (images.dims[0] != labels.dims[0]) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d images but %d labels", images.dims[0], labels.dims[0]));
  }
  Dataset data;
  data.split = split;
  data.dim = static_cast<int>(images.dims[1] * images.dims[2]);
  data.features.resize(images.data.size());
  std::transform(images.data.begin(), images.data.end(), data.features.begin(),
                 [](std::uint8_t px) { return px / 255.0; });
  data.labels.assign(labels.data.begin(), labels.data.end());
  int max_label = 0;
  for (int y : data.labels) max_label = std::max(max_label, y);
  data.num_classes = num_classes > 0 ? num_classes : std::max(2, max_label + 1);
  if (absl::Status s = data.Validate(); !s.ok()) return s;
  return data;
}

absl::StatusOr<Dataset> LoadIdxDataset(const std::string& images_path,
                                       const std::string& labels_path,
                                       Split split, int num_classes) {
  absl::StatusOr<IdxTensor> images = ReadIdxFile(images_path);
  if (!images.ok()) return images.status();
  absl::StatusOr<IdxTensor> labels = ReadIdxFile(labels_path);
  if (!labels.ok()) return labels.status();
  return DatasetFromIdx(*images, *labels, split, num_classes);
}

}  // namespace dyndp
