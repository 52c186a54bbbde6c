// Copyright 2026 The AttriKit Authors. All Rights Reserved.
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
#include "attrikit/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "attrikit/error.hpp"

namespace attrikit {

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("embedding must have dim > 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("embedding has non-finite entry");
  }
}

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw ValidationError("embedding dim mismatch: " + std::to_string(u.dim()) +
                          " vs " + std::to_string(v.dim()));
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw UndefinedSimilarityError("cosine of a zero vector is undefined");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

}  // namespace attrikit
