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
#pragma once

// JSON envelopes of the v1 model gateway protocol. Every message carries
// "version": "v1". Encoders produce exactly the documented fields; decoders
// reject anything missing or mistyped with SchemaError and a wrong version
// with ProtocolVersionError.
//
//   POST /v1/ground      {prompts, image_b64, want_embeddings}
//                        -> {boxes:[{x1,y1,x2,y2,score}], box_embeddings, prompt_embedding}
//   POST /v1/vqa         {image_b64, question} -> {answer}
//   POST /v1/augment     {query} -> {words}
//   POST /v1/train       {dataset_uri, alpha, kd} -> {job_id}
//   GET  /v1/train/<id>  -> {state, losses:[{step, l_det, l_kd}], message?}
//   POST /v1/predict     {job_id, image_b64} -> {boxes}
//
// Failures are {"version": "v1", "error": {"code", "message"}}.

#include <optional>
#include <string>
#include <vector>

#include "attrikit/backends.hpp"
#include "attrikit/util.hpp"

namespace attrikit::protocol {

inline constexpr const char* kVersion = "v1";

inline constexpr const char* kGroundPath = "/v1/ground";
inline constexpr const char* kVqaPath = "/v1/vqa";
inline constexpr const char* kAugmentPath = "/v1/augment";
inline constexpr const char* kTrainPath = "/v1/train";
inline constexpr const char* kPredictPath = "/v1/predict";

/// Throws ProtocolVersionError unless j is an object with version "v1".
void check_version(const Json& j);

/// Raster <-> image_b64 (base64 of the binary PPM encoding).
std::string encode_image(const Raster& raster);
Raster decode_image(const std::string& b64);

struct GroundRequest {
  std::vector<std::string> prompts;
  std::string image_b64;
  bool want_embeddings = true;
};

struct VqaRequest {
  std::string image_b64;
  std::string question;
};

struct AugmentRequest {
  std::string query;
};

struct TrainJobRequest {
  std::string dataset_uri;
  double alpha = 1.0;
  std::string kd = "l1_mean";
};

enum class JobState { queued, running, succeeded, failed };

const char* to_string(JobState s);
JobState job_state_from_string(const std::string& s);

struct TrainStatus {
  JobState state = JobState::queued;
  /// Per-step losses; l_kd is always present on the wire.
  std::vector<TrainStep> losses;
  std::string message;
};

struct PredictRequest {
  std::string job_id;
  std::string image_b64;
};

struct ErrorBody {
  std::string code;
  std::string message;
};

Json encode(const GroundRequest& r);
Json encode(const VqaRequest& r);
Json encode(const AugmentRequest& r);
Json encode(const TrainJobRequest& r);
Json encode(const PredictRequest& r);
Json encode(const TrainStatus& s);
Json encode(const ErrorBody& e);

GroundRequest decode_ground_request(const Json& j);
VqaRequest decode_vqa_request(const Json& j);
AugmentRequest decode_augment_request(const Json& j);
TrainJobRequest decode_train_request(const Json& j);
PredictRequest decode_predict_request(const Json& j);

Json encode_ground_response(const GroundingResult& r);
Json encode_vqa_response(const std::string& answer);
Json encode_augment_response(const std::vector<std::string>& words);
Json encode_train_response(const std::string& job_id);
Json encode_predict_response(const std::vector<Box>& boxes);

GroundingResult decode_ground_response(const Json& j);
std::string decode_vqa_response(const Json& j);
std::vector<std::string> decode_augment_response(const Json& j);
std::string decode_train_response(const Json& j);
TrainStatus decode_train_status(const Json& j);
std::vector<Box> decode_predict_response(const Json& j);

/// Error body if `j` is an error envelope.
std::optional<ErrorBody> decode_error(const Json& j);
/// Throws the error class matching `e.code`:
///   version -> ProtocolVersionError, schema -> SchemaError,
///   validation -> ValidationError, training / not_found -> TrainingError,
///   timeout -> TimeoutError, anything else -> BackendError.
[[noreturn]] void raise(const ErrorBody& e);

/// HTTP status a gateway should use for an error code.
int http_status_for(const std::string& code);

}  // namespace attrikit::protocol
