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
#include "attrikit/protocol.hpp"

#include <cmath>

#include "attrikit/error.hpp"

namespace attrikit::protocol {

namespace {

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing '" + key + "'");
  return *it;
}

std::string get_string(const Json& j, const char* key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(where + ": not finite");
  return d;
}

double get_number(const Json& j, const char* key, const std::string& where) {
  return as_number(member(j, key, where), where + "." + key);
}

bool get_bool(const Json& j, const char* key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_boolean()) throw SchemaError(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

const Json& get_array(const Json& j, const char* key, const std::string& where) {
  const Json& v = member(j, key, where);
  if (!v.is_array()) throw SchemaError(where + "." + key + ": expected an array");
  return v;
}

std::vector<std::string> string_list(const Json& arr, const std::string& where) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      throw SchemaError(where + "[" + std::to_string(i) + "]: expected a string");
    }
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

EmbeddingVector vector_of(const Json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) throw SchemaError(where + ": expected a non-empty array");
  std::vector<double> v;
  v.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v.push_back(as_number(arr[i], where + "[" + std::to_string(i) + "]"));
  }
  return EmbeddingVector(std::move(v));
}

Json vector_json(const EmbeddingVector& v) {
  return Json(std::vector<double>(v.values().begin(), v.values().end()));
}

Json envelope() { return Json{{"version", kVersion}}; }

Json boxes_json(const std::vector<Box>& boxes) {
  Json arr = Json::array();
  for (const auto& b : boxes) {
    arr.push_back({{"x1", b.x_min},
                   {"y1", b.y_min},
                   {"x2", b.x_max},
                   {"y2", b.y_max},
                   {"score", b.score.value_or(1.0)}});
  }
  return arr;
}

std::vector<Box> boxes_of(const Json& j, const std::string& where) {
  const Json& arr = get_array(j, "boxes", where);
  std::vector<Box> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string w = where + ".boxes[" + std::to_string(i) + "]";
    Box b{get_number(arr[i], "x1", w), get_number(arr[i], "y1", w), get_number(arr[i], "x2", w),
          get_number(arr[i], "y2", w), get_number(arr[i], "score", w)};
    if (!b.valid()) throw SchemaError(w + ": not a valid box");
    out.push_back(b);
  }
  return out;
}

// Version first, then the error envelope, so callers see the most specific
// failure.
void open_response(const Json& j) {
  check_version(j);
  if (auto e = decode_error(j)) raise(*e);
}

}  // namespace

void check_version(const Json& j) {
  if (!j.is_object()) throw SchemaError("message: expected an object");
  auto it = j.find("version");
  if (it == j.end()) throw ProtocolVersionError("message carries no protocol version");
  if (!it->is_string() || it->get<std::string>() != kVersion) {
    throw ProtocolVersionError("unsupported protocol version " + it->dump() + ", expected \"" +
                               kVersion + "\"");
  }
}

std::string encode_image(const Raster& raster) { return base64_encode(encode_ppm(raster)); }

Raster decode_image(const std::string& b64) {
  try {
    return decode_ppm(base64_decode(b64));
  } catch (const Error& e) {
    throw SchemaError(std::string("image_b64: ") + e.what());
  }
}

const char* to_string(JobState s) {
  switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::succeeded: return "succeeded";
    case JobState::failed: return "failed";
  }
  return "failed";
}

JobState job_state_from_string(const std::string& s) {
  if (s == "queued") return JobState::queued;
  if (s == "running") return JobState::running;
  if (s == "succeeded") return JobState::succeeded;
  if (s == "failed") return JobState::failed;
  throw SchemaError("unknown job state '" + s + "'");
}

// --- requests ---------------------------------------------------------------

Json encode(const GroundRequest& r) {
  Json j = envelope();
  j["prompts"] = r.prompts;
  j["image_b64"] = r.image_b64;
  j["want_embeddings"] = r.want_embeddings;
  return j;
}

Json encode(const VqaRequest& r) {
  Json j = envelope();
  j["image_b64"] = r.image_b64;
  j["question"] = r.question;
  return j;
}

Json encode(const AugmentRequest& r) {
  Json j = envelope();
  j["query"] = r.query;
  return j;
}

Json encode(const TrainJobRequest& r) {
  Json j = envelope();
  j["dataset_uri"] = r.dataset_uri;
  j["alpha"] = r.alpha;
  j["kd"] = r.kd;
  return j;
}

Json encode(const PredictRequest& r) {
  Json j = envelope();
  j["job_id"] = r.job_id;
  j["image_b64"] = r.image_b64;
  return j;
}

Json encode(const TrainStatus& s) {
  Json j = envelope();
  j["state"] = to_string(s.state);
  Json losses = Json::array();
  for (const auto& l : s.losses) {
    losses.push_back({{"step", l.step}, {"l_det", l.l_det}, {"l_kd", l.l_kd.value_or(0.0)}});
  }
  j["losses"] = losses;
  if (!s.message.empty()) j["message"] = s.message;
  return j;
}

Json encode(const ErrorBody& e) {
  Json j = envelope();
  j["error"] = {{"code", e.code}, {"message", e.message}};
  return j;
}

GroundRequest decode_ground_request(const Json& j) {
  check_version(j);
  GroundRequest r;
  r.prompts = string_list(get_array(j, "prompts", "ground"), "ground.prompts");
  r.image_b64 = get_string(j, "image_b64", "ground");
  r.want_embeddings = get_bool(j, "want_embeddings", "ground");
  return r;
}

VqaRequest decode_vqa_request(const Json& j) {
  check_version(j);
  return {get_string(j, "image_b64", "vqa"), get_string(j, "question", "vqa")};
}

AugmentRequest decode_augment_request(const Json& j) {
  check_version(j);
  return {get_string(j, "query", "augment")};
}

TrainJobRequest decode_train_request(const Json& j) {
  check_version(j);
  TrainJobRequest r;
  r.dataset_uri = get_string(j, "dataset_uri", "train");
  r.alpha = get_number(j, "alpha", "train");
  r.kd = get_string(j, "kd", "train");
  if (r.kd != "l1_mean" && r.kd != "l1_sum") throw SchemaError("train.kd: unknown contract '" + r.kd + "'");
  return r;
}

PredictRequest decode_predict_request(const Json& j) {
  check_version(j);
  return {get_string(j, "job_id", "predict"), get_string(j, "image_b64", "predict")};
}

// --- responses --------------------------------------------------------------

Json encode_ground_response(const GroundingResult& r) {
  Json j = envelope();
  j["boxes"] = boxes_json(r.boxes);
  Json emb = Json::array();
  for (const auto& e : r.box_embeddings) emb.push_back(vector_json(e));
  j["box_embeddings"] = emb;
  j["prompt_embedding"] = r.prompt_embedding ? vector_json(*r.prompt_embedding) : Json::array();
  return j;
}

Json encode_vqa_response(const std::string& answer) {
  Json j = envelope();
  j["answer"] = answer;
  return j;
}

Json encode_augment_response(const std::vector<std::string>& words) {
  Json j = envelope();
  j["words"] = words;
  return j;
}

Json encode_train_response(const std::string& job_id) {
  Json j = envelope();
  j["job_id"] = job_id;
  return j;
}

Json encode_predict_response(const std::vector<Box>& boxes) {
  Json j = envelope();
  j["boxes"] = boxes_json(boxes);
  return j;
}

GroundingResult decode_ground_response(const Json& j) {
  open_response(j);
  GroundingResult r;
  r.boxes = boxes_of(j, "ground");
  const Json& emb = get_array(j, "box_embeddings", "ground");
  for (std::size_t i = 0; i < emb.size(); ++i) {
    r.box_embeddings.push_back(vector_of(emb[i], "ground.box_embeddings[" + std::to_string(i) + "]"));
  }
  const Json& pe = get_array(j, "prompt_embedding", "ground");
  if (!pe.empty()) r.prompt_embedding = vector_of(pe, "ground.prompt_embedding");

  if (!r.box_embeddings.empty() && r.box_embeddings.size() != r.boxes.size()) {
    throw SchemaError("ground: " + std::to_string(r.box_embeddings.size()) +
                      " box embeddings for " + std::to_string(r.boxes.size()) + " boxes");
  }
  const std::size_t dim = r.prompt_embedding ? r.prompt_embedding->dim()
                          : r.box_embeddings.empty() ? 0
                                                     : r.box_embeddings.front().dim();
  for (const auto& e : r.box_embeddings) {
    if (e.dim() != dim) throw SchemaError("ground: embedding dimensions differ");
  }
  return r;
}

std::string decode_vqa_response(const Json& j) {
  open_response(j);
  return get_string(j, "answer", "vqa");
}

std::vector<std::string> decode_augment_response(const Json& j) {
  open_response(j);
  return string_list(get_array(j, "words", "augment"), "augment.words");
}

std::string decode_train_response(const Json& j) {
  open_response(j);
  auto id = get_string(j, "job_id", "train");
  if (id.empty()) throw SchemaError("train.job_id: empty");
  return id;
}

TrainStatus decode_train_status(const Json& j) {
  open_response(j);
  TrainStatus s;
  s.state = job_state_from_string(get_string(j, "state", "train_status"));
  const Json& losses = get_array(j, "losses", "train_status");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const std::string w = "train_status.losses[" + std::to_string(i) + "]";
    const Json& step = member(losses[i], "step", w);
    if (!step.is_number_integer()) throw SchemaError(w + ".step: expected an integer");
    TrainStep t;
    t.step = step.get<int>();
    t.l_det = get_number(losses[i], "l_det", w);
    t.l_kd = get_number(losses[i], "l_kd", w);
    if (t.l_det < 0.0 || *t.l_kd < 0.0) throw SchemaError(w + ": negative loss");
    s.losses.push_back(std::move(t));
  }
  if (j.contains("message")) s.message = get_string(j, "message", "train_status");
  return s;
}

std::vector<Box> decode_predict_response(const Json& j) {
  open_response(j);
  return boxes_of(j, "predict");
}

// --- errors -----------------------------------------------------------------

std::optional<ErrorBody> decode_error(const Json& j) {
  if (!j.is_object() || !j.contains("error")) return std::nullopt;
  const Json& e = j.at("error");
  return ErrorBody{get_string(e, "code", "error"), get_string(e, "message", "error")};
}

void raise(const ErrorBody& e) {
  const std::string what = "gateway " + e.code + " error: " + e.message;
  if (e.code == "version") throw ProtocolVersionError(what);
  if (e.code == "schema") throw SchemaError(what);
  if (e.code == "validation") throw ValidationError(what);
  if (e.code == "training" || e.code == "not_found") throw TrainingError(what);
  if (e.code == "timeout") throw TimeoutError(what);
  throw BackendError(what);
}

int http_status_for(const std::string& code) {
  if (code == "version" || code == "schema" || code == "validation") return 400;
  if (code == "not_found") return 404;
  if (code == "timeout") return 504;
  return 500;
}

}  // namespace attrikit::protocol
