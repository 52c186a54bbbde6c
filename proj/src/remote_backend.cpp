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
#include "attrikit/remote_backend.hpp"

#include <chrono>
#include <cmath>
#include <regex>
#include <thread>

#include "attrikit/error.hpp"
#include "httplib.h"

namespace attrikit {

namespace {

using Clock = std::chrono::steady_clock;

void set_timeout(httplib::Client& cli, double seconds) {
  const auto whole = static_cast<time_t>(seconds);
  const auto usec = static_cast<time_t>((seconds - static_cast<double>(whole)) * 1e6);
  cli.set_connection_timeout(whole, usec);
  cli.set_read_timeout(whole, usec);
  cli.set_write_timeout(whole, usec);
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

void EndpointConfig::validate() const {
  if (url.empty()) throw ConfigError("remote backend needs an endpoint URL");
  if (!(timeout_s > 0.0)) throw ConfigError("endpoint timeout must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (retry_backoff_s < 0.0) throw ConfigError("retry backoff must be >= 0");
  if (max_in_flight < 1 || max_in_flight > 1024) throw ConfigError("max_in_flight must be in [1, 1024]");
  if (!(poll_interval_s > 0.0)) throw ConfigError("poll interval must be positive");
  if (!(train_timeout_s > 0.0)) throw ConfigError("train timeout must be positive");
}

RemoteClient::RemoteClient(EndpointConfig config) : config_(std::move(config)) {
  config_.validate();
  static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, kUrl)) {
    throw ConfigError("unsupported endpoint URL '" + config_.url + "' (expected http://host:port)");
  }
  host_ = m[1].str();
  base_path_ = m[2].matched ? m[2].str() : "";
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  slots_ = std::make_unique<std::counting_semaphore<1024>>(config_.max_in_flight);
}

RemoteClient::~RemoteClient() = default;

Json RemoteClient::post(const std::string& path, const Json& body, bool idempotent,
                        const std::string& image) const {
  return send("POST", path, &body, idempotent, image);
}

Json RemoteClient::get(const std::string& path) const {
  return send("GET", path, nullptr, true, {});
}

Json RemoteClient::send(const std::string& method, const std::string& path, const Json* body,
                        bool idempotent, const std::string& image) const {
  const std::string full = base_path_ + path;
  const std::string payload = body ? body->dump() : "";
  const int attempts = idempotent ? config_.max_retries + 1 : 1;

  for (int attempt = 0;; ++attempt) {
    httplib::Result res{nullptr, httplib::Error::Unknown};
    double elapsed = 0.0;
    {
      SlotGuard slot(*slots_);
      httplib::Client cli(host_);
      set_timeout(cli, config_.timeout_s);
      const auto t0 = Clock::now();
      res = method == "GET" ? cli.Get(full) : cli.Post(full, payload, "application/json");
      elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    if (res) {
      Json j;
      try {
        j = Json::parse(res->body);
      } catch (const Json::parse_error&) {
        throw SchemaError(method + " " + full + ": HTTP " + std::to_string(res->status) +
                          " with a body that is not JSON");
      }
      protocol::check_version(j);
      if (auto e = protocol::decode_error(j)) protocol::raise(*e);
      if (res->status < 200 || res->status >= 300) {
        throw BackendError(method + " " + full + ": HTTP " + std::to_string(res->status));
      }
      return j;
    }

    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= 0.9 * config_.timeout_s);
    if (attempt + 1 < attempts) {
      std::this_thread::sleep_for(
          std::chrono::duration<double>(config_.retry_backoff_s * std::pow(2.0, attempt)));
      continue;
    }
    const std::string what = method + " " + full + " failed after " + std::to_string(attempt + 1) +
                             " attempt(s): " + httplib::to_string(err);
    if (timed_out) throw TimeoutError(image.empty() ? what : what + " (image " + image + ")");
    throw TransportError(what, image);
  }
}

GroundingResult RemoteGroundedDetector::ground(std::span<const std::string> prompts,
                                               const Image& image, bool want_embeddings) const {
  protocol::GroundRequest req{{prompts.begin(), prompts.end()},
                              protocol::encode_image(image.raster), want_embeddings};
  auto r = protocol::decode_ground_response(
      client_->post(protocol::kGroundPath, protocol::encode(req), true, image.name));
  if (want_embeddings && r.box_embeddings.size() != r.boxes.size()) {
    throw SchemaError("ground: embeddings requested but " + std::to_string(r.box_embeddings.size()) +
                      " returned for " + std::to_string(r.boxes.size()) + " boxes");
  }
  return r;
}

std::string RemoteVqa::answer(const Raster& patch, std::string_view question) const {
  protocol::VqaRequest req{protocol::encode_image(patch), std::string(question)};
  return protocol::decode_vqa_response(client_->post(protocol::kVqaPath, protocol::encode(req), true));
}

std::vector<std::string> RemoteLanguage::word_list(std::string_view query) const {
  protocol::AugmentRequest req{std::string(query)};
  return protocol::decode_augment_response(
      client_->post(protocol::kAugmentPath, protocol::encode(req), true));
}

TrainResult RemoteTrainer::train(const TrainRequest& request) {
  if (request.labels == nullptr) throw TrainingError("no pseudo labels supplied");
  if (request.dataset_uri.empty()) {
    throw ConfigError("remote training needs the pseudo labels persisted at a dataset_uri");
  }
  protocol::TrainJobRequest req{request.dataset_uri, request.alpha, kd_contract_name(request.kd)};
  // Submitting is not idempotent: a retry could start a second job.
  const std::string job_id = protocol::decode_train_response(
      client_->post(protocol::kTrainPath, protocol::encode(req), false));

  const auto& cfg = client_->config();
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(cfg.train_timeout_s));
  for (;;) {
    auto status = protocol::decode_train_status(
        client_->get(std::string(protocol::kTrainPath) + "/" + job_id));
    if (status.state == protocol::JobState::succeeded) {
      return TrainResult{job_id, std::move(status.losses)};
    }
    if (status.state == protocol::JobState::failed) {
      throw TrainingError("training job " + job_id + " failed" +
                          (status.message.empty() ? "" : ": " + status.message));
    }
    if (Clock::now() >= deadline) {
      throw TimeoutError("training job " + job_id + " did not finish within " +
                         std::to_string(cfg.train_timeout_s) + " s");
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(cfg.poll_interval_s));
  }
}

std::vector<Box> RemoteTrainer::predict(const std::string& job_id, const Image& image) {
  protocol::PredictRequest req{job_id, protocol::encode_image(image.raster)};
  return protocol::decode_predict_response(
      client_->post(protocol::kPredictPath, protocol::encode(req), true, image.name));
}

}  // namespace attrikit
