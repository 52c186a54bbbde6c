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

// Backends that forward to a model gateway over HTTP (see protocol.hpp).

#include <memory>
#include <semaphore>
#include <string>

#include "attrikit/backends.hpp"
#include "attrikit/protocol.hpp"

namespace attrikit {

struct EndpointConfig {
  /// "http://host:port", optionally followed by a base path.
  std::string url;
  double timeout_s = 60.0;
  /// Extra attempts for idempotent calls after a transport failure or timeout.
  int max_retries = 2;
  double retry_backoff_s = 0.1;
  /// Upper bound on concurrent requests from one client.
  int max_in_flight = 4;
  double poll_interval_s = 1.0;
  /// Overall bound on waiting for a training job.
  double train_timeout_s = 24 * 3600.0;

  void validate() const;
};

class RemoteClient {
 public:
  explicit RemoteClient(EndpointConfig config);
  ~RemoteClient();

  const EndpointConfig& config() const { return config_; }

  /// Sends a JSON request and returns the parsed body after the version check
  /// and error-envelope mapping. `image` only labels error messages.
  Json post(const std::string& path, const Json& body, bool idempotent,
            const std::string& image = {}) const;
  Json get(const std::string& path) const;

 private:
  Json send(const std::string& method, const std::string& path, const Json* body,
            bool idempotent, const std::string& image) const;

  EndpointConfig config_;
  std::string host_;
  std::string base_path_;
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
};

class RemoteGroundedDetector : public GroundedDetectorBackend {
 public:
  explicit RemoteGroundedDetector(std::shared_ptr<const RemoteClient> client)
      : client_(std::move(client)) {}
  GroundingResult ground(std::span<const std::string> prompts, const Image& image,
                         bool want_embeddings = true) const override;

 private:
  std::shared_ptr<const RemoteClient> client_;
};

class RemoteVqa : public CaptionVqaBackend {
 public:
  explicit RemoteVqa(std::shared_ptr<const RemoteClient> client) : client_(std::move(client)) {}
  std::string answer(const Raster& patch, std::string_view question) const override;

 private:
  std::shared_ptr<const RemoteClient> client_;
};

class RemoteLanguage : public LanguageBackend {
 public:
  explicit RemoteLanguage(std::shared_ptr<const RemoteClient> client)
      : client_(std::move(client)) {}
  std::vector<std::string> word_list(std::string_view query) const override;

 private:
  std::shared_ptr<const RemoteClient> client_;
};

/// Submits a job, polls until it finishes, and predicts with the job id. The
/// gateway reads the labels from request.dataset_uri, which must be set.
class RemoteTrainer : public DetectorTrainBackend {
 public:
  explicit RemoteTrainer(std::shared_ptr<const RemoteClient> client)
      : client_(std::move(client)) {}
  TrainResult train(const TrainRequest& request) override;
  std::vector<Box> predict(const std::string& job_id, const Image& image) override;

 private:
  std::shared_ptr<const RemoteClient> client_;
};

}  // namespace attrikit
