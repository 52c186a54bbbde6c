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

#include <stdexcept>
#include <string>

namespace attrikit {

/// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { config, data, backend };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

// Data-side errors.

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class EmptyRegionError : public Error {
 public:
  explicit EmptyRegionError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

class EmptyLexiconError : public Error {
 public:
  explicit EmptyLexiconError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

/// Cosine of a zero vector.
class UndefinedSimilarityError : public Error {
 public:
  explicit UndefinedSimilarityError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

// Backend-side errors.

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what)
      : Error(ErrorCategory::backend, what) {}
};

class TransportError : public BackendError {
 public:
  explicit TransportError(const std::string& what, std::string image_id = {})
      : BackendError(image_id.empty() ? what : what + " (image " + image_id + ")"),
        image_id_(std::move(image_id)) {}

  const std::string& image_id() const noexcept { return image_id_; }

 private:
  std::string image_id_;
};

class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ProtocolVersionError : public BackendError {
 public:
  using BackendError::BackendError;
};

class SchemaError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TrainingError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A self-training round failed; carries the round index and the category of
/// the underlying failure.
class RoundError : public Error {
 public:
  RoundError(int round_index, const Error& cause)
      : Error(cause.category(),
              "round " + std::to_string(round_index) + ": " + cause.what()),
        round_index_(round_index) {}

  int round_index() const noexcept { return round_index_; }

 private:
  int round_index_;
};

}  // namespace attrikit
