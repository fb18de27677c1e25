// Copyright 2026 The GridSteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gridsteer {

// Status codes shared by the broker, the wire protocol and the portal.
enum class ErrorCode : int {
  kBadRequest = 400,
  kNotFound = 404,
  kConflict = 409,
  kValidation = 422,
  kInternal = 500,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class InvalidTransition : public Error {
 public:
  explicit InvalidTransition(const std::string& message)
      : Error(ErrorCode::kConflict, message) {}
};

class InvalidState : public Error {
 public:
  explicit InvalidState(const std::string& message) : Error(ErrorCode::kConflict, message) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message) : Error(ErrorCode::kNotFound, message) {}
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(ErrorCode::kValidation, field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class BadRequest : public Error {
 public:
  explicit BadRequest(const std::string& message) : Error(ErrorCode::kBadRequest, message) {}
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridsteer
