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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Line protocol between the portal and the broker.
//
//   request  = VERB *(TAB field) LF
//   response = "OK" TAB count LF *(record LF)
//            / "ERR" TAB code TAB message LF
//   record   = field *(TAB field)
//
// Fields are UTF-8 and never contain TAB, CR or LF; encoders replace those
// with a space. Every line, LF included, is at most kMaxLineBytes.
namespace gridsteer::wire {

inline constexpr std::size_t kMaxLineBytes = 64 * 1024;
inline constexpr std::size_t kMaxRecords = 1'000'000;
inline constexpr std::string_view kProtocolVersion = "1";
inline constexpr std::uint16_t kDefaultPort = 9000;

class MalformedLine : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport-level failures of a call, distinct from a broker Err answer.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class Timeout : public TransportError {
 public:
  using TransportError::TransportError;
};
class ConnectionRefused : public TransportError {
 public:
  using TransportError::TransportError;
};
class MalformedResponse : public TransportError {
 public:
  using TransportError::TransportError;
};

using Record = std::vector<std::string>;

struct Request {
  std::string verb;
  std::vector<std::string> args;
  friend bool operator==(const Request&, const Request&) = default;
};

struct Ok {
  std::vector<Record> records;  // each record has at least one field
  friend bool operator==(const Ok&, const Ok&) = default;
};

struct Err {
  int code = 500;
  std::string message;
  friend bool operator==(const Err&, const Err&) = default;
};

using Response = std::variant<Ok, Err>;

bool is_valid_verb(std::string_view verb);
bool is_known_code(int code);

// Replaces TAB, CR and LF with a space and invalid UTF-8 bytes with U+FFFD.
std::string sanitize(std::string_view field);

// Throws MalformedLine for an invalid verb.
std::string encode_request(const Request& req);
// `line` may include its terminating LF.
Request parse_request(std::string_view line);

// Throws MalformedResponse for an Err code outside the known set.
std::string encode_response(const Response& resp);
// Parses one complete response; trailing bytes are an error.
Response parse_response(std::string_view bytes);

// Incremental response parser for stream transports.
class ResponseReader {
 public:
  // Consumes bytes; returns the number used. Once done(), further bytes are
  // left unconsumed. Throws MalformedResponse.
  std::size_t feed(std::string_view bytes);
  bool done() const { return result_.has_value(); }
  // Precondition: done().
  Response take();

 private:
  void line(std::string_view text);

  std::string partial_;
  std::optional<std::size_t> expected_;
  std::vector<Record> records_;
  std::optional<Response> result_;
};

// Incremental request line splitter for the server side.
class LineReader {
 public:
  // Appends bytes. Throws MalformedLine once a line exceeds kMaxLineBytes.
  void feed(std::string_view bytes);
  // Next complete line without its LF.
  std::optional<std::string> next();

 private:
  std::string buffer_;
  std::size_t scan_ = 0;
};

}  // namespace gridsteer::wire
