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

#include <chrono>
#include <cstdint>
#include <string>

#include "gridsteer/wire.hpp"

namespace gridsteer::wire {

struct Address {
  std::string host;
  std::uint16_t port = kDefaultPort;
  std::string to_string() const;
};

// "host:port", "host" (default port) or "[v6addr]:port". Throws
// std::invalid_argument.
Address parse_address(std::string_view text);

// Blocking request/response client. Keeps its connection open between calls
// and reconnects once if a reused connection turns out to be closed. One
// caller at a time.
class Client {
 public:
  Client(Address address, std::chrono::milliseconds timeout);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  // Throws Timeout, ConnectionRefused, MalformedResponse or TransportError.
  Response call(const Request& req);
  void close();

  const Address& address() const { return address_; }

 private:
  using Clock = std::chrono::steady_clock;
  void connect(Clock::time_point deadline);
  void send_all(std::string_view bytes, Clock::time_point deadline);
  // Waits for `events` on the socket; throws Timeout at the deadline.
  void wait(short events, Clock::time_point deadline);

  Address address_;
  std::chrono::milliseconds timeout_;
  int fd_ = -1;
};

}  // namespace gridsteer::wire
