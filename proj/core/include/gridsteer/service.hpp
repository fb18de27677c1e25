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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gridsteer/broker.hpp"
#include "gridsteer/client.hpp"
#include "gridsteer/protocol.hpp"

namespace gridsteer {

enum class ClockMode { kVirtual, kReal };

// Virtual: each timer period moves the clock by period * speed simulated
// time; speed 0 leaves it to advance_to()/run_to_completion(). Real: the
// clock is start + wall time elapsed * speed.
struct ClockConfig {
  ClockMode mode = ClockMode::kVirtual;
  Timestamp start{};
  double speed = 1.0;
};

struct ServiceOptions {
  wire::Address listen{"127.0.0.1", wire::kDefaultPort};  // port 0 picks one
  ClockConfig clock;
  std::chrono::milliseconds tick_period{1000};
};

// Hosts a Broker behind one command loop thread and serves the line protocol
// over TCP. All broker access goes through the loop, one command at a time.
class BrokerService {
 public:
  BrokerService(Broker broker, ServiceOptions options);
  ~BrokerService();
  BrokerService(const BrokerService&) = delete;
  BrokerService& operator=(const BrokerService&) = delete;

  // Binds, then starts the loop and the listener. Throws std::system_error.
  void start();
  void stop();
  std::uint16_t port() const { return port_; }

  // Runs `fn` on the loop and waits for its result.
  template <typename F>
  auto submit(F fn) -> decltype(fn(std::declval<Broker&>())) {
    using R = decltype(fn(std::declval<Broker&>()));
    auto task = std::make_shared<std::packaged_task<R(Broker&)>>(std::move(fn));
    auto result = task->get_future();
    enqueue([task](Broker& b) { (*task)(b); });
    return result.get();
  }

  wire::Response handle(const wire::Request& req);
  // Advances the broker to `t` through every event on the way.
  void advance_to(Timestamp t);

 private:
  void enqueue(std::function<void(Broker&)> task);
  void loop();
  void accept_loop();
  void serve(int fd);
  Timestamp timer_target(std::chrono::steady_clock::time_point wall_now);

  Broker broker_;
  protocol::Handler handler_;
  ServiceOptions options_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void(Broker&)>> queue_;
  bool stopping_ = false;
  std::chrono::steady_clock::time_point wall_start_;

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread loop_thread_;
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::condition_variable conn_cv_;
  std::vector<int> conn_fds_;  // one detached serving thread each
  std::atomic<bool> running_{false};
};

}  // namespace gridsteer
