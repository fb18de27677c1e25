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

#include "gridsteer/service.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <system_error>

namespace gridsteer {
namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::system_error(errno, std::generic_category(), what);
}

bool write_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

BrokerService::BrokerService(Broker broker, ServiceOptions options)
    : broker_(std::move(broker)), handler_(broker_), options_(std::move(options)) {}

BrokerService::~BrokerService() { stop(); }

void BrokerService::start() {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(options_.listen.port);
  const char* host = options_.listen.host.empty() ? nullptr : options_.listen.host.c_str();
  if (const int rc = ::getaddrinfo(host, port.c_str(), &hints, &found); rc != 0) {
    throw std::system_error(EINVAL, std::generic_category(),
                            "resolve " + options_.listen.host + ": " + ::gai_strerror(rc));
  }
  listen_fd_ = ::socket(found->ai_family, found->ai_socktype | SOCK_CLOEXEC, found->ai_protocol);
  if (listen_fd_ < 0) {
    ::freeaddrinfo(found);
    fail("socket");
  }
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, found->ai_addr, found->ai_addrlen) != 0) {
    ::freeaddrinfo(found);
    fail("bind " + options_.listen.to_string());
  }
  ::freeaddrinfo(found);
  if (::listen(listen_fd_, 64) != 0) fail("listen");
  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                             : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);

  wall_start_ = std::chrono::steady_clock::now();
  running_ = true;
  loop_thread_ = std::thread([this] { loop(); });
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void BrokerService::stop() {
  if (!running_.exchange(false)) return;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (accept_thread_.joinable()) accept_thread_.join();
  {
    std::unique_lock lock(conn_mu_);
    for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
    conn_cv_.wait(lock, [&] { return conn_fds_.empty(); });
  }
  if (loop_thread_.joinable()) loop_thread_.join();
}

void BrokerService::enqueue(std::function<void(Broker&)> task) {
  {
    std::lock_guard lock(mu_);
    if (stopping_ || !running_) {
      // Not running: execute inline so callers still get an answer.
      task(broker_);
      return;
    }
    queue_.push_back(std::move(task));
  }
  cv_.notify_all();
}

wire::Response BrokerService::handle(const wire::Request& req) {
  return submit([this, req](Broker&) { return handler_.handle(req); });
}

void BrokerService::advance_to(Timestamp t) {
  submit([t](Broker& b) { return b.advance(t); });
}

Timestamp BrokerService::timer_target(std::chrono::steady_clock::time_point wall_now) {
  const ClockConfig& c = options_.clock;
  if (c.mode == ClockMode::kReal) {
    const auto elapsed = std::chrono::duration<double, std::milli>(wall_now - wall_start_).count();
    return c.start + Millis{std::llround(elapsed * c.speed)};
  }
  const auto step = static_cast<double>(options_.tick_period.count()) * c.speed;
  return broker_.clock() + Millis{std::llround(step)};
}

void BrokerService::loop() {
  using Clock = std::chrono::steady_clock;
  auto next_tick = Clock::now() + options_.tick_period;
  std::unique_lock lock(mu_);
  while (true) {
    cv_.wait_until(lock, next_tick, [&] { return stopping_ || !queue_.empty(); });
    if (stopping_) break;
    while (!queue_.empty()) {
      auto task = std::move(queue_.front());
      queue_.pop_front();
      lock.unlock();
      task(broker_);
      lock.lock();
    }
    const auto now = Clock::now();
    if (now >= next_tick) {
      lock.unlock();
      const bool idle = options_.clock.mode == ClockMode::kVirtual && options_.clock.speed <= 0.0;
      if (!idle) broker_.advance(timer_target(now));
      lock.lock();
      next_tick = now + options_.tick_period;
    }
  }
  // Drain so no submitter waits forever.
  while (!queue_.empty()) {
    auto task = std::move(queue_.front());
    queue_.pop_front();
    task(broker_);
  }
}

void BrokerService::accept_loop() {
  while (running_) {
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      return;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(conn_mu_);
    if (!running_) {
      ::close(fd);
      return;
    }
    conn_fds_.push_back(fd);
    std::thread([this, fd] { serve(fd); }).detach();
  }
}

void BrokerService::serve(int fd) {
  wire::LineReader reader;
  char buf[16 * 1024];
  bool open = true;
  while (open && running_) {
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    try {
      reader.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      while (auto line = reader.next()) {
        wire::Response resp;
        try {
          resp = handle(wire::parse_request(*line));
        } catch (const wire::MalformedLine& e) {
          resp = wire::Err{400, std::string("malformed request: ") + e.what()};
        }
        if (!write_all(fd, wire::encode_response(resp))) {
          open = false;
          break;
        }
      }
    } catch (const wire::MalformedLine& e) {
      // Oversized line: answer once and drop the connection.
      write_all(fd, wire::encode_response(wire::Err{400, std::string("malformed request: ") + e.what()}));
      open = false;
    }
  }
  std::lock_guard lock(conn_mu_);
  conn_fds_.erase(std::remove(conn_fds_.begin(), conn_fds_.end(), fd), conn_fds_.end());
  ::close(fd);
  conn_cv_.notify_all();
}

}  // namespace gridsteer
