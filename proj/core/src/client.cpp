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

#include "gridsteer/client.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fcntl.h>
#include <stdexcept>

namespace gridsteer::wire {

std::string Address::to_string() const {
  const bool v6 = host.find(':') != std::string::npos;
  return (v6 ? "[" + host + "]" : host) + ":" + std::to_string(port);
}

Address parse_address(std::string_view text) {
  Address a;
  std::string_view port;
  if (text.starts_with('[')) {
    const auto close = text.find(']');
    if (close == std::string_view::npos) throw std::invalid_argument("unterminated '['");
    a.host = std::string(text.substr(1, close - 1));
    const auto rest = text.substr(close + 1);
    if (!rest.empty()) {
      if (rest[0] != ':') throw std::invalid_argument("expected ':' after ']'");
      port = rest.substr(1);
    }
  } else {
    const auto colon = text.rfind(':');
    a.host = std::string(text.substr(0, colon));
    if (colon != std::string_view::npos) port = text.substr(colon + 1);
  }
  if (a.host.empty()) throw std::invalid_argument("empty host in '" + std::string(text) + "'");
  if (!port.empty() || text.ends_with(':')) {
    unsigned value = 0;
    const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || end != port.data() + port.size() || value == 0 || value > 65535) {
      throw std::invalid_argument("bad port in '" + std::string(text) + "'");
    }
    a.port = static_cast<std::uint16_t>(value);
  }
  return a;
}

Client::Client(Address address, std::chrono::milliseconds timeout)
    : address_(std::move(address)), timeout_(timeout) {
  if (timeout_.count() <= 0) throw std::invalid_argument("timeout must be positive");
}

Client::~Client() { close(); }

void Client::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void Client::wait(short events, Clock::time_point deadline) {
  while (true) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() <= 0) {
      close();
      throw Timeout("no answer from " + address_.to_string() + " within " +
                    std::to_string(timeout_.count()) + " ms");
    }
    pollfd p{fd_, events, 0};
    const int n = ::poll(&p, 1, static_cast<int>(left.count()));
    if (n > 0) return;
    if (n < 0 && errno != EINTR) {
      const std::string why = std::strerror(errno);
      close();
      throw TransportError("poll: " + why);
    }
  }
}

void Client::connect(Clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(address_.port);
  if (const int rc = ::getaddrinfo(address_.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    throw TransportError("cannot resolve " + address_.host + ": " + ::gai_strerror(rc));
  }
  std::string failure = "no addresses";
  bool refused = false;
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd_ = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd_ < 0) continue;
    int rc = ::connect(fd_, ai->ai_addr, ai->ai_addrlen);
    int err = rc == 0 ? 0 : errno;
    if (err == EINPROGRESS) {
      try {
        wait(POLLOUT, deadline);
      } catch (...) {
        ::freeaddrinfo(found);
        throw;
      }
      socklen_t len = sizeof err;
      ::getsockopt(fd_, SOL_SOCKET, SO_ERROR, &err, &len);
    }
    if (err == 0) {
      const int one = 1;
      ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      ::freeaddrinfo(found);
      return;
    }
    refused = refused || err == ECONNREFUSED;
    failure = std::strerror(err);
    close();
  }
  ::freeaddrinfo(found);
  if (refused) throw ConnectionRefused("connection refused by " + address_.to_string());
  throw TransportError("cannot connect to " + address_.to_string() + ": " + failure);
}

void Client::send_all(std::string_view bytes, Clock::time_point deadline) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n > 0) {
      bytes.remove_prefix(static_cast<std::size_t>(n));
    } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      wait(POLLOUT, deadline);
    } else if (n < 0 && errno == EINTR) {
      continue;
    } else {
      const std::string why = std::strerror(errno);
      close();
      throw TransportError("send: " + why);
    }
  }
}

Response Client::call(const Request& req) {
  const std::string line = encode_request(req);
  const auto deadline = Clock::now() + timeout_;
  for (int attempt = 0;; ++attempt) {
    const bool reused = fd_ >= 0;
    if (!reused) connect(deadline);
    ResponseReader reader;
    bool received = false;
    try {
      send_all(line, deadline);
      char buf[16 * 1024];
      while (!reader.done()) {
        wait(POLLIN, deadline);
        const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
        if (n > 0) {
          received = true;
          const auto used = reader.feed(std::string_view(buf, static_cast<std::size_t>(n)));
          if (used != static_cast<std::size_t>(n)) {
            close();
            throw MalformedResponse("unexpected bytes after response");
          }
        } else if (n == 0) {
          close();
          throw MalformedResponse("connection closed before the response was complete");
        } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
          const std::string why = std::strerror(errno);
          close();
          throw TransportError("recv: " + why);
        }
      }
    } catch (const MalformedResponse&) {
      // A pooled connection the server already closed: retry once on a fresh one.
      if (reused && !received && attempt == 0) continue;
      close();
      throw;
    } catch (const Timeout&) {
      throw;
    } catch (const TransportError&) {
      if (reused && !received && attempt == 0) continue;
      throw;
    }
    return reader.take();
  }
}

}  // namespace gridsteer::wire
