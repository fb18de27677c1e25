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

#include "gridsteer/wire.hpp"

#include <algorithm>
#include <charconv>

namespace gridsteer::wire {
namespace {

// Length of the valid UTF-8 sequence at s[i], or 0 if invalid.
std::size_t utf8_sequence(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len = 0;
  unsigned lo = 0x80, hi = 0xBF;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;  // no surrogates
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if (k == 1 ? (b < lo || b > hi) : (b < 0x80 || b > 0xBF)) return 0;
  }
  return len;
}

bool valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const std::size_t n = utf8_sequence(s, i);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

bool clean_field(std::string_view f) {
  return f.find_first_of("\t\r\n") == std::string_view::npos && valid_utf8(f);
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

template <typename T>
std::optional<T> parse_decimal(std::string_view text) {
  if (text.empty() || text.size() > 9) return std::nullopt;
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

void append_fields(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += '\t';
    out += sanitize(fields[i]);
  }
}

}  // namespace

bool is_valid_verb(std::string_view verb) {
  if (verb.size() < 2 || verb.size() > 32) return false;
  if (verb[0] < 'A' || verb[0] > 'Z') return false;
  return std::all_of(verb.begin() + 1, verb.end(),
                     [](char c) { return (c >= 'A' && c <= 'Z') || c == '-'; });
}

bool is_known_code(int code) {
  return code == 400 || code == 404 || code == 409 || code == 422 || code == 500;
}

std::string sanitize(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size();) {
    const char c = field[i];
    if (c == '\t' || c == '\r' || c == '\n') {
      out += ' ';
      ++i;
      continue;
    }
    const std::size_t n = utf8_sequence(field, i);
    if (n == 0) {
      out += "\xEF\xBF\xBD";
      ++i;
      continue;
    }
    out.append(field.substr(i, n));
    i += n;
  }
  return out;
}

std::string encode_request(const Request& req) {
  if (!is_valid_verb(req.verb)) throw MalformedLine("invalid verb");
  std::string out = req.verb;
  for (const auto& a : req.args) {
    out += '\t';
    out += sanitize(a);
  }
  out += '\n';
  if (out.size() > kMaxLineBytes) throw MalformedLine("request line exceeds 64 KiB");
  return out;
}

Request parse_request(std::string_view line) {
  if (line.size() > kMaxLineBytes) throw MalformedLine("request line exceeds 64 KiB");
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.empty()) throw MalformedLine("empty request");
  if (line.find_first_of("\r\n") != std::string_view::npos) {
    throw MalformedLine("control character in request");
  }
  auto fields = split_tabs(line);
  if (!is_valid_verb(fields[0])) throw MalformedLine("invalid verb");
  Request req;
  req.verb = std::move(fields[0]);
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (!valid_utf8(fields[i])) throw MalformedLine("field is not UTF-8");
    req.args.push_back(std::move(fields[i]));
  }
  return req;
}

std::string encode_response(const Response& resp) {
  std::string out;
  if (const auto* ok = std::get_if<Ok>(&resp)) {
    out = "OK\t" + std::to_string(ok->records.size()) + "\n";
    for (const auto& r : ok->records) {
      append_fields(out, r);
      out += '\n';
    }
    return out;
  }
  const auto& err = std::get<Err>(resp);
  if (!is_known_code(err.code)) throw MalformedResponse("unknown error code");
  return "ERR\t" + std::to_string(err.code) + "\t" + sanitize(err.message) + "\n";
}

void ResponseReader::line(std::string_view text) {
  if (!expected_) {
    if (text.starts_with("OK\t")) {
      const auto count = parse_decimal<std::size_t>(text.substr(3));
      if (!count || *count > kMaxRecords) throw MalformedResponse("bad record count");
      expected_ = *count;
    } else if (text.starts_with("ERR\t")) {
      const auto rest = text.substr(4);
      const std::size_t tab = rest.find('\t');
      if (tab == std::string_view::npos) throw MalformedResponse("ERR without message");
      const auto code = parse_decimal<int>(rest.substr(0, tab));
      if (!code || !is_known_code(*code)) throw MalformedResponse("unknown error code");
      const auto message = rest.substr(tab + 1);
      if (!clean_field(message)) throw MalformedResponse("bad error message");
      result_ = Err{*code, std::string(message)};
      return;
    } else {
      throw MalformedResponse("unknown status word");
    }
  } else {
    if (!valid_utf8(text)) throw MalformedResponse("record is not UTF-8");
    if (text.find('\r') != std::string_view::npos) throw MalformedResponse("CR in record");
    records_.push_back(split_tabs(text));
  }
  if (records_.size() == *expected_) result_ = Ok{std::move(records_)};
}

std::size_t ResponseReader::feed(std::string_view bytes) {
  std::size_t used = 0;
  while (!done() && used < bytes.size()) {
    const std::size_t lf = bytes.find('\n', used);
    const std::size_t end = lf == std::string_view::npos ? bytes.size() : lf;
    if (partial_.size() + (end - used) + 1 > kMaxLineBytes) {
      throw MalformedResponse("response line exceeds 64 KiB");
    }
    partial_.append(bytes.substr(used, end - used));
    if (lf == std::string_view::npos) return bytes.size();
    used = lf + 1;
    std::string text = std::move(partial_);
    partial_.clear();
    line(text);
  }
  return used;
}

Response ResponseReader::take() {
  Response r = std::move(*result_);
  result_.reset();
  expected_.reset();
  records_.clear();
  return r;
}

Response parse_response(std::string_view bytes) {
  ResponseReader reader;
  const std::size_t used = reader.feed(bytes);
  if (!reader.done()) throw MalformedResponse("truncated response");
  if (used != bytes.size()) throw MalformedResponse("trailing bytes after response");
  return reader.take();
}

void LineReader::feed(std::string_view bytes) {
  buffer_.append(bytes);
  if (buffer_.find('\n', scan_) == std::string::npos && buffer_.size() > kMaxLineBytes) {
    throw MalformedLine("request line exceeds 64 KiB");
  }
}

std::optional<std::string> LineReader::next() {
  const std::size_t lf = buffer_.find('\n', scan_);
  if (lf == std::string::npos) {
    scan_ = buffer_.size();
    return std::nullopt;
  }
  std::string line = buffer_.substr(0, lf);
  buffer_.erase(0, lf + 1);
  scan_ = 0;
  if (line.size() + 1 > kMaxLineBytes) throw MalformedLine("request line exceeds 64 KiB");
  return line;
}

}  // namespace gridsteer::wire
