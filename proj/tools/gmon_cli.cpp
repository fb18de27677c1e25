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

// gmon-cli: sends one protocol request and prints the answer.
//
//   gmon-cli [--grb host:port] VERB [ARG...]
//
// Exit status: 0 on OK, 1 on ERR, 2 when the broker cannot be reached.

#include <iostream>

#include <CLI11.hpp>

#include "gridsteer/client.hpp"
#include "gridsteer/wire.hpp"

using namespace gridsteer;

int main(int argc, char** argv) {
  CLI::App app{"one-shot grid resource broker client"};
  std::string grb = "127.0.0.1:" + std::to_string(wire::kDefaultPort);
  long timeout_ms = 5000;
  std::vector<std::string> words;

  app.add_option("--grb", grb, "broker address host:port")->envname("GRIDSTEER_GRB");
  app.add_option("--timeout-ms", timeout_ms, "call timeout")
      ->check(CLI::Range(1L, 600'000L))
      ->envname("GRIDSTEER_TIMEOUT_MS");
  app.add_option("command", words, "VERB followed by its arguments")->required();
  app.positionals_at_end();
  CLI11_PARSE(app, argc, argv);

  wire::Request req{words.front(), {words.begin() + 1, words.end()}};
  wire::Response resp;
  try {
    wire::Client client(wire::parse_address(grb), std::chrono::milliseconds(timeout_ms));
    resp = client.call(req);
  } catch (const wire::MalformedLine& e) {
    std::cerr << "ERR\t400\t" << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gmon-cli: " << e.what() << "\n";
    return 2;
  } catch (const wire::TransportError& e) {
    std::cerr << "gmon-cli: " << e.what() << "\n";
    return 2;
  }

  if (const auto* err = std::get_if<wire::Err>(&resp)) {
    std::cerr << "ERR\t" << err->code << '\t' << err->message << "\n";
    return 1;
  }
  for (const auto& record : std::get<wire::Ok>(resp).records) {
    for (std::size_t i = 0; i < record.size(); ++i) std::cout << (i ? "\t" : "") << record[i];
    std::cout << '\n';
  }
  return 0;
}
