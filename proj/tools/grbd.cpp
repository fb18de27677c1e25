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

// grbd: the grid resource broker with its node simulator.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gridsteer/scenario.hpp"
#include "gridsteer/service.hpp"

using namespace gridsteer;

namespace {

void print_summary(const Broker& broker, const RunSummary& run) {
  std::cout << "finished\t" << format_utc(run.finished_at) << "\tticks=" << run.ticks
            << "\tdispatches=" << run.dispatches << "\n";
  for (const auto& e : broker.list_experiments()) {
    const auto st = broker.experiment_status(e.id);
    std::cout << to_string(e.id) << '\t' << to_string(st.state) << "\tspent=" << st.budget_spent.to_string()
              << "\tbudget=" << st.budget.to_string();
    for (auto s : kAllJobStates) std::cout << '\t' << to_string(s) << '=' << st.count(s);
    std::cout << '\n';
  }
}

int wait_for_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid resource broker with a simulated node pool"};
  std::string scenario_path;
  std::string listen = "127.0.0.1:" + std::to_string(wire::kDefaultPort);
  std::optional<std::uint64_t> seed;
  std::string clock;
  std::string event_log;
  bool run_to_completion = false;
  long tick_ms = 1000;

  app.add_option("--scenario", scenario_path, "scenario JSON file")->required()->envname("GRIDSTEER_SCENARIO");
  app.add_option("--listen", listen, "protocol listen address host:port")->envname("GRIDSTEER_LISTEN");
  app.add_option("--seed", seed, "simulator seed (overrides the scenario)")->envname("GRIDSTEER_SEED");
  app.add_option("--clock", clock, "virtual or real (overrides the scenario)")
      ->check(CLI::IsMember({"virtual", "real"}))
      ->envname("GRIDSTEER_CLOCK");
  app.add_option("--event-log", event_log, "write the simulator event log here")->envname("GRIDSTEER_EVENT_LOG");
  app.add_option("--tick-ms", tick_ms, "scheduler tick period in wall milliseconds")
      ->check(CLI::Range(1L, 3'600'000L))
      ->envname("GRIDSTEER_TICK_MS");
  app.add_flag("--run-to-completion", run_to_completion,
               "start every experiment, drive the virtual clock until nothing can progress, print a summary and exit");
  CLI11_PARSE(app, argc, argv);

  // Block termination signals before any thread starts so sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  try {
    Scenario scenario = load_scenario(scenario_path);
    if (seed) scenario.seed = *seed;
    if (clock == "virtual") scenario.clock.mode = ClockMode::kVirtual;
    if (clock == "real") scenario.clock.mode = ClockMode::kReal;

    std::ofstream log;
    if (!event_log.empty()) {
      log.open(event_log, std::ios::binary | std::ios::trunc);
      if (!log) {
        std::cerr << "grbd: cannot open event log " << event_log << "\n";
        return 1;
      }
    }
    Broker broker = make_broker(scenario);
    if (log.is_open()) broker.set_event_log(&log);

    if (run_to_completion) {
      if (scenario.clock.mode != ClockMode::kVirtual) {
        std::cerr << "grbd: --run-to-completion needs the virtual clock\n";
        return 1;
      }
      for (const auto& e : broker.list_experiments()) broker.control(e.id, ExperimentAction::kStart);
      const RunSummary run = broker.run_to_completion();
      log.flush();
      print_summary(broker, run);
      return 0;
    }

    ServiceOptions options;
    options.listen = wire::parse_address(listen);
    options.clock = scenario.clock;
    options.tick_period = std::chrono::milliseconds(tick_ms);
    BrokerService service(std::move(broker), options);
    service.start();
    std::cerr << "grbd: listening on " << options.listen.host << ":" << service.port() << "\n";
    wait_for_signal();
    service.stop();
    log.flush();
    return 0;
  } catch (const SchemaError& e) {
    std::cerr << "grbd: scenario error at " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "grbd: " << e.what() << "\n";
  }
  return 1;
}
