// Copyright 2026 The swarminit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swarminit/pipeline.hpp"
#include "swarminit/serialization.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitMaxEpochs = 3;

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw swarminit::Error(swarminit::ErrorCode::kParseError, "cannot write " + path);
  out << text;
}

int StatusCode(const swarminit::RunReport& report) {
  if (report.status == "converged") return 0;
  std::cerr << "max_epochs_exceeded: " << report.reason << "\n";
  return kExitMaxEpochs;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace swarminit;
  CLI::App app{"Relative pose initialization for drone swarms from anonymous mutual observations"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string trace_path;

  auto* init = app.add_subcommand("init", "simulate a swarm and run the initialization loop");
  init->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  init->add_option("--seed", seed, "override world.seed");
  init->add_option("--out", out_path, "report JSON (default stdout)");
  init->add_option("--trace", trace_path, "write the epoch records as JSON Lines");

  auto* bench = app.add_subcommand("bench", "rotation benchmark: SDP vs LM vs GN");
  bench->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out_path, "CSV output (default stdout)");

  std::string replay_trace;
  auto* replay = app.add_subcommand("replay", "re-solve a recorded epoch trace");
  replay->add_option("--trace", replay_trace, "JSON Lines trace")->required()->check(CLI::ExistingFile);
  replay->add_option("--config", config_path, "scenario JSON for sigma and pipeline settings");
  replay->add_option("--out", out_path, "report JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) {
      Config config = LoadConfig(config_path);
      if (seed) config.world.seed = *seed;
      std::vector<EpochRecord> trace;
      const RunReport report = RunInit(config, trace_path.empty() ? nullptr : &trace);
      if (!trace_path.empty()) {
        std::ofstream t(trace_path, std::ios::binary);
        WriteTrace(t, trace);
      }
      WriteText(out_path, ToJson(report).dump(2) + "\n");
      return StatusCode(report);
    }
    if (*bench) {
      const Config config = LoadConfig(config_path);
      WriteText(out_path, ToCsv(ToRows(RunBenchmarkTrials(config))));
      return 0;
    }
    if (*replay) {
      const Config config = config_path.empty() ? Config{} : LoadConfig(config_path);
      std::ifstream in(replay_trace);
      const auto records = ReadTrace(in);
      const RunReport report = Replay(records, config);
      WriteText(out_path, ToJson(report).dump(2) + "\n");
      return StatusCode(report);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
