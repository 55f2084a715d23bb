// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skadapt/encoder.hpp"
#include "skadapt/synthetic.hpp"
#include "skadapt/trainer.hpp"

namespace skadapt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad arguments or configuration
  kExitData = 2,      // unreadable / malformed / inconsistent data
  kExitInternal = 3,  // invariant violation
};

/// Every recognised key with its default value. User configs are merged on
/// top of this and may not introduce unknown keys.
nlohmann::json default_config();

/// Parses a config file and merges it over the defaults.
nlohmann::json load_config(const std::filesystem::path& path);
/// Merges `overrides` over the defaults; throws ConfigError on unknown keys.
nlohmann::json effective_config(const nlohmann::json& overrides);

struct SynthSetup {
  SynthConfig source;
  SynthConfig target;
  int instances_per_class = 40;
};

SynthSetup synth_setup_from_config(const nlohmann::json& cfg);
EncoderConfig encoder_config_from_config(const nlohmann::json& cfg);
/// Model num_classes is left at its default; callers set it from the data.
TrainConfig train_config_from_config(const nlohmann::json& cfg);

/// Canonical hash of a configuration document.
std::uint64_t config_hash(const nlohmann::json& cfg);

struct GenSynthArgs {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
};

struct TrainArgs {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ablation;
  std::optional<double> target_fraction;
};

struct EvalArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = ".";
  bool test_split_only = false;
};

struct EncodeArgs {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out;
  std::optional<std::filesystem::path> config;
};

// Each command returns an ExitCode; errors are reported on `err`.
int cmd_gen_synth(const GenSynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err);

/// Full command-line entry point (subcommand dispatch and flag parsing).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace skadapt::cli
