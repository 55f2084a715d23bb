// SPDX-License-Identifier: Apache-2.0
#include "skadapt/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <regex>
#include <sstream>

#include "skadapt/dataset_io.hpp"
#include "skadapt/errors.hpp"
#include "skadapt/model.hpp"
#include "skadapt/ntu_format.hpp"

namespace skadapt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// Configuration ---------------------------------------------------------------

json default_config() {
  return json::parse(R"({
    "out": "runs/default",
    "data": {
      "source": "data/source.jsonl",
      "target": "data/target.jsonl",
      "target_fraction": 0.3
    },
    "synth": {
      "num_classes": 10,
      "joints": 15,
      "frames": 32,
      "instances_per_class": 40,
      "noise_sigma": 0.01,
      "seed": 7,
      "source": {"view_angle_deg": 0.0, "subject_scale": 1.0, "subject_speed": 1.0},
      "target": {"view_angle_deg": 60.0, "subject_scale": 1.0, "subject_speed": 1.0}
    },
    "encoder": {"out_height": 32, "out_width": 32, "body_slots": 2},
    "model": {"stage_channels": [8, 16, 32]},
    "train": {
      "epochs": 40,
      "batch_size": 32,
      "seed": 1,
      "alpha_gamma": 10.0,
      "ablation": "none",
      "classifier_probability": "per-half",
      "entropy": "joint-halves",
      "sgd": {"base_lr": 0.01, "anneal_a": 10.0, "anneal_b": 0.75, "momentum": 0.0}
    }
  })");
}

namespace {

bool same_kind(const json& def, const json& val) {
  if (def.is_number_float()) return val.is_number();
  if (def.is_number_integer()) return val.is_number_integer();
  return def.type() == val.type();
}

// Every key in `user` must exist in `defaults` with a compatible type.
void check_keys(const json& defaults, const json& user, const std::string& where) {
  for (const auto& [key, val] : user.items()) {
    const std::string name = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + name + "'");
    const json& def = defaults.at(key);
    if (!same_kind(def, val)) {
      throw ConfigError("config key '" + name + "' has type " + val.type_name() + ", expected " +
                        def.type_name());
    }
    if (def.is_object()) check_keys(def, val, name);
    if (def.is_array()) {
      for (const auto& item : val) {
        if (!item.is_number_integer()) throw ConfigError("config key '" + name + "' must hold integers");
      }
    }
  }
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

ClassifierProbability probability_from_string(const std::string& s) {
  if (s == "per-half") return ClassifierProbability::PerHalf;
  if (s == "joint") return ClassifierProbability::Joint;
  throw ConfigError("train.classifier_probability must be 'per-half' or 'joint', got '" + s + "'");
}

EntropyMode entropy_from_string(const std::string& s) {
  if (s == "joint-halves") return EntropyMode::JointHalves;
  if (s == "renormalized") return EntropyMode::Renormalized;
  throw ConfigError("train.entropy must be 'joint-halves' or 'renormalized', got '" + s + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

// The experiment identity excludes where artifacts are written.
json experiment_of(const json& cfg) {
  json e = cfg;
  e.erase("out");
  return e;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<SkeletonSequence> load_dataset(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("dataset not found: " + path.string());
  return load_jsonl(path);
}

}  // namespace

json effective_config(const json& overrides) {
  if (!overrides.is_object()) throw ConfigError("config must be a JSON object");
  json cfg = default_config();
  check_keys(cfg, overrides, "");
  cfg.merge_patch(overrides);
  return cfg;
}

json load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  json user;
  try {
    user = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return effective_config(user);
}

SynthSetup synth_setup_from_config(const json& cfg) {
  const json& s = cfg.at("synth");
  SynthConfig base;
  base.num_classes = get<int>(s, "num_classes");
  base.joints = get<int>(s, "joints");
  base.frames = get<int>(s, "frames");
  base.noise_sigma = get<double>(s, "noise_sigma");
  base.seed = get<std::uint64_t>(s, "seed");
  auto domain = [&](const json& d) {
    SynthConfig c = base;
    c.view_angle = degrees_to_radians(get<double>(d, "view_angle_deg"));
    c.subject_scale = get<double>(d, "subject_scale");
    c.subject_speed = get<double>(d, "subject_speed");
    c.validate();
    return c;
  };
  SynthSetup setup{domain(s.at("source")), domain(s.at("target")), get<int>(s, "instances_per_class")};
  if (setup.instances_per_class < 1) throw ConfigError("synth.instances_per_class must be >= 1");
  return setup;
}

EncoderConfig encoder_config_from_config(const json& cfg) {
  const json& e = cfg.at("encoder");
  EncoderConfig enc;
  const auto h = get<long long>(e, "out_height");
  const auto w = get<long long>(e, "out_width");
  const auto slots = get<long long>(e, "body_slots");
  if (h < 1 || w < 1 || slots < 1) throw ConfigError("encoder sizes must be positive");
  enc.out_height = static_cast<std::size_t>(h);
  enc.out_width = static_cast<std::size_t>(w);
  enc.body_slots = static_cast<std::size_t>(slots);
  enc.validate();
  return enc;
}

TrainConfig train_config_from_config(const json& cfg) {
  const json& t = cfg.at("train");
  TrainConfig tc;
  tc.epochs = get<int>(t, "epochs");
  tc.batch_size = get<int>(t, "batch_size");
  tc.seed = get<std::uint64_t>(t, "seed");
  tc.alpha_gamma = get<double>(t, "alpha_gamma");
  tc.ablation = ablation_from_string(get<std::string>(t, "ablation"));
  tc.loss.classifier_probability = probability_from_string(get<std::string>(t, "classifier_probability"));
  tc.loss.entropy = entropy_from_string(get<std::string>(t, "entropy"));
  const json& sgd = t.at("sgd");
  tc.sgd.base_lr = get<double>(sgd, "base_lr");
  tc.sgd.anneal_a = get<double>(sgd, "anneal_a");
  tc.sgd.anneal_b = get<double>(sgd, "anneal_b");
  tc.sgd.momentum = get<double>(sgd, "momentum");
  tc.encoder = encoder_config_from_config(cfg);
  tc.model.stage_channels = get<std::vector<int>>(cfg.at("model"), "stage_channels");
  tc.model.init_seed = tc.seed;
  const double fraction = get<double>(cfg.at("data"), "target_fraction");
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("data.target_fraction must lie in (0,1)");
  tc.validate();
  return tc;
}

std::uint64_t config_hash(const json& cfg) { return fnv1a(cfg.dump()); }

// Commands --------------------------------------------------------------------

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

void print_class_counts(std::ostream& out, const char* name, std::span<const SkeletonSequence> data) {
  std::vector<int> counts(static_cast<std::size_t>(std::max(infer_num_classes(data), 0)), 0);
  for (const auto& s : data) {
    if (s.label) ++counts[static_cast<std::size_t>(s.label->index)];
  }
  out << name << ": " << data.size() << " sequences\n";
  for (std::size_t k = 0; k < counts.size(); ++k) out << "  class " << k << ": " << counts[k] << "\n";
}

}  // namespace

int cmd_gen_synth(const GenSynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    json cfg = load_config(args.config);
    if (args.seed) cfg["synth"]["seed"] = *args.seed;
    const SynthSetup setup = synth_setup_from_config(cfg);

    fs::path src_path = cfg["data"]["source"].get<std::string>();
    fs::path tgt_path = cfg["data"]["target"].get<std::string>();
    if (!args.out.empty()) {
      src_path = args.out / "source.jsonl";
      tgt_path = args.out / "target.jsonl";
    }
    // Target instances never coincide with source instances.
    const auto tgt_first = static_cast<std::uint64_t>(setup.instances_per_class);
    const auto source = make_synthetic_dataset(setup.source, setup.instances_per_class, Domain::Source, 0);
    const auto target =
        make_synthetic_dataset(setup.target, setup.instances_per_class, Domain::Target, tgt_first);
    ensure_dir(src_path.parent_path());
    ensure_dir(tgt_path.parent_path());
    save_jsonl(source, src_path);
    save_jsonl(target, tgt_path);
    print_class_counts(out, src_path.string().c_str(), source);
    print_class_counts(out, tgt_path.string().c_str(), target);
    return int{kExitOk};
  });
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    json cfg = load_config(args.config);
    if (args.out) cfg["out"] = args.out->string();
    if (args.seed) cfg["train"]["seed"] = *args.seed;
    if (args.ablation) cfg["train"]["ablation"] = to_string(ablation_from_string(*args.ablation));
    if (args.target_fraction) cfg["data"]["target_fraction"] = *args.target_fraction;
    TrainConfig tc = train_config_from_config(cfg);
    const double fraction = cfg["data"]["target_fraction"].get<double>();

    const auto source = load_dataset(cfg["data"]["source"].get<std::string>());
    const auto target = load_dataset(cfg["data"]["target"].get<std::string>());
    if (source.empty()) throw DataError("source dataset is empty");
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (!source[i].label) throw DataError("source sequence is unlabeled", i);
    }
    const int k = infer_num_classes(source);
    if (k < 2) throw DataError("source dataset must contain at least 2 classes");
    const int k_target = infer_num_classes(target);
    if (k_target > k) {
      throw DataError("target labels reach class " + std::to_string(k_target - 1) +
                      " but source has K=" + std::to_string(k));
    }
    tc.model.num_classes = k;

    const TargetSplit split = split_target(target, fraction, tc.seed);
    const TrainResult result = train(tc, source, split.train, split.test);

    const fs::path dir = cfg["out"].get<std::string>();
    ensure_dir(dir);
    const json experiment = experiment_of(cfg);
    write_file(dir / "config.echo", cfg.dump(2) + "\n");
    write_file(dir / "history.csv", result.history.to_csv());
    json summary{{"final_accuracy", result.final_accuracy},
                 {"best_accuracy", result.best_accuracy},
                 {"best_epoch", result.best_epoch},
                 {"epochs", tc.epochs},
                 {"seed", tc.seed},
                 {"ablation", to_string(tc.ablation)},
                 {"enabled_losses", enabled_losses(tc.ablation)},
                 {"num_classes", k},
                 {"config_hash", hex64(config_hash(experiment))},
                 {"split_hash", hex64(split.hash())},
                 {"source_size", source.size()},
                 {"target_train_size", split.train.size()},
                 {"target_test_size", split.test.size()}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    save_checkpoint(result.best_model, experiment, dir / "best.ckpt");
    save_checkpoint(result.final_model, experiment, dir / "final.ckpt");
    write_file(dir / "confusion.csv", result.final_confusion.to_csv());
    write_file(dir / "confusion.ppm", result.final_confusion.to_ppm());

    char line[96];
    std::snprintf(line, sizeof line, "final accuracy %.4f, best %.4f (epoch %d)\n",
                  result.final_accuracy, result.best_accuracy, result.best_epoch + 1);
    out << line << "artifacts written to " << dir.string() << "\n";
    return int{kExitOk};
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint ckpt = load_checkpoint(args.checkpoint);
    const json run_cfg = effective_config(ckpt.run_config.is_object() ? ckpt.run_config : json::object());
    const EncoderConfig enc = encoder_config_from_config(run_cfg);
    const ModelConfig& mc = ckpt.model.config();

    if (args.config) {
      const json cfg = load_config(*args.config);
      const EncoderConfig want = encoder_config_from_config(cfg);
      const auto stages = cfg["model"]["stage_channels"].get<std::vector<int>>();
      if (!(want == enc) || stages != mc.stage_channels) {
        throw ConfigError("shape mismatch: config declares encoder " + std::to_string(want.out_height) +
                          "x" + std::to_string(want.out_width) + " with " +
                          std::to_string(stages.size()) + " stages, checkpoint has " +
                          std::to_string(enc.out_height) + "x" + std::to_string(enc.out_width) +
                          " with " + std::to_string(mc.stage_channels.size()) + " stages");
      }
    }

    std::vector<SkeletonSequence> data = load_dataset(args.data);
    if (data.empty()) throw DataError("dataset " + args.data.string() + " is empty");
    if (args.test_split_only) {
      const double fraction = run_cfg["data"]["target_fraction"].get<double>();
      const auto seed = run_cfg["train"]["seed"].get<std::uint64_t>();
      data = split_target(data, fraction, seed).test;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!data[i].label) throw DataError("evaluation sequence is unlabeled", i);
    }
    const int k_data = infer_num_classes(data);
    if (k_data > mc.num_classes) {
      throw DataError("class count mismatch: dataset has K=" + std::to_string(k_data) +
                      ", checkpoint has K=" + std::to_string(mc.num_classes));
    }

    const EvalResult r = evaluate(ckpt.model, data, enc);
    ensure_dir(args.out);
    write_file(args.out / "confusion.csv", r.confusion.to_csv());
    write_file(args.out / "confusion.ppm", r.confusion.to_ppm());
    char line[64];
    std::snprintf(line, sizeof line, "accuracy %.4f (%zu/%zu)\n", r.accuracy, r.confusion.trace(),
                  r.confusion.total());
    out << line;
    return int{kExitOk};
  });
}

namespace {

// NTU file names carry the action as A<nnn>, 1-based.
std::optional<ActionLabel> label_from_ntu_name(const std::string& stem) {
  static const std::regex kAction(R"(A(\d{3}))");
  std::smatch m;
  if (std::regex_search(stem, m, kAction)) {
    const int a = std::stoi(m[1]);
    if (a >= 1) return ActionLabel{a - 1};
  }
  return std::nullopt;
}

std::string shape_of(const SkeletonImage& img) {
  return std::to_string(img.height) + "x" + std::to_string(img.width) + "x3";
}

}  // namespace

int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json cfg = args.config ? load_config(*args.config) : default_config();
    const EncoderConfig enc = encoder_config_from_config(cfg);
    if (args.inputs.empty()) throw ConfigError("encode: no input files");
    ensure_dir(args.out);

    std::string index = "file,label,shape\n";
    std::size_t written = 0;
    std::size_t failed = 0;
    auto emit = [&](const SkeletonSequence& seq, const std::string& name) {
      const SkeletonImage img = encode(seq, enc);
      write_file(args.out / name, to_ppm(img));
      index += name + "," + (seq.label ? std::to_string(seq.label->index) : std::string()) + "," +
               shape_of(img) + "\n";
      ++written;
    };
    for (const fs::path& input : args.inputs) {
      try {
        const std::string stem = input.stem().string();
        if (input.extension() == ".jsonl") {
          const auto seqs = load_jsonl(input);
          for (std::size_t i = 0; i < seqs.size(); ++i) {
            emit(seqs[i], stem + "_" + std::to_string(i) + ".ppm");
          }
        } else {
          SkeletonSequence seq = read_ntu_skeleton_file(input);
          if (!seq.label) seq.label = label_from_ntu_name(stem);
          emit(seq, stem + ".ppm");
        }
      } catch (const Error& e) {
        err << input.string() << ": " << e.what() << "\n";
        ++failed;
      }
    }
    write_file(args.out / "index.csv", index);
    out << written << " image(s) written, " << failed << " input(s) failed\n";
    return failed == 0 ? int{kExitOk} : int{kExitData};
  });
}

// Entry point -------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skeleton action recognition with domain-adversarial adaptation", "skadapt"};
  app.require_subcommand(1);

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "Generate synthetic source/target JSONL datasets");
  gen_cmd->add_option("--config", gen.config, "Configuration file (JSON)")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory (default: data paths from the config)");
  gen_cmd->add_option("--seed", gen.seed, "Override synth.seed");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train and write run artifacts");
  train_cmd->add_option("--config", tr.config, "Configuration file (JSON)")->required();
  train_cmd->add_option("--out", tr.out, "Output directory (overrides 'out')");
  train_cmd->add_option("--seed", tr.seed, "Override train.seed");
  train_cmd->add_option("--ablation", tr.ablation, "Loss ablation")
      ->check(CLI::IsMember({"none", "no-lfd", "no-le", "baseline"}));
  train_cmd->add_option("--target-fraction", tr.target_fraction,
                        "Fraction of target data used unlabeled for adaptation (default 0.3)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled dataset");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", ev.data, "Labeled JSONL dataset")->required();
  eval_cmd->add_option("--config", ev.config, "Check the checkpoint against this configuration");
  eval_cmd->add_option("--out", ev.out, "Directory for confusion.csv / confusion.ppm");
  eval_cmd->add_flag("--test-split", ev.test_split_only,
                     "Evaluate only the held-out part of the split recorded in the checkpoint");

  EncodeArgs en;
  auto* enc_cmd = app.add_subcommand("encode", "Encode skeleton files into PPM images");
  enc_cmd->add_option("inputs", en.inputs, ".skeleton or .jsonl files")->required();
  enc_cmd->add_option("--out", en.out, "Output directory")->required();
  enc_cmd->add_option("--config", en.config, "Configuration file for the encoder size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (*gen_cmd) return cmd_gen_synth(gen, out, err);
  if (*train_cmd) return cmd_train(tr, out, err);
  if (*eval_cmd) return cmd_eval(ev, out, err);
  return cmd_encode(en, out, err);
}

}  // namespace skadapt::cli
