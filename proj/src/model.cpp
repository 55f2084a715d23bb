// SPDX-License-Identifier: Apache-2.0
#include "skadapt/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "skadapt/errors.hpp"

namespace skadapt {

using nlohmann::json;

namespace {

// Zero-mean uniform init with half-width gain / sqrt(fan_in).
Tensor init_uniform(Shape shape, std::size_t fan_in, double gain, std::mt19937_64& rng) {
  const double bound = gain / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> values(shape_numel(shape));
  for (double& v : values) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = bound * (2.0 * u - 1.0);
  }
  return Tensor(std::move(shape), std::move(values), true);
}

// Conv layers feed a ReLU, so they use the He gain sqrt(6); the head uses 1.
const double kConvGain = std::sqrt(6.0);

}  // namespace

void ModelConfig::validate() const {
  if (num_classes < 2) throw ConfigError("model: num_classes must be >= 2");
  if (in_channels < 1) throw ConfigError("model: in_channels must be >= 1");
  if (stage_channels.empty()) throw ConfigError("model: at least one conv stage is required");
  for (int c : stage_channels) {
    if (c < 1) throw ConfigError("model: stage channels must be positive");
  }
}

std::size_t ModelConfig::parameter_count() const {
  std::size_t total = 0;
  std::size_t prev = static_cast<std::size_t>(in_channels);
  for (int c : stage_channels) {
    total += static_cast<std::size_t>(c) * prev * 9 + static_cast<std::size_t>(c);
    prev = static_cast<std::size_t>(c);
  }
  const std::size_t heads = 2 * static_cast<std::size_t>(num_classes);
  return total + prev * heads + heads;
}

// FeatureExtractor ----------------------------------------------------------

FeatureExtractor::FeatureExtractor(int in_channels, const std::vector<int>& stage_channels,
                                   std::mt19937_64& rng)
    : in_channels_(in_channels) {
  std::size_t prev = static_cast<std::size_t>(in_channels);
  for (int c : stage_channels) {
    const auto out = static_cast<std::size_t>(c);
    kernels_.push_back(init_uniform({out, prev, 3, 3}, prev * 9, kConvGain, rng));
    biases_.push_back(Tensor::zeros({out}, true));
    prev = out;
  }
}

std::size_t FeatureExtractor::feature_dim() const {
  return kernels_.empty() ? 0 : kernels_.back().dim(0);
}

Tensor FeatureExtractor::forward(const Tensor& batch) const {
  if (batch.rank() != 4) {
    throw ShapeError("extract_features: expected [N,C,H,W], got " + shape_to_string(batch.shape()));
  }
  if (batch.dim(1) != static_cast<std::size_t>(in_channels_)) {
    throw ShapeError("extract_features: expected " + std::to_string(in_channels_) +
                     " channels, got " + std::to_string(batch.dim(1)));
  }
  const std::size_t factor = std::size_t{1} << kernels_.size();
  if (batch.dim(2) % factor != 0 || batch.dim(3) % factor != 0) {
    throw ShapeError("extract_features: spatial size " + std::to_string(batch.dim(2)) + "x" +
                     std::to_string(batch.dim(3)) + " not divisible by " + std::to_string(factor));
  }
  Tensor x = batch;
  for (std::size_t s = 0; s < kernels_.size(); ++s) {
    x = maxpool2(relu(conv2d(x, kernels_[s], biases_[s], 1, 1)));
  }
  return global_avg_pool(x);
}

std::vector<Tensor> FeatureExtractor::parameters() const {
  std::vector<Tensor> out;
  for (std::size_t s = 0; s < kernels_.size(); ++s) {
    out.push_back(kernels_[s]);
    out.push_back(biases_[s]);
  }
  return out;
}

// Head ----------------------------------------------------------------------

HeadDistribution HeadOutput::row(std::size_t i) const {
  const auto k = static_cast<std::size_t>(num_classes);
  HeadDistribution d;
  d.joint.assign(joint.data().begin() + i * 2 * k, joint.data().begin() + (i + 1) * 2 * k);
  d.src_half.assign(src_half.data().begin() + i * k, src_half.data().begin() + (i + 1) * k);
  d.tgt_half.assign(tgt_half.data().begin() + i * k, tgt_half.data().begin() + (i + 1) * k);
  return d;
}

HeadOutput distributions_from_logits(const Tensor& logits, int num_classes) {
  const auto k = static_cast<std::size_t>(num_classes);
  if (logits.rank() != 2 || logits.dim(1) != 2 * k) {
    throw ShapeError("head: expected [N," + std::to_string(2 * k) + "] logits, got " +
                     shape_to_string(logits.shape()));
  }
  HeadOutput out;
  out.num_classes = num_classes;
  out.logits = logits;
  out.joint = softmax(logits);
  out.src_half = softmax(slice_cols(logits, 0, k));
  out.tgt_half = softmax(slice_cols(logits, k, 2 * k));
  return out;
}

ClassifierHead::ClassifierHead(std::size_t feature_dim, int num_classes, std::mt19937_64& rng)
    : num_classes_(num_classes),
      weights_(init_uniform({feature_dim, 2 * static_cast<std::size_t>(num_classes)},
                            feature_dim, 1.0, rng)),
      bias_(Tensor::zeros({2 * static_cast<std::size_t>(num_classes)}, true)) {}

HeadOutput ClassifierHead::forward(const Tensor& features, Mode mode) const {
  if (features.rank() != 2 || features.dim(1) != weights_.dim(0)) {
    throw ShapeError("head: expected [N," + std::to_string(weights_.dim(0)) + "] features, got " +
                     shape_to_string(features.shape()));
  }
  const Tensor logits = mode == Mode::Frozen
                            ? dense(features, weights_.detach(), bias_.detach())
                            : dense(features, weights_, bias_);
  return distributions_from_logits(logits, num_classes_);
}

ActionLabel predict(const HeadDistribution& dist) {
  const int k = dist.num_classes();
  if (k == 0 || dist.joint.size() != 2 * static_cast<std::size_t>(k)) {
    throw ShapeError("predict: joint distribution must have 2K entries");
  }
  int best = 0;
  double best_mass = dist.joint[0] + dist.joint[k];
  for (int c = 1; c < k; ++c) {
    const double mass = dist.joint[c] + dist.joint[k + c];
    if (mass > best_mass) {
      best = c;
      best_mass = mass;
    }
  }
  return ActionLabel{best};
}

// Model ---------------------------------------------------------------------

Model::Model(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(config_.init_seed);
  features_ = FeatureExtractor(config_.in_channels, config_.stage_channels, rng);
  head_ = ClassifierHead(config_.feature_dim(), config_.num_classes, rng);
}

std::vector<Tensor> Model::parameters() const {
  auto out = feature_parameters();
  for (auto& p : head_parameters()) out.push_back(p);
  return out;
}

Model Model::clone() const {
  Model copy(config_);
  copy.load_parameters(parameters());
  return copy;
}

void Model::load_parameters(std::span<const Tensor> values) {
  auto params = parameters();
  if (values.size() != params.size()) {
    throw ShapeError("model: expected " + std::to_string(params.size()) + " parameter tensors, got " +
                     std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].shape() != params[i].shape()) {
      throw ShapeError("model: parameter " + std::to_string(i) + " has shape " +
                       shape_to_string(values[i].shape()) + ", expected " +
                       shape_to_string(params[i].shape()));
    }
    auto dst = params[i].mutable_data();
    std::copy(values[i].data().begin(), values[i].data().end(), dst.begin());
    params[i].clear_grad();
  }
}

std::uint64_t parameter_hash(std::span<const Tensor> params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Tensor& p : params) {
    const auto d = p.data();
    h = fnv1a(std::span(reinterpret_cast<const std::uint8_t*>(d.data()), d.size_bytes()), h);
  }
  return h;
}

// Checkpoints ---------------------------------------------------------------

json to_json(const ModelConfig& cfg) {
  return json{{"num_classes", cfg.num_classes},
              {"in_channels", cfg.in_channels},
              {"stage_channels", cfg.stage_channels},
              {"init_seed", cfg.init_seed}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  cfg.num_classes = j.value("num_classes", cfg.num_classes);
  cfg.in_channels = j.value("in_channels", cfg.in_channels);
  cfg.stage_channels = j.value("stage_channels", cfg.stage_channels);
  cfg.init_seed = j.value("init_seed", cfg.init_seed);
  cfg.validate();
  return cfg;
}

namespace {

std::vector<double> values_of(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

std::string checkpoint_to_string(const Model& model, const json& run_config) {
  static const char* kNames[] = {"kernel", "bias"};
  json params = json::array();
  const auto features = model.feature_parameters();
  for (std::size_t i = 0; i < features.size(); ++i) {
    params.push_back({{"name", "stage" + std::to_string(i / 2) + "." + kNames[i % 2]},
                      {"shape", features[i].shape()},
                      {"data", values_of(features[i])}});
  }
  const auto head = model.head_parameters();
  params.push_back({{"name", "head.weights"}, {"shape", head[0].shape()}, {"data", values_of(head[0])}});
  params.push_back({{"name", "head.bias"}, {"shape", head[1].shape()}, {"data", values_of(head[1])}});

  json doc{{"format", "skadapt-checkpoint"},
           {"format_version", kCheckpointVersion},
           {"config", run_config},
           {"model", to_json(model.config())},
           {"parameters", std::move(params)}};
  return doc.dump() + "\n";
}

void save_checkpoint(const Model& model, const json& run_config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << checkpoint_to_string(model, run_config);
  if (!out) throw DataError("write failed for " + path.string());
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (doc.value("format", std::string()) != "skadapt-checkpoint") {
    throw DataError("not a skadapt checkpoint");
  }
  const int version = doc.value("format_version", 0);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  try {
    Model model(model_config_from_json(doc.at("model")));
    std::vector<Tensor> values;
    for (const auto& p : doc.at("parameters")) {
      values.emplace_back(p.at("shape").get<Shape>(), p.at("data").get<std::vector<double>>());
    }
    model.load_parameters(values);
    return Checkpoint{std::move(model), doc.value("config", json::object())};
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace skadapt
