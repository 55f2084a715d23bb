// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "skadapt/skeleton.hpp"
#include "skadapt/tensor.hpp"

namespace skadapt {

struct ModelConfig {
  int num_classes = 10;
  int in_channels = 3;
  /// Output channels of each conv(3x3, pad 1) -> relu -> maxpool2 stage.
  std::vector<int> stage_channels{8, 16, 32};
  std::uint64_t init_seed = 1;

  void validate() const;
  std::size_t feature_dim() const { return static_cast<std::size_t>(stage_channels.back()); }
  /// Trainable scalars implied by the configuration.
  std::size_t parameter_count() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Plain CNN: conv stages followed by global average pooling, so the feature
/// width does not depend on the input size.
class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  FeatureExtractor(int in_channels, const std::vector<int>& stage_channels, std::mt19937_64& rng);

  /// [N, C, H, W] -> [N, D]. H and W must be divisible by 2^stages.
  Tensor forward(const Tensor& batch) const;

  std::size_t feature_dim() const;
  std::size_t stage_count() const { return kernels_.size(); }
  std::vector<Tensor> parameters() const;

 private:
  friend class Model;
  int in_channels_ = 3;
  std::vector<Tensor> kernels_;
  std::vector<Tensor> biases_;
};

/// Per-row view of the head output.
struct HeadDistribution {
  std::vector<double> joint;     // softmax over all 2K logits
  std::vector<double> src_half;  // softmax over logits [0, K)
  std::vector<double> tgt_half;  // softmax over logits [K, 2K)

  int num_classes() const { return static_cast<int>(src_half.size()); }
};

/// Batched head output; all members are graph nodes.
struct HeadOutput {
  Tensor logits;    // [N, 2K]
  Tensor joint;     // [N, 2K]
  Tensor src_half;  // [N, K]
  Tensor tgt_half;  // [N, K]
  int num_classes = 0;

  std::size_t batch() const { return logits.dim(0); }
  HeadDistribution row(std::size_t i) const;
};

/// Derives the three distributions from one set of 2K logits.
HeadOutput distributions_from_logits(const Tensor& logits, int num_classes);

/// Single dense layer with 2K outputs. Neurons [0,K) form the source
/// classifier, [K,2K) the target classifier; the domain classifier is their
/// concatenation and owns no parameters of its own.
class ClassifierHead {
 public:
  enum class Mode { Trainable, Frozen };

  ClassifierHead() = default;
  ClassifierHead(std::size_t feature_dim, int num_classes, std::mt19937_64& rng);

  /// Frozen mode reads detached copies of the parameters so gradients reach
  /// the features without touching the head.
  HeadOutput forward(const Tensor& features, Mode mode = Mode::Trainable) const;

  int num_classes() const { return num_classes_; }
  std::vector<Tensor> parameters() const { return {weights_, bias_}; }

 private:
  friend class Model;
  int num_classes_ = 0;
  Tensor weights_;  // [D, 2K]
  Tensor bias_;     // [2K]
};

/// argmax_k joint[k] + joint[K + k]; ties go to the smaller class index.
ActionLabel predict(const HeadDistribution& dist);

class Model {
 public:
  explicit Model(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }
  const FeatureExtractor& features() const noexcept { return features_; }
  const ClassifierHead& head() const noexcept { return head_; }

  std::vector<Tensor> feature_parameters() const { return features_.parameters(); }
  std::vector<Tensor> head_parameters() const { return head_.parameters(); }
  std::vector<Tensor> parameters() const;

  /// Deep copy with independent parameter storage.
  Model clone() const;

  /// Parameter-wise copy; configurations must match.
  void load_parameters(std::span<const Tensor> values);

 private:
  ModelConfig config_;
  FeatureExtractor features_;
  ClassifierHead head_;
};

/// FNV-1a over the raw bytes of the parameter values.
std::uint64_t parameter_hash(std::span<const Tensor> params);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  nlohmann::json run_config;
};

/// JSON container: format tag, version, the run configuration, the model
/// configuration, and every parameter with its shape and row-major values.
void save_checkpoint(const Model& model, const nlohmann::json& run_config,
                     const std::filesystem::path& path);
std::string checkpoint_to_string(const Model& model, const nlohmann::json& run_config);
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint checkpoint_from_string(const std::string& text);

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace skadapt
