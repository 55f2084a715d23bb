// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skadapt/encoder.hpp"
#include "skadapt/model.hpp"
#include "skadapt/objectives.hpp"
#include "skadapt/optim.hpp"
#include "skadapt/skeleton.hpp"

namespace skadapt {

struct TrainConfig {
  int epochs = 40;
  int batch_size = 32;  // per domain
  std::uint64_t seed = 1;
  double alpha_gamma = 10.0;
  SgdConfig sgd;
  EncoderConfig encoder;
  ModelConfig model;
  Ablation ablation = Ablation::Full;
  LossOptions loss;

  void validate() const;
};

/// A dataset encoded once into images, ready for batching.
class EncodedSet {
 public:
  EncodedSet() = default;
  EncodedSet(std::span<const SkeletonSequence> seqs, const EncoderConfig& cfg);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  const Shape& item_shape() const noexcept { return item_shape_; }
  const std::optional<ActionLabel>& label(std::size_t i) const { return labels_.at(i); }

  /// [n, 3, H, W] images for the given item indices.
  Tensor images(std::span<const std::size_t> indices) const;
  /// Throws DataError if any selected item is unlabeled.
  std::vector<ActionLabel> labels(std::span<const std::size_t> indices) const;

 private:
  Shape item_shape_;
  std::vector<double> values_;
  std::vector<std::optional<ActionLabel>> labels_;
};

/// K x K counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0);

  int num_classes() const noexcept { return num_classes_; }
  void add(ActionLabel truth, ActionLabel predicted);
  std::size_t at(int truth, int predicted) const;
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_total(int truth) const;
  double accuracy() const;

  std::string to_csv() const;
  /// Grayscale heatmap, each row scaled by its maximum; one cell is
  /// cell_px x cell_px pixels.
  std::string to_ppm(int cell_px = 8) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int num_classes_;
  std::vector<std::size_t> counts_;
};

struct EvalResult {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

/// Top-1 accuracy with the sum-of-halves prediction rule. Every item must be
/// labeled.
EvalResult evaluate(const Model& model, const EncodedSet& data);
EvalResult evaluate(const Model& model, std::span<const SkeletonSequence> data,
                    const EncoderConfig& encoder);

/// Runs the alternating optimization of one step on owned model parameters.
class Trainer {
 public:
  Trainer(Model& model, const TrainConfig& config);

  /// Phase 1 updates only the head with l_cs + l_ct + l_cst; phase 2 updates
  /// only the feature extractor with l_fc + alpha (l_fd + l_e), reading a
  /// fresh head forward pass. Under Ablation::Baseline both phases use l_cs
  /// and `tgt` may be null. `between_phases`, when set, runs after the head
  /// update and before the feature-extractor update.
  LossReport step(const DomainBatch& src, const DomainBatch* tgt, double progress,
                  const std::function<void()>& between_phases = {});

 private:
  Model& model_;
  TrainConfig config_;
  Sgd head_opt_;
  Sgd feature_opt_;
  std::vector<Tensor> head_params_;
  std::vector<Tensor> feature_params_;
};

struct TrainHistory {
  std::vector<LossReport> steps;
  std::vector<double> epoch_accuracy;
  std::vector<double> epoch_seconds;

  std::string to_csv() const;
};

struct TrainResult {
  Model final_model;
  Model best_model;
  TrainHistory history;
  double final_accuracy = 0.0;
  double best_accuracy = 0.0;
  int best_epoch = 0;
  ConfusionMatrix final_confusion;
};

/// Steps per epoch: floor(min(|source|, |target_train|) / batch_size).
std::size_t steps_per_epoch(std::size_t source_size, std::size_t target_size, int batch_size);

/// Full training run. Progress p = completed_steps / total_steps drives both
/// alpha and the learning rate. Target-train labels are never read.
TrainResult train(const TrainConfig& cfg, const EncodedSet& source, const EncodedSet& target_train,
                  const EncodedSet& target_test);
TrainResult train(const TrainConfig& cfg, std::span<const SkeletonSequence> source,
                  std::span<const SkeletonSequence> target_train,
                  std::span<const SkeletonSequence> target_test);

struct AblationRow {
  Ablation ablation = Ablation::Full;
  std::uint64_t seed = 0;
  std::uint64_t split_hash = 0;
  double accuracy = 0.0;
  double seconds = 0.0;  // wall-clock time of this run
};

/// Trains the four variants {baseline, no-lfd, no-le, full} for every seed on
/// identical splits of `target` (split with `target_fraction` and the seed).
/// Runs are independent, so `threads` > 1 trains several at once; rows come
/// back in seed-major, variant-minor order with identical results either way.
std::vector<AblationRow> run_ablation(const TrainConfig& cfg,
                                      std::span<const SkeletonSequence> source,
                                      std::span<const SkeletonSequence> target,
                                      double target_fraction, std::span<const std::uint64_t> seeds,
                                      unsigned threads = 1);

std::string ablation_csv(std::span<const AblationRow> rows);

}  // namespace skadapt
