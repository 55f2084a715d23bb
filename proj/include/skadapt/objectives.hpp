// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "skadapt/model.hpp"
#include "skadapt/skeleton.hpp"
#include "skadapt/tensor.hpp"

namespace skadapt {

/// Encoded images of one domain. Target batches never carry labels.
class DomainBatch {
 public:
  static DomainBatch source(Tensor images, std::vector<ActionLabel> labels);
  static DomainBatch target(Tensor images);

  const Tensor& images() const noexcept { return images_; }
  Domain domain() const noexcept { return domain_; }
  std::size_t size() const { return images_.dim(0); }
  bool labeled() const noexcept { return labels_.has_value(); }
  /// Throws DataError when the batch is unlabeled.
  const std::vector<ActionLabel>& labels() const;

 private:
  DomainBatch(Tensor images, Domain domain, std::optional<std::vector<ActionLabel>> labels);

  Tensor images_;
  Domain domain_;
  std::optional<std::vector<ActionLabel>> labels_;
};

/// Which distribution the two supervised classifier losses read.
enum class ClassifierProbability {
  PerHalf,  // K-way softmax of each half (default)
  Joint,    // the matching entries of the 2K-way softmax
};

/// Which distribution the target entropy term reads.
enum class EntropyMode {
  JointHalves,   // both halves of the 2K-way softmax, unrenormalized (default)
  Renormalized,  // the two K-way half softmaxes
};

struct LossOptions {
  ClassifierProbability classifier_probability = ClassifierProbability::PerHalf;
  EntropyMode entropy = EntropyMode::JointHalves;
};

// All losses return 0-d tensors and use log(max(q, 1e-12)).

/// Source cross-entropy of the source classifier: -mean log src_half[y].
Tensor loss_cs(const DomainBatch& src, const HeadOutput& out, const LossOptions& opts = {});
/// Source cross-entropy of the target classifier: -mean log tgt_half[y].
Tensor loss_ct(const DomainBatch& src, const HeadOutput& out, const LossOptions& opts = {});
/// Domain discrimination: source mass in the source half, target mass in the
/// target half.
Tensor loss_cst(const DomainBatch& src, const DomainBatch& tgt, const HeadOutput& out_src,
                const HeadOutput& out_tgt);
/// Domain confusion on target data: -mean [log sum_src + log sum_tgt].
Tensor loss_fd(const DomainBatch& tgt, const HeadOutput& out_tgt);
/// Class-level confusion on source data: -mean [log joint[y] + log joint[K+y]].
Tensor loss_fc(const DomainBatch& src, const HeadOutput& out_src);
/// Target entropy.
Tensor loss_e(const DomainBatch& tgt, const HeadOutput& out_tgt, const LossOptions& opts = {});

/// alpha(p) = 2 / (1 + exp(-gamma p)) - 1.
struct AlphaSchedule {
  double gamma = 10.0;
  double progress = 0.0;
};
double alpha(const AlphaSchedule& schedule);

/// Loss-term selection mirroring the ablation table.
enum class Ablation {
  Full,      // all terms
  NoLfd,     // feature phase without the domain-confusion term
  NoLe,      // feature phase without the entropy term
  Baseline,  // source cross-entropy only, no target data
};
std::string to_string(Ablation ablation);
Ablation ablation_from_string(const std::string& text);
/// Names of the losses that contribute to training under an ablation.
std::vector<std::string> enabled_losses(Ablation ablation);

struct LossReport {
  std::size_t step = 0;
  double alpha = 0.0;
  double l_cs = 0.0;
  double l_ct = 0.0;
  double l_cst = 0.0;
  double l_fd = 0.0;
  double l_fc = 0.0;
  double l_e = 0.0;
  double classifier_objective = 0.0;
  double feature_objective = 0.0;

  bool operator==(const LossReport&) const = default;
};

/// Fills both phase objectives:
///   classifier = l_cs + l_ct + l_cst
///   feature    = l_fc + alpha (l_fd + l_e)
/// Disabled terms must be passed as 0. Under Ablation::Baseline the feature
/// extractor is driven by l_cs, so feature = l_cs.
LossReport assemble(LossReport terms, Ablation ablation = Ablation::Full);

std::string loss_csv_header();
std::string to_csv_row(const LossReport& report);
LossReport loss_report_from_csv(const std::string& row);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace skadapt
