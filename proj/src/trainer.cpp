// SPDX-License-Identifier: Apache-2.0
#include "skadapt/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "skadapt/dataset_io.hpp"
#include "skadapt/errors.hpp"

namespace skadapt {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (batch_size < 2) throw ConfigError("train: batch_size must be >= 2");
  if (!std::isfinite(alpha_gamma)) throw ConfigError("train: alpha_gamma must be finite");
  sgd.validate();
  encoder.validate();
  model.validate();
}

// EncodedSet ----------------------------------------------------------------

EncodedSet::EncodedSet(std::span<const SkeletonSequence> seqs, const EncoderConfig& cfg) {
  cfg.validate();
  item_shape_ = {SkeletonImage::kChannels, cfg.out_height, cfg.out_width};
  values_.reserve(seqs.size() * shape_numel(item_shape_));
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    try {
      const SkeletonImage img = encode(seqs[i], cfg);
      values_.insert(values_.end(), img.values.begin(), img.values.end());
    } catch (const DataError& e) {
      throw DataError(e.what(), i);
    }
    labels_.push_back(seqs[i].label);
  }
}

Tensor EncodedSet::images(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw DataError("empty index batch");
  const std::size_t item = shape_numel(item_shape_);
  std::vector<double> out;
  out.reserve(indices.size() * item);
  for (std::size_t i : indices) {
    if (i >= size()) throw DataError("batch index out of range");
    out.insert(out.end(), values_.begin() + i * item, values_.begin() + (i + 1) * item);
  }
  Shape shape{indices.size()};
  shape.insert(shape.end(), item_shape_.begin(), item_shape_.end());
  return Tensor(std::move(shape), std::move(out));
}

std::vector<ActionLabel> EncodedSet::labels(std::span<const std::size_t> indices) const {
  std::vector<ActionLabel> out;
  for (std::size_t i : indices) {
    const auto& y = labels_.at(i);
    if (!y) throw DataError("item is unlabeled", i);
    out.push_back(*y);
  }
  return out;
}

// ConfusionMatrix -----------------------------------------------------------

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0) {}

void ConfusionMatrix::add(ActionLabel truth, ActionLabel predicted) {
  if (truth.index < 0 || truth.index >= num_classes_ || predicted.index < 0 ||
      predicted.index >= num_classes_) {
    throw DataError("confusion: class index outside [0," + std::to_string(num_classes_) + ")");
  }
  ++counts_[truth.index * num_classes_ + predicted.index];
}

std::size_t ConfusionMatrix::at(int truth, int predicted) const {
  return counts_.at(truth * num_classes_ + predicted);
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (int k = 0; k < num_classes_; ++k) t += at(k, k);
  return t;
}

std::size_t ConfusionMatrix::row_total(int truth) const {
  std::size_t t = 0;
  for (int k = 0; k < num_classes_; ++k) t += at(truth, k);
  return t;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
}

std::string ConfusionMatrix::to_csv() const {
  std::string out = "true\\pred";
  for (int k = 0; k < num_classes_; ++k) out += "," + std::to_string(k);
  out += '\n';
  for (int r = 0; r < num_classes_; ++r) {
    out += std::to_string(r);
    for (int c = 0; c < num_classes_; ++c) out += "," + std::to_string(at(r, c));
    out += '\n';
  }
  return out;
}

std::string ConfusionMatrix::to_ppm(int cell_px) const {
  const int side = num_classes_ * cell_px;
  std::string out = "P6\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  for (int y = 0; y < side; ++y) {
    const int r = y / cell_px;
    std::size_t row_max = 0;
    for (int c = 0; c < num_classes_; ++c) row_max = std::max(row_max, at(r, c));
    for (int x = 0; x < side; ++x) {
      const int c = x / cell_px;
      const long level = row_max == 0 ? 0
                                      : std::lround(255.0 * static_cast<double>(at(r, c)) /
                                                    static_cast<double>(row_max));
      out.append(3, static_cast<char>(static_cast<unsigned char>(level)));
    }
  }
  return out;
}

// Evaluation ----------------------------------------------------------------

EvalResult evaluate(const Model& model, const EncodedSet& data) {
  if (data.empty()) throw DataError("evaluate: empty dataset");
  constexpr std::size_t kChunk = 64;
  const int k = model.config().num_classes;
  ConfusionMatrix confusion(k);
  NoGradGuard no_grad;
  for (std::size_t begin = 0; begin < data.size(); begin += kChunk) {
    std::vector<std::size_t> idx(std::min(kChunk, data.size() - begin));
    std::iota(idx.begin(), idx.end(), begin);
    const auto truth = data.labels(idx);
    for (const ActionLabel& y : truth) {
      if (y.index >= k) {
        throw DataError("evaluate: label " + std::to_string(y.index) + " but model has " +
                        std::to_string(k) + " classes");
      }
    }
    const HeadOutput out = model.head().forward(model.features().forward(data.images(idx)));
    for (std::size_t i = 0; i < idx.size(); ++i) confusion.add(truth[i], predict(out.row(i)));
  }
  return EvalResult{confusion.accuracy(), std::move(confusion)};
}

EvalResult evaluate(const Model& model, std::span<const SkeletonSequence> data,
                    const EncoderConfig& encoder) {
  return evaluate(model, EncodedSet(data, encoder));
}

// Trainer -------------------------------------------------------------------

Trainer::Trainer(Model& model, const TrainConfig& config)
    : model_(model),
      config_(config),
      head_opt_(config.sgd),
      feature_opt_(config.sgd),
      head_params_(model.head_parameters()),
      feature_params_(model.feature_parameters()) {}

LossReport Trainer::step(const DomainBatch& src, const DomainBatch* tgt, double progress,
                         const std::function<void()>& between_phases) {
  const bool baseline = config_.ablation == Ablation::Baseline;
  if (!baseline && tgt == nullptr) throw DataError("train_step: target batch required");
  if (!src.labeled()) throw DataError("train_step: source batch has no labels");
  if (!(progress >= 0.0 && progress <= 1.0)) throw ConfigError("train_step: progress outside [0,1]");

  LossReport report;
  report.alpha = baseline ? 0.0 : alpha({config_.alpha_gamma, progress});
  const auto& features = model_.features();
  const auto& head = model_.head();

  // The extractor is not updated in phase 1, so the features recorded here
  // are exactly what a second extractor pass in phase 2 would produce.
  const Tensor feat_src = features.forward(src.images());
  const Tensor feat_tgt = baseline ? Tensor() : features.forward(tgt->images());

  // Phase 1: classifiers and domain classifier on detached features.
  {
    const HeadOutput out_s = head.forward(feat_src.detach());
    Tensor objective = loss_cs(src, out_s, config_.loss);
    report.l_cs = objective.item();
    if (!baseline) {
      const HeadOutput out_t = head.forward(feat_tgt.detach());
      const Tensor l_ct = loss_ct(src, out_s, config_.loss);
      const Tensor l_cst = loss_cst(src, *tgt, out_s, out_t);
      report.l_ct = l_ct.item();
      report.l_cst = l_cst.item();
      objective = objective + l_ct + l_cst;
    }
    objective.backward();
    head_opt_.step(head_params_, progress);
  }
  if (between_phases) between_phases();

  // Phase 2: feature extractor against a fresh pass through the updated,
  // frozen head.
  {
    const HeadOutput out_s = head.forward(feat_src, ClassifierHead::Mode::Frozen);
    Tensor objective;
    if (baseline) {
      objective = loss_cs(src, out_s, config_.loss);
    } else {
      const HeadOutput out_t = head.forward(feat_tgt, ClassifierHead::Mode::Frozen);
      objective = loss_fc(src, out_s);
      report.l_fc = objective.item();
      Tensor adversarial;
      if (config_.ablation != Ablation::NoLfd) {
        adversarial = loss_fd(*tgt, out_t);
        report.l_fd = adversarial.item();
      }
      if (config_.ablation != Ablation::NoLe) {
        const Tensor l_e = loss_e(*tgt, out_t, config_.loss);
        report.l_e = l_e.item();
        adversarial = adversarial.defined() ? adversarial + l_e : l_e;
      }
      objective = objective + scale(adversarial, report.alpha);
    }
    objective.backward();
    feature_opt_.step(feature_params_, progress);
  }
  return assemble(report, config_.ablation);
}

// Training loop ---------------------------------------------------------------

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Endless reshuffled pass over [0, n).
class IndexStream {
 public:
  IndexStream(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    std::iota(order_.begin(), order_.end(), 0);
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  std::vector<std::size_t> next(std::size_t count) {
    std::vector<std::size_t> out;
    while (out.size() < count) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t steps_per_epoch(std::size_t source_size, std::size_t target_size, int batch_size) {
  return std::min(source_size, target_size) / static_cast<std::size_t>(batch_size);
}

std::string TrainHistory::to_csv() const {
  std::string out = loss_csv_header() + "\n";
  for (const auto& r : steps) out += to_csv_row(r) + "\n";
  return out;
}

TrainResult train(const TrainConfig& cfg, const EncodedSet& source, const EncodedSet& target_train,
                  const EncodedSet& target_test) {
  cfg.validate();
  if (source.empty()) throw DataError("train: empty source set");
  if (target_train.empty()) throw DataError("train: empty target training set");
  if (target_test.empty()) throw DataError("train: empty target test set");
  const std::size_t per_epoch = steps_per_epoch(source.size(), target_train.size(), cfg.batch_size);
  if (per_epoch == 0) {
    throw DataError("train: datasets smaller than one batch of " + std::to_string(cfg.batch_size));
  }
  const std::size_t total = per_epoch * static_cast<std::size_t>(cfg.epochs);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  ModelConfig model_cfg = cfg.model;
  model_cfg.init_seed = cfg.seed;
  Model model(model_cfg);
  Trainer trainer(model, cfg);
  IndexStream src_stream(source.size(), mix(cfg.seed ^ 0x736f75726365ULL));
  IndexStream tgt_stream(target_train.size(), mix(cfg.seed ^ 0x746172676574ULL));
  const bool baseline = cfg.ablation == Ablation::Baseline;

  TrainResult result{model.clone(), model.clone(), {}, 0.0, -1.0, 0, ConfusionMatrix(model_cfg.num_classes)};
  std::size_t completed = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t s = 0; s < per_epoch; ++s, ++completed) {
      const double progress = static_cast<double>(completed) / static_cast<double>(total);
      const auto src_idx = src_stream.next(batch);
      const DomainBatch src = DomainBatch::source(source.images(src_idx), source.labels(src_idx));
      std::optional<DomainBatch> tgt;
      if (!baseline) tgt = DomainBatch::target(target_train.images(tgt_stream.next(batch)));
      LossReport report = trainer.step(src, tgt ? &*tgt : nullptr, progress);
      report.step = completed;
      result.history.steps.push_back(report);
    }
    const EvalResult eval = evaluate(model, target_test);
    result.history.epoch_accuracy.push_back(eval.accuracy);
    result.history.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (eval.accuracy > result.best_accuracy) {
      result.best_accuracy = eval.accuracy;
      result.best_epoch = epoch;
      result.best_model = model.clone();
    }
    result.final_accuracy = eval.accuracy;
    result.final_confusion = eval.confusion;
  }
  result.final_model = std::move(model);
  return result;
}

TrainResult train(const TrainConfig& cfg, std::span<const SkeletonSequence> source,
                  std::span<const SkeletonSequence> target_train,
                  std::span<const SkeletonSequence> target_test) {
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (!source[i].label) throw DataError("train: source item is unlabeled", i);
  }
  return train(cfg, EncodedSet(source, cfg.encoder), EncodedSet(target_train, cfg.encoder),
               EncodedSet(target_test, cfg.encoder));
}

std::vector<AblationRow> run_ablation(const TrainConfig& cfg,
                                      std::span<const SkeletonSequence> source,
                                      std::span<const SkeletonSequence> target,
                                      double target_fraction, std::span<const std::uint64_t> seeds,
                                      unsigned threads) {
  constexpr Ablation kVariants[] = {Ablation::Baseline, Ablation::NoLfd, Ablation::NoLe, Ablation::Full};
  const EncodedSet source_set(source, cfg.encoder);
  struct SeedData {
    std::uint64_t split_hash;
    EncodedSet train;
    EncodedSet test;
  };
  std::vector<SeedData> per_seed;
  for (std::uint64_t seed : seeds) {
    const TargetSplit split = split_target(target, target_fraction, seed);
    per_seed.push_back({split.hash(), EncodedSet(split.train, cfg.encoder), EncodedSet(split.test, cfg.encoder)});
  }

  std::vector<AblationRow> rows(seeds.size() * std::size(kVariants));
  std::vector<std::exception_ptr> errors(rows.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < rows.size(); job = next++) {
      const std::size_t s = job / std::size(kVariants);
      TrainConfig run = cfg;
      run.seed = seeds[s];
      run.ablation = kVariants[job % std::size(kVariants)];
      try {
        const auto start = std::chrono::steady_clock::now();
        const TrainResult r = train(run, source_set, per_seed[s].train, per_seed[s].test);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows[job] = {run.ablation, run.seed, per_seed[s].split_hash, r.final_accuracy, secs};
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
  std::string out = "variant,seed,split_hash,accuracy,seconds\n";
  for (const auto& r : rows) {
    out += to_string(r.ablation) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.split_hash) + "," + format_double(r.accuracy) + "," +
           format_double(r.seconds) + "\n";
  }
  return out;
}

}  // namespace skadapt
