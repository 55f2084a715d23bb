// SPDX-License-Identifier: Apache-2.0
#include "skadapt/objectives.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "skadapt/errors.hpp"

namespace skadapt {

DomainBatch::DomainBatch(Tensor images, Domain domain,
                         std::optional<std::vector<ActionLabel>> labels)
    : images_(std::move(images)), domain_(domain), labels_(std::move(labels)) {
  if (images_.rank() != 4) {
    throw ShapeError("batch: images must be [N,C,H,W], got " + shape_to_string(images_.shape()));
  }
  if (labels_ && labels_->size() != images_.dim(0)) {
    throw DataError("batch: " + std::to_string(labels_->size()) + " labels for " +
                    std::to_string(images_.dim(0)) + " images");
  }
}

DomainBatch DomainBatch::source(Tensor images, std::vector<ActionLabel> labels) {
  return DomainBatch(std::move(images), Domain::Source, std::move(labels));
}

DomainBatch DomainBatch::target(Tensor images) {
  return DomainBatch(std::move(images), Domain::Target, std::nullopt);
}

const std::vector<ActionLabel>& DomainBatch::labels() const {
  if (!labels_) throw DataError("batch carries no labels");
  return *labels_;
}

namespace {

void expect_domain(const DomainBatch& batch, Domain domain, const HeadOutput& out, const char* loss) {
  if (batch.domain() != domain) {
    throw DataError(std::string(loss) + ": expected a " + to_string(domain) + " batch");
  }
  if (out.batch() != batch.size()) {
    throw ShapeError(std::string(loss) + ": head output rows do not match batch size");
  }
}

std::vector<std::size_t> label_columns(const DomainBatch& src, int num_classes, int offset,
                                       const char* loss) {
  if (!src.labeled()) throw DataError(std::string(loss) + ": source batch has no labels");
  std::vector<std::size_t> cols;
  for (const ActionLabel& y : src.labels()) {
    if (y.index < 0 || y.index >= num_classes) {
      throw DataError(std::string(loss) + ": label " + std::to_string(y.index) + " outside [0," +
                      std::to_string(num_classes) + ")");
    }
    cols.push_back(static_cast<std::size_t>(y.index + offset));
  }
  return cols;
}

Tensor source_mass(const HeadOutput& out) {
  return row_sum(slice_cols(out.joint, 0, static_cast<std::size_t>(out.num_classes)));
}

Tensor target_mass(const HeadOutput& out) {
  const auto k = static_cast<std::size_t>(out.num_classes);
  return row_sum(slice_cols(out.joint, k, 2 * k));
}

// -sum_k p_k log p_k per row, summed over all columns of p.
Tensor row_entropy(const Tensor& p) { return scale(row_sum(mul(p, log_clamped(p))), -1.0); }

}  // namespace

Tensor loss_cs(const DomainBatch& src, const HeadOutput& out, const LossOptions& opts) {
  expect_domain(src, Domain::Source, out, "loss_cs");
  if (opts.classifier_probability == ClassifierProbability::Joint) {
    return -mean(log_clamped(gather_cols(out.joint, label_columns(src, out.num_classes, 0, "loss_cs"))));
  }
  return -mean(log_clamped(gather_cols(out.src_half, label_columns(src, out.num_classes, 0, "loss_cs"))));
}

Tensor loss_ct(const DomainBatch& src, const HeadOutput& out, const LossOptions& opts) {
  expect_domain(src, Domain::Source, out, "loss_ct");
  if (opts.classifier_probability == ClassifierProbability::Joint) {
    return -mean(log_clamped(
        gather_cols(out.joint, label_columns(src, out.num_classes, out.num_classes, "loss_ct"))));
  }
  return -mean(log_clamped(gather_cols(out.tgt_half, label_columns(src, out.num_classes, 0, "loss_ct"))));
}

Tensor loss_cst(const DomainBatch& src, const DomainBatch& tgt, const HeadOutput& out_src,
                const HeadOutput& out_tgt) {
  expect_domain(src, Domain::Source, out_src, "loss_cst");
  expect_domain(tgt, Domain::Target, out_tgt, "loss_cst");
  return -(mean(log_clamped(source_mass(out_src))) + mean(log_clamped(target_mass(out_tgt))));
}

Tensor loss_fd(const DomainBatch& tgt, const HeadOutput& out_tgt) {
  expect_domain(tgt, Domain::Target, out_tgt, "loss_fd");
  return -mean(log_clamped(source_mass(out_tgt)) + log_clamped(target_mass(out_tgt)));
}

Tensor loss_fc(const DomainBatch& src, const HeadOutput& out_src) {
  expect_domain(src, Domain::Source, out_src, "loss_fc");
  const int k = out_src.num_classes;
  const Tensor src_term = log_clamped(gather_cols(out_src.joint, label_columns(src, k, 0, "loss_fc")));
  const Tensor tgt_term = log_clamped(gather_cols(out_src.joint, label_columns(src, k, k, "loss_fc")));
  return -mean(src_term + tgt_term);
}

Tensor loss_e(const DomainBatch& tgt, const HeadOutput& out_tgt, const LossOptions& opts) {
  expect_domain(tgt, Domain::Target, out_tgt, "loss_e");
  if (opts.entropy == EntropyMode::Renormalized) {
    return mean(row_entropy(out_tgt.src_half) + row_entropy(out_tgt.tgt_half));
  }
  return mean(row_entropy(out_tgt.joint));
}

double alpha(const AlphaSchedule& schedule) {
  return 2.0 / (1.0 + std::exp(-schedule.gamma * schedule.progress)) - 1.0;
}

std::string to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::Full: return "none";
    case Ablation::NoLfd: return "no-lfd";
    case Ablation::NoLe: return "no-le";
    case Ablation::Baseline: return "baseline";
  }
  return "none";
}

Ablation ablation_from_string(const std::string& text) {
  if (text == "none" || text == "full") return Ablation::Full;
  if (text == "no-lfd") return Ablation::NoLfd;
  if (text == "no-le") return Ablation::NoLe;
  if (text == "baseline") return Ablation::Baseline;
  throw ConfigError("unknown ablation '" + text + "' (expected none, no-lfd, no-le, baseline)");
}

std::vector<std::string> enabled_losses(Ablation ablation) {
  switch (ablation) {
    case Ablation::Baseline: return {"L_Cs"};
    case Ablation::NoLfd: return {"L_Cs", "L_Ct", "L_Cst", "L_FC", "L_E"};
    case Ablation::NoLe: return {"L_Cs", "L_Ct", "L_Cst", "L_FC", "L_FD"};
    case Ablation::Full: break;
  }
  return {"L_Cs", "L_Ct", "L_Cst", "L_FC", "L_FD", "L_E"};
}

LossReport assemble(LossReport terms, Ablation ablation) {
  terms.classifier_objective = terms.l_cs + terms.l_ct + terms.l_cst;
  terms.feature_objective = ablation == Ablation::Baseline
                                ? terms.l_cs
                                : terms.l_fc + terms.alpha * (terms.l_fd + terms.l_e);
  return terms;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string loss_csv_header() {
  return "step,alpha,l_cs,l_ct,l_cst,l_fd,l_fc,l_e,classifier_objective,feature_objective";
}

std::string to_csv_row(const LossReport& r) {
  std::string out = std::to_string(r.step);
  for (double v : {r.alpha, r.l_cs, r.l_ct, r.l_cst, r.l_fd, r.l_fc, r.l_e,
                   r.classifier_objective, r.feature_objective}) {
    out += ',';
    out += format_double(v);
  }
  return out;
}

LossReport loss_report_from_csv(const std::string& row) {
  std::vector<std::string> fields;
  std::istringstream in(row);
  for (std::string f; std::getline(in, f, ',');) fields.push_back(f);
  if (fields.size() != 10) throw DataError("loss row needs 10 fields, got " + std::to_string(fields.size()));
  const auto num = [&](std::size_t i) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
    if (ec != std::errc()) throw DataError("non-numeric loss field '" + fields[i] + "'");
    return v;
  };
  LossReport r;
  r.step = static_cast<std::size_t>(std::stoull(fields[0]));
  r.alpha = num(1);
  r.l_cs = num(2);
  r.l_ct = num(3);
  r.l_cst = num(4);
  r.l_fd = num(5);
  r.l_fc = num(6);
  r.l_e = num(7);
  r.classifier_objective = num(8);
  r.feature_objective = num(9);
  return r;
}

}  // namespace skadapt
