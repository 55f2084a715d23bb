// SPDX-License-Identifier: Apache-2.0
#include "skadapt/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include <json.hpp>

#include "skadapt/errors.hpp"

namespace skadapt {

using nlohmann::json;

namespace {

SkeletonSequence from_json(const json& rec) {
  if (!rec.is_object()) throw DataError("record is not an object");
  SkeletonSequence seq;
  if (rec.contains("label") && !rec.at("label").is_null()) {
    seq.label = ActionLabel{rec.at("label").get<int>()};
  }
  seq.domain = domain_from_string(rec.value("domain", std::string("source")));
  seq.subject_id = rec.value("subject", 0);
  seq.view_id = rec.value("view", 0);
  if (!rec.contains("frames") || !rec.at("frames").is_array()) {
    throw DataError("missing \"frames\" array");
  }
  for (const auto& frame : rec.at("frames")) {
    BodyFrame bf;
    for (const auto& body : frame) {
      Body b;
      for (const auto& joint : body) {
        if (!joint.is_array() || joint.size() != 3) throw DataError("joint must be [x,y,z]");
        b.push_back({joint[0].get<double>(), joint[1].get<double>(), joint[2].get<double>()});
      }
      bf.bodies.push_back(std::move(b));
    }
    seq.frames.push_back(std::move(bf));
  }
  validate(seq);
  return seq;
}

json to_json(const SkeletonSequence& seq) {
  json frames = json::array();
  for (const auto& frame : seq.frames) {
    json bodies = json::array();
    for (const Body& body : frame.bodies) {
      json joints = json::array();
      for (const Joint& j : body) joints.push_back({j[0], j[1], j[2]});
      bodies.push_back(std::move(joints));
    }
    frames.push_back(std::move(bodies));
  }
  json rec;
  rec["label"] = seq.label ? json(seq.label->index) : json(nullptr);
  rec["domain"] = to_string(seq.domain);
  rec["subject"] = seq.subject_id;
  rec["view"] = seq.view_id;
  rec["frames"] = std::move(frames);
  return rec;
}

}  // namespace

std::vector<SkeletonSequence> read_jsonl(std::istream& in) {
  std::vector<SkeletonSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t index = out.size();
    try {
      out.push_back(from_json(json::parse(line)));
    } catch (const DataError& e) {
      throw DataError(e.record() ? e.what() : std::string(e.what()), index);
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed record: ") + e.what(), index);
    }
  }
  return out;
}

void write_jsonl(std::span<const SkeletonSequence> dataset, std::ostream& out) {
  for (const auto& seq : dataset) out << to_json(seq).dump() << '\n';
}

std::vector<SkeletonSequence> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_jsonl(in);
}

void save_jsonl(std::span<const SkeletonSequence> dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_jsonl(dataset, out);
  if (!out) throw DataError("write failed for " + path.string());
}

std::uint64_t TargetSplit::hash() const {
  std::string text;
  for (std::size_t i : train_indices) text += std::to_string(i) + ',';
  text += '|';
  for (std::size_t i : test_indices) text += std::to_string(i) + ',';
  return fnv1a(text);
}

TargetSplit split_target(std::span<const SkeletonSequence> dataset, double fraction,
                         std::uint64_t seed) {
  if (dataset.empty()) throw DataError("split_target: empty dataset");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split_target: fraction must be in (0,1)");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::lround(fraction * dataset.size()));

  TargetSplit split;
  split.train_indices.assign(order.begin(), order.begin() + n_train);
  split.test_indices.assign(order.begin() + n_train, order.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  for (std::size_t i : split.train_indices) {
    SkeletonSequence s = dataset[i];
    split.train_labels.push_back(s.label);
    s.label.reset();
    s.domain = Domain::Target;
    split.train.push_back(std::move(s));
  }
  for (std::size_t i : split.test_indices) {
    SkeletonSequence s = dataset[i];
    s.domain = Domain::Target;
    split.test.push_back(std::move(s));
  }
  return split;
}

}  // namespace skadapt
