// SPDX-License-Identifier: Apache-2.0
#include "skadapt/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skadapt/errors.hpp"

namespace skadapt {

void EncoderConfig::validate() const {
  if (out_height < 4 || out_width < 4) throw ConfigError("encoder: output size must be >= 4x4");
  if (body_slots < 1 || body_slots > kMaxBodies) {
    throw ConfigError("encoder: body_slots must be 1 or 2");
  }
}

SkeletonImage encode_raw(const SkeletonSequence& seq, std::size_t body_slots) {
  if (seq.empty()) throw DataError("encode: empty sequence");
  validate(seq);
  const std::size_t joints = seq.joint_count();
  if (joints == 0) throw DataError("encode: sequence has no joints");
  const std::size_t present = std::min(seq.body_slots(), body_slots);
  const std::size_t frames = seq.frame_count();
  SkeletonImage img(joints * body_slots, frames);

  for (std::size_t c = 0; c < SkeletonImage::kChannels; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& frame : seq.frames) {
      for (std::size_t b = 0; b < present; ++b) {
        for (const Joint& j : frame.bodies[b]) {
          lo = std::min(lo, j[c]);
          hi = std::max(hi, j[c]);
        }
      }
    }
    const double range = hi - lo;
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t b = 0; b < present; ++b) {
        const Body& body = seq.frames[t].bodies[b];
        for (std::size_t j = 0; j < joints; ++j) {
          img.at(c, b * joints + j, t) = range > 0.0 ? (body[j][c] - lo) / range : 0.0;
        }
      }
    }
  }
  return img;
}

SkeletonImage encode(const SkeletonSequence& seq, const EncoderConfig& cfg) {
  cfg.validate();
  SkeletonImage img = resize_bilinear(encode_raw(seq, cfg.body_slots), cfg.out_height, cfg.out_width);
  // Interpolation can overshoot [0,1] by one ulp.
  for (double& v : img.values) v = std::clamp(v, 0.0, 1.0);
  return img;
}

namespace {

struct Tap {
  std::size_t lo, hi;
  double frac;
};

std::vector<Tap> taps(std::size_t n_in, std::size_t n_out) {
  std::vector<Tap> out(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    if (n_in == 1 || n_out == 1) {
      out[i] = {0, 0, 0.0};
      continue;
    }
    const double pos = static_cast<double>(i) * static_cast<double>(n_in - 1) /
                       static_cast<double>(n_out - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), n_in - 1);
    const std::size_t hi = std::min(lo + 1, n_in - 1);
    out[i] = {lo, hi, pos - static_cast<double>(lo)};
  }
  return out;
}

}  // namespace

SkeletonImage resize_bilinear(const SkeletonImage& img, std::size_t out_h, std::size_t out_w) {
  if (img.height < 1 || img.width < 1) throw ShapeError("resize: empty image");
  if (out_h < 1 || out_w < 1) throw ShapeError("resize: empty output size");
  const auto rows = taps(img.height, out_h);
  const auto cols = taps(img.width, out_w);

  // Horizontal pass then vertical pass.
  SkeletonImage wide(img.height, out_w);
  for (std::size_t c = 0; c < SkeletonImage::kChannels; ++c) {
    for (std::size_t r = 0; r < img.height; ++r) {
      for (std::size_t x = 0; x < out_w; ++x) {
        const Tap& t = cols[x];
        const double a = img.at(c, r, t.lo);
        const double b = img.at(c, r, t.hi);
        wide.at(c, r, x) = t.frac == 0.0 ? a : a + (b - a) * t.frac;
      }
    }
  }
  SkeletonImage out(out_h, out_w);
  for (std::size_t c = 0; c < SkeletonImage::kChannels; ++c) {
    for (std::size_t y = 0; y < out_h; ++y) {
      const Tap& t = rows[y];
      for (std::size_t x = 0; x < out_w; ++x) {
        const double a = wide.at(c, t.lo, x);
        const double b = wide.at(c, t.hi, x);
        out.at(c, y, x) = t.frac == 0.0 ? a : a + (b - a) * t.frac;
      }
    }
  }
  return out;
}

Tensor encode_batch(std::span<const SkeletonSequence> seqs, const EncoderConfig& cfg) {
  if (seqs.empty()) throw DataError("encode_batch: empty batch");
  cfg.validate();
  const std::size_t item = SkeletonImage::kChannels * cfg.out_height * cfg.out_width;
  std::vector<double> values;
  values.reserve(seqs.size() * item);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    try {
      const SkeletonImage img = encode(seqs[i], cfg);
      values.insert(values.end(), img.values.begin(), img.values.end());
    } catch (const DataError& e) {
      throw DataError(e.what(), i);
    }
  }
  return Tensor({seqs.size(), SkeletonImage::kChannels, cfg.out_height, cfg.out_width},
                std::move(values));
}

std::string to_ppm(const SkeletonImage& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + 3 * img.height * img.width);
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < SkeletonImage::kChannels; ++c) {
        const double v = std::clamp(img.at(c, r, x), 0.0, 1.0);
        out += static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
      }
    }
  }
  return out;
}

}  // namespace skadapt
