// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "skadapt/skeleton.hpp"
#include "skadapt/tensor.hpp"

namespace skadapt {

/// Three-channel raster stored channel-major: values[(c * height + row) * width + col].
/// Rows index joints (body slot major), columns index frames, channels X/Y/Z.
struct SkeletonImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  static constexpr std::size_t kChannels = 3;

  SkeletonImage() = default;
  SkeletonImage(std::size_t h, std::size_t w) : height(h), width(w), values(kChannels * h * w, 0.0) {}

  double& at(std::size_t c, std::size_t row, std::size_t col) {
    return values[(c * height + row) * width + col];
  }
  double at(std::size_t c, std::size_t row, std::size_t col) const {
    return values[(c * height + row) * width + col];
  }
  bool operator==(const SkeletonImage&) const = default;
};

enum class Normalization { PerSequenceMinMax };

struct EncoderConfig {
  std::size_t out_height = 32;
  std::size_t out_width = 32;
  std::size_t body_slots = 2;
  Normalization normalization = Normalization::PerSequenceMinMax;

  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

/// Pre-resize raster of shape (J * body_slots) x T x 3, each channel min-max
/// normalized over the present bodies of the whole sequence. A channel with
/// max == min becomes all zeros; missing body slots are zero rows.
SkeletonImage encode_raw(const SkeletonSequence& seq, std::size_t body_slots);

/// encode_raw followed by resize_bilinear to the configured size.
SkeletonImage encode(const SkeletonSequence& seq, const EncoderConfig& cfg);

/// Separable bilinear interpolation, corner aligned: output sample i along an
/// axis of length n_out reads input coordinate i * (n_in - 1) / (n_out - 1).
SkeletonImage resize_bilinear(const SkeletonImage& img, std::size_t out_h, std::size_t out_w);

/// [N, 3, out_height, out_width]; slice i is encode(seqs[i]).
Tensor encode_batch(std::span<const SkeletonSequence> seqs, const EncoderConfig& cfg);

/// Binary PPM (P6), values scaled by 255 and rounded to nearest.
std::string to_ppm(const SkeletonImage& img);

}  // namespace skadapt
