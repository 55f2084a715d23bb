// SPDX-License-Identifier: Apache-2.0
// Shared fixtures for the unit and acceptance suites.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "skadapt/skeleton.hpp"

namespace skadapt::fixtures {

/// Random sequence with 1-2 body slots and awkward doubles (tiny, huge,
/// negative, many significant digits) to stress shortest round-trip output.
inline SkeletonSequence random_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> frames(0, 6), slots(1, 2), joints(1, 30);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_int_distribution<int> exponent(-30, 30);
  std::bernoulli_distribution weird(0.1);
  SkeletonSequence seq;
  const int t = frames(rng), b = slots(rng), j = joints(rng);
  for (int f = 0; f < t; ++f) {
    BodyFrame frame;
    for (int s = 0; s < b; ++s) {
      Body body(j);
      for (auto& joint : body) {
        for (double& v : joint) v = weird(rng) ? coord(rng) * std::pow(10.0, exponent(rng)) : coord(rng);
      }
      frame.bodies.push_back(std::move(body));
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

/// Builds a one-body, one-frame file with `joints` joint lines of 12 fields.
inline std::string one_body_file(int joints) {
  std::string s = "1\n1\n0 0 0 0 0 0 0 0 0 0\n" + std::to_string(joints) + "\n";
  for (int j = 0; j < joints; ++j) s += "0.1 0.2 0.3 0 0 0 0 0 0 0 0 0\n";
  return s;
}

struct MalformedCase {
  std::string name;
  std::string text;
  std::size_t line;  // line the parser must report
};

/// Ten hand-built broken `.skeleton` files with the line each must blame.
inline std::vector<MalformedCase> malformed_corpus() {
  const std::string info = "0 0 0 0 0 0 0 0 0 0\n";
  const std::string joint = "0.1 0.2 0.3 0 0 0 0 0 0 0 0 0\n";
  std::vector<MalformedCase> c;
  c.push_back({"empty file", "", 1});
  c.push_back({"non-numeric frame count", "abc\n", 1});
  c.push_back({"truncated after body count", "1\n1\n", 3});
  c.push_back({"short body info", "1\n1\n0 0 0\n", 3});
  c.push_back({"non-numeric coordinate on line 7",
               "1\n1\n" + info + "3\n" + joint + joint + "0.1 oops 0.3 0 0 0 0 0 0 0 0 0\n", 7});
  c.push_back({"joint line with 11 fields", "1\n1\n" + info + "2\n" + joint + "1 2 3 0 0 0 0 0 0 0 0\n", 6});
  c.push_back({"fewer joints than declared", "1\n1\n" + info + "3\n" + joint + joint, 7});
  c.push_back({"more joints than declared", "1\n1\n" + info + "1\n" + joint + joint, 6});
  c.push_back({"joint count changes between frames",
               "2\n1\n" + info + "1\n" + joint + "1\n" + info + "2\n" + joint + joint, 8});
  c.push_back({"infinite coordinate", "1\n1\n" + info + "1\ninf 0 0 0 0 0 0 0 0 0 0 0\n", 5});
  return c;
}

}  // namespace skadapt::fixtures
