// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

#include "skadapt/skeleton.hpp"

namespace skadapt {

/// Reads the plain-text NTU RGB+D `.skeleton` layout:
///
///   <frame count>
///   per frame:  <body count>
///     per body: <10-field body info line>
///               <joint count>
///               per joint: <12 fields, the first three x y z>
///
/// Only x/y/z are kept. Bodies beyond the second are dropped. Frames with
/// fewer bodies than the busiest frame get zero-filled body slots.
/// Throws ParseError carrying the offending 1-based line number.
SkeletonSequence parse_ntu_skeleton(std::istream& in);
SkeletonSequence parse_ntu_skeleton(std::string_view text);
SkeletonSequence read_ntu_skeleton_file(const std::filesystem::path& path);

/// Emits the layout read by parse_ntu_skeleton. Fields other than the joint
/// coordinates are written as zeros; coordinates use shortest round-trip
/// formatting so parse(write(s)) reproduces them exactly.
std::string write_ntu_skeleton(const SkeletonSequence& seq);

}  // namespace skadapt
