// SPDX-License-Identifier: Apache-2.0
#include "skadapt/ntu_format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "skadapt/errors.hpp"

namespace skadapt {

namespace {

constexpr std::size_t kBodyInfoFields = 10;
constexpr std::size_t kJointFields = 12;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Returns the whitespace-separated fields of the next line.
  std::vector<std::string> next(const char* expecting) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + expecting);
    }
    ++line_no_;
    std::istringstream fields(line);
    std::vector<std::string> out;
    for (std::string f; fields >> f;) out.push_back(std::move(f));
    return out;
  }

  std::size_t line() const noexcept { return line_no_; }

  bool only_blank_lines_remain() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return false;
    }
    return true;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

double to_number(const std::string& field, std::size_t line) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "non-numeric field '" + field + "'");
  }
  return value;
}

std::size_t to_count(const std::vector<std::string>& fields, std::size_t line, const char* what) {
  if (fields.size() != 1) {
    throw ParseError(line, std::string("expected a single ") + what + ", got " +
                               std::to_string(fields.size()) + " fields");
  }
  std::size_t value = 0;
  const std::string& f = fields[0];
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + f + "'");
  }
  return value;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

SkeletonSequence parse_ntu_skeleton(std::istream& in) {
  LineReader reader(in);
  auto header = reader.next("frame count");
  const std::size_t frame_count = to_count(header, reader.line(), "frame count");

  std::vector<std::vector<Body>> raw(frame_count);
  std::size_t joints = 0;
  bool joints_known = false;
  std::size_t slots = 0;
  for (std::size_t t = 0; t < frame_count; ++t) {
    const std::size_t bodies = to_count(reader.next("body count"), reader.line(), "body count");
    for (std::size_t b = 0; b < bodies; ++b) {
      auto info = reader.next("body info line");
      if (info.size() != kBodyInfoFields) {
        throw ParseError(reader.line(), "body info line needs " + std::to_string(kBodyInfoFields) +
                                            " fields, got " + std::to_string(info.size()));
      }
      for (const auto& f : info) to_number(f, reader.line());

      const std::size_t declared = to_count(reader.next("joint count"), reader.line(), "joint count");
      const std::size_t count_line = reader.line();
      if (joints_known && declared != joints) {
        throw ParseError(count_line, "joint count " + std::to_string(declared) +
                                         " differs from earlier bodies (" +
                                         std::to_string(joints) + ")");
      }
      joints = declared;
      joints_known = true;

      Body body(declared);
      for (std::size_t j = 0; j < declared; ++j) {
        auto fields = reader.next("joint line");
        if (fields.size() != kJointFields) {
          throw ParseError(reader.line(), "joint line needs " + std::to_string(kJointFields) +
                                              " fields, got " + std::to_string(fields.size()) +
                                              " (declared joint count " +
                                              std::to_string(declared) + " on line " +
                                              std::to_string(count_line) + ")");
        }
        for (std::size_t k = 0; k < kJointFields; ++k) {
          const double v = to_number(fields[k], reader.line());
          if (k < 3) {
            if (!std::isfinite(v)) throw ParseError(reader.line(), "non-finite coordinate");
            body[j][k] = v;
          }
        }
      }
      if (b < kMaxBodies) raw[t].push_back(std::move(body));
    }
    slots = std::max(slots, raw[t].size());
  }
  if (!reader.only_blank_lines_remain()) {
    throw ParseError(reader.line(), "trailing data after the last frame");
  }

  if (!joints_known) joints = kNtuJoints;
  if (frame_count > 0) slots = std::max<std::size_t>(slots, 1);

  SkeletonSequence seq;
  seq.frames.resize(frame_count);
  for (std::size_t t = 0; t < frame_count; ++t) {
    auto& bodies = seq.frames[t].bodies;
    bodies = std::move(raw[t]);
    bodies.resize(slots, Body(joints, Joint{0.0, 0.0, 0.0}));
  }
  return seq;
}

SkeletonSequence parse_ntu_skeleton(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ntu_skeleton(in);
}

SkeletonSequence read_ntu_skeleton_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_ntu_skeleton(in);
}

std::string write_ntu_skeleton(const SkeletonSequence& seq) {
  std::string out;
  out += std::to_string(seq.frames.size());
  out += '\n';
  for (const auto& frame : seq.frames) {
    out += std::to_string(frame.bodies.size());
    out += '\n';
    for (const Body& body : frame.bodies) {
      out += "0 0 0 0 0 0 0 0 0 0\n";
      out += std::to_string(body.size());
      out += '\n';
      for (const Joint& j : body) {
        append_number(out, j[0]);
        out += ' ';
        append_number(out, j[1]);
        out += ' ';
        append_number(out, j[2]);
        out += " 0 0 0 0 0 0 0 0 0\n";
      }
    }
  }
  return out;
}

}  // namespace skadapt
