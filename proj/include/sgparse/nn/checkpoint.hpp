#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgparse/errors.hpp"
#include "sgparse/nn/model.hpp"

// Checkpoint layout:
//
//   sgparse-checkpoint
//   format_version 1
//   rng_seed <u64>
//   arc_rule left|right
//   dims <embed> <hidden> <layers> <mlp>
//   vocab <count>
//   <word>\t<frequency>            (count lines, index order)
//   tensors <count>
//   <name> <rows> <cols>           (count lines)
//   end_header
//   <payload>
//
// The payload holds every tensor in header order, row-major, as
// little-endian IEEE-754 float32.

namespace sgparse::nn {

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline void put_f32(std::ostream& out, double v) {
  const auto f = static_cast<float>(v);
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  unsigned char b[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                        static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline double get_f32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("checkpoint payload truncated");
  const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                             (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return static_cast<double>(f);
}

inline std::string expect_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("checkpoint header truncated before '" + key + "'");
  if (line.rfind(key, 0) != 0) throw IoError("checkpoint header: expected '" + key + "', got '" + line + "'");
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

}  // namespace detail

inline void save_checkpoint(std::ostream& out, ModelParams& params) {
  out << "sgparse-checkpoint\n";
  out << "format_version " << kCheckpointVersion << "\n";
  out << "rng_seed " << params.seed << "\n";
  out << "arc_rule " << to_string(params.rule) << "\n";
  out << "dims " << params.dims.embed << " " << params.dims.hidden << " " << params.dims.layers << " "
      << params.dims.mlp << "\n";
  out << "vocab " << params.vocab.size() << "\n";
  for (std::size_t i = 0; i < params.vocab.size(); ++i) {
    out << params.vocab.word(static_cast<int>(i)) << "\t" << params.vocab.frequency(static_cast<int>(i)) << "\n";
  }
  auto tensors = params.weights.tensors();
  out << "tensors " << tensors.size() << "\n";
  for (const auto& t : tensors) out << t.name << " " << t.rows << " " << t.cols << "\n";
  out << "end_header\n";
  for (const auto& t : tensors) {
    const auto m = t.map();
    for (Eigen::Index r = 0; r < t.rows; ++r) {
      for (Eigen::Index c = 0; c < t.cols; ++c) detail::put_f32(out, m(r, c));
    }
  }
}

inline void save_checkpoint(const std::string& path, ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  save_checkpoint(out, params);
  if (!out) throw IoError("failed writing checkpoint " + path);
}

inline ModelParams load_checkpoint(std::istream& in) {
  std::string magic;
  if (!std::getline(in, magic) || magic != "sgparse-checkpoint") throw IoError("not a checkpoint file");
  if (std::stoi(detail::expect_line(in, "format_version")) != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version");
  }
  ModelParams p;
  p.seed = std::stoull(detail::expect_line(in, "rng_seed"));
  const auto rule = detail::expect_line(in, "arc_rule");
  if (rule != "left" && rule != "right") throw IoError("bad arc_rule in checkpoint: " + rule);
  p.rule = rule == "left" ? ArcRule::LeftArc : ArcRule::RightArc;
  std::istringstream dims(detail::expect_line(in, "dims"));
  dims >> p.dims.embed >> p.dims.hidden >> p.dims.layers >> p.dims.mlp;
  if (!dims) throw IoError("bad dims line in checkpoint");

  const auto n_vocab = std::stoull(detail::expect_line(in, "vocab"));
  Vocabulary vocab;
  for (std::size_t i = 0; i < n_vocab; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("checkpoint vocabulary truncated");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw IoError("bad vocabulary line in checkpoint");
    if (i < 3) continue;  // reserved entries already present
    vocab.push(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
  }
  p.vocab = std::move(vocab);
  p.weights = Weights::zeros(p.dims, p.vocab.size(), p.n_actions());

  auto tensors = p.weights.tensors();
  if (std::stoull(detail::expect_line(in, "tensors")) != tensors.size()) throw IoError("tensor count mismatch");
  for (const auto& t : tensors) {
    std::string line;
    std::getline(in, line);
    std::istringstream ls(line);
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    ls >> name >> rows >> cols;
    if (name != t.name || rows != t.rows || cols != t.cols) throw IoError("tensor header mismatch at " + t.name);
  }
  detail::expect_line(in, "end_header");
  for (auto& t : tensors) {
    auto m = t.map();
    for (Eigen::Index r = 0; r < t.rows; ++r) {
      for (Eigen::Index c = 0; c < t.cols; ++c) m(r, c) = detail::get_f32(in);
    }
  }
  p.check_shapes();
  return p;
}

inline ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace sgparse::nn
