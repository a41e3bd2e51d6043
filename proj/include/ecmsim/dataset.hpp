#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecmsim/rng.hpp"

namespace ecmsim {

// A set of binary images with class labels. Images are stored flattened,
// one byte per pixel (0/1), row-major.
struct PatternSet {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t num_classes = 0;
  std::vector<std::uint8_t> pixels;  // size() == count() * size()
  std::vector<std::uint8_t> labels;
  std::string split;

  std::size_t size() const { return width * height; }
  std::size_t count() const { return labels.size(); }
  std::span<const std::uint8_t> image(std::size_t i) const {
    return {pixels.data() + i * size(), size()};
  }
};

// --------------------------------------------------------------------------
// 6x6 three-class glyph task ('O', 'Z', 'X'). The bitmaps are fixed project
// constants: 8 active pixels each, pairwise Hamming distance >= 8.
// --------------------------------------------------------------------------

namespace detail {
inline constexpr std::array<std::string_view, 6> kGlyphO = {
    "......",
    "..##..",
    ".#..#.",
    ".#..#.",
    "..##..",
    "......"};
inline constexpr std::array<std::string_view, 6> kGlyphZ = {
    "......",
    "..###.",
    "...#..",
    "..#...",
    ".###..",
    "......"};
inline constexpr std::array<std::string_view, 6> kGlyphX = {
    "......",
    ".#..#.",
    "..##..",
    "..##..",
    ".#..#.",
    "......"};
}  // namespace detail

inline PatternSet make_glyphs() {
  PatternSet set;
  set.width = set.height = 6;
  set.num_classes = 3;
  set.split = "glyphs";
  for (const auto& rows : {detail::kGlyphO, detail::kGlyphZ, detail::kGlyphX}) {
    for (const auto& row : rows)
      for (char c : row) set.pixels.push_back(c == '#' ? 1 : 0);
    set.labels.push_back(static_cast<std::uint8_t>(set.labels.size()));
  }
  return set;
}

// --------------------------------------------------------------------------
// MNIST IDX ingestion. Big-endian IDX files, binarized at a pixel threshold.
// --------------------------------------------------------------------------

class IdxError : public std::runtime_error {
 public:
  enum class Kind { bad_magic, truncated, count_mismatch, missing };
  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

inline std::uint32_t read_u32_be(std::istream& in, const std::string& file) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw IdxError(IdxError::Kind::truncated, file + ": truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

inline std::ifstream open_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IdxError(IdxError::Kind::missing, "cannot open " + path.string());
  return in;
}

}  // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Loads one MNIST split ("train" or "t10k") from `dir`, binarizing pixels as
// active iff raw value >= threshold.
inline PatternSet load_mnist(const std::filesystem::path& dir, const std::string& split,
                             int threshold = 128) {
  const auto img_path = dir / (split + "-images-idx3-ubyte");
  const auto lab_path = dir / (split + "-labels-idx1-ubyte");
  auto img = detail::open_idx(img_path);
  auto lab = detail::open_idx(lab_path);

  const auto img_magic = detail::read_u32_be(img, img_path.string());
  if (img_magic != kIdxImageMagic)
    throw IdxError(IdxError::Kind::bad_magic,
                   img_path.string() + ": bad image magic " + std::to_string(img_magic));
  const auto lab_magic = detail::read_u32_be(lab, lab_path.string());
  if (lab_magic != kIdxLabelMagic)
    throw IdxError(IdxError::Kind::bad_magic,
                   lab_path.string() + ": bad label magic " + std::to_string(lab_magic));

  const std::uint32_t n_img = detail::read_u32_be(img, img_path.string());
  const std::uint32_t rows = detail::read_u32_be(img, img_path.string());
  const std::uint32_t cols = detail::read_u32_be(img, img_path.string());
  const std::uint32_t n_lab = detail::read_u32_be(lab, lab_path.string());
  if (n_img != n_lab)
    throw IdxError(IdxError::Kind::count_mismatch,
                   split + ": image count " + std::to_string(n_img) +
                       " != label count " + std::to_string(n_lab));

  PatternSet set;
  set.width = cols;
  set.height = rows;
  set.num_classes = 10;
  set.split = split;
  const std::size_t pixels = std::size_t(rows) * cols;
  set.pixels.resize(std::size_t(n_img) * pixels);
  set.labels.resize(n_img);

  std::vector<unsigned char> raw(pixels);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    if (!img.read(reinterpret_cast<char*>(raw.data()), std::streamsize(pixels)))
      throw IdxError(IdxError::Kind::truncated,
                     img_path.string() + ": truncated at image " + std::to_string(i));
    auto* out = set.pixels.data() + std::size_t(i) * pixels;
    for (std::size_t p = 0; p < pixels; ++p) out[p] = raw[p] >= threshold ? 1 : 0;
  }
  if (!lab.read(reinterpret_cast<char*>(set.labels.data()), std::streamsize(n_lab)))
    throw IdxError(IdxError::Kind::truncated, lab_path.string() + ": truncated labels");
  for (auto& l : set.labels)
    if (l > 9)
      throw IdxError(IdxError::Kind::count_mismatch,
                     lab_path.string() + ": label out of range");
  return set;
}

// --------------------------------------------------------------------------
// Pixel-flip noise: each pixel independently inverted with probability
// flip_prob. Fresh noise is drawn for every presentation.
// --------------------------------------------------------------------------

inline void add_noise(std::span<const std::uint8_t> img, double flip_prob, Rng& rng,
                      std::vector<std::uint8_t>& out) {
  if (!(flip_prob >= 0.0) || !(flip_prob <= 1.0))
    throw std::invalid_argument("add_noise: flip_prob must be in [0, 1]");
  out.resize(img.size());
  if (flip_prob == 0.0) {
    std::copy(img.begin(), img.end(), out.begin());
    return;
  }
  for (std::size_t i = 0; i < img.size(); ++i)
    out[i] = rng.bernoulli(flip_prob) ? std::uint8_t(1 - img[i]) : img[i];
}

inline std::vector<std::uint8_t> add_noise(std::span<const std::uint8_t> img,
                                           double flip_prob, Rng& rng) {
  std::vector<std::uint8_t> out;
  add_noise(img, flip_prob, rng, out);
  return out;
}

// --------------------------------------------------------------------------
// Deterministic example sources. Every example index gets its own derived
// RNG stream, so consumers may be evaluated in any order (or in parallel)
// without changing what is drawn.
// --------------------------------------------------------------------------

// Index of the images of each class, for class-conditional draws.
inline std::vector<std::vector<std::uint32_t>> index_by_class(const PatternSet& set) {
  std::vector<std::vector<std::uint32_t>> pools(set.num_classes);
  for (std::size_t i = 0; i < set.count(); ++i)
    pools[set.labels[i]].push_back(static_cast<std::uint32_t>(i));
  return pools;
}

// Draws a fresh noisy exemplar of `label` for (epoch, presentation) during
// imprinting.
using PatternSource = std::function<void(std::size_t epoch, std::size_t presentation,
                                         std::uint8_t label, std::vector<std::uint8_t>& out)>;

inline PatternSource make_noisy_source(const PatternSet& set, double flip_prob,
                                       std::uint64_t seed) {
  auto pools = index_by_class(set);
  return [&set, flip_prob, seed, pools = std::move(pools)](
             std::size_t epoch, std::size_t pres, std::uint8_t label,
             std::vector<std::uint8_t>& out) {
    Rng rng(derive_seed(seed, StreamTag::imprint, epoch, pres));
    const auto& pool = pools.at(label);
    if (pool.empty()) throw std::runtime_error("pattern source: class has no examples");
    const auto idx = pool[rng.below(pool.size())];
    add_noise(set.image(idx), flip_prob, rng, out);
  };
}

// Labeled stream: example i -> (label, noisy image). Round-robin over classes
// (label = i mod J, fresh random class exemplar) for balanced register /
// training phases; plain random draws for test phases.
using LabeledSource =
    std::function<std::uint8_t(std::size_t index, std::vector<std::uint8_t>& out)>;

inline LabeledSource make_round_robin_source(const PatternSet& set, double flip_prob,
                                             std::uint64_t seed, StreamTag tag) {
  auto pools = index_by_class(set);
  return [&set, flip_prob, seed, tag, pools = std::move(pools)](
             std::size_t i, std::vector<std::uint8_t>& out) -> std::uint8_t {
    Rng rng(derive_seed(seed, tag, i));
    const auto label = static_cast<std::uint8_t>(i % pools.size());
    const auto& pool = pools[label];
    if (pool.empty()) throw std::runtime_error("source: class has no examples");
    add_noise(set.image(pool[rng.below(pool.size())]), flip_prob, rng, out);
    return label;
  };
}

inline LabeledSource make_random_source(const PatternSet& set, double flip_prob,
                                        std::uint64_t seed, StreamTag tag) {
  return [&set, flip_prob, seed, tag](std::size_t i,
                                      std::vector<std::uint8_t>& out) -> std::uint8_t {
    Rng rng(derive_seed(seed, tag, i));
    const auto idx = rng.below(set.count());
    add_noise(set.image(idx), flip_prob, rng, out);
    return set.labels[idx];
  };
}

}  // namespace ecmsim
