// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asearch/geometry.hpp"

namespace asearch {

/// Fixed-length binary appearance signature. Bit i lives in words()[i/64] at
/// position i%64. Serialized as lowercase hex where character j holds bits
/// 4j..4j+3, bit 4j in the most significant position of the nibble. The bit
/// count must be a multiple of 4 so the hex form is exact.
class AppearanceCode {
 public:
  AppearanceCode() = default;
  explicit AppearanceCode(std::size_t bit_count);

  static AppearanceCode from_hex(std::string_view hex);
  std::string to_hex() const;

  std::size_t bit_count() const { return bits_; }
  bool bit(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set_bit(std::size_t i, bool value);
  void flip_bit(std::size_t i);

  /// Number of positions at which the two codes differ.
  std::size_t differing_bits(const AppearanceCode& other) const;

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const AppearanceCode&, const AppearanceCode&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bits_ = 0;
};

/// Which distance function a forest node test applies.
enum class DistanceKind : std::uint8_t { kLocation = 0, kAppearance = 1 };

/// Geometric distance between windows: 1 - IoU. In [0,1], zero only for
/// identical boxes.
double location_distance(const Window& a, const Window& b) noexcept;

/// Hamming distance normalized by bit length so both node-test distances
/// share the [0,1] scale. Throws InvalidInputError on length mismatch.
double hamming_distance(const AppearanceCode& a, const AppearanceCode& b);

/// Seeded random-hyperplane sign hash mapping real feature vectors into
/// Hamming space: bit i = 1 iff dot(v, hyperplane_i) + offset_i > 0. The
/// hyperplanes are drawn from a seeded normal distribution and the offsets
/// are zero, so the same (input_dim, code_bits, seed) triple always produces
/// the same embedding.
class EmbedderModel {
 public:
  EmbedderModel(std::size_t input_dim, std::size_t code_bits, std::uint64_t seed);

  AppearanceCode embed(std::span<const double> vec) const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t code_bits() const { return code_bits_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t input_dim_ = 0;
  std::size_t code_bits_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> hyperplanes_;  // code_bits x input_dim, row-major
  std::vector<double> offsets_;      // code_bits
};

/// One candidate window of an image: geometry, appearance signature, and the
/// position of the proposal in its image's list.
struct Proposal {
  Window window;
  AppearanceCode code;
  std::int32_t index = 0;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

}  // namespace asearch
