// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "asearch/features.hpp"

#include <bit>

#include "asearch/errors.hpp"
#include "asearch/rng.hpp"

namespace asearch {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace

AppearanceCode::AppearanceCode(std::size_t bit_count)
    : words_((bit_count + 63) / 64, 0), bits_(bit_count) {
  if (bit_count % 4 != 0) {
    throw InvalidInputError("appearance code length must be a multiple of 4 bits");
  }
}

AppearanceCode AppearanceCode::from_hex(std::string_view hex) {
  AppearanceCode code(hex.size() * 4);
  for (std::size_t j = 0; j < hex.size(); ++j) {
    const int v = hex_value(hex[j]);
    if (v < 0) {
      throw ValidationError("appearance code contains a non-hex character");
    }
    for (int b = 0; b < 4; ++b) {
      if ((v >> (3 - b)) & 1) code.set_bit(4 * j + b, true);
    }
  }
  return code;
}

std::string AppearanceCode::to_hex() const {
  std::string out(bits_ / 4, '0');
  for (std::size_t j = 0; j < out.size(); ++j) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      v = (v << 1) | static_cast<int>(bit(4 * j + b));
    }
    out[j] = kHexDigits[v];
  }
  return out;
}

void AppearanceCode::set_bit(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void AppearanceCode::flip_bit(std::size_t i) {
  words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
}

std::size_t AppearanceCode::differing_bits(const AppearanceCode& other) const {
  std::size_t count = 0;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    count += static_cast<std::size_t>(std::popcount(words_[k] ^ other.words_[k]));
  }
  return count;
}

double location_distance(const Window& a, const Window& b) noexcept {
  return 1.0 - iou(a, b);
}

double hamming_distance(const AppearanceCode& a, const AppearanceCode& b) {
  if (a.bit_count() != b.bit_count()) {
    throw InvalidInputError("hamming distance requires equal code lengths");
  }
  if (a.bit_count() == 0) {
    throw InvalidInputError("hamming distance on empty codes");
  }
  return static_cast<double>(a.differing_bits(b)) / static_cast<double>(a.bit_count());
}

EmbedderModel::EmbedderModel(std::size_t input_dim, std::size_t code_bits,
                             std::uint64_t seed)
    : input_dim_(input_dim), code_bits_(code_bits), seed_(seed) {
  if (input_dim == 0 || code_bits == 0 || code_bits % 4 != 0) {
    throw InvalidInputError("embedder needs input_dim > 0 and a positive multiple-of-4 bit count");
  }
  Rng rng(seed);
  hyperplanes_.resize(code_bits * input_dim);
  for (double& v : hyperplanes_) v = rng.normal();
  offsets_.assign(code_bits, 0.0);
}

AppearanceCode EmbedderModel::embed(std::span<const double> vec) const {
  if (vec.size() != input_dim_) {
    throw InvalidInputError("embed input dimension does not match the embedder");
  }
  AppearanceCode code(code_bits_);
  for (std::size_t i = 0; i < code_bits_; ++i) {
    double dot = offsets_[i];
    const double* row = hyperplanes_.data() + i * input_dim_;
    for (std::size_t j = 0; j < input_dim_; ++j) dot += row[j] * vec[j];
    if (dot > 0.0) code.set_bit(i, true);
  }
  return code;
}

}  // namespace asearch
