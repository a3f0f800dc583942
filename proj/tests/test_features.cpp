// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cmath>
#include <vector>

#include <doctest.h>

#include "asearch/errors.hpp"
#include "asearch/features.hpp"
#include "asearch/rng.hpp"
#include "helpers.hpp"

using namespace asearch;
using namespace asearch::testing;

TEST_SUITE("features") {

TEST_CASE("location distance is 1 - iou") {
  const Window a(0.1, 0.1, 0.2, 0.2);
  CHECK(location_distance(a, a) == 0.0);
  CHECK(location_distance(a, Window(0.6, 0.6, 0.2, 0.2)) == 1.0);

  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Window u = random_window(rng);
    const Window v = random_window(rng);
    CHECK(location_distance(u, v) == 1.0 - iou(u, v));
    CHECK(location_distance(u, v) == location_distance(v, u));
  }
}

TEST_CASE("hamming distance basics") {
  AppearanceCode a(512);
  AppearanceCode b(512);
  CHECK(hamming_distance(a, b) == 0.0);

  AppearanceCode complement(512);
  for (std::size_t i = 0; i < 512; ++i) complement.set_bit(i, true);
  CHECK(hamming_distance(a, complement) == 1.0);

  b.set_bit(137, true);
  CHECK(hamming_distance(a, b) == doctest::Approx(1.0 / 512).epsilon(1e-15));

  AppearanceCode shorter(256);
  CHECK_THROWS_AS(hamming_distance(a, shorter), InvalidInputError);
}

TEST_CASE("hamming distance satisfies the triangle inequality (exhaustive 8-bit)") {
  std::vector<AppearanceCode> codes;
  codes.reserve(256);
  for (int v = 0; v < 256; ++v) {
    AppearanceCode c(8);
    for (int b = 0; b < 8; ++b) {
      if ((v >> b) & 1) c.set_bit(static_cast<std::size_t>(b), true);
    }
    codes.push_back(std::move(c));
  }
  for (int x = 0; x < 256; ++x) {
    for (int y = 0; y < 256; ++y) {
      const double dxy = hamming_distance(codes[x], codes[y]);
      for (int z = 0; z < 256; ++z) {
        const double through = hamming_distance(codes[x], codes[z]) +
                               hamming_distance(codes[z], codes[y]);
        if (dxy > through) {
          REQUIRE(dxy <= through);  // report only on failure; 16M checks
        }
      }
    }
  }
  CHECK(true);
}

TEST_CASE("hex serialization round-trips") {
  CHECK(AppearanceCode::from_hex("8000").bit(0));
  CHECK(AppearanceCode::from_hex("8000").to_hex() == "8000");
  CHECK_THROWS_AS(AppearanceCode::from_hex("zz"), ValidationError);

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const AppearanceCode code = random_code(rng, 512);
    CHECK(AppearanceCode::from_hex(code.to_hex()) == code);
    CHECK(code.to_hex().size() == 128);
  }
}

TEST_CASE("embedder maps the zero vector to the all-zeros code") {
  const EmbedderModel embedder(16, 64, 99);
  const std::vector<double> zero(16, 0.0);
  const AppearanceCode code = embedder.embed(zero);
  for (std::size_t i = 0; i < 64; ++i) CHECK_FALSE(code.bit(i));
}

TEST_CASE("embedder is deterministic and validates dimensions") {
  const EmbedderModel embedder(8, 32, 5);
  const EmbedderModel same(8, 32, 5);
  Rng rng(17);
  std::vector<double> v(8);
  for (double& x : v) x = rng.normal();
  CHECK(embedder.embed(v) == same.embed(v));
  CHECK(embedder.embed(v) == embedder.embed(v));

  const std::vector<double> wrong(5, 0.0);
  CHECK_THROWS_AS(embedder.embed(wrong), InvalidInputError);
}

TEST_CASE("nearby vectors share most of their embedded bits") {
  const std::size_t dim = 64;
  const std::size_t bits = 256;
  const EmbedderModel embedder(dim, bits, 23);
  Rng rng(29);

  double shared_sum = 0.0;
  const int pairs = 1000;
  for (int p = 0; p < pairs; ++p) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);

    // Perturbation with L2 norm at most 1% of |v|.
    std::vector<double> u = v;
    std::vector<double> delta(dim);
    double dnorm = 0.0;
    for (double& x : delta) {
      x = rng.normal();
      dnorm += x * x;
    }
    dnorm = std::sqrt(dnorm);
    const double scale = 0.01 * norm / dnorm * rng.unit();
    for (std::size_t i = 0; i < dim; ++i) u[i] += delta[i] * scale;

    const double differing = hamming_distance(embedder.embed(v), embedder.embed(u));
    shared_sum += 1.0 - differing;
  }
  CHECK(shared_sum / pairs >= 0.8);
}

}  // TEST_SUITE
