// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "asearch/features.hpp"
#include "asearch/geometry.hpp"

namespace asearch {

/// One annotated image: proposals (windows + appearance codes) and per-class
/// ground-truth boxes. Pixel width/height are provenance only; every
/// coordinate in the system is normalized.
struct ImageRecord {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<Proposal> proposals;
  std::map<std::string, std::vector<Window>> ground_truth;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Dataset {
  std::size_t code_bits = 0;
  std::vector<ImageRecord> images;

  const ImageRecord* find(std::string_view id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Checks every ImageRecord invariant (>=1 proposal, uniform code length,
/// valid in-image windows, contiguous proposal indices, unique image ids).
/// Throws ValidationError naming the offending image and field.
void validate_dataset(const Dataset& dataset);

/// JSON-lines dataset file: a schema header line followed by one image
/// record per line. load_dataset validates before returning.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Componentwise mean of all ground-truth boxes of a class across a dataset.
/// Throws NoTrainingDataError when the class has no boxes.
Window mean_ground_truth_window(const Dataset& dataset, const std::string& class_name);

/// Layout of the synthetic scenes: a stack of `region_bands` horizontal
/// appearance bands whose vertical offset varies per scene, with objects
/// centered in the bottom band. Observing any band therefore pins the
/// object's vertical position, which is the statistical relation the forest
/// is supposed to learn. Band 0 (the top of the stack) plays the role of the
/// distinctive far-context region.
struct SyntheticConfig {
  int train_scenes = 80;
  int test_scenes = 200;
  int proposals_per_image = 500;
  int code_bits = 512;

  int region_bands = 4;
  double band_height = 0.08;

  /// Probability that each appearance bit deviates from its region signature.
  double noise_rate = 0.02;

  int objects_min = 1;
  int objects_max = 1;
  /// Objects are centered (vertically) in the bottom band; they may extend
  /// beyond it as long as they stay inside the image.
  double object_width = 0.30;
  double object_height = 0.18;
  /// Horizontal range of object centers.
  double object_x_min = 0.49;
  double object_x_max = 0.51;
  /// Fraction of objects placed at an off-pattern horizontal position
  /// instead: the center is drawn from [outlier_min, outlier_max] and
  /// mirrored to the right half of the image with probability one half.
  /// These are the scenes where the usual context prior is wrong and the
  /// search has to keep exploring.
  double object_x_outlier_rate = 0.25;
  double object_x_outlier_min = 0.20;
  double object_x_outlier_max = 0.35;

  /// Jittered copies of each ground-truth box injected into the proposal set
  /// so the image contains windows worth finding.
  int object_proposals = 4;
  /// Proposals overlapping a ground-truth box by at least this IoU take the
  /// dedicated on-object signature instead of their band's.
  double object_code_iou = 0.35;

  /// Size range of the uniformly placed filler proposals. With
  /// proposal_size_steps >= 2 sides are drawn from that many evenly spaced
  /// values across the range (proposal generators emit quantized scales);
  /// 1 pins them to the midpoint and 0 means continuous uniform sizes.
  double proposal_w_min = 0.24;
  double proposal_w_max = 0.24;
  double proposal_h_min = 0.12;
  double proposal_h_max = 0.12;
  int proposal_size_steps = 1;

  std::string class_name = "object";
  std::uint64_t seed = 17;
  int image_width = 640;
  int image_height = 480;

  friend bool operator==(const SyntheticConfig&, const SyntheticConfig&) = default;
};

/// Throws ValidationError naming the first invalid field.
void validate(const SyntheticConfig& config);

SyntheticConfig load_synthetic_config(const std::filesystem::path& path);
void save_synthetic_config(const SyntheticConfig& config, const std::filesystem::path& path);

struct SyntheticDataset {
  Dataset train;
  Dataset test;
};

/// Deterministic per seed; scene content depends only on the seed and the
/// scene's global index, so generation parallelizes without changing output.
SyntheticDataset generate_synthetic(const SyntheticConfig& config, int jobs = 1);

/// Index of the band (0-based from the top of the stack) that contains the
/// given y coordinate for a scene whose stack starts at stack_top, or -1 for
/// background. Exposed so tests and the acceptance harness can recover which
/// band a proposal was drawn from.
int band_of(const SyntheticConfig& config, double stack_top, double y);

/// Recovers the band-stack offset of a generated scene from one of its
/// ground-truth boxes (objects are centered in the bottom band).
double stack_top_from_ground_truth(const SyntheticConfig& config, const Window& gt);

}  // namespace asearch
