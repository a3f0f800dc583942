// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "asearch/dataio.hpp"
#include "asearch/errors.hpp"
#include "asearch/parallel.hpp"
#include "asearch/rng.hpp"
#include "asearch/version.hpp"

namespace asearch {

using nlohmann::json;

namespace {

constexpr const char* kConfigSchema = "asearch.config";
constexpr std::uint64_t kSignatureStream = 0xA11;
constexpr std::uint64_t kSceneStreamBase = 0x5CE000;

Window clamped_box(double cx, double cy, double w, double h) {
  w = std::clamp(w, kMinWindowSide, 1.0);
  h = std::clamp(h, kMinWindowSide, 1.0);
  const double x = std::clamp(cx - 0.5 * w, 0.0, 1.0 - w);
  const double y = std::clamp(cy - 0.5 * h, 0.0, 1.0 - h);
  return Window(x, y, w, h);
}

AppearanceCode random_code(Rng& rng, int bits) {
  AppearanceCode code(static_cast<std::size_t>(bits));
  for (int i = 0; i < bits; ++i) {
    if (rng.bernoulli(0.5)) code.set_bit(static_cast<std::size_t>(i), true);
  }
  return code;
}

AppearanceCode noisy_copy(const AppearanceCode& signature, double noise_rate, Rng& rng) {
  AppearanceCode code = signature;
  if (noise_rate <= 0.0) return code;
  for (std::size_t i = 0; i < code.bit_count(); ++i) {
    if (rng.bernoulli(noise_rate)) code.flip_bit(i);
  }
  return code;
}

// Region signatures, in a fixed order: one per band, then background, then
// the on-object signature.
std::vector<AppearanceCode> make_signatures(const SyntheticConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kSignatureStream));
  std::vector<AppearanceCode> signatures;
  signatures.reserve(static_cast<std::size_t>(cfg.region_bands) + 2);
  for (int i = 0; i < cfg.region_bands + 2; ++i) {
    signatures.push_back(random_code(rng, cfg.code_bits));
  }
  return signatures;
}

ImageRecord generate_scene(const SyntheticConfig& cfg,
                           const std::vector<AppearanceCode>& signatures,
                           const std::string& id, std::uint64_t global_index) {
  Rng rng(derive_seed(cfg.seed, kSceneStreamBase + global_index));

  ImageRecord img;
  img.id = id;
  img.width = cfg.image_width;
  img.height = cfg.image_height;

  // The band-stack offset varies per scene but must keep both the stack and
  // the object (centered in the bottom band, possibly taller than it) inside
  // the image.
  const double stack_h = cfg.region_bands * cfg.band_height;
  const double band_center = (cfg.region_bands - 0.5) * cfg.band_height;
  const double t_lo = std::max(0.0, cfg.object_height / 2 - band_center);
  const double t_hi =
      std::min(1.0 - stack_h, 1.0 - cfg.object_height / 2 - band_center);
  const double stack_top = rng.uniform(t_lo, t_hi);
  const double object_cy = stack_top + band_center;

  const int object_count =
      cfg.objects_min +
      static_cast<int>(cfg.objects_max > cfg.objects_min
                           ? rng.below(static_cast<std::uint64_t>(cfg.objects_max -
                                                                  cfg.objects_min + 1))
                           : 0);

  const auto draw_center_x = [&]() {
    if (cfg.object_x_outlier_rate > 0.0 && rng.bernoulli(cfg.object_x_outlier_rate)) {
      const double x = rng.uniform(cfg.object_x_outlier_min, cfg.object_x_outlier_max);
      return rng.bernoulli(0.5) ? 1.0 - x : x;
    }
    return rng.uniform(cfg.object_x_min, cfg.object_x_max);
  };

  std::vector<Window>& gts = img.ground_truth[cfg.class_name];
  for (int k = 0; k < object_count; ++k) {
    Window candidate =
        clamped_box(draw_center_x(), object_cy, cfg.object_width, cfg.object_height);
    for (int attempt = 0; attempt < 32; ++attempt) {
      bool overlaps = false;
      for (const Window& g : gts) {
        if (iou(candidate, g) > 0.3) {
          overlaps = true;
          break;
        }
      }
      if (!overlaps) break;
      candidate =
          clamped_box(draw_center_x(), object_cy, cfg.object_width, cfg.object_height);
    }
    gts.push_back(candidate);
  }

  std::vector<Window> windows;
  windows.reserve(static_cast<std::size_t>(cfg.proposals_per_image));

  // Jittered copies of each object so the image contains windows worth
  // finding: one tight, the rest looser.
  for (const Window& g : gts) {
    for (int j = 0; j < cfg.object_proposals; ++j) {
      const bool tight = (j == 0);
      const double pos_jitter = tight ? 0.01 : 0.04;
      const double lo = tight ? 0.95 : 0.80;
      const double hi = tight ? 1.05 : 1.25;
      windows.push_back(clamped_box(g.center_x() + rng.uniform(-pos_jitter, pos_jitter),
                                    g.center_y() + rng.uniform(-pos_jitter, pos_jitter),
                                    g.w * rng.uniform(lo, hi), g.h * rng.uniform(lo, hi)));
    }
  }

  const auto side = [&](double lo, double hi) {
    if (cfg.proposal_size_steps <= 0) return rng.uniform(lo, hi);
    if (cfg.proposal_size_steps == 1) return 0.5 * (lo + hi);
    const auto k = rng.below(static_cast<std::uint64_t>(cfg.proposal_size_steps));
    return lo + static_cast<double>(k) * (hi - lo) / (cfg.proposal_size_steps - 1);
  };
  while (windows.size() < static_cast<std::size_t>(cfg.proposals_per_image)) {
    windows.push_back(clamped_box(rng.unit(), rng.unit(),
                                  side(cfg.proposal_w_min, cfg.proposal_w_max),
                                  side(cfg.proposal_h_min, cfg.proposal_h_max)));
  }
  rng.shuffle(windows);

  const std::size_t object_signature = static_cast<std::size_t>(cfg.region_bands) + 1;
  const std::size_t background_signature = static_cast<std::size_t>(cfg.region_bands);

  img.proposals.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const Window& w = windows[i];
    double best_iou = 0.0;
    for (const Window& g : gts) best_iou = std::max(best_iou, iou(w, g));

    std::size_t signature;
    if (best_iou >= cfg.object_code_iou) {
      signature = object_signature;
    } else {
      const int band = band_of(cfg, stack_top, w.center_y());
      signature = band < 0 ? background_signature : static_cast<std::size_t>(band);
    }

    Proposal p;
    p.window = w;
    p.code = noisy_copy(signatures[signature], cfg.noise_rate, rng);
    p.index = static_cast<std::int32_t>(i);
    img.proposals.push_back(std::move(p));
  }
  return img;
}

std::string scene_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d", prefix, i);
  return buf;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError("synthetic config field '" + field + "' " + what);
}

}  // namespace

int band_of(const SyntheticConfig& config, double stack_top, double y) {
  const double rel = y - stack_top;
  if (rel < 0.0) return -1;
  const int band = static_cast<int>(rel / config.band_height);
  return band >= config.region_bands ? -1 : band;
}

double stack_top_from_ground_truth(const SyntheticConfig& config, const Window& gt) {
  return gt.center_y() - (config.region_bands - 0.5) * config.band_height;
}

void validate(const SyntheticConfig& c) {
  require(c.train_scenes >= 1, "train_scenes", "must be >= 1");
  require(c.test_scenes >= 1, "test_scenes", "must be >= 1");
  require(c.proposals_per_image >= 10, "proposals_per_image", "must be >= 10");
  require(c.code_bits >= 4 && c.code_bits % 4 == 0, "code_bits",
          "must be a positive multiple of 4");
  require(c.region_bands >= 2, "region_bands", "must be >= 2");
  require(c.band_height > 0.0, "band_height", "must be positive");
  require(c.region_bands * c.band_height <= 1.0, "band_height",
          "times region_bands must not exceed 1");
  require(c.noise_rate >= 0.0 && c.noise_rate < 0.5, "noise_rate", "must lie in [0, 0.5)");
  require(c.objects_min >= 1, "objects_min", "must be >= 1");
  require(c.objects_max >= c.objects_min, "objects_max", "must be >= objects_min");
  require(c.object_width > 0.0 && c.object_width <= 1.0, "object_width", "must lie in (0,1]");
  require(c.object_height > 0.0 && c.object_height <= 1.0, "object_height",
          "must lie in (0,1]");
  {
    // A stack offset must exist that keeps both the stack and the object
    // inside the image.
    const double band_center = (c.region_bands - 0.5) * c.band_height;
    const double t_lo = std::max(0.0, c.object_height / 2 - band_center);
    const double t_hi =
        std::min(1.0 - c.region_bands * c.band_height, 1.0 - c.object_height / 2 - band_center);
    require(t_lo <= t_hi, "object_height", "leaves no valid band-stack offset");
  }
  require(c.object_x_min <= c.object_x_max, "object_x_min", "must be <= object_x_max");
  require(c.object_x_min >= c.object_width / 2, "object_x_min",
          "must keep objects inside the image");
  require(c.object_x_max <= 1.0 - c.object_width / 2, "object_x_max",
          "must keep objects inside the image");
  require(c.object_x_outlier_rate >= 0.0 && c.object_x_outlier_rate <= 1.0,
          "object_x_outlier_rate", "must lie in [0,1]");
  if (c.object_x_outlier_rate > 0.0) {
    require(c.object_x_outlier_min <= c.object_x_outlier_max, "object_x_outlier_min",
            "must be <= object_x_outlier_max");
    require(c.object_x_outlier_min >= c.object_width / 2, "object_x_outlier_min",
            "must keep objects inside the image");
    require(c.object_x_outlier_max <= 1.0 - c.object_width / 2 &&
                1.0 - c.object_x_outlier_min <= 1.0 - c.object_width / 2,
            "object_x_outlier_max", "must keep objects (and mirrors) inside the image");
  }
  require(c.object_proposals >= 0, "object_proposals", "must be >= 0");
  require(c.proposal_w_min > 0.0 && c.proposal_w_min <= c.proposal_w_max &&
              c.proposal_w_max <= 1.0,
          "proposal_w_min", "range must satisfy 0 < min <= max <= 1");
  require(c.proposal_h_min > 0.0 && c.proposal_h_min <= c.proposal_h_max &&
              c.proposal_h_max <= 1.0,
          "proposal_h_min", "range must satisfy 0 < min <= max <= 1");
  require(c.proposal_size_steps >= 0, "proposal_size_steps", "must be >= 0");
  require(c.object_code_iou > 0.0 && c.object_code_iou <= 1.0, "object_code_iou",
          "must lie in (0,1]");
  require(!c.class_name.empty(), "class_name", "must be non-empty");
  require(c.proposals_per_image >= c.objects_max * c.object_proposals + 1,
          "proposals_per_image", "must exceed the injected object proposals");
  require(c.image_width > 0, "image_width", "must be positive");
  require(c.image_height > 0, "image_height", "must be positive");
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config, int jobs) {
  validate(config);
  const std::vector<AppearanceCode> signatures = make_signatures(config);

  SyntheticDataset out;
  out.train.code_bits = static_cast<std::size_t>(config.code_bits);
  out.test.code_bits = static_cast<std::size_t>(config.code_bits);
  out.train.images.resize(config.train_scenes);
  out.test.images.resize(config.test_scenes);

  const std::size_t total =
      static_cast<std::size_t>(config.train_scenes) + static_cast<std::size_t>(config.test_scenes);
  parallel_for(total, jobs, [&](std::size_t i) {
    if (i < static_cast<std::size_t>(config.train_scenes)) {
      out.train.images[i] =
          generate_scene(config, signatures, scene_id("train", static_cast<int>(i)), i);
    } else {
      const std::size_t j = i - static_cast<std::size_t>(config.train_scenes);
      out.test.images[j] =
          generate_scene(config, signatures, scene_id("test", static_cast<int>(j)), i);
    }
  });
  return out;
}

SyntheticConfig load_synthetic_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (j.value("schema", "") != kConfigSchema) {
    throw ValidationError("not a generator config file (bad schema field)");
  }
  if (j.value("version", -1) != kSchemaVersion) {
    throw ValidationError("unsupported config schema version");
  }

  SyntheticConfig c;
  c.train_scenes = j.value("train_scenes", c.train_scenes);
  c.test_scenes = j.value("test_scenes", c.test_scenes);
  c.proposals_per_image = j.value("proposals_per_image", c.proposals_per_image);
  c.code_bits = j.value("code_bits", c.code_bits);
  c.region_bands = j.value("region_bands", c.region_bands);
  c.band_height = j.value("band_height", c.band_height);
  c.noise_rate = j.value("noise_rate", c.noise_rate);
  c.objects_min = j.value("objects_min", c.objects_min);
  c.objects_max = j.value("objects_max", c.objects_max);
  c.object_width = j.value("object_width", c.object_width);
  c.object_height = j.value("object_height", c.object_height);
  c.object_x_min = j.value("object_x_min", c.object_x_min);
  c.object_x_max = j.value("object_x_max", c.object_x_max);
  c.object_x_outlier_rate = j.value("object_x_outlier_rate", c.object_x_outlier_rate);
  c.object_x_outlier_min = j.value("object_x_outlier_min", c.object_x_outlier_min);
  c.object_x_outlier_max = j.value("object_x_outlier_max", c.object_x_outlier_max);
  c.object_proposals = j.value("object_proposals", c.object_proposals);
  c.object_code_iou = j.value("object_code_iou", c.object_code_iou);
  c.proposal_w_min = j.value("proposal_w_min", c.proposal_w_min);
  c.proposal_w_max = j.value("proposal_w_max", c.proposal_w_max);
  c.proposal_h_min = j.value("proposal_h_min", c.proposal_h_min);
  c.proposal_h_max = j.value("proposal_h_max", c.proposal_h_max);
  c.proposal_size_steps = j.value("proposal_size_steps", c.proposal_size_steps);
  c.class_name = j.value("class_name", c.class_name);
  c.seed = j.value("seed", c.seed);
  c.image_width = j.value("image_width", c.image_width);
  c.image_height = j.value("image_height", c.image_height);
  validate(c);
  return c;
}

void save_synthetic_config(const SyntheticConfig& c, const std::filesystem::path& path) {
  json j;
  j["schema"] = kConfigSchema;
  j["version"] = kSchemaVersion;
  j["train_scenes"] = c.train_scenes;
  j["test_scenes"] = c.test_scenes;
  j["proposals_per_image"] = c.proposals_per_image;
  j["code_bits"] = c.code_bits;
  j["region_bands"] = c.region_bands;
  j["band_height"] = c.band_height;
  j["noise_rate"] = c.noise_rate;
  j["objects_min"] = c.objects_min;
  j["objects_max"] = c.objects_max;
  j["object_width"] = c.object_width;
  j["object_height"] = c.object_height;
  j["object_x_min"] = c.object_x_min;
  j["object_x_max"] = c.object_x_max;
  j["object_x_outlier_rate"] = c.object_x_outlier_rate;
  j["object_x_outlier_min"] = c.object_x_outlier_min;
  j["object_x_outlier_max"] = c.object_x_outlier_max;
  j["object_proposals"] = c.object_proposals;
  j["object_code_iou"] = c.object_code_iou;
  j["proposal_w_min"] = c.proposal_w_min;
  j["proposal_w_max"] = c.proposal_w_max;
  j["proposal_h_min"] = c.proposal_h_min;
  j["proposal_h_max"] = c.proposal_h_max;
  j["proposal_size_steps"] = c.proposal_size_steps;
  j["class_name"] = c.class_name;
  j["seed"] = c.seed;
  j["image_width"] = c.image_width;
  j["image_height"] = c.image_height;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write config file " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace asearch
