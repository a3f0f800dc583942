// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "asearch/dataio.hpp"

namespace asearch {

/// Black-box window scorer contract. Implementations must be deterministic
/// (same proposal, same score) and keep scores in [0,1]; each carries a cost
/// label the benchmark harness reports alongside timings.
class ScoreFn {
 public:
  virtual ~ScoreFn() = default;

  virtual double score(const ImageRecord& image, std::int32_t proposal_index) const = 0;
  virtual std::string cost_label() const = 0;
};

struct NoiseConfig {
  double amplitude = 0.05;  // zero-mean uniform noise half-width
  double gamma = 1.0;       // exponent applied to the IoU base
  std::uint64_t seed = 0;
};

/// Desk-scale classifier stand-in: scores a proposal by its best IoU against
/// the class's ground-truth boxes, optionally sharpened by an exponent and
/// perturbed by seeded per-proposal noise. Noise is a pure function of
/// (seed, image id, proposal index), so scores do not depend on evaluation
/// order.
class OracleScorer final : public ScoreFn {
 public:
  explicit OracleScorer(std::string class_name, NoiseConfig noise = {});

  double score(const ImageRecord& image, std::int32_t proposal_index) const override;
  std::string cost_label() const override { return "oracle"; }

 private:
  std::string class_name_;
  NoiseConfig noise_;
};

/// Dense per-image score array aligned with proposal indices.
struct ScoreTable {
  std::vector<double> scores;
};

/// Columnar text file: a schema header, then one `proposal_index score` row
/// per proposal. Indices must cover 0..N-1 exactly; scores must lie in [0,1].
/// Violations raise ValidationError naming the row.
ScoreTable load_score_table(const std::filesystem::path& path);
void save_score_table(const ScoreTable& table, const std::filesystem::path& path);

/// Replays externally computed scores. Construction from a directory expects
/// one `<image_id>.scores` file per dataset image, each row-count matching
/// the image's proposal count.
class TableScorer final : public ScoreFn {
 public:
  TableScorer(const Dataset& dataset, const std::filesystem::path& table_dir);
  explicit TableScorer(std::map<std::string, ScoreTable> tables);

  double score(const ImageRecord& image, std::int32_t proposal_index) const override;
  std::string cost_label() const override { return "table"; }

 private:
  std::map<std::string, ScoreTable> tables_;
};

/// Parses a CLI scorer spec: `oracle:<noise-amplitude>` or `table:<dir>`.
std::unique_ptr<ScoreFn> make_scorer(const std::string& spec, const std::string& class_name,
                                     const Dataset& dataset, std::uint64_t seed);

}  // namespace asearch
