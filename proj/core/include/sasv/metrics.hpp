// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// The three EER estimates over SASV score sets. All three share one
// positive class (bona fide target trials) and differ only in negatives:
//   SV-EER    negatives = bona fide nontarget
//   SPF-EER   negatives = spoofed
//   SASV-EER  negatives = union of both
// The EER estimator interpolates linearly between adjacent operating
// points of the empirical ROC; acceptance is the "accept iff score >=
// threshold" rule.

#ifndef SASV_METRICS_HPP
#define SASV_METRICS_HPP

#include "sasv/protocol.hpp"

#include <set>
#include <span>
#include <string>
#include <vector>

namespace sasv::metrics {

enum class Kind { SV_EER, SPF_EER, SASV_EER };

const char *to_string(Kind k);

struct MetricKind {
  Kind kind;
  std::set<proto::TrialClass> negative_classes;
};

/// The Table-1 style class assignment for each metric. Positives are
/// always {target}.
MetricKind metric_kind(Kind k);

struct EerResult {
  double eer = 0.0;       // fraction in [0, 1]
  double threshold = 0.0; // interpolated operating threshold
  size_t n_positive = 0;
  size_t n_negative = 0;
};

/// EER of positive-vs-negative score lists; higher score supports the
/// positive class. Both lists must be non-empty and finite.
EerResult compute_eer(std::span<const double> positive_scores,
                      std::span<const double> negative_scores);

/// Partition a score set per `kind` and delegate to compute_eer. Trials of
/// classes outside positive+negative are excluded.
EerResult compute_metric(const proto::ScoreSet &scores, const MetricKind &kind);
EerResult compute_metric(const proto::ScoreSet &scores, Kind kind);

/// One system's six numbers in Table layout order.
struct ReportRow {
  std::string system;
  double sasv_dev = 0.0, sasv_eval = 0.0;
  double spf_dev = 0.0, spf_eval = 0.0;
  double sv_dev = 0.0, sv_eval = 0.0;
};

/// Compute all six EERs for one system from dev/eval score sets.
ReportRow metric_report(const std::string &system, const proto::ScoreSet &dev,
                        const proto::ScoreSet &eval);

/// Aligned plain-text table: SASV-EER, SPF-EER, SV-EER with dev/eval
/// sub-columns, percentages with 2 decimals.
std::string format_report_table(const std::vector<ReportRow> &rows);

/// Machine-readable variant: tab-separated, one row per system.
std::string format_report_tsv(const std::vector<ReportRow> &rows);

} // namespace sasv::metrics

#endif
