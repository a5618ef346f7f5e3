// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/metrics.hpp"

#include "sasv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sasv::metrics {

const char *to_string(Kind k) {
  switch (k) {
  case Kind::SV_EER:
    return "SV-EER";
  case Kind::SPF_EER:
    return "SPF-EER";
  case Kind::SASV_EER:
    return "SASV-EER";
  }
  return "?";
}

MetricKind metric_kind(Kind k) {
  using proto::TrialClass;
  switch (k) {
  case Kind::SV_EER:
    return {k, {TrialClass::nontarget}};
  case Kind::SPF_EER:
    return {k, {TrialClass::spoof}};
  case Kind::SASV_EER:
    return {k, {TrialClass::nontarget, TrialClass::spoof}};
  }
  throw DataError("bad metric kind");
}

EerResult compute_eer(std::span<const double> positive_scores,
                      std::span<const double> negative_scores) {
  if (positive_scores.empty())
    throw DataError("compute_eer: positive class is empty");
  if (negative_scores.empty())
    throw DataError("compute_eer: negative class is empty");
  for (double s : positive_scores)
    if (!std::isfinite(s))
      throw DataError("compute_eer: non-finite positive score");
  for (double s : negative_scores)
    if (!std::isfinite(s))
      throw DataError("compute_eer: non-finite negative score");

  std::vector<double> pos(positive_scores.begin(), positive_scores.end());
  std::vector<double> neg(negative_scores.begin(), negative_scores.end());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  const double n_pos = static_cast<double>(pos.size());
  const double n_neg = static_cast<double>(neg.size());

  // Candidate thresholds: every distinct score, ascending, plus a sentinel
  // above the maximum. With the accept-iff-score>=t rule these visit every
  // achievable operating point of the empirical ROC.
  std::vector<double> thresholds;
  thresholds.reserve(pos.size() + neg.size() + 1);
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(thresholds.back() + 1.0);

  // Walk operating points; FAR decreases, FRR increases. Start at the
  // virtual threshold -inf: everything accepted.
  double prev_t = thresholds.front() - 1.0;
  double prev_far = 1.0, prev_frr = 0.0;
  size_t pi = 0, ni = 0; // #pos < t, #neg < t

  for (double t : thresholds) {
    while (pi < pos.size() && pos[pi] < t)
      ++pi;
    while (ni < neg.size() && neg[ni] < t)
      ++ni;
    const double far = (n_neg - static_cast<double>(ni)) / n_neg;
    const double frr = static_cast<double>(pi) / n_pos;
    const double d_prev = prev_far - prev_frr;
    const double d_cur = far - frr;
    if (d_cur <= 0.0) {
      // Crossing lies on this segment (d_prev > 0 here since the walk stops
      // at the first non-positive difference); interpolate linearly.
      EerResult r;
      r.n_positive = pos.size();
      r.n_negative = neg.size();
      const double lambda = d_prev / (d_prev - d_cur);
      r.eer = prev_far + lambda * (far - prev_far);
      r.threshold = prev_t + lambda * (t - prev_t);
      return r;
    }
    prev_t = t;
    prev_far = far;
    prev_frr = frr;
  }
  throw DataError("compute_eer: no ROC crossing found"); // unreachable
}

EerResult compute_metric(const proto::ScoreSet &scores,
                         const MetricKind &kind) {
  if (scores.scores.size() != scores.trials.size())
    throw DataError("score set is misaligned");
  std::vector<double> pos, neg;
  for (size_t i = 0; i < scores.trials.size(); ++i) {
    const auto c = scores.trials[i].trial_class;
    if (c == proto::TrialClass::target)
      pos.push_back(scores.scores[i]);
    else if (kind.negative_classes.count(c))
      neg.push_back(scores.scores[i]);
    // other classes are excluded from this metric
  }
  if (pos.empty())
    throw DataError(std::string(to_string(kind.kind)) +
                    ": no target trials in score set");
  if (neg.empty()) {
    std::string classes;
    for (auto c : kind.negative_classes)
      classes += std::string(classes.empty() ? "" : "+") + proto::to_string(c);
    throw DataError(std::string(to_string(kind.kind)) + ": no " + classes +
                    " trials in score set");
  }
  return compute_eer(pos, neg);
}

EerResult compute_metric(const proto::ScoreSet &scores, Kind kind) {
  return compute_metric(scores, metric_kind(kind));
}

ReportRow metric_report(const std::string &system, const proto::ScoreSet &dev,
                        const proto::ScoreSet &eval) {
  ReportRow row;
  row.system = system;
  row.sasv_dev = compute_metric(dev, Kind::SASV_EER).eer;
  row.sasv_eval = compute_metric(eval, Kind::SASV_EER).eer;
  row.spf_dev = compute_metric(dev, Kind::SPF_EER).eer;
  row.spf_eval = compute_metric(eval, Kind::SPF_EER).eer;
  row.sv_dev = compute_metric(dev, Kind::SV_EER).eer;
  row.sv_eval = compute_metric(eval, Kind::SV_EER).eer;
  return row;
}

std::string format_report_table(const std::vector<ReportRow> &rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s%-16s%-16s%-16s\n", "System", "SASV-EER",
                "SPF-EER", "SV-EER");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-24s%-8s%-8s%-8s%-8s%-8s%-8s\n", "", "dev",
                "eval", "dev", "eval", "dev", "eval");
  out += buf;
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%-24s%-8.2f%-8.2f%-8.2f%-8.2f%-8.2f%-8.2f\n",
                  r.system.c_str(), 100.0 * r.sasv_dev, 100.0 * r.sasv_eval,
                  100.0 * r.spf_dev, 100.0 * r.spf_eval, 100.0 * r.sv_dev,
                  100.0 * r.sv_eval);
    out += buf;
  }
  return out;
}

std::string format_report_tsv(const std::vector<ReportRow> &rows) {
  std::string out =
      "system\tsasv_eer_dev\tsasv_eer_eval\tspf_eer_dev\tspf_eer_eval\t"
      "sv_eer_dev\tsv_eer_eval\n";
  char buf[200];
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%s\t%.2f\t%.2f\t%.2f\t%.2f\t%.2f\t%.2f\n",
                  r.system.c_str(), 100.0 * r.sasv_dev, 100.0 * r.sasv_eval,
                  100.0 * r.spf_dev, 100.0 * r.spf_eval, 100.0 * r.sv_dev,
                  100.0 * r.sv_eval);
    out += buf;
  }
  return out;
}

} // namespace sasv::metrics
