// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors
//
// Trial protocols, enrolment maps, corpus manifests and score files.
// All formats are line-oriented UTF-8 with LF endings; lines starting with
// '#' and blank lines are skipped on parse. Serializers emit canonical
// comment-free output, so parse-then-serialize is the identity on canonical
// files (modulo a trailing newline).

#ifndef SASV_PROTOCOL_HPP
#define SASV_PROTOCOL_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sasv::proto {

/// The three SASV trial classes. target and nontarget imply a bona fide
/// test utterance; spoof implies a fabricated one.
enum class TrialClass { target, nontarget, spoof };

const char *to_string(TrialClass c);
TrialClass trial_class_from_string(const std::string &s, long line = -1);

struct Trial {
  std::string enrol_speaker_id;
  std::string test_utterance_id;
  TrialClass trial_class;

  bool operator==(const Trial &) const = default;
};

/// speaker_id -> ordered bona fide utterance ids (>= 1 per speaker).
struct EnrolmentMap {
  // Order of first appearance is preserved for serialization.
  std::vector<std::string> speaker_order;
  std::map<std::string, std::vector<std::string>> utterances;

  bool has(const std::string &speaker) const {
    return utterances.count(speaker) != 0;
  }
};

enum class Partition { train, dev, eval };
const char *to_string(Partition p);
Partition partition_from_string(const std::string &s, long line = -1);

/// Aligned (trial, score) pairs for one partition.
struct ScoreSet {
  std::vector<Trial> trials;
  std::vector<double> scores;
  Partition partition = Partition::dev;

  size_t size() const { return trials.size(); }
};

struct ManifestEntry {
  std::string utterance_id;
  std::string speaker_id;
  bool is_bonafide = true;
  std::optional<std::string> attack_id; // present iff !is_bonafide
  double duration_s = 0.0;
  std::string path; // relative to the corpus root
  Partition partition = Partition::train;
};

/// Utterance metadata plus partition assignment. Speakers are partition-
/// disjoint by construction of the corpus generator.
struct CorpusManifest {
  std::vector<ManifestEntry> entries; // file order
  std::map<std::string, size_t> by_utterance;

  const ManifestEntry &at(const std::string &utterance_id) const;
  bool has(const std::string &utterance_id) const {
    return by_utterance.count(utterance_id) != 0;
  }
  void add(ManifestEntry e);

  std::set<std::string> speakers(Partition p) const;
  std::vector<const ManifestEntry *> partition_entries(Partition p) const;
};

// -- trial files: "<speaker_id> <utterance_id> <target|nontarget|spoof>" --

std::vector<Trial> parse_trial_file(const std::filesystem::path &path);
std::vector<Trial> parse_trial_lines(const std::vector<std::string> &lines);
std::string serialize_trials(const std::vector<Trial> &trials);
void write_trial_file(const std::vector<Trial> &trials,
                      const std::filesystem::path &path);

// -- enrolment files: "<speaker_id> <utt_id>[,<utt_id>]*" -----------------

EnrolmentMap parse_enrolment_file(const std::filesystem::path &path);
EnrolmentMap parse_enrolment_lines(const std::vector<std::string> &lines);
std::string serialize_enrolment(const EnrolmentMap &map);
void write_enrolment_file(const EnrolmentMap &map,
                          const std::filesystem::path &path);

// -- score files: one finite decimal per line, order-aligned --------------

void write_scores(const ScoreSet &scores, const std::filesystem::path &path);
ScoreSet read_scores(const std::filesystem::path &path,
                     const std::vector<Trial> &trials,
                     Partition partition = Partition::dev);

// -- manifests: one key=value record per utterance per line ---------------

CorpusManifest parse_manifest_file(const std::filesystem::path &path);
std::string serialize_manifest(const CorpusManifest &manifest);
void write_manifest_file(const CorpusManifest &manifest,
                         const std::filesystem::path &path);

/// Restrict the train partition to the given speakers; dev/eval untouched.
/// `keep` must be a non-empty subset of the train speakers.
CorpusManifest filter_speakers(const CorpusManifest &manifest,
                               const std::set<std::string> &keep);

/// Check that every trial's enrolment speaker resolves in the map and every
/// test utterance resolves in the manifest. Throws DataError on violation.
void validate_trials(const std::vector<Trial> &trials,
                     const EnrolmentMap &enrolment,
                     const CorpusManifest &manifest);

} // namespace sasv::proto

#endif
