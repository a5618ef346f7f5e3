// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/protocol.hpp"

#include "sasv/errors.hpp"
#include "sasv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sasv::proto {

const char *to_string(TrialClass c) {
  switch (c) {
  case TrialClass::target:
    return "target";
  case TrialClass::nontarget:
    return "nontarget";
  case TrialClass::spoof:
    return "spoof";
  }
  return "?";
}

TrialClass trial_class_from_string(const std::string &s, long line) {
  if (s == "target")
    return TrialClass::target;
  if (s == "nontarget")
    return TrialClass::nontarget;
  if (s == "spoof")
    return TrialClass::spoof;
  throw ParseError("unknown trial class '" + s + "'", line);
}

const char *to_string(Partition p) {
  switch (p) {
  case Partition::train:
    return "train";
  case Partition::dev:
    return "dev";
  case Partition::eval:
    return "eval";
  }
  return "?";
}

Partition partition_from_string(const std::string &s, long line) {
  if (s == "train")
    return Partition::train;
  if (s == "dev")
    return Partition::dev;
  if (s == "eval")
    return Partition::eval;
  throw ParseError("unknown partition '" + s + "'", line);
}

namespace {

bool skippable(const std::string &line) {
  for (char ch : line) {
    if (ch == '#')
      return true;
    if (ch != ' ' && ch != '\t')
      return false;
  }
  return true; // blank
}

std::vector<std::string> split_csv(const std::string &s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_finite_double(const std::string &tok, long line) {
  char *end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("not a number: '" + tok + "'", line);
  if (!std::isfinite(v))
    throw ParseError("score is not finite: '" + tok + "'", line);
  return v;
}

} // namespace

// ---------------------------------------------------------------- trials --

std::vector<Trial> parse_trial_lines(const std::vector<std::string> &lines) {
  std::vector<Trial> trials;
  for (size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i + 1);
    if (skippable(lines[i]))
      continue;
    auto fields = io::split_fields(lines[i]);
    if (fields.size() != 3)
      throw ParseError("expected 3 fields 'speaker utterance class', got " +
                           std::to_string(fields.size()),
                       lineno);
    trials.push_back(Trial{fields[0], fields[1],
                           trial_class_from_string(fields[2], lineno)});
  }
  return trials;
}

std::vector<Trial> parse_trial_file(const std::filesystem::path &path) {
  return parse_trial_lines(io::read_lines(path));
}

std::string serialize_trials(const std::vector<Trial> &trials) {
  std::string out;
  for (const auto &t : trials) {
    out += t.enrol_speaker_id;
    out += ' ';
    out += t.test_utterance_id;
    out += ' ';
    out += to_string(t.trial_class);
    out += '\n';
  }
  return out;
}

void write_trial_file(const std::vector<Trial> &trials,
                      const std::filesystem::path &path) {
  io::write_text(path, serialize_trials(trials));
}

// ------------------------------------------------------------- enrolment --

EnrolmentMap parse_enrolment_lines(const std::vector<std::string> &lines) {
  EnrolmentMap map;
  for (size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i + 1);
    if (skippable(lines[i]))
      continue;
    auto fields = io::split_fields(lines[i]);
    if (fields.size() != 2)
      throw ParseError("expected 'speaker_id utt1[,utt2,...]'", lineno);
    const std::string &speaker = fields[0];
    if (map.has(speaker))
      throw ParseError("duplicate speaker '" + speaker + "'", lineno);
    auto utts = split_csv(fields[1]);
    for (const auto &u : utts)
      if (u.empty())
        throw ParseError("empty utterance id in enrolment list for '" +
                             speaker + "'",
                         lineno);
    if (utts.empty())
      throw ParseError("empty utterance list for '" + speaker + "'", lineno);
    std::set<std::string> seen;
    for (const auto &u : utts)
      if (!seen.insert(u).second)
        throw ParseError("duplicate utterance '" + u + "' for speaker '" +
                             speaker + "'",
                         lineno);
    map.speaker_order.push_back(speaker);
    map.utterances[speaker] = std::move(utts);
  }
  return map;
}

EnrolmentMap parse_enrolment_file(const std::filesystem::path &path) {
  return parse_enrolment_lines(io::read_lines(path));
}

std::string serialize_enrolment(const EnrolmentMap &map) {
  std::string out;
  for (const auto &speaker : map.speaker_order) {
    out += speaker;
    out += ' ';
    const auto &utts = map.utterances.at(speaker);
    for (size_t i = 0; i < utts.size(); ++i) {
      if (i)
        out += ',';
      out += utts[i];
    }
    out += '\n';
  }
  return out;
}

void write_enrolment_file(const EnrolmentMap &map,
                          const std::filesystem::path &path) {
  io::write_text(path, serialize_enrolment(map));
}

// ---------------------------------------------------------------- scores --

void write_scores(const ScoreSet &scores, const std::filesystem::path &path) {
  if (scores.scores.size() != scores.trials.size())
    throw DataError("score set has " + std::to_string(scores.scores.size()) +
                    " scores for " + std::to_string(scores.trials.size()) +
                    " trials");
  std::string out;
  char buf[64];
  for (double s : scores.scores) {
    if (!std::isfinite(s))
      throw DataError("refusing to write non-finite score");
    // 10 significant digits; plain text keeps external scoring trivial.
    std::snprintf(buf, sizeof buf, "%.9e\n", s);
    out += buf;
  }
  io::write_text(path, out);
}

ScoreSet read_scores(const std::filesystem::path &path,
                     const std::vector<Trial> &trials, Partition partition) {
  auto lines = io::read_lines(path);
  std::vector<double> values;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (skippable(lines[i]))
      continue;
    auto fields = io::split_fields(lines[i]);
    if (fields.size() != 1)
      throw ParseError("expected one score per line", static_cast<long>(i + 1));
    values.push_back(parse_finite_double(fields[0], static_cast<long>(i + 1)));
  }
  if (values.size() != trials.size())
    throw DataError("score count mismatch: expected " +
                    std::to_string(trials.size()) + " scores, found " +
                    std::to_string(values.size()) + " in " + path.string());
  ScoreSet set;
  set.trials = trials;
  set.scores = std::move(values);
  set.partition = partition;
  return set;
}

// -------------------------------------------------------------- manifest --

const ManifestEntry &CorpusManifest::at(const std::string &utterance_id) const {
  auto it = by_utterance.find(utterance_id);
  if (it == by_utterance.end())
    throw DataError("unknown utterance '" + utterance_id + "'");
  return entries[it->second];
}

void CorpusManifest::add(ManifestEntry e) {
  if (has(e.utterance_id))
    throw DataError("duplicate utterance '" + e.utterance_id + "' in manifest");
  if (!e.is_bonafide && !e.attack_id)
    throw DataError("spoofed utterance '" + e.utterance_id +
                    "' lacks an attack id");
  if (e.is_bonafide && e.attack_id)
    throw DataError("bona fide utterance '" + e.utterance_id +
                    "' carries an attack id");
  if (!(e.duration_s > 0.0))
    throw DataError("utterance '" + e.utterance_id +
                    "' has non-positive duration");
  by_utterance[e.utterance_id] = entries.size();
  entries.push_back(std::move(e));
}

std::set<std::string> CorpusManifest::speakers(Partition p) const {
  std::set<std::string> out;
  for (const auto &e : entries)
    if (e.partition == p)
      out.insert(e.speaker_id);
  return out;
}

std::vector<const ManifestEntry *>
CorpusManifest::partition_entries(Partition p) const {
  std::vector<const ManifestEntry *> out;
  for (const auto &e : entries)
    if (e.partition == p)
      out.push_back(&e);
  return out;
}

CorpusManifest parse_manifest_file(const std::filesystem::path &path) {
  auto lines = io::read_lines(path);
  CorpusManifest manifest;
  for (size_t i = 0; i < lines.size(); ++i) {
    const long lineno = static_cast<long>(i + 1);
    if (skippable(lines[i]))
      continue;
    ManifestEntry e;
    bool have_utt = false, have_spk = false, have_bf = false, have_dur = false,
         have_path = false, have_part = false;
    for (const auto &field : io::split_fields(lines[i])) {
      auto eq = field.find('=');
      if (eq == std::string::npos)
        throw ParseError("expected key=value, got '" + field + "'", lineno);
      std::string key = field.substr(0, eq);
      std::string value = field.substr(eq + 1);
      if (key == "utt") {
        e.utterance_id = value;
        have_utt = true;
      } else if (key == "spk") {
        e.speaker_id = value;
        have_spk = true;
      } else if (key == "bonafide") {
        if (value != "0" && value != "1")
          throw ParseError("bonafide must be 0 or 1", lineno);
        e.is_bonafide = value == "1";
        have_bf = true;
      } else if (key == "attack") {
        if (value != "-")
          e.attack_id = value;
      } else if (key == "dur") {
        e.duration_s = parse_finite_double(value, lineno);
        have_dur = true;
      } else if (key == "path") {
        e.path = value;
        have_path = true;
      } else if (key == "part") {
        e.partition = partition_from_string(value, lineno);
        have_part = true;
      } else {
        throw ParseError("unknown manifest key '" + key + "'", lineno);
      }
    }
    if (!(have_utt && have_spk && have_bf && have_dur && have_path && have_part))
      throw ParseError("incomplete manifest record", lineno);
    if (e.is_bonafide != !e.attack_id.has_value())
      throw ParseError("bonafide flag inconsistent with attack id for '" +
                           e.utterance_id + "'",
                       lineno);
    manifest.add(std::move(e));
  }
  return manifest;
}

std::string serialize_manifest(const CorpusManifest &manifest) {
  std::string out;
  char buf[32];
  for (const auto &e : manifest.entries) {
    std::snprintf(buf, sizeof buf, "%.3f", e.duration_s);
    out += "utt=" + e.utterance_id;
    out += " spk=" + e.speaker_id;
    out += std::string(" bonafide=") + (e.is_bonafide ? "1" : "0");
    out += " attack=" + (e.attack_id ? *e.attack_id : std::string("-"));
    out += std::string(" dur=") + buf;
    out += " path=" + e.path;
    out += std::string(" part=") + to_string(e.partition);
    out += '\n';
  }
  return out;
}

void write_manifest_file(const CorpusManifest &manifest,
                         const std::filesystem::path &path) {
  io::write_text(path, serialize_manifest(manifest));
}

CorpusManifest filter_speakers(const CorpusManifest &manifest,
                               const std::set<std::string> &keep) {
  if (keep.empty())
    throw DataError("filter_speakers: keep set is empty");
  auto train = manifest.speakers(Partition::train);
  for (const auto &s : keep)
    if (!train.count(s))
      throw DataError("filter_speakers: '" + s + "' is not a train speaker");
  CorpusManifest out;
  for (const auto &e : manifest.entries) {
    if (e.partition == Partition::train && !keep.count(e.speaker_id))
      continue;
    out.add(e);
  }
  return out;
}

void validate_trials(const std::vector<Trial> &trials,
                     const EnrolmentMap &enrolment,
                     const CorpusManifest &manifest) {
  for (const auto &t : trials) {
    if (!enrolment.has(t.enrol_speaker_id))
      throw DataError("trial speaker '" + t.enrol_speaker_id +
                      "' missing from enrolment map");
    if (!manifest.has(t.test_utterance_id))
      throw DataError("trial utterance '" + t.test_utterance_id +
                      "' missing from manifest");
    const auto &e = manifest.at(t.test_utterance_id);
    const bool needs_bonafide = t.trial_class != TrialClass::spoof;
    if (e.is_bonafide != needs_bonafide)
      throw DataError("trial class " + std::string(to_string(t.trial_class)) +
                      " inconsistent with manifest bona fide flag for '" +
                      t.test_utterance_id + "'");
  }
}

} // namespace sasv::proto
