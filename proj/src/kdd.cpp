// Copyright 2026 The NIDWCA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nidwca/kdd.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "nidwca/digest.hpp"

namespace nidwca {

const std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
};

const std::string_view kBundledTaxonomyText =
    R"(# KDD Cup 99 attack labels and their categories.
# label category
normal Normal
back DoS
land DoS
neptune DoS
pod DoS
smurf DoS
teardrop DoS
apache2 DoS
mailbomb DoS
processtable DoS
udpstorm DoS
ipsweep Probe
nmap Probe
portsweep Probe
satan Probe
mscan Probe
saint Probe
ftp_write R2L
guess_passwd R2L
imap R2L
multihop R2L
phf R2L
spy R2L
warezclient R2L
warezmaster R2L
named R2L
sendmail R2L
snmpgetattack R2L
snmpguess R2L
worm R2L
xlock R2L
xsnoop R2L
buffer_overflow U2R
loadmodule U2R
perl U2R
rootkit U2R
httptunnel U2R
ps U2R
sqlattack U2R
xterm U2R
)";

bool is_categorical(std::size_t feature) {
  return std::find(kCategoricalFeatures.begin(), kCategoricalFeatures.end(), feature) !=
         kCategoricalFeatures.end();
}

namespace {

std::size_t categorical_slot(std::size_t feature) {
  return static_cast<std::size_t>(
      std::find(kCategoricalFeatures.begin(), kCategoricalFeatures.end(), feature) -
      kCategoricalFeatures.begin());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string where(std::size_t line_number) {
  return line_number ? "line " + std::to_string(line_number) + ": " : std::string();
}

}  // namespace

std::string_view category_name(AttackCategory c) {
  switch (c) {
    case AttackCategory::kNormal: return "Normal";
    case AttackCategory::kDoS: return "DoS";
    case AttackCategory::kProbe: return "Probe";
    case AttackCategory::kR2L: return "R2L";
    case AttackCategory::kU2R: return "U2R";
  }
  return "Normal";
}

AttackCategory parse_category(std::string_view name) {
  for (auto c : {AttackCategory::kNormal, AttackCategory::kDoS, AttackCategory::kProbe,
                 AttackCategory::kR2L, AttackCategory::kU2R}) {
    if (category_name(c) == name) return c;
  }
  throw Error(ErrorKind::kUnknownLabel, "unknown attack category '" + std::string(name) + "'");
}

const Taxonomy& Taxonomy::bundled() {
  static const Taxonomy kBundled = parse(kBundledTaxonomyText);
  return kBundled;
}

Taxonomy Taxonomy::parse(std::string_view text) {
  Taxonomy t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream cols{std::string(body)};
    std::string label, category, extra;
    if (!(cols >> label >> category) || (cols >> extra)) {
      throw Error(ErrorKind::kFormat, "taxonomy " + where(n) + "expected 'label category'");
    }
    if (!label.empty() && label.back() == '.') label.pop_back();
    AttackCategory cat;
    try {
      cat = parse_category(category);
    } catch (const Error& e) {
      throw Error(ErrorKind::kFormat, "taxonomy " + where(n) + e.what());
    }
    const auto [it, inserted] = t.entries_.emplace(label, cat);
    if (!inserted) {
      throw Error(ErrorKind::kFormat, "taxonomy " + where(n) + "duplicate label '" + label + "'");
    }
  }
  if (t.entries_.empty()) throw Error(ErrorKind::kFormat, "taxonomy has no entries");
  return t;
}

Taxonomy Taxonomy::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open taxonomy file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

AttackCategory Taxonomy::category(std::string_view label) const {
  if (!label.empty() && label.back() == '.') label.remove_suffix(1);
  const auto it = entries_.find(label);
  if (it == entries_.end()) {
    throw Error(ErrorKind::kUnknownLabel, "unknown label '" + std::string(label) + "'");
  }
  return it->second;
}

std::string Taxonomy::canonical_text() const {
  std::string out;
  for (const auto& [label, cat] : entries_) {
    out += label;
    out += ' ';
    out += category_name(cat);
    out += '\n';
  }
  return out;
}

std::string Taxonomy::digest() const { return "sha256:" + sha256_hex(canonical_text()); }

AttackCategory label_category(std::string_view label, const Taxonomy& taxonomy) {
  return taxonomy.category(label);
}

ConnectionRecord parse_record(std::string_view line, LabelPresence labels,
                              const Taxonomy& taxonomy, std::size_t line_number) {
  line = trim(line);
  std::vector<std::string_view> fields;
  fields.reserve(kFeatureCount + 1);
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }

  bool labeled = labels == LabelPresence::kLabeled;
  if (labels == LabelPresence::kAuto) labeled = fields.size() == kFeatureCount + 1;
  const std::size_t want = kFeatureCount + (labeled ? 1 : 0);
  if (fields.size() != want) {
    throw Error(ErrorKind::kFormat, where(line_number) + "expected " + std::to_string(want) +
                                        " fields, got " + std::to_string(fields.size()));
  }

  ConnectionRecord rec;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const std::string_view field = fields[f];
    if (is_categorical(f)) {
      if (field.empty()) {
        throw Error(ErrorKind::kParse, where(line_number) + "field '" +
                                           std::string(kFeatureNames[f]) + "' is empty");
      }
      rec.categorical[categorical_slot(f)] = std::string(field);
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
        !std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::kParse, where(line_number) + "field '" +
                                         std::string(kFeatureNames[f]) + "': '" +
                                         std::string(field) + "' is not a non-negative number");
    }
    rec.numeric[f] = v;
  }
  if (labeled) {
    std::string_view label = fields.back();
    if (!label.empty() && label.back() == '.') label.remove_suffix(1);
    if (label.empty()) throw Error(ErrorKind::kParse, where(line_number) + "empty label");
    rec.label = std::string(label);
    try {
      rec.category = taxonomy.category(label);
    } catch (const Error& e) {
      throw Error(e.kind(), where(line_number) + e.what());
    }
  }
  return rec;
}

std::vector<ConnectionRecord> read_records(std::istream& in, LabelPresence labels,
                                           const Taxonomy& taxonomy) {
  std::vector<ConnectionRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    out.push_back(parse_record(line, labels, taxonomy, n));
  }
  return out;
}

Normalizer fit_normalizer(const std::vector<ConnectionRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::kEmptyInput, "cannot fit a normalizer on no records");
  Normalizer norm;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    norm.ranges[f] = {records.front().numeric[f], records.front().numeric[f]};
  }
  std::array<std::set<std::string>, 3> seen;
  for (const ConnectionRecord& r : records) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      norm.ranges[f].min = std::min(norm.ranges[f].min, r.numeric[f]);
      norm.ranges[f].max = std::max(norm.ranges[f].max, r.numeric[f]);
    }
    for (std::size_t c = 0; c < 3; ++c) seen[c].insert(r.categorical[c]);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    norm.categories[c].assign(seen[c].begin(), seen[c].end());
  }
  return norm;
}

State fuzzify(const ConnectionRecord& record, const Normalizer& norm) {
  State out(static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto i = static_cast<Eigen::Index>(f);
    if (is_categorical(f)) {
      const std::vector<std::string>& cats = norm.categories[categorical_slot(f)];
      if (cats.empty()) {
        throw Error(ErrorKind::kSchema, "normalizer has no categories for '" +
                                            std::string(kFeatureNames[f]) + "'");
      }
      const std::string& v = record.categorical[categorical_slot(f)];
      const auto it = std::lower_bound(cats.begin(), cats.end(), v);
      if (it == cats.end() || *it != v) {
        out[i] = 1.0;
      } else if (cats.size() == 1) {
        out[i] = 0.0;
      } else {
        out[i] = static_cast<double>(it - cats.begin()) / static_cast<double>(cats.size() - 1);
      }
      continue;
    }
    const NumericRange& r = norm.ranges[f];
    const double span = r.max - r.min;
    out[i] = span > 0.0 ? std::clamp((record.numeric[f] - r.min) / span, 0.0, 1.0) : 0.0;
  }
  return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.center_normal.size() != spec.center_attack.size() || spec.center_normal.size() == 0) {
    throw Error(ErrorKind::kDimension, "synthetic centers must share a positive width");
  }
  if (!(spec.spread >= 0.0)) throw Error(ErrorKind::kConfig, "synthetic spread must be >= 0");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  Dataset out;
  out.reserve(spec.n_normal + spec.n_attack);
  auto emit = [&](const State& center, Label label, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      State s = center;
      for (Eigen::Index j = 0; j < s.size(); ++j) {
        s[j] = std::clamp(s[j] + spec.spread * noise(rng), 0.0, 1.0);
      }
      out.push_back({std::move(s), label});
    }
  };
  emit(spec.center_normal, Label::kNormal, spec.n_normal);
  emit(spec.center_attack, Label::kAttack, spec.n_attack);
  return out;
}

void write_kdd_lines(const Dataset& data, std::ostream& out, std::string_view attack_label) {
  static const std::array<std::vector<std::string_view>, 3> kVocab = {{
      {"icmp", "tcp", "udp"},
      {"domain_u", "ftp", "http", "private", "smtp"},
      {"REJ", "RSTO", "S0", "SF"},
  }};
  std::ostringstream line;
  line << std::fixed << std::setprecision(6);
  for (const Sample& s : data) {
    if (static_cast<std::size_t>(s.state.size()) != kFeatureCount) {
      throw Error(ErrorKind::kDimension, "KDD lines need 41-cell samples");
    }
    line.str("");
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (f) line << ',';
      const double v = s.state[static_cast<Eigen::Index>(f)];
      if (is_categorical(f)) {
        const auto& vocab = kVocab[categorical_slot(f)];
        const auto idx = static_cast<std::size_t>(std::lround(v * static_cast<double>(vocab.size() - 1)));
        line << vocab[idx];
      } else {
        line << v;
      }
    }
    if (s.label) line << ',' << (*s.label == Label::kAttack ? attack_label : "normal") << '.';
    out << line.str() << '\n';
  }
}

}  // namespace nidwca
