// SPDX-License-Identifier: Apache-2.0
//
// Event-log ingestion: line-delimited JSON parsing with schema validation,
// keyword matching, and per-user timeline construction.
#ifndef FUNNELCAST_INGEST_HPP
#define FUNNELCAST_INGEST_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "funnelcast/model.hpp"

namespace funnelcast {

enum class Severity { Warning, Fatal };

/// A data-quality finding tied to an input line. Fatal issues abort
/// downstream analysis; warnings are collected and reported.
struct LogIssue {
  std::size_t line_no = 0;
  Severity severity = Severity::Warning;
  std::string code;
  std::string detail;
};

struct ParseOptions {
  /// Largest tolerated backwards timestamp jump, in ms. Unset means
  /// unlimited: out-of-order records are sorted with a warning.
  std::optional<Timestamp> max_timestamp_disorder;
};

struct ParseResult {
  std::vector<EventRecord> records;  // sorted by (ts, input order)
  std::vector<LogIssue> issues;

  bool ok() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const LogIssue& i) { return i.severity == Severity::Fatal; });
  }
};

namespace detail {

// --- Unicode-aware tokenization and case folding -------------------------
//
// Tokens are maximal runs of letters/digits; matching is whole-token under
// simple case folding. The fold table below covers ASCII, Latin-1,
// Latin Extended-A, Greek and Cyrillic, which is the script range of the
// chat logs this was built for; other codepoints pass through unchanged.
// Codepoints outside the common whitespace/punctuation blocks are treated
// as token characters, so scripts without a fold rule still tokenize.

inline char32_t fold_codepoint(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  // Latin-1 supplement: À..Þ except ×.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  // Latin Extended-A pairs.
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;  // Ÿ
  if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
  // Greek capitals Α..Ρ, Σ..Ω.
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  // Cyrillic А..Я and Ѐ..Џ.
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

inline bool is_token_codepoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  // Common non-ASCII separators: NBSP, Ogham space, general punctuation
  // block, CJK punctuation, ideographic space, BOM.
  if (cp == 0xA0 || cp == 0x1680 || cp == 0xFEFF) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  return true;
}

/// Decodes the UTF-8 sequence starting at s[i], advancing i. Invalid bytes
/// are interpreted as Latin-1 so that dirty logs still tokenize
/// deterministically.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto cont = [&](std::size_t k) {
    return k < s.size() && (byte(k) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    char32_t cp = ((b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    char32_t cp = ((b0 & 0x0F) << 12) | ((byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    char32_t cp = ((b0 & 0x07) << 18) | ((byte(i + 1) & 0x3F) << 12) |
                  ((byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    i += 4;
    return cp;
  }
  ++i;  // invalid lead byte: Latin-1 fallback
  return b0;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace detail

/// Case-folds a whole string (used on keywords once at load time).
inline std::string fold_string(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) detail::append_utf8(out, detail::fold_codepoint(detail::decode_utf8(s, i)));
  return out;
}

/// Splits text into case-folded tokens (maximal runs of letters/digits).
inline std::vector<std::string> fold_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = detail::decode_utf8(text, i);
    if (detail::is_token_codepoint(cp)) {
      detail::append_utf8(current, detail::fold_codepoint(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// True iff any keyword equals a token of `text` under case folding.
/// Matching is whole-token: "protesting" does not match "protest".
inline bool match_keywords(std::string_view text, const std::set<std::string>& keywords) {
  std::set<std::string> folded;
  for (const auto& k : keywords) folded.insert(fold_string(k));
  for (const auto& token : fold_tokens(text)) {
    if (folded.count(token)) return true;
  }
  return false;
}

// --- JSON serialization ---------------------------------------------------

inline void to_json(nlohmann::json& j, const EventRecord& r) {
  j = nlohmann::json{{"ts", r.ts}, {"actor", r.actor}, {"kind", to_string(r.kind)}};
  if (r.recipient) j["recipient"] = *r.recipient;
  if (r.component) j["component"] = *r.component;
  if (r.text) j["text"] = *r.text;
  if (r.keyword_hit) j["keyword_hit"] = *r.keyword_hit;
}

inline void from_json(const nlohmann::json& j, EventRecord& r) {
  r.ts = j.at("ts").get<Timestamp>();
  r.actor = j.at("actor").get<std::string>();
  const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown event kind");
  r.kind = *kind;
  r.recipient.reset();
  r.component.reset();
  r.text.reset();
  r.keyword_hit.reset();
  if (j.contains("recipient")) r.recipient = j.at("recipient").get<std::string>();
  if (j.contains("component")) r.component = j.at("component").get<std::string>();
  if (j.contains("text")) r.text = j.at("text").get<std::string>();
  if (j.contains("keyword_hit")) r.keyword_hit = j.at("keyword_hit").get<bool>();
}

inline void to_json(nlohmann::json& j, const CampaignConfig& c) {
  j = nlohmann::json{
      {"keywords", c.keywords},
      {"components", c.components},
      {"seeds", c.seeds},
      {"t0", c.t0},
      {"event_start", c.event_start},
      {"event_end", c.event_end},
      {"engagement_definition",
       c.engagement == EngagementDefinition::KeywordOnly ? "keyword" : "keyword-or-component"},
      {"tie_correction", c.tie_correction},
  };
}

inline void from_json(const nlohmann::json& j, CampaignConfig& c) {
  c.keywords = j.at("keywords").get<std::set<std::string>>();
  c.components = j.at("components").get<std::set<std::string>>();
  c.seeds = j.at("seeds").get<std::set<std::string>>();
  c.t0 = j.at("t0").get<Timestamp>();
  c.event_start = j.at("event_start").get<Timestamp>();
  c.event_end = j.at("event_end").get<Timestamp>();
  c.engagement = EngagementDefinition::KeywordOnly;
  if (j.contains("engagement_definition")) {
    const auto s = j.at("engagement_definition").get<std::string>();
    if (s == "keyword") {
      c.engagement = EngagementDefinition::KeywordOnly;
    } else if (s == "keyword-or-component") {
      c.engagement = EngagementDefinition::KeywordOrComponentActivity;
    } else {
      throw std::invalid_argument("unknown engagement_definition: " + s);
    }
  }
  c.tie_correction = j.value("tie_correction", false);
}

// --- Parsing ---------------------------------------------------------------

/// Parses a line-delimited JSON event log. Malformed lines and schema
/// violations produce Fatal issues; out-of-order timestamps are sorted
/// with a Warning unless they exceed the configured disorder window.
/// For message records without a precomputed keyword_hit flag the flag is
/// filled in from the campaign keyword set; precomputed flags are trusted.
inline ParseResult parse_log(std::istream& in, const CampaignConfig& config,
                             const ParseOptions& options = {}) {
  ParseResult result;
  std::set<std::string> folded_keywords;
  for (const auto& k : config.keywords) folded_keywords.insert(fold_string(k));

  std::string line;
  std::size_t line_no = 0;
  Timestamp max_ts_seen = std::numeric_limits<Timestamp>::min();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      result.issues.push_back({line_no, Severity::Fatal, "ParseError", e.what()});
      continue;
    }

    EventRecord r;
    try {
      if (!j.contains("ts") || !j.at("ts").is_number_integer())
        throw std::invalid_argument("missing or non-integer ts");
      if (!j.contains("actor") || !j.at("actor").is_string())
        throw std::invalid_argument("missing actor");
      if (!j.contains("kind") || !j.at("kind").is_string())
        throw std::invalid_argument("missing kind");
      if (!event_kind_from_string(j.at("kind").get<std::string>())) {
        result.issues.push_back(
            {line_no, Severity::Fatal, "UnknownKind", j.at("kind").get<std::string>()});
        continue;
      }
      r = j.get<EventRecord>();
    } catch (const std::exception& e) {
      result.issues.push_back({line_no, Severity::Fatal, "MissingField", e.what()});
      continue;
    }

    if (auto code = r.schema_violation()) {
      result.issues.push_back(
          {line_no, Severity::Fatal, *code,
           std::string(to_string(r.kind)) + " record violates field rules"});
      continue;
    }

    if (r.is_message() && !r.keyword_hit && r.text) {
      bool hit = false;
      for (const auto& token : fold_tokens(*r.text)) {
        if (folded_keywords.count(token)) {
          hit = true;
          break;
        }
      }
      r.keyword_hit = hit;
    }

    if (r.ts < max_ts_seen) {
      const Timestamp disorder = max_ts_seen - r.ts;
      if (options.max_timestamp_disorder && disorder > *options.max_timestamp_disorder) {
        result.issues.push_back({line_no, Severity::Fatal,
                                 "NonMonotonicTimestampBeyondTolerance",
                                 "timestamp out of order by " + std::to_string(disorder) + " ms"});
        continue;
      }
      result.issues.push_back({line_no, Severity::Warning, "OutOfOrder",
                               "timestamp out of order by " + std::to_string(disorder) + " ms"});
    }
    max_ts_seen = std::max(max_ts_seen, r.ts);
    result.records.push_back(std::move(r));
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.ts < b.ts; });
  return result;
}

/// Serializes records as line-delimited JSON in their current order.
inline void write_log(std::ostream& out, const std::vector<EventRecord>& records) {
  for (const auto& r : records) {
    nlohmann::json j = r;
    out << j.dump() << '\n';
  }
}

inline CampaignConfig load_campaign_config(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  CampaignConfig c = j.get<CampaignConfig>();
  c.validate();
  return c;
}

/// Roster file: one user id per line; blank lines ignored.
inline std::set<UserId> load_roster(std::istream& in) {
  std::set<UserId> users;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (!line.empty()) users.insert(line);
  }
  return users;
}

// --- Timelines ---------------------------------------------------------------

/// Builds one timeline per user appearing as actor, recipient, seed, or
/// roster entry. Records must already be sorted. Infection time is the
/// earliest component receipt within [t0, event_end]; seeds are infected
/// at t0 regardless of receipts.
inline std::map<UserId, UserTimeline> build_timelines(const std::vector<EventRecord>& records,
                                                      const CampaignConfig& config,
                                                      const std::set<UserId>& roster = {}) {
  std::map<UserId, UserTimeline> timelines;
  auto touch = [&](const UserId& u) -> UserTimeline& {
    auto [it, inserted] = timelines.try_emplace(u);
    if (inserted) it->second.user = u;
    return it->second;
  };

  for (const auto& u : config.seeds) touch(u).infection_ts = config.t0;
  for (const auto& u : roster) touch(u);

  for (const auto& r : records) {
    touch(r.actor).events.push_back(r);
    if (r.recipient && *r.recipient != r.actor) {  // self-addressed notes stay single entries
      auto& tl = touch(*r.recipient);
      tl.events.push_back(r);
      if (r.kind == EventKind::ComponentSend && r.ts >= config.t0 && r.ts <= config.event_end) {
        if (!tl.infection_ts || r.ts < *tl.infection_ts) tl.infection_ts = r.ts;
      }
    }
  }

  // Seeds stay pinned at t0 even when they also receive copies later.
  for (const auto& u : config.seeds) touch(u).infection_ts = config.t0;
  return timelines;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_INGEST_HPP
