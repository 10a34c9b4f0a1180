// SPDX-License-Identifier: Apache-2.0
//
// Core domain types for multistage participation analysis of viral
// campaigns: timestamped event records, campaign configuration, per-user
// timelines and stage profiles. These types hold no I/O and no heavy
// computation; they are immutable after construction and safe to share
// across threads.
#ifndef FUNNELCAST_MODEL_HPP
#define FUNNELCAST_MODEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace funnelcast {

/// Milliseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;
using UserId = std::string;
using ComponentId = std::string;

enum class EventKind {
  PublicMessage,
  PrivateMessage,
  ComponentSend,
  ComponentUse,
  EventVisit,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::PublicMessage: return "PublicMessage";
    case EventKind::PrivateMessage: return "PrivateMessage";
    case EventKind::ComponentSend: return "ComponentSend";
    case EventKind::ComponentUse: return "ComponentUse";
    case EventKind::EventVisit: return "EventVisit";
  }
  return "?";
}

inline std::optional<EventKind> event_kind_from_string(std::string_view s) {
  if (s == "PublicMessage") return EventKind::PublicMessage;
  if (s == "PrivateMessage") return EventKind::PrivateMessage;
  if (s == "ComponentSend") return EventKind::ComponentSend;
  if (s == "ComponentUse") return EventKind::ComponentUse;
  if (s == "EventVisit") return EventKind::EventVisit;
  return std::nullopt;
}

/// One timestamped user action. Field presence is conditional on `kind`:
///   - recipient: required for PrivateMessage and ComponentSend, forbidden
///     otherwise;
///   - component: required for ComponentSend and ComponentUse, forbidden
///     otherwise;
///   - text / keyword_hit: message kinds only, and at least one of the two
///     must be present for a message.
struct EventRecord {
  Timestamp ts = 0;
  UserId actor;
  EventKind kind = EventKind::PublicMessage;
  std::optional<UserId> recipient;
  std::optional<ComponentId> component;
  std::optional<std::string> text;
  std::optional<bool> keyword_hit;

  bool is_message() const {
    return kind == EventKind::PublicMessage || kind == EventKind::PrivateMessage;
  }

  bool operator==(const EventRecord&) const = default;

  /// Returns the issue code violated by this record, or nullopt when the
  /// kind-conditional field rules all hold.
  std::optional<std::string> schema_violation() const {
    if (actor.empty()) return "MissingField";
    const bool needs_recipient =
        kind == EventKind::PrivateMessage || kind == EventKind::ComponentSend;
    const bool needs_component =
        kind == EventKind::ComponentSend || kind == EventKind::ComponentUse;
    if (needs_recipient && (!recipient || recipient->empty())) return "MissingField";
    if (!needs_recipient && recipient) return "UnexpectedField";
    if (needs_component && (!component || component->empty())) return "MissingField";
    if (!needs_component && component) return "UnexpectedField";
    if (is_message()) {
      if (!text && !keyword_hit) return "MissingField";
    } else {
      if (text || keyword_hit) return "UnexpectedField";
    }
    if (kind == EventKind::ComponentSend && recipient && *recipient == actor)
      return "SelfTransfer";
    return std::nullopt;
  }
};

/// Which actions count as engagement after infection.
enum class EngagementDefinition {
  KeywordOnly,                 // keyword messages only (default)
  KeywordOrComponentActivity,  // keyword messages, component sends or uses
};

/// Campaign description: keyword vocabulary, viral component ids, seed
/// users infected at t0, and the time windows separating the pre-event
/// period [t0, event_start) from the event [event_start, event_end].
struct CampaignConfig {
  std::set<std::string> keywords;
  std::set<ComponentId> components;
  std::set<UserId> seeds;
  Timestamp t0 = 0;
  Timestamp event_start = 0;
  Timestamp event_end = 0;
  EngagementDefinition engagement = EngagementDefinition::KeywordOnly;
  bool tie_correction = false;

  /// Throws std::invalid_argument when the window ordering or the
  /// non-empty-set requirements are violated.
  void validate() const {
    if (!(t0 < event_start && event_start < event_end))
      throw std::invalid_argument("campaign windows must satisfy t0 < event_start < event_end");
    if (keywords.empty()) throw std::invalid_argument("keywords must be non-empty");
    if (components.empty()) throw std::invalid_argument("components must be non-empty");
    if (seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  }
};

/// Per-user view of the log: every event the user appears in (as actor or
/// recipient), time-ordered with input order preserved on ties, plus the
/// derived infection time. Seeds are infected at t0; everyone else at the
/// earliest component receipt inside [t0, event_end].
struct UserTimeline {
  UserId user;
  std::vector<EventRecord> events;
  std::optional<Timestamp> infection_ts;
};

/// The 12 consistent stage combinations. S0->S4 denotes action with no
/// recorded earlier stage; None denotes no stage at all.
enum class Path {
  None,
  S0_S4,
  S1,
  S1_S4,
  S1_S2,
  S1_S2_S4,
  S1_S2_S3,
  S1_S2_S3_S4,
  S2,
  S2_S4,
  S2_S3,
  S2_S3_S4,
};

inline constexpr std::array<Path, 12> kAllPaths = {
    Path::None,     Path::S0_S4,    Path::S1,       Path::S1_S4,
    Path::S1_S2,    Path::S1_S2_S4, Path::S1_S2_S3, Path::S1_S2_S3_S4,
    Path::S2,       Path::S2_S4,    Path::S2_S3,    Path::S2_S3_S4,
};

inline std::string_view path_label(Path p) {
  switch (p) {
    case Path::None: return "None";
    case Path::S0_S4: return "S0→S4";
    case Path::S1: return "S1";
    case Path::S1_S4: return "S1→S4";
    case Path::S1_S2: return "S1→S2";
    case Path::S1_S2_S4: return "S1→S2→S4";
    case Path::S1_S2_S3: return "S1→S2→S3";
    case Path::S1_S2_S3_S4: return "S1→S2→S3→S4";
    case Path::S2: return "S2";
    case Path::S2_S4: return "S2→S4";
    case Path::S2_S3: return "S2→S3";
    case Path::S2_S3_S4: return "S2→S3→S4";
  }
  return "?";
}

/// Raised when a stage combination claims engagement without infection.
class InvalidProfile : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Total mapping from the 12 valid (s1,s2,s3,s4) combinations to path
/// labels. Combinations with s3 and not s2 are rejected: engagement
/// requires infection.
inline Path derive_path(bool s1, bool s2, bool s3, bool s4) {
  if (s3 && !s2) throw InvalidProfile("engagement stage requires infection (s3 implies s2)");
  const int key = (s1 ? 8 : 0) | (s2 ? 4 : 0) | (s3 ? 2 : 0) | (s4 ? 1 : 0);
  switch (key) {
    case 0b0000: return Path::None;
    case 0b0001: return Path::S0_S4;
    case 0b0100: return Path::S2;
    case 0b0101: return Path::S2_S4;
    case 0b0110: return Path::S2_S3;
    case 0b0111: return Path::S2_S3_S4;
    case 0b1000: return Path::S1;
    case 0b1001: return Path::S1_S4;
    case 0b1100: return Path::S1_S2;
    case 0b1101: return Path::S1_S2_S4;
    case 0b1110: return Path::S1_S2_S3;
    case 0b1111: return Path::S1_S2_S3_S4;
    default: throw InvalidProfile("unreachable stage combination");
  }
}

/// Stage membership of one user plus the derived path label.
///   s1: sent a keyword message before the event and before their own
///       infection (never satisfiable by seeds, infected at t0);
///   s2: infected before event_start;
///   s3: s2 and engaged in [infection_ts, event_start);
///   s4: visited the event in [event_start, event_end].
struct StageProfile {
  UserId user;
  bool s1 = false;
  bool s2 = false;
  bool s3 = false;
  bool s4 = false;
  Path path = Path::None;

  static StageProfile make(UserId user, bool s1, bool s2, bool s3, bool s4) {
    return StageProfile{std::move(user), s1, s2, s3, s4, derive_path(s1, s2, s3, s4)};
  }
};

}  // namespace funnelcast

#endif  // FUNNELCAST_MODEL_HPP
