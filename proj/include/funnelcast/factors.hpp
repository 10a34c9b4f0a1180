// SPDX-License-Identifier: Apache-2.0
//
// Per-user activity factors over the campaign windows. Factor families:
//   af: attention-stage message ratios before the event / before infection
//   if: infection-stage component receive/send counts
//   ef: engagement-stage ratios after infection, before the event
//   rf: response-stage indicators and ratios during the event
#ifndef FUNNELCAST_FACTORS_HPP
#define FUNNELCAST_FACTORS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "funnelcast/model.hpp"

namespace funnelcast {

inline constexpr std::array<const char*, 13> kFactorNames = {
    "af11", "af12", "af13", "af14", "if21", "if22", "ef31",
    "ef32", "ef33", "rf1",  "rf2",  "rf3",  "rf4"};

/// The nine factors used for visitor/non-visitor comparison (the rf family
/// is excluded: rf1 is the group split itself and rf2..rf4 describe the
/// event period being predicted).
inline constexpr std::array<const char*, 9> kComparisonFactors = {
    "af11", "af12", "af13", "af14", "if21", "if22", "ef31", "ef32", "ef33"};

/// One user's factor values.
///
/// Ratios are std::nullopt when the factor does not apply to the user's
/// infection status or its denominator is zero; zero denominators
/// additionally carry a ZeroDenominator:<factor> flag. Count factors
/// (if21, if22) and the visit indicator (rf1) are always defined.
struct FactorVector {
  UserId user;
  std::optional<double> af11, af12, af13, af14;
  std::int64_t if21 = 0;
  std::int64_t if22 = 0;
  std::optional<double> ef31, ef32, ef33;
  bool rf1 = false;
  std::optional<double> rf2, rf3, rf4;
  std::set<std::string> flags;

  /// Numeric view used by the matrix assembly; rf1 maps to 0/1.
  std::optional<double> by_name(std::string_view name) const {
    if (name == "af11") return af11;
    if (name == "af12") return af12;
    if (name == "af13") return af13;
    if (name == "af14") return af14;
    if (name == "if21") return static_cast<double>(if21);
    if (name == "if22") return static_cast<double>(if22);
    if (name == "ef31") return ef31;
    if (name == "ef32") return ef32;
    if (name == "ef33") return ef33;
    if (name == "rf1") return rf1 ? 1.0 : 0.0;
    if (name == "rf2") return rf2;
    if (name == "rf3") return rf3;
    if (name == "rf4") return rf4;
    throw std::invalid_argument("unknown factor: " + std::string(name));
  }
};

/// Computes all factors for one user.
///
/// Windows: "before event" is [t0, event_start); for infected users the
/// pre-event period splits at the infection time into [t0, cut) and
/// [cut, event_start) with cut = min(infection_ts, event_start), so the
/// two halves always partition the pre-event window; the event period is
/// [event_start, event_end] inclusive on both ends. Received messages are
/// the private messages addressed to the user. Component receive/send
/// counts cover the whole campaign [t0, event_end].
inline FactorVector compute_factors(const UserTimeline& timeline, const StageProfile& profile,
                                    const CampaignConfig& config) {
  const Timestamp t0 = config.t0;
  const Timestamp es = config.event_start;
  const Timestamp ee = config.event_end;
  const bool infected = timeline.infection_ts.has_value();
  const Timestamp cut = infected ? std::min(*timeline.infection_ts, es) : es;

  std::int64_t sent_a = 0, sent_a_kw = 0;    // [t0, cut)
  std::int64_t sent_b = 0, sent_b_kw = 0;    // [cut, es)
  std::int64_t recv_a = 0, recv_a_kw = 0;
  std::int64_t recv_b = 0, recv_b_kw = 0;
  std::int64_t sent_ev = 0, sent_ev_kw = 0;  // [es, ee]
  std::int64_t uses_b = 0, uses_ev = 0;
  std::int64_t receipts = 0, sends = 0;

  for (const auto& ev : timeline.events) {
    if (ev.ts < t0 || ev.ts > ee) continue;
    const bool by_user = ev.actor == timeline.user;
    if (ev.is_message()) {
      const bool kw = ev.keyword_hit.value_or(false);
      if (by_user) {
        if (ev.ts < cut) {
          sent_a++;
          sent_a_kw += kw;
        } else if (ev.ts < es) {
          sent_b++;
          sent_b_kw += kw;
        } else {
          sent_ev++;
          sent_ev_kw += kw;
        }
      } else if (ev.recipient && *ev.recipient == timeline.user) {
        if (ev.ts < cut) {
          recv_a++;
          recv_a_kw += kw;
        } else if (ev.ts < es) {
          recv_b++;
          recv_b_kw += kw;
        }
      }
    } else if (ev.kind == EventKind::ComponentUse && by_user) {
      if (ev.ts >= cut && ev.ts < es) uses_b++;
      if (ev.ts >= es) uses_ev++;
    } else if (ev.kind == EventKind::ComponentSend) {
      if (by_user) sends++;
      if (ev.recipient && *ev.recipient == timeline.user) receipts++;
    }
  }

  FactorVector f;
  f.user = timeline.user;
  f.if21 = receipts;
  f.if22 = sends;
  f.rf1 = profile.s4;

  auto ratio = [&f](const char* name, std::int64_t num,
                    std::int64_t den) -> std::optional<double> {
    if (den == 0) {
      f.flags.insert(std::string("ZeroDenominator:") + name);
      return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };

  if (!infected) {
    f.af11 = ratio("af11", sent_a_kw, sent_a);
    f.af12 = ratio("af12", recv_a_kw, recv_a);
    f.rf3 = ratio("rf3", sent_ev_kw, sent_ev);
  } else {
    f.af13 = ratio("af13", recv_a_kw, recv_a);
    f.af14 = ratio("af14", sent_a_kw, sent_a);
    f.ef31 = ratio("ef31", sent_b_kw, sent_b);
    f.ef32 = ratio("ef32", recv_b_kw, recv_b);
    f.ef33 = ratio("ef33", uses_b, sent_b);
    f.rf2 = ratio("rf2", sent_ev_kw, sent_ev);
  }
  f.rf4 = ratio("rf4", uses_ev, sent_ev);
  return f;
}

enum class UndefinedPolicy { DropUndefined, ZeroFill };

class EmptyMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Users-by-factors numeric matrix for the statistics battery.
struct FactorMatrix {
  std::vector<UserId> users;
  std::vector<std::string> factor_names;
  std::vector<std::vector<double>> rows;       // rows[i][j]: user i, factor j
  std::size_t substitutions = 0;               // ZeroFill replacements made
};

/// Assembles the matrix under the chosen undefined-value policy:
/// DropUndefined removes users with any undefined requested factor,
/// ZeroFill substitutes 0 and counts the substitutions. Throws EmptyMatrix
/// when no users survive.
inline FactorMatrix factor_matrix(const std::vector<FactorVector>& vectors,
                                  std::span<const char* const> requested,
                                  UndefinedPolicy policy) {
  FactorMatrix m;
  for (const char* name : requested) m.factor_names.emplace_back(name);
  for (const auto& v : vectors) {
    std::vector<double> row;
    row.reserve(requested.size());
    bool drop = false;
    std::size_t subs = 0;
    for (const char* name : requested) {
      const auto value = v.by_name(name);
      if (value) {
        row.push_back(*value);
      } else if (policy == UndefinedPolicy::ZeroFill) {
        row.push_back(0.0);
        subs++;
      } else {
        drop = true;
        break;
      }
    }
    if (drop) continue;
    m.users.push_back(v.user);
    m.rows.push_back(std::move(row));
    m.substitutions += subs;
  }
  if (m.rows.empty()) throw EmptyMatrix("no users survive the factor policy");
  return m;
}

/// CSV export with one row per user. Undefined cells render as empty
/// strings unless zero_fill is set.
inline std::string factors_csv(const std::vector<FactorVector>& vectors, bool zero_fill,
                               int decimals = 6) {
  std::string out = "user";
  for (const char* name : kFactorNames) out += std::string(",") + name;
  out += '\n';
  char buf[64];
  for (const auto& v : vectors) {
    out += v.user;
    for (const char* name : kFactorNames) {
      out += ',';
      const auto value = v.by_name(name);
      if (value) {
        std::snprintf(buf, sizeof buf, "%.*f", decimals, *value);
        out += buf;
      } else if (zero_fill) {
        std::snprintf(buf, sizeof buf, "%.*f", decimals, 0.0);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_FACTORS_HPP
