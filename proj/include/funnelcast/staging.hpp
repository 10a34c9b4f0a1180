// SPDX-License-Identifier: Apache-2.0
//
// Stage classification and transition-probability estimation over the
// four-stage participation funnel (attention, infection, engagement,
// action), including the shortcut edges that bypass intermediate stages.
#ifndef FUNNELCAST_STAGING_HPP
#define FUNNELCAST_STAGING_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>

#include "funnelcast/model.hpp"

namespace funnelcast {

/// An exact integer ratio. Probabilities are kept as numerator/denominator
/// and only formatted as decimals at output; a zero denominator means the
/// edge is undefined (not zero).
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  bool defined() const { return den > 0; }
  double value() const { return defined() ? static_cast<double>(num) / static_cast<double>(den)
                                          : std::nan(""); }
  bool operator==(const Ratio&) const = default;
};

inline std::string format_ratio(const Ratio& r, int decimals = 6) {
  if (!r.defined()) return "undefined";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r.value());
  return buf;
}

inline constexpr std::array<const char*, 6> kEdgeOrder = {"p12", "p23", "p34",
                                                          "p14", "p24", "p04"};

/// Population counts and the six estimated transition/shortcut edges.
struct TransitionReport {
  std::int64_t n_total = 0;
  std::int64_t n_s1 = 0;
  std::int64_t n_s2 = 0;
  std::int64_t n_s3 = 0;
  std::int64_t n_s4 = 0;
  std::map<std::string, Ratio> edges;
};

/// Computes stage profiles for every user in the timeline map.
///
/// Predicates: s1 requires a keyword message sent in [t0, event_start)
/// strictly before the user's own infection (pre-infection attention);
/// s2 requires infection before event_start; s3 requires engagement in
/// [infection_ts, event_start) per the configured engagement definition;
/// s4 requires an event visit in [event_start, event_end]. Infections
/// during the event window do not set s2 here: path classification is a
/// statement about pre-event states.
inline std::map<UserId, StageProfile> classify(const std::map<UserId, UserTimeline>& timelines,
                                               const CampaignConfig& config) {
  std::map<UserId, StageProfile> profiles;
  const Timestamp es = config.event_start;
  const Timestamp ee = config.event_end;

  for (const auto& [user, tl] : timelines) {
    const auto inf = tl.infection_ts;
    bool s1 = false, s3 = false, s4 = false;
    const bool s2 = inf.has_value() && *inf < es;

    for (const auto& ev : tl.events) {
      if (ev.actor != user) continue;
      if (ev.is_message() && ev.keyword_hit.value_or(false)) {
        if (ev.ts >= config.t0 && ev.ts < es && (!inf || ev.ts < *inf)) s1 = true;
        if (s2 && ev.ts >= *inf && ev.ts < es) s3 = true;
      }
      if (s2 && config.engagement == EngagementDefinition::KeywordOrComponentActivity &&
          (ev.kind == EventKind::ComponentSend || ev.kind == EventKind::ComponentUse) &&
          ev.ts >= *inf && ev.ts < es) {
        s3 = true;
      }
      if (ev.kind == EventKind::EventVisit && ev.ts >= es && ev.ts <= ee) s4 = true;
    }
    profiles.emplace(user, StageProfile::make(user, s1, s2, s3, s4));
  }
  return profiles;
}

/// Estimates every funnel edge as an exact count ratio:
///   p12 = |S1∩S2| / |S1|          p14 = |S1∩¬S2∩S4| / |S1∩¬S2|
///   p23 = |S3| / |S2|             p24 = |S2∩¬S3∩S4| / |S2∩¬S3|
///   p34 = |S3∩S4| / |S3|          p04 = |¬S1∩¬S2∩S4| / |¬S1∩¬S2|
/// Edges with an empty base population are reported undefined.
inline TransitionReport estimate_transitions(const std::map<UserId, StageProfile>& profiles) {
  TransitionReport rep;
  std::int64_t s1s2 = 0, s3s4 = 0;
  std::int64_t s1_not2 = 0, s1_not2_s4 = 0;
  std::int64_t s2_not3 = 0, s2_not3_s4 = 0;
  std::int64_t not12 = 0, not12_s4 = 0;

  for (const auto& [user, p] : profiles) {
    (void)user;
    rep.n_total++;
    rep.n_s1 += p.s1;
    rep.n_s2 += p.s2;
    rep.n_s3 += p.s3;
    rep.n_s4 += p.s4;
    if (p.s1 && p.s2) s1s2++;
    if (p.s3 && p.s4) s3s4++;
    if (p.s1 && !p.s2) {
      s1_not2++;
      if (p.s4) s1_not2_s4++;
    }
    if (p.s2 && !p.s3) {
      s2_not3++;
      if (p.s4) s2_not3_s4++;
    }
    if (!p.s1 && !p.s2) {
      not12++;
      if (p.s4) not12_s4++;
    }
  }

  rep.edges["p12"] = Ratio{s1s2, rep.n_s1};
  rep.edges["p23"] = Ratio{rep.n_s3, rep.n_s2};
  rep.edges["p34"] = Ratio{s3s4, rep.n_s3};
  rep.edges["p14"] = Ratio{s1_not2_s4, s1_not2};
  rep.edges["p24"] = Ratio{s2_not3_s4, s2_not3};
  rep.edges["p04"] = Ratio{not12_s4, not12};
  return rep;
}

/// Counts users per path label. The counts partition the population.
inline std::map<Path, std::int64_t> path_census(const std::map<UserId, StageProfile>& profiles) {
  std::map<Path, std::int64_t> census;
  for (const auto& [user, p] : profiles) {
    (void)user;
    census[p.path]++;
  }
  return census;
}

// --- Output -----------------------------------------------------------------

inline std::string transitions_csv(const TransitionReport& rep, int decimals = 6) {
  std::string out = "edge,numerator,denominator,probability\n";
  for (const char* edge : kEdgeOrder) {
    const Ratio& r = rep.edges.at(edge);
    out += edge;
    out += ',' + std::to_string(r.num) + ',' + std::to_string(r.den) + ',';
    out += r.defined() ? format_ratio(r, decimals) : "";
    out += '\n';
  }
  return out;
}

inline std::string summary_csv(const TransitionReport& rep, int decimals = 6) {
  std::string out = "metric,value\n";
  out += "n_total," + std::to_string(rep.n_total) + '\n';
  out += "n_s1," + std::to_string(rep.n_s1) + '\n';
  out += "n_s2," + std::to_string(rep.n_s2) + '\n';
  out += "n_s3," + std::to_string(rep.n_s3) + '\n';
  out += "n_s4," + std::to_string(rep.n_s4) + '\n';
  for (const char* edge : kEdgeOrder) {
    const Ratio& r = rep.edges.at(edge);
    out += edge;
    out += ',';
    out += r.defined() ? format_ratio(r, decimals) : "undefined";
    out += '\n';
  }
  return out;
}

inline std::string paths_csv(const std::map<Path, std::int64_t>& census) {
  std::string out = "path,count\n";
  for (Path p : kAllPaths) {
    auto it = census.find(p);
    out += std::string(path_label(p)) + ',' +
           std::to_string(it == census.end() ? 0 : it->second) + '\n';
  }
  return out;
}

/// Stage diagram with every edge annotated "numerator/denominator = p".
inline std::string stages_dot(const TransitionReport& rep, int decimals = 6) {
  auto edge_label = [&](const char* name) {
    const Ratio& r = rep.edges.at(name);
    std::string label = std::to_string(r.num) + "/" + std::to_string(r.den);
    label += r.defined() ? " = " + format_ratio(r, decimals) : " (undefined)";
    return label;
  };
  std::string out = "digraph stages {\n  rankdir=LR;\n";
  out += "  S0 [label=\"S0\\n(no stage)\"];\n";
  out += "  S1 [label=\"S1\\nattention\"];\n";
  out += "  S2 [label=\"S2\\ninfection\"];\n";
  out += "  S3 [label=\"S3\\nengagement\"];\n";
  out += "  S4 [label=\"S4\\naction\"];\n";
  out += "  S1 -> S2 [label=\"" + edge_label("p12") + "\"];\n";
  out += "  S2 -> S3 [label=\"" + edge_label("p23") + "\"];\n";
  out += "  S3 -> S4 [label=\"" + edge_label("p34") + "\"];\n";
  out += "  S1 -> S4 [label=\"" + edge_label("p14") + "\"];\n";
  out += "  S2 -> S4 [label=\"" + edge_label("p24") + "\"];\n";
  out += "  S0 -> S4 [label=\"" + edge_label("p04") + "\"];\n";
  out += "}\n";
  return out;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_STAGING_HPP
