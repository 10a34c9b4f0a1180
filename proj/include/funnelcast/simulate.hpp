// SPDX-License-Identifier: Apache-2.0
//
// Generative simulator for the four-stage participation model. It plays
// the model forward — seeded transfers spread components through a contact
// structure, users chat with configurable keyword propensity, attendance
// is drawn from the realized stage bucket — and returns both the event log
// and the ground-truth stage profiles, making it a statistical oracle for
// the estimation pipeline. Output is bit-identical for a given seed.
#ifndef FUNNELCAST_SIMULATE_HPP
#define FUNNELCAST_SIMULATE_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "funnelcast/model.hpp"
#include "funnelcast/rng.hpp"

namespace funnelcast {

constexpr Timestamp kDayMs = 86'400'000;
constexpr Timestamp kDefaultT0 = 1'000'000'000'000;

struct AttendanceProbs {
  double p04 = 0.022;  // no recorded stage
  double p14 = 0.12;   // attention without infection
  double p24 = 0.41;   // infection without engagement
  double p34 = 0.48;   // engagement
};

struct ContactModel {
  enum class Kind { UniformRandom, ConfiguredEdges };
  Kind kind = Kind::UniformRandom;
  double mean_degree = 8.0;  // contacts per activation (UniformRandom)
  std::string edges_file;    // whitespace-separated index pairs (ConfiguredEdges)
};

struct SimParams {
  std::int64_t n_users = 10'000;
  std::int64_t n_seeds = 16;
  int days = 5;  // pre-event days; the event occupies one further day
  ContactModel contact_model;
  double msg_rate = 2.0;                  // mean messages/user/day
  double keyword_propensity_base = 0.03;  // keyword chance per message
  double p_infect_on_contact = 0.7;
  double p_forward = 0.41;                // chance a receiver ever forwards
  double p_engage_after_infection = 0.47;
  AttendanceProbs attendance;
  std::uint64_t rng_seed = 1;

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n_users < 1) throw std::invalid_argument("n_users must be positive");
    if (n_seeds < 1 || n_seeds > n_users)
      throw std::invalid_argument("n_seeds must be in [1, n_users]");
    if (days < 1) throw std::invalid_argument("days must be positive");
    if (msg_rate < 0.0) throw std::invalid_argument("msg_rate must be non-negative");
    if (contact_model.mean_degree < 0.0)
      throw std::invalid_argument("mean_degree must be non-negative");
    if (!prob(keyword_propensity_base) || !prob(p_infect_on_contact) || !prob(p_forward) ||
        !prob(p_engage_after_infection) || !prob(attendance.p04) || !prob(attendance.p14) ||
        !prob(attendance.p24) || !prob(attendance.p34))
      throw std::invalid_argument("all probabilities must lie in [0, 1]");
  }
};

inline void from_json(const nlohmann::json& j, SimParams& p) {
  p = SimParams{};
  p.n_users = j.value("n_users", p.n_users);
  p.n_seeds = j.value("n_seeds", p.n_seeds);
  p.days = j.value("days", p.days);
  if (j.contains("contact_model")) {
    const auto& cm = j.at("contact_model");
    const auto type = cm.value("type", std::string("uniform_random"));
    if (type == "uniform_random") {
      p.contact_model.kind = ContactModel::Kind::UniformRandom;
    } else if (type == "configured_edges") {
      p.contact_model.kind = ContactModel::Kind::ConfiguredEdges;
      p.contact_model.edges_file = cm.at("file").get<std::string>();
    } else {
      throw std::invalid_argument("unknown contact model: " + type);
    }
    p.contact_model.mean_degree = cm.value("mean_degree", p.contact_model.mean_degree);
  }
  p.msg_rate = j.value("msg_rate", p.msg_rate);
  p.keyword_propensity_base = j.value("keyword_propensity_base", p.keyword_propensity_base);
  p.p_infect_on_contact = j.value("p_infect_on_contact", p.p_infect_on_contact);
  p.p_forward = j.value("p_forward", p.p_forward);
  p.p_engage_after_infection = j.value("p_engage_after_infection", p.p_engage_after_infection);
  if (j.contains("attendance")) {
    const auto& a = j.at("attendance");
    p.attendance.p04 = a.value("p04", p.attendance.p04);
    p.attendance.p14 = a.value("p14", p.attendance.p14);
    p.attendance.p24 = a.value("p24", p.attendance.p24);
    p.attendance.p34 = a.value("p34", p.attendance.p34);
  }
  p.rng_seed = j.value("rng_seed", p.rng_seed);
}

inline void to_json(nlohmann::json& j, const SimParams& p) {
  j = nlohmann::json{
      {"n_users", p.n_users},
      {"n_seeds", p.n_seeds},
      {"days", p.days},
      {"msg_rate", p.msg_rate},
      {"keyword_propensity_base", p.keyword_propensity_base},
      {"p_infect_on_contact", p.p_infect_on_contact},
      {"p_forward", p.p_forward},
      {"p_engage_after_infection", p.p_engage_after_infection},
      {"attendance",
       {{"p04", p.attendance.p04},
        {"p14", p.attendance.p14},
        {"p24", p.attendance.p24},
        {"p34", p.attendance.p34}}},
      {"rng_seed", p.rng_seed},
  };
  if (p.contact_model.kind == ContactModel::Kind::UniformRandom) {
    j["contact_model"] = {{"type", "uniform_random"},
                          {"mean_degree", p.contact_model.mean_degree}};
  } else {
    j["contact_model"] = {{"type", "configured_edges"},
                          {"file", p.contact_model.edges_file},
                          {"mean_degree", p.contact_model.mean_degree}};
  }
}

inline SimParams load_sim_params(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  SimParams p = j.get<SimParams>();
  p.validate();
  return p;
}

struct SimOutput {
  std::vector<EventRecord> events;  // sorted, valid against ingestion
  std::map<UserId, StageProfile> truth;
  std::vector<UserId> users;  // the full population (serves as a roster)
  CampaignConfig config;
};

namespace detail {

inline std::string sim_user_id(std::int64_t index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%0*lld", std::min(width, 19),
                static_cast<long long>(index + 1));
  return buf;
}

struct ScheduledSend {
  Timestamp ts;
  std::uint64_t seq;
  std::int64_t sender;
  std::int64_t target;
  std::size_t component;
  bool operator>(const ScheduledSend& o) const {
    return ts != o.ts ? ts > o.ts : seq > o.seq;
  }
};

}  // namespace detail

/// Runs the generative model. Phases: (1) component transmission as a
/// timestamped branching process over the pre-event days, (2) daily
/// message emission with keyword propensity boosted for engaged infected
/// users, (3) attendance drawn once per user from the realized stage
/// bucket. Transfer events carry even millisecond offsets and messages odd
/// ones, so a user's infection time never collides with their own message
/// timestamps and the classifier sees exactly the state the generator
/// realized. Every user draws its trait variables from a dedicated
/// substream, so changing one behavioural parameter perturbs no other
/// draw; with a fixed seed the output is byte-identical run to run.
inline SimOutput simulate(const SimParams& params) {
  params.validate();
  const std::int64_t n = params.n_users;
  const int width = std::max(4, static_cast<int>(std::to_string(n).size()));
  const std::vector<ComponentId> components = {"mask", "banner"};

  SimOutput out;
  out.config.keywords = {"protest"};
  out.config.components = {components.begin(), components.end()};
  out.config.t0 = kDefaultT0;
  out.config.event_start = kDefaultT0 + params.days * kDayMs;
  out.config.event_end = out.config.event_start + kDayMs;
  out.config.engagement = EngagementDefinition::KeywordOnly;
  const Timestamp t0 = out.config.t0;
  const Timestamp es = out.config.event_start;

  out.users.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) out.users.push_back(detail::sim_user_id(i, width));
  for (std::int64_t i = 0; i < params.n_seeds; ++i) out.config.seeds.insert(out.users[i]);

  // Optional fixed contact structure.
  std::vector<std::vector<std::int64_t>> neighbors;
  if (params.contact_model.kind == ContactModel::Kind::ConfiguredEdges) {
    neighbors.assign(n, {});
    std::ifstream in(params.contact_model.edges_file);
    if (!in) throw std::invalid_argument("cannot open edges file: " + params.contact_model.edges_file);
    std::int64_t a, b;
    while (in >> a >> b) {
      if (a < 0 || b < 0 || a >= n || b >= n || a == b) continue;
      neighbors[a].push_back(b);
      neighbors[b].push_back(a);
    }
  }

  const RandomStream root(mix64(params.rng_seed));
  auto user_stream = [&](std::int64_t u, std::uint64_t purpose) {
    return root.substream(static_cast<std::uint64_t>(u)).substream(purpose);
  };

  // Trait draws, one lane per user, fixed order.
  std::vector<char> willing(n), engaged_trait(n);
  std::vector<double> attend_u01(n);
  for (std::int64_t u = 0; u < n; ++u) {
    RandomStream s = user_stream(u, 0);
    willing[u] = s.bernoulli(params.p_forward) ? 1 : 0;
    engaged_trait[u] = s.bernoulli(params.p_engage_after_infection) ? 1 : 0;
    attend_u01[u] = s.uniform01();
  }
  for (std::int64_t i = 0; i < params.n_seeds; ++i) willing[i] = 1;  // campaign sources

  std::vector<Timestamp> infection_ts(n, -1);
  std::vector<std::size_t> user_component(n, 0);

  // --- Phase 1: transmission ------------------------------------------------
  std::priority_queue<detail::ScheduledSend, std::vector<detail::ScheduledSend>, std::greater<>>
      queue;
  std::uint64_t seq = 0;

  auto schedule_forwards = [&](std::int64_t u, Timestamp activation) {
    if (!willing[u]) return;
    RandomStream contacts = user_stream(u, 1);
    std::vector<std::int64_t> targets;
    if (params.contact_model.kind == ContactModel::Kind::ConfiguredEdges) {
      targets = neighbors[u];
    } else {
      const int count = std::max(1, contacts.poisson(params.contact_model.mean_degree));
      for (int i = 0; i < count && n > 1; ++i) {
        std::int64_t t = static_cast<std::int64_t>(contacts.uniform_below(n));
        while (t == u) t = static_cast<std::int64_t>(contacts.uniform_below(n));
        targets.push_back(t);
      }
    }
    for (const std::int64_t target : targets) {
      if (!contacts.bernoulli(params.p_infect_on_contact)) continue;
      // 2h..30h forwarding latency, clamped inside the pre-event window.
      Timestamp delay = contacts.uniform_range(7'200'000, 108'000'000) & ~Timestamp{1};
      const Timestamp room = ((es - activation) * 9 / 10) & ~Timestamp{1};
      delay = std::max<Timestamp>(2, std::min(delay, room));
      const Timestamp ts = activation + delay;
      if (ts >= es) continue;
      queue.push({ts, seq++, u, target, user_component[u]});
    }
  };

  for (std::int64_t i = 0; i < params.n_seeds; ++i) {
    infection_ts[i] = t0;
    user_component[i] = static_cast<std::size_t>(i) % components.size();
    out.events.push_back(EventRecord{t0, out.users[i], EventKind::ComponentUse, std::nullopt,
                                     components[user_component[i]], std::nullopt, std::nullopt});
    schedule_forwards(i, t0);
  }

  while (!queue.empty()) {
    const auto send = queue.top();
    queue.pop();
    out.events.push_back(EventRecord{send.ts, out.users[send.sender], EventKind::ComponentSend,
                                     out.users[send.target], components[send.component],
                                     std::nullopt, std::nullopt});
    if (infection_ts[send.target] < 0) {
      infection_ts[send.target] = send.ts;
      user_component[send.target] = send.component;
      schedule_forwards(send.target, send.ts);
    }
  }

  // --- Phase 2: messages ------------------------------------------------------
  const double boosted =
      std::max(0.25, std::min(1.0, 8.0 * params.keyword_propensity_base));
  std::vector<char> s1(n, 0), s3(n, 0);
  for (std::int64_t u = 0; u < n; ++u) {
    const Timestamp inf = infection_ts[u];
    for (int d = 0; d <= params.days; ++d) {
      RandomStream msgs = user_stream(u, 100 + static_cast<std::uint64_t>(d));
      const int count = msgs.poisson(params.msg_rate);
      const Timestamp day_start = t0 + static_cast<Timestamp>(d) * kDayMs;
      for (int i = 0; i < count; ++i) {
        const Timestamp ts = day_start + (static_cast<Timestamp>(msgs.uniform_below(kDayMs)) | 1);
        const bool is_private = msgs.bernoulli(0.2) && n > 1;
        std::optional<UserId> recipient;
        if (is_private) {
          std::int64_t t = static_cast<std::int64_t>(msgs.uniform_below(n));
          while (t == u) t = static_cast<std::int64_t>(msgs.uniform_below(n));
          recipient = out.users[t];
        }
        const double u01 = msgs.uniform01();
        const bool post_infection = inf >= 0 && ts >= inf;
        const double propensity = (post_infection && engaged_trait[u])
                                      ? boosted
                                      : params.keyword_propensity_base;
        const bool kw = u01 < propensity;
        out.events.push_back(EventRecord{
            ts, out.users[u], is_private ? EventKind::PrivateMessage : EventKind::PublicMessage,
            recipient, std::nullopt, std::nullopt, kw});
        if (kw && ts < es) {
          if (inf < 0 || ts < inf) s1[u] = 1;
          if (inf >= 0 && inf < es && ts >= inf) s3[u] = 1;
        }
      }
    }
  }

  // --- Phase 3: attendance ------------------------------------------------------
  for (std::int64_t u = 0; u < n; ++u) {
    const bool is_s2 = infection_ts[u] >= 0 && infection_ts[u] < es;
    const bool is_s3 = is_s2 && s3[u];
    const double p = is_s3 ? params.attendance.p34
                   : is_s2 ? params.attendance.p24
                   : s1[u] ? params.attendance.p14
                           : params.attendance.p04;
    const bool attend = attend_u01[u] < p;
    if (attend) {
      RandomStream visits = user_stream(u, 3);
      const Timestamp ts = es + (static_cast<Timestamp>(visits.uniform_below(kDayMs)) & ~Timestamp{1});
      out.events.push_back(EventRecord{ts, out.users[u], EventKind::EventVisit, std::nullopt,
                                       std::nullopt, std::nullopt, std::nullopt});
    }
    out.truth.emplace(out.users[u],
                      StageProfile::make(out.users[u], s1[u] != 0, is_s2, is_s3, attend));
  }

  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.ts < b.ts; });
  return out;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_SIMULATE_HPP
