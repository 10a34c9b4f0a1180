// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "funnelcast/rng.hpp"
#include "funnelcast/staging.hpp"

using namespace funnelcast;

namespace {

CampaignConfig small_config(EngagementDefinition engagement = EngagementDefinition::KeywordOnly) {
  CampaignConfig c;
  c.keywords = {"protest"};
  c.components = {"mask"};
  c.seeds = {"seed"};
  c.t0 = 0;
  c.event_start = 1000;
  c.event_end = 2000;
  c.engagement = engagement;
  return c;
}

EventRecord kw_message(const UserId& actor, Timestamp ts) {
  EventRecord r;
  r.ts = ts;
  r.actor = actor;
  r.kind = EventKind::PublicMessage;
  r.keyword_hit = true;
  return r;
}

EventRecord visit(const UserId& actor, Timestamp ts) {
  EventRecord r;
  r.ts = ts;
  r.actor = actor;
  r.kind = EventKind::EventVisit;
  return r;
}

std::map<UserId, StageProfile> random_profiles(RandomStream& rng, int count) {
  std::map<UserId, StageProfile> profiles;
  for (int i = 0; i < count; ++i) {
    const bool s2 = rng.bernoulli(0.4);
    const bool s1 = rng.bernoulli(0.5);
    const bool s3 = s2 && rng.bernoulli(0.5);
    const bool s4 = rng.bernoulli(0.3);
    const UserId user = "u" + std::to_string(i);
    profiles.emplace(user, StageProfile::make(user, s1, s2, s3, s4));
  }
  return profiles;
}

}  // namespace

TEST_CASE("classify applies the stage predicates") {
  const auto config = small_config();

  SECTION("keyword sender, never infected, attends") {
    UserTimeline tl;
    tl.user = "a";
    tl.events = {kw_message("a", 100), visit("a", 1500)};
    const auto profiles = classify({{"a", tl}}, config);
    const auto& p = profiles.at("a");
    CHECK(p.s1);
    CHECK_FALSE(p.s2);
    CHECK_FALSE(p.s3);
    CHECK(p.s4);
    CHECK(path_label(p.path) == "S1→S4");
  }

  SECTION("seed keyword sends are post-infection: engagement, not attention") {
    UserTimeline tl;
    tl.user = "seed";
    tl.infection_ts = 0;
    tl.events = {kw_message("seed", 100), visit("seed", 1500)};
    const auto profiles = classify({{"seed", tl}}, config);
    const auto& p = profiles.at("seed");
    CHECK_FALSE(p.s1);
    CHECK(p.s2);
    CHECK(p.s3);
    CHECK(p.s4);
    CHECK(path_label(p.path) == "S2→S3→S4");
  }

  SECTION("empty timeline yields the all-false profile") {
    UserTimeline tl;
    tl.user = "idle";
    const auto profiles = classify({{"idle", tl}}, config);
    CHECK(path_label(profiles.at("idle").path) == "None");
  }

  SECTION("keyword send after infection is engagement only") {
    UserTimeline tl;
    tl.user = "b";
    tl.infection_ts = 200;
    tl.events = {kw_message("b", 500)};
    const auto profiles = classify({{"b", tl}}, config);
    const auto& p = profiles.at("b");
    CHECK_FALSE(p.s1);
    CHECK(p.s2);
    CHECK(p.s3);
  }

  SECTION("infection during the event window does not set s2") {
    UserTimeline tl;
    tl.user = "c";
    tl.infection_ts = 1500;
    tl.events = {kw_message("c", 100)};
    const auto profiles = classify({{"c", tl}}, config);
    const auto& p = profiles.at("c");
    CHECK(p.s1);
    CHECK_FALSE(p.s2);
  }

  SECTION("component activity engages only under the extended definition") {
    UserTimeline tl;
    tl.user = "d";
    tl.infection_ts = 200;
    EventRecord use;
    use.ts = 300;
    use.actor = "d";
    use.kind = EventKind::ComponentUse;
    use.component = "mask";
    tl.events = {use};
    CHECK_FALSE(classify({{"d", tl}}, small_config()).at("d").s3);
    CHECK(classify({{"d", tl}}, small_config(EngagementDefinition::KeywordOrComponentActivity))
              .at("d")
              .s3);
  }
}

TEST_CASE("degenerate population: everyone attends, nobody infected or chatting") {
  std::map<UserId, StageProfile> profiles;
  for (int i = 0; i < 7; ++i) {
    const UserId user = "u" + std::to_string(i);
    profiles.emplace(user, StageProfile::make(user, false, false, false, true));
  }
  const auto report = estimate_transitions(profiles);
  CHECK(report.edges.at("p04") == Ratio{7, 7});
  CHECK(report.edges.at("p04").value() == 1.0);
  for (const char* edge : {"p12", "p23", "p34", "p14", "p24"}) {
    CHECK_FALSE(report.edges.at(edge).defined());
  }
}

TEST_CASE("path census partitions the population") {
  RandomStream rng(11);
  for (int round = 0; round < 20; ++round) {
    const auto profiles = random_profiles(rng, 500);
    const auto census = path_census(profiles);

    // Independent recount straight off the profile list.
    std::map<Path, std::int64_t> recount;
    std::int64_t total = 0;
    for (const auto& [user, p] : profiles) {
      (void)user;
      recount[derive_path(p.s1, p.s2, p.s3, p.s4)]++;
      total++;
    }
    CHECK(census == recount);
    std::int64_t sum = 0;
    for (const auto& [path, count] : census) {
      (void)path;
      sum += count;
    }
    CHECK(sum == total);
  }
}

TEST_CASE("funnel arithmetic and the attendee identity") {
  RandomStream rng(23);
  for (int round = 0; round < 20; ++round) {
    const auto profiles = random_profiles(rng, 800);
    const auto report = estimate_transitions(profiles);

    CHECK(report.edges.at("p12").num <= report.n_s2);
    CHECK(report.n_s3 <= report.n_s2);
    CHECK(report.edges.at("p34").num <= report.n_s3);
    for (const char* edge : kEdgeOrder) {
      const Ratio& r = report.edges.at(edge);
      CHECK(r.num <= r.den);
      CHECK(r.den <= report.n_total);
    }

    // The four attendee numerators partition S4: engagement, infection
    // without engagement, attention without infection, no stage.
    const std::int64_t parts = report.edges.at("p34").num + report.edges.at("p24").num +
                               report.edges.at("p14").num + report.edges.at("p04").num;
    CHECK(parts == report.n_s4);
  }
}

TEST_CASE("estimate_transitions handles the empty population") {
  const auto report = estimate_transitions({});
  CHECK(report.n_total == 0);
  for (const char* edge : kEdgeOrder) CHECK_FALSE(report.edges.at(edge).defined());
  CHECK(path_census({}).empty());
}

TEST_CASE("report rendering is stable") {
  std::map<UserId, StageProfile> profiles;
  profiles.emplace("a", StageProfile::make("a", true, true, true, true));
  profiles.emplace("b", StageProfile::make("b", false, false, false, false));
  const auto report = estimate_transitions(profiles);
  const auto csv = transitions_csv(report);
  CHECK(csv.find("edge,numerator,denominator,probability\n") == 0);
  CHECK(csv.find("p12,1,1,1.000000") != std::string::npos);
  CHECK(csv.find("p04,0,1,0.000000") != std::string::npos);
  const auto dot = stages_dot(report);
  CHECK(dot.find("S1 -> S2 [label=\"1/1 = 1.000000\"]") != std::string::npos);
  CHECK(dot.find("digraph stages") != std::string::npos);
  const auto summary = summary_csv(report);
  CHECK(summary.find("n_total,2\n") != std::string::npos);
}
