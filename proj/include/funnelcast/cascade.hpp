// SPDX-License-Identifier: Apache-2.0
//
// Who-infected-whom forest reconstruction from component transfers, plus
// spread statistics (reach, depth, forwarding ratio).
#ifndef FUNNELCAST_CASCADE_HPP
#define FUNNELCAST_CASCADE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "funnelcast/model.hpp"
#include "funnelcast/staging.hpp"

namespace funnelcast {

struct CascadeEdge {
  ComponentId component;
  UserId sender;
  UserId receiver;
  Timestamp ts = 0;
  bool first_infection = false;  // the receiver's first receipt of any component
  bool tree_edge = false;        // the receiver's first receipt of this component
};

struct ComponentTree {
  ComponentId component;
  std::vector<std::size_t> edge_indices;  // into CascadeForest::edges
  std::map<UserId, int> depth;            // seeds at 0, children at parent+1
  std::set<UserId> receivers;
};

struct CascadeForest {
  std::vector<CascadeEdge> edges;                    // all transfers, multi-receipt kept
  std::map<ComponentId, ComponentTree> trees;
  std::map<UserId, std::size_t> first_infection_edge;  // user -> edge index
  std::set<UserId> receivers;  // users with at least one incoming transfer
  std::set<UserId> senders;    // users with at least one outgoing transfer
  std::vector<std::string> anomalies;  // senders without provable possession
};

/// Builds the forest from time-sorted records. Every transfer is kept
/// (receiving a second copy is meaningful activity); the earliest receipt
/// of a component is that component's tree edge for the receiver, and the
/// earliest receipt of any component is the user's first-infection edge.
/// Seeds possess every component from t0. Senders with no provable
/// possession at send time are recorded as anomalies, not dropped: real
/// logs may start mid-campaign.
inline CascadeForest build_forest(const std::vector<EventRecord>& records,
                                  const CampaignConfig& config) {
  CascadeForest forest;
  // first possession time per (user, component): receipt or seeding.
  std::map<std::pair<UserId, ComponentId>, Timestamp> possession;
  std::map<UserId, Timestamp> first_receipt_any;

  for (const auto& seed : config.seeds) {
    for (const auto& c : config.components) possession[{seed, c}] = config.t0;
    first_receipt_any[seed] = config.t0;  // seeded, so no receipt is a first infection
  }
  for (const auto& c : config.components) {
    auto& tree = forest.trees[c];
    tree.component = c;
    for (const auto& seed : config.seeds) tree.depth[seed] = 0;
  }

  for (const auto& r : records) {
    if (r.kind != EventKind::ComponentSend || !r.recipient || !r.component) continue;
    const ComponentId& comp = *r.component;
    auto& tree = forest.trees[comp];

    const auto sender_pos = possession.find({r.actor, comp});
    const bool sender_possesses = sender_pos != possession.end() && sender_pos->second <= r.ts;
    if (!sender_possesses) {
      forest.anomalies.push_back("sender " + r.actor + " had no copy of " + comp +
                                 " at ts " + std::to_string(r.ts));
      if (!tree.depth.count(r.actor)) tree.depth[r.actor] = 0;  // unknown provenance root
    }

    CascadeEdge edge{comp, r.actor, *r.recipient, r.ts, false, false};
    const std::size_t idx = forest.edges.size();

    auto [pos_it, first_of_component] = possession.try_emplace({*r.recipient, comp}, r.ts);
    (void)pos_it;
    if (first_of_component) {
      edge.tree_edge = true;
      tree.receivers.insert(*r.recipient);
      const auto parent_depth = tree.depth.find(r.actor);
      tree.depth[*r.recipient] = (parent_depth == tree.depth.end() ? 0 : parent_depth->second) + 1;
    }
    if (!first_receipt_any.count(*r.recipient)) {
      first_receipt_any[*r.recipient] = r.ts;
      edge.first_infection = true;
      forest.first_infection_edge[*r.recipient] = idx;
    }

    tree.edge_indices.push_back(idx);
    forest.receivers.insert(*r.recipient);
    forest.senders.insert(r.actor);
    forest.edges.push_back(std::move(edge));
  }
  return forest;
}

struct SpreadStats {
  std::map<ComponentId, std::int64_t> reach;  // seeds plus receivers, per component
  std::map<ComponentId, int> max_depth;
  Ratio forwarding_ratio;        // receivers who also send / receivers
  Ratio infected_attendee_rate;  // |S2 ∩ S4| / |S2|
};

/// Aggregates spread statistics; stage profiles supply the attendee join.
inline SpreadStats spread_stats(const CascadeForest& forest,
                                const std::map<UserId, StageProfile>& profiles) {
  SpreadStats stats;
  for (const auto& [comp, tree] : forest.trees) {
    std::set<UserId> nodes = tree.receivers;
    for (const auto& [user, d] : tree.depth) {
      if (d == 0) nodes.insert(user);  // seeds and provenance roots
    }
    stats.reach[comp] = static_cast<std::int64_t>(nodes.size());
    int deepest = 0;
    for (const auto& [user, d] : tree.depth) {
      (void)user;
      deepest = std::max(deepest, d);
    }
    stats.max_depth[comp] = deepest;
  }

  std::int64_t forwarding = 0;
  for (const auto& u : forest.receivers)
    if (forest.senders.count(u)) forwarding++;
  stats.forwarding_ratio = Ratio{forwarding, static_cast<std::int64_t>(forest.receivers.size())};

  std::int64_t infected = 0, infected_attending = 0;
  for (const auto& [user, p] : profiles) {
    (void)user;
    if (p.s2) {
      infected++;
      if (p.s4) infected_attending++;
    }
  }
  stats.infected_attendee_rate = Ratio{infected_attending, infected};
  return stats;
}

// --- Export ------------------------------------------------------------------

inline std::string cascade_edges_csv(const CascadeForest& forest) {
  std::string out = "component,sender,receiver,ts,is_first_infection\n";
  for (const auto& e : forest.edges) {
    out += e.component + ',' + e.sender + ',' + e.receiver + ',' + std::to_string(e.ts) + ',' +
           (e.first_infection ? "true" : "false") + '\n';
  }
  return out;
}

/// One DOT graph per component; tree edges solid, redundant receipts dashed.
inline std::string cascade_dot(const CascadeForest& forest, const ComponentId& component) {
  std::string out = "digraph cascade {\n  label=\"" + component + "\";\n";
  const auto it = forest.trees.find(component);
  if (it != forest.trees.end()) {
    for (const std::size_t idx : it->second.edge_indices) {
      const auto& e = forest.edges[idx];
      out += "  \"" + e.sender + "\" -> \"" + e.receiver + "\"";
      out += e.tree_edge ? ";\n" : " [style=dashed];\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_CASCADE_HPP
