#include "mgrel/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "mgrel/errors.hpp"

namespace mgrel {

std::string_view to_string(SwitchKind kind) noexcept {
  switch (kind) {
    case SwitchKind::feeder_breaker: return "feeder_breaker";
    case SwitchKind::isolator: return "isolator";
    case SwitchKind::normally_open_tie: return "normally_open_tie";
  }
  return "unknown";
}

std::optional<SwitchKind> switch_kind_from_string(std::string_view text) noexcept {
  if (text == "feeder_breaker") return SwitchKind::feeder_breaker;
  if (text == "isolator") return SwitchKind::isolator;
  if (text == "normally_open_tie") return SwitchKind::normally_open_tie;
  return std::nullopt;
}

std::string_view to_string(EffectClass c) noexcept {
  switch (c) {
    case EffectClass::repair: return "repair";
    case EffectClass::switch_restore: return "switch";
    case EffectClass::none: return "none";
  }
  return "unknown";
}

const LoadPoint* NetworkModel::find_load_point(std::string_view id) const noexcept {
  for (const auto& lp : load_points) {
    if (lp.id == id) return &lp;
  }
  return nullptr;
}

bool NetworkModel::has_bus(std::string_view id) const noexcept {
  return find_load_point(id) != nullptr ||
         std::find(generation_buses.begin(), generation_buses.end(), id) != generation_buses.end();
}

std::uint64_t NetworkModel::total_customers() const noexcept {
  std::uint64_t n = 0;
  for (const auto& lp : load_points) n += lp.customers;
  return n;
}

double NetworkModel::total_load_kw() const noexcept {
  double total = 0.0;
  for (const auto& lp : load_points) total += lp.level_kw;
  return total;
}

const LoadPointContributions* ContributionTable::find(std::string_view load_point) const noexcept {
  for (const auto& row : rows) {
    if (row.load_point == load_point) return &row;
  }
  return nullptr;
}

namespace {

// Index view over a validated topology.
struct Tree {
  const FeederTopology* topo = nullptr;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> parent;  // npos for the root
  std::vector<std::vector<std::size_t>> children;
  std::size_t root = 0;
  std::optional<std::size_t> tie_section;
  double breaker_time = 0.0;
  double isolator_time = 0.0;
  double tie_time = 0.0;
  std::unordered_map<std::string, std::size_t> lp_section;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Boundary between a section and its parent can be opened.
  bool isolatable(std::size_t child) const {
    const auto& c = topo->sections[child];
    const auto& p = topo->sections[parent[child]];
    return c.isolator_upstream || p.isolator_downstream;
  }
};

Tree build_tree(const NetworkModel& network) {
  const auto* topo = std::get_if<FeederTopology>(&network.contributions);
  if (topo == nullptr) throw TopologyError("network is in aggregate mode; no feeder topology to analyze");
  if (topo->sections.empty()) throw TopologyError("topology has no sections");

  Tree tree;
  tree.topo = topo;
  const std::size_t n = topo->sections.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = topo->sections[i];
    if (s.id.empty()) throw TopologyError("section with empty id");
    if (!tree.index.emplace(s.id, i).second) throw TopologyError("duplicate section id '" + s.id + "'");
    if (!(s.reliability.failure_rate >= 0.0) || !(s.reliability.repair_time_h >= 0.0) ||
        !std::isfinite(s.reliability.failure_rate) || !std::isfinite(s.reliability.repair_time_h)) {
      throw TopologyError("section '" + s.id + "' has negative or non-finite reliability data");
    }
  }

  tree.parent.assign(n, Tree::npos);
  tree.children.assign(n, {});
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = topo->sections[i];
    if (s.parent.empty()) {
      tree.root = i;
      ++roots;
      continue;
    }
    auto it = tree.index.find(s.parent);
    if (it == tree.index.end()) {
      throw TopologyError("section '" + s.id + "' has unknown parent '" + s.parent + "'");
    }
    tree.parent[i] = it->second;
    tree.children[it->second].push_back(i);
  }
  if (roots != 1) throw TopologyError("topology must have exactly one root section, found " + std::to_string(roots));

  // Every section must hang off the root; anything unreached sits on a cycle.
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{tree.root};
  seen[tree.root] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (auto c : tree.children[s]) {
      if (!seen[c]) {
        seen[c] = true;
        ++reached;
        queue.push_back(c);
      }
    }
  }
  if (reached != n) throw TopologyError("section graph is not a tree rooted at the feeder breaker (cycle or unrooted section)");

  std::size_t breakers = 0;
  std::size_t ties = 0;
  std::size_t isolators = 0;
  for (const auto& sw : topo->switchgear) {
    if (!(sw.switching_time_h >= 0.0) || !std::isfinite(sw.switching_time_h)) {
      throw TopologyError("switchgear '" + sw.id + "' has negative or non-finite switching time");
    }
    switch (sw.kind) {
      case SwitchKind::feeder_breaker:
        ++breakers;
        if (sw.section != topo->sections[tree.root].id) {
          throw TopologyError("feeder breaker '" + sw.id + "' must sit on the root section '" +
                              topo->sections[tree.root].id + "'");
        }
        tree.breaker_time = sw.switching_time_h;
        break;
      case SwitchKind::normally_open_tie: {
        ++ties;
        auto it = tree.index.find(sw.section);
        if (it == tree.index.end()) throw TopologyError("tie switch '" + sw.id + "' references unknown section '" + sw.section + "'");
        tree.tie_section = it->second;
        tree.tie_time = sw.switching_time_h;
        break;
      }
      case SwitchKind::isolator:
        ++isolators;
        if (!sw.section.empty() && !tree.index.contains(sw.section)) {
          throw TopologyError("isolator '" + sw.id + "' references unknown section '" + sw.section + "'");
        }
        tree.isolator_time = std::max(tree.isolator_time, sw.switching_time_h);
        break;
    }
  }
  if (breakers != 1) throw TopologyError("topology must have exactly one feeder breaker, found " + std::to_string(breakers));
  if (ties > 1) throw TopologyError("topology may have at most one normally open tie, found " + std::to_string(ties));
  const bool any_isolator_flag = std::any_of(topo->sections.begin(), topo->sections.end(), [](const FeederSection& s) {
    return s.isolator_upstream || s.isolator_downstream;
  });
  if (any_isolator_flag && isolators == 0) {
    throw TopologyError("sections carry isolators but no isolator switchgear entry gives their switching time");
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& lp : topo->sections[i].load_points) {
      if (network.find_load_point(lp) == nullptr) {
        if (network.has_bus(lp)) continue;
        throw TopologyError("section '" + topo->sections[i].id + "' references unknown load point '" + lp + "'");
      }
      if (!tree.lp_section.emplace(lp, i).second) throw TopologyError("load point '" + lp + "' attached to more than one section");
    }
  }
  for (const auto& lp : network.load_points) {
    if (!tree.lp_section.contains(lp.id)) throw TopologyError("load point '" + lp.id + "' is not attached to any section");
  }
  return tree;
}

std::vector<FailureEffect> effects_for(const NetworkModel& network, const Tree& tree, std::size_t failed) {
  const std::size_t n = tree.parent.size();
  // Fault zone: everything reachable from the failed section without crossing
  // an isolatable boundary.
  std::vector<bool> in_zone(n, false);
  std::deque<std::size_t> queue{failed};
  in_zone[failed] = true;
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    if (tree.parent[s] != Tree::npos && !tree.isolatable(s) && !in_zone[tree.parent[s]]) {
      in_zone[tree.parent[s]] = true;
      queue.push_back(tree.parent[s]);
    }
    for (auto c : tree.children[s]) {
      if (!tree.isolatable(c) && !in_zone[c]) {
        in_zone[c] = true;
        queue.push_back(c);
      }
    }
  }

  // Label the healthy remainder by how it gets its supply back.
  enum class Supply { zone, breaker, tie, stranded };
  std::vector<Supply> supply(n, Supply::stranded);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_zone[i]) supply[i] = Supply::zone;
  }
  auto flood = [&](std::size_t start, Supply label) {
    std::deque<std::size_t> q{start};
    supply[start] = label;
    while (!q.empty()) {
      const auto s = q.front();
      q.pop_front();
      auto visit = [&](std::size_t t) {
        if (supply[t] == Supply::stranded) {
          supply[t] = label;
          q.push_back(t);
        }
      };
      if (tree.parent[s] != Tree::npos) visit(tree.parent[s]);
      for (auto c : tree.children[s]) visit(c);
    }
  };
  if (!in_zone[tree.root]) flood(tree.root, Supply::breaker);
  if (tree.tie_section && supply[*tree.tie_section] == Supply::stranded) flood(*tree.tie_section, Supply::tie);

  const double repair = tree.topo->sections[failed].reliability.repair_time_h;
  const double upstream_switching = std::max(tree.breaker_time, tree.isolator_time);
  const double tie_switching = std::max(upstream_switching, tree.tie_time);

  std::vector<FailureEffect> effects;
  effects.reserve(network.load_points.size());
  for (const auto& lp : network.load_points) {
    const auto sec = tree.lp_section.at(lp.id);
    switch (supply[sec]) {
      case Supply::zone:
      case Supply::stranded:
        effects.push_back({lp.id, EffectClass::repair, repair});
        break;
      case Supply::breaker:
        effects.push_back({lp.id, EffectClass::switch_restore, upstream_switching});
        break;
      case Supply::tie:
        effects.push_back({lp.id, EffectClass::switch_restore, tie_switching});
        break;
    }
  }
  return effects;
}

}  // namespace

void validate_topology(const NetworkModel& network) { (void)build_tree(network); }

std::vector<FailureEffect> analyze_failure_effects(const NetworkModel& network, std::string_view failed_section) {
  const Tree tree = build_tree(network);
  auto it = tree.index.find(std::string(failed_section));
  if (it == tree.index.end()) throw TopologyError("unknown section '" + std::string(failed_section) + "'");
  return effects_for(network, tree, it->second);
}

ContributionTable build_contribution_table(const NetworkModel& network) {
  ContributionTable table;
  table.rows.reserve(network.load_points.size());

  if (const auto* agg = std::get_if<AggregateContributions>(&network.contributions)) {
    for (const auto& lp : network.load_points) {
      LoadPointContributions row{lp.id, {}, 0.0, 0.0};
      auto it = agg->find(lp.id);
      if (it != agg->end()) {
        row.sum_lambda = it->second.sum_lambda;
        row.sum_lambda_r = it->second.sum_lambda_r;
        if (row.sum_lambda > 0.0) {
          row.pairs.push_back({"aggregate", row.sum_lambda, row.sum_lambda_r / row.sum_lambda});
        }
      }
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  const Tree tree = build_tree(network);
  for (const auto& lp : network.load_points) table.rows.push_back({lp.id, {}, 0.0, 0.0});
  for (std::size_t s = 0; s < tree.parent.size(); ++s) {
    const auto& section = tree.topo->sections[s];
    const auto effects = effects_for(network, tree, s);
    for (std::size_t i = 0; i < effects.size(); ++i) {
      if (effects[i].effect == EffectClass::none) continue;
      auto& row = table.rows[i];
      row.pairs.push_back({section.id, section.reliability.failure_rate, effects[i].duration_h});
      row.sum_lambda += section.reliability.failure_rate;
      row.sum_lambda_r += section.reliability.failure_rate * effects[i].duration_h;
    }
  }
  return table;
}

}  // namespace mgrel
