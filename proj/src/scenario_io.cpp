#include "mgrel/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mgrel/errors.hpp"

namespace mgrel {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(ConfigErrorKind kind, const std::string& path, const std::string& reason) {
  throw ConfigError(kind, path, reason);
}

// Read-only cursor into the document that remembers its JSON path.
class Node {
 public:
  Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *value_; }

  Node object(std::initializer_list<std::string_view> allowed) const {
    if (!value_->is_object()) fail(ConfigErrorKind::schema, path_, "expected an object");
    for (const auto& item : value_->items()) {
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
        fail(ConfigErrorKind::schema, child_path(item.key()), "unknown key");
      }
    }
    return *this;
  }

  Node at(std::string_view key) const {
    auto it = value_->find(key);
    if (it == value_->end()) fail(ConfigErrorKind::schema, child_path(key), "required key is missing");
    return Node(*it, child_path(key));
  }

  std::optional<Node> maybe(std::string_view key) const {
    auto it = value_->find(key);
    if (it == value_->end()) return std::nullopt;
    return Node(*it, child_path(key));
  }

  std::vector<Node> array() const {
    if (!value_->is_array()) fail(ConfigErrorKind::schema, path_, "expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_->size(); ++i) {
      out.emplace_back((*value_)[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  double number() const {
    if (!value_->is_number()) fail(ConfigErrorKind::schema, path_, "expected a number");
    const double x = value_->get<double>();
    if (!std::isfinite(x)) fail(ConfigErrorKind::constraint, path_, "must be finite");
    return x;
  }

  double nonnegative() const {
    const double x = number();
    if (x < 0.0) fail(ConfigErrorKind::constraint, path_, "must be >= 0");
    return x;
  }

  double positive() const {
    const double x = number();
    if (!(x > 0.0)) fail(ConfigErrorKind::constraint, path_, "must be > 0");
    return x;
  }

  double probability() const {
    const double x = number();
    if (!(x >= 0.0 && x <= 1.0)) fail(ConfigErrorKind::constraint, path_, "must lie in [0, 1]");
    return x;
  }

  std::uint64_t unsigned_integer() const {
    if (value_->is_number_unsigned()) return value_->get<std::uint64_t>();
    if (value_->is_number_integer()) fail(ConfigErrorKind::constraint, path_, "must be >= 0");
    fail(ConfigErrorKind::schema, path_, "expected a non-negative integer");
  }

  std::string string() const {
    if (!value_->is_string()) fail(ConfigErrorKind::schema, path_, "expected a string");
    return value_->get<std::string>();
  }

  std::string identifier() const {
    auto s = string();
    if (s.empty()) fail(ConfigErrorKind::constraint, path_, "must not be empty");
    return s;
  }

  bool boolean() const {
    if (!value_->is_boolean()) fail(ConfigErrorKind::schema, path_, "expected true or false");
    return value_->get<bool>();
  }

  std::vector<std::string> identifiers() const {
    std::vector<std::string> out;
    for (const auto& n : array()) out.push_back(n.identifier());
    return out;
  }

 private:
  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* value_;
  std::string path_;
};

template <typename F>
void as_constraint(const std::string& path, const std::string& who, F&& check) {
  try {
    check();
  } catch (const DomainError& e) {
    fail(ConfigErrorKind::constraint, path, who + ": " + e.what());
  }
}

WeibullParams parse_region(const Node& n) {
  n.object({"region_id", "scale_c_m_s", "shape_k"});
  WeibullParams p;
  p.region_id = n.at("region_id").identifier();
  p.scale_c = n.at("scale_c_m_s").positive();
  p.shape_k = n.at("shape_k").positive();
  return p;
}

void parse_distributions(const Node& n, ResourceParams& out) {
  n.object({"wind_regions", "irradiance"});
  std::set<std::string> seen;
  for (const auto& r : n.at("wind_regions").array()) {
    auto p = parse_region(r);
    if (!seen.insert(p.region_id).second) fail(ConfigErrorKind::constraint, r.path(), "duplicate region '" + p.region_id + "'");
    out.wind_regions.push_back(std::move(p));
  }
  const auto irr = n.at("irradiance").object({"alpha", "beta", "scale_gmax_w_m2", "draw", "inverse_tolerance"});
  out.irradiance.alpha = irr.at("alpha").positive();
  out.irradiance.beta = irr.at("beta").positive();
  if (auto g = irr.maybe("scale_gmax_w_m2")) out.irradiance.scale_gmax = g->positive();
  if (auto d = irr.maybe("draw")) {
    const auto s = d->string();
    if (s == "shared") {
      out.irradiance_draw = IrradianceDraw::shared;
    } else if (s == "independent") {
      out.irradiance_draw = IrradianceDraw::independent;
    } else {
      fail(ConfigErrorKind::schema, d->path(), "expected \"shared\" or \"independent\"");
    }
  }
  if (auto t = irr.maybe("inverse_tolerance")) out.inverse_tolerance = t->positive();
}

void parse_fleet(const Node& n, Fleet& out) {
  n.object({"turbines", "pv_arrays"});
  for (const auto& t : n.at("turbines").array()) {
    t.object({"id", "location", "region_id", "p_rated_kw", "v_rated_m_s", "v_cut_in_m_s", "v_cut_out_m_s"});
    WindUnit u;
    u.id = t.at("id").identifier();
    u.location = t.at("location").identifier();
    u.spec.region_id = t.at("region_id").identifier();
    u.spec.p_rated = t.at("p_rated_kw").number();
    u.spec.v_rated = t.at("v_rated_m_s").number();
    u.spec.v_cut_in = t.at("v_cut_in_m_s").number();
    u.spec.v_cut_out = t.at("v_cut_out_m_s").number();
    as_constraint(t.path(), "turbine '" + u.id + "'", [&] { u.spec.validate(); });
    out.turbines.push_back(std::move(u));
  }
  for (const auto& p : n.at("pv_arrays").array()) {
    p.object({"id", "location", "p_sn_kw", "g_std_w_m2", "r_c_w_m2"});
    PvUnit u;
    u.id = p.at("id").identifier();
    u.location = p.at("location").identifier();
    u.spec.p_sn = p.at("p_sn_kw").number();
    if (auto g = p.maybe("g_std_w_m2")) u.spec.g_std = g->number();
    if (auto r = p.maybe("r_c_w_m2")) u.spec.r_c = r->number();
    as_constraint(p.path(), "PV array '" + u.id + "'", [&] { u.spec.validate(); });
    out.pv_arrays.push_back(std::move(u));
  }
}

std::vector<LoadPoint> parse_loads(const Node& n) {
  std::vector<LoadPoint> out;
  std::set<std::string> ids;
  std::set<std::int64_t> ranks;
  for (const auto& l : n.array()) {
    l.object({"id", "level_kw", "customers", "priority", "class"});
    LoadPoint lp;
    lp.id = l.at("id").identifier();
    if (!ids.insert(lp.id).second) fail(ConfigErrorKind::constraint, l.path() + ".id", "duplicate load point '" + lp.id + "'");
    lp.level_kw = l.at("level_kw").nonnegative();
    const auto customers = l.at("customers").unsigned_integer();
    if (customers > 0xffffffffULL) fail(ConfigErrorKind::constraint, l.path() + ".customers", "customer count too large");
    lp.customers = static_cast<std::uint32_t>(customers);
    const auto rank = l.at("priority").unsigned_integer();
    if (rank < 1 || rank > 1'000'000) fail(ConfigErrorKind::constraint, l.path() + ".priority", "must be a rank >= 1");
    if (!ranks.insert(static_cast<std::int64_t>(rank)).second) {
      fail(ConfigErrorKind::constraint, l.path() + ".priority", "priority rank " + std::to_string(rank) + " is used twice");
    }
    lp.priority_rank = static_cast<int>(rank);
    lp.customer_class = l.at("class").string();
    out.push_back(std::move(lp));
  }
  return out;
}

void parse_network(const Node& n, NetworkModel& net) {
  const auto mode = n.at("mode").string();
  if (mode == "aggregate") {
    n.object({"mode", "generation_buses", "contributions"});
  } else if (mode == "topology") {
    n.object({"mode", "generation_buses", "sections", "switchgear"});
  } else {
    fail(ConfigErrorKind::schema, n.path() + ".mode", "expected \"aggregate\" or \"topology\"");
  }
  net.generation_buses = n.at("generation_buses").identifiers();
  for (std::size_t i = 0; i < net.generation_buses.size(); ++i) {
    const auto& bus = net.generation_buses[i];
    const auto path = n.path() + ".generation_buses[" + std::to_string(i) + "]";
    if (net.find_load_point(bus) != nullptr) fail(ConfigErrorKind::constraint, path, "'" + bus + "' is already a load point");
    if (std::count(net.generation_buses.begin(), net.generation_buses.end(), bus) > 1) {
      fail(ConfigErrorKind::constraint, path, "duplicate bus '" + bus + "'");
    }
  }

  if (mode == "aggregate") {
    AggregateContributions agg;
    for (const auto& c : n.at("contributions").array()) {
      c.object({"load_point", "sum_lambda_per_yr", "sum_lambda_r_h_per_yr"});
      const auto id = c.at("load_point").identifier();
      if (net.find_load_point(id) == nullptr) {
        fail(ConfigErrorKind::dangling_reference, c.path() + ".load_point", "unknown load point '" + id + "'");
      }
      AggregateContribution a{c.at("sum_lambda_per_yr").nonnegative(), c.at("sum_lambda_r_h_per_yr").nonnegative()};
      if (a.sum_lambda == 0.0 && a.sum_lambda_r > 0.0) {
        fail(ConfigErrorKind::constraint, c.path(), "unavailability without failures");
      }
      if (!agg.emplace(id, a).second) fail(ConfigErrorKind::constraint, c.path(), "duplicate entry for '" + id + "'");
    }
    for (const auto& lp : net.load_points) {
      if (!agg.contains(lp.id)) {
        fail(ConfigErrorKind::dangling_reference, n.path() + ".contributions", "no entry for load point '" + lp.id + "'");
      }
    }
    net.contributions = std::move(agg);
    return;
  }

  FeederTopology topo;
  std::set<std::string> section_ids;
  const auto sections = n.at("sections").array();
  for (const auto& s : sections) {
    s.object({"id", "failure_rate_per_yr", "repair_time_h", "parent", "isolator_upstream", "isolator_downstream", "buses"});
    FeederSection sec;
    sec.id = s.at("id").identifier();
    if (!section_ids.insert(sec.id).second) fail(ConfigErrorKind::constraint, s.path() + ".id", "duplicate section '" + sec.id + "'");
    sec.reliability.failure_rate = s.at("failure_rate_per_yr").nonnegative();
    sec.reliability.repair_time_h = s.at("repair_time_h").nonnegative();
    sec.parent = s.at("parent").string();
    sec.isolator_upstream = s.at("isolator_upstream").boolean();
    sec.isolator_downstream = s.at("isolator_downstream").boolean();
    sec.load_points = s.at("buses").identifiers();
    topo.sections.push_back(std::move(sec));
  }
  for (std::size_t i = 0; i < topo.sections.size(); ++i) {
    const auto& sec = topo.sections[i];
    if (!sec.parent.empty() && !section_ids.contains(sec.parent)) {
      fail(ConfigErrorKind::dangling_reference, sections[i].path() + ".parent", "unknown section '" + sec.parent + "'");
    }
    for (std::size_t k = 0; k < sec.load_points.size(); ++k) {
      if (!net.has_bus(sec.load_points[k])) {
        fail(ConfigErrorKind::dangling_reference, sections[i].path() + ".buses[" + std::to_string(k) + "]",
             "unknown bus '" + sec.load_points[k] + "'");
      }
    }
  }
  for (const auto& w : n.at("switchgear").array()) {
    w.object({"id", "kind", "switching_time_h", "section"});
    Switchgear sw;
    sw.id = w.at("id").identifier();
    const auto kind = switch_kind_from_string(w.at("kind").string());
    if (!kind) fail(ConfigErrorKind::schema, w.path() + ".kind", "expected feeder_breaker, isolator or normally_open_tie");
    sw.kind = *kind;
    sw.switching_time_h = w.at("switching_time_h").nonnegative();
    if (auto sec = w.maybe("section")) {
      sw.section = sec->string();
      if (!sw.section.empty() && !section_ids.contains(sw.section)) {
        fail(ConfigErrorKind::dangling_reference, sec->path(), "unknown section '" + sw.section + "'");
      }
    }
    topo.switchgear.push_back(std::move(sw));
  }
  net.contributions = std::move(topo);
  try {
    validate_topology(net);
  } catch (const TopologyError& e) {
    fail(ConfigErrorKind::constraint, n.path(), e.what());
  }
}

DispatchPolicy parse_dispatch(const Node& n) {
  const auto s = n.string();
  if (s == "blocking") return DispatchPolicy::blocking;
  if (s == "serve_if_fits") return DispatchPolicy::serve_if_fits;
  fail(ConfigErrorKind::schema, n.path(), "expected \"blocking\" or \"serve_if_fits\"");
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ConfigErrorKind::syntax, "", e.what());
  }

  const Node root = Node(doc, "").object({"meta", "distributions", "fleet", "network", "loads", "priority", "upstream",
                                          "simulation", "load_factors", "sensitivity"});
  Scenario s;

  const auto meta = root.at("meta").object({"name", "seed", "description"});
  s.name = meta.at("name").identifier();
  s.seed = meta.at("seed").unsigned_integer();
  if (auto d = meta.maybe("description")) s.description = d->string();

  parse_distributions(root.at("distributions"), s.resources);

  s.network.load_points = parse_loads(root.at("loads"));

  const auto up = root.at("upstream").object({"failure_rate_per_yr", "repair_time_h"});
  s.network.upstream.failure_rate = up.at("failure_rate_per_yr").nonnegative();
  s.network.upstream.repair_time_h = up.at("repair_time_h").nonnegative();

  parse_network(root.at("network").object({"mode", "generation_buses", "contributions", "sections", "switchgear"}),
                s.network);

  parse_fleet(root.at("fleet"), s.fleet);
  std::set<std::string> unit_ids;
  auto check_unit = [&](const std::string& kind, std::size_t i, const std::string& id, const std::string& location) {
    const auto path = "fleet." + kind + "[" + std::to_string(i) + "]";
    if (!unit_ids.insert(id).second) fail(ConfigErrorKind::constraint, path + ".id", "duplicate DG id '" + id + "'");
    if (!s.network.has_bus(location)) {
      fail(ConfigErrorKind::dangling_reference, path + ".location", "unknown bus '" + location + "'");
    }
  };
  for (std::size_t i = 0; i < s.fleet.turbines.size(); ++i) {
    const auto& t = s.fleet.turbines[i];
    check_unit("turbines", i, t.id, t.location);
    const bool known = std::any_of(s.resources.wind_regions.begin(), s.resources.wind_regions.end(),
                                   [&](const WeibullParams& r) { return r.region_id == t.spec.region_id; });
    if (!known) {
      fail(ConfigErrorKind::dangling_reference, "fleet.turbines[" + std::to_string(i) + "].region_id",
           "unknown wind region '" + t.spec.region_id + "'");
    }
  }
  for (std::size_t i = 0; i < s.fleet.pv_arrays.size(); ++i) {
    check_unit("pv_arrays", i, s.fleet.pv_arrays[i].id, s.fleet.pv_arrays[i].location);
  }

  const auto prio = root.at("priority");
  s.priority = prio.identifiers();
  for (std::size_t i = 0; i < s.priority.size(); ++i) {
    const auto path = "priority[" + std::to_string(i) + "]";
    const auto* lp = s.network.find_load_point(s.priority[i]);
    if (lp == nullptr) fail(ConfigErrorKind::dangling_reference, path, "unknown load point '" + s.priority[i] + "'");
    if (std::count(s.priority.begin(), s.priority.end(), s.priority[i]) > 1) {
      fail(ConfigErrorKind::constraint, path, "'" + s.priority[i] + "' is listed twice");
    }
  }
  for (const auto& lp : s.network.load_points) {
    if (lp.level_kw > 0.0 && std::find(s.priority.begin(), s.priority.end(), lp.id) == s.priority.end()) {
      fail(ConfigErrorKind::dangling_reference, "priority", "load point '" + lp.id + "' is missing from the priority list");
    }
  }
  for (std::size_t i = 0; i < s.priority.size(); ++i) {
    if (s.network.find_load_point(s.priority[i])->priority_rank != static_cast<int>(i + 1)) {
      fail(ConfigErrorKind::constraint, "priority[" + std::to_string(i) + "]",
           "position of '" + s.priority[i] + "' disagrees with its priority rank");
    }
  }

  const auto sim = root.at("simulation").object(
      {"max_years", "min_years", "window_years", "tolerance", "p_islanding", "dispatch"});
  if (auto v = sim.maybe("max_years")) s.simulation.max_years = v->unsigned_integer();
  if (auto v = sim.maybe("min_years")) s.simulation.min_years = v->unsigned_integer();
  if (auto v = sim.maybe("window_years")) s.simulation.window_years = v->unsigned_integer();
  if (auto v = sim.maybe("tolerance")) s.simulation.tolerance = v->positive();
  if (auto v = sim.maybe("p_islanding")) s.p_islanding = v->probability();
  if (auto v = sim.maybe("dispatch")) s.dispatch = parse_dispatch(*v);
  if (s.simulation.max_years < 1) fail(ConfigErrorKind::constraint, "simulation.max_years", "must be >= 1");
  if (s.simulation.window_years < 1) fail(ConfigErrorKind::constraint, "simulation.window_years", "must be >= 1");
  if (s.simulation.min_years > s.simulation.max_years) {
    fail(ConfigErrorKind::constraint, "simulation.min_years", "must not exceed max_years");
  }

  if (auto lf = root.maybe("load_factors")) {
    const auto values = lf->array();
    if (values.size() != kDaysPerYear) fail(ConfigErrorKind::constraint, lf->path(), "expected exactly 365 values");
    for (const auto& v : values) s.load_factors.push_back(v.nonnegative());
  }

  if (auto sens = root.maybe("sensitivity")) {
    sens->object({"p_islanding"});
    for (const auto& v : sens->at("p_islanding").array()) s.sweep_p.push_back(v.probability());
  }

  // Backstop for cross-field rules not covered above.
  try {
    s.validate();
  } catch (const DomainError& e) {
    fail(ConfigErrorKind::constraint, "", e.what());
  } catch (const TopologyError& e) {
    fail(ConfigErrorKind::constraint, "network", e.what());
  }
  return s;
}

std::string emit_scenario(const Scenario& s) {
  ordered_json doc;
  doc["meta"] = {{"name", s.name}, {"seed", s.seed}};
  if (!s.description.empty()) doc["meta"]["description"] = s.description;

  ordered_json regions = ordered_json::array();
  for (const auto& r : s.resources.wind_regions) {
    regions.push_back({{"region_id", r.region_id}, {"scale_c_m_s", r.scale_c}, {"shape_k", r.shape_k}});
  }
  doc["distributions"] = {
      {"wind_regions", regions},
      {"irradiance",
       {{"alpha", s.resources.irradiance.alpha},
        {"beta", s.resources.irradiance.beta},
        {"scale_gmax_w_m2", s.resources.irradiance.scale_gmax},
        {"draw", s.resources.irradiance_draw == IrradianceDraw::shared ? "shared" : "independent"},
        {"inverse_tolerance", s.resources.inverse_tolerance}}}};

  ordered_json turbines = ordered_json::array();
  for (const auto& t : s.fleet.turbines) {
    turbines.push_back({{"id", t.id},
                        {"location", t.location},
                        {"region_id", t.spec.region_id},
                        {"p_rated_kw", t.spec.p_rated},
                        {"v_rated_m_s", t.spec.v_rated},
                        {"v_cut_in_m_s", t.spec.v_cut_in},
                        {"v_cut_out_m_s", t.spec.v_cut_out}});
  }
  ordered_json pv = ordered_json::array();
  for (const auto& p : s.fleet.pv_arrays) {
    pv.push_back({{"id", p.id},
                  {"location", p.location},
                  {"p_sn_kw", p.spec.p_sn},
                  {"g_std_w_m2", p.spec.g_std},
                  {"r_c_w_m2", p.spec.r_c}});
  }
  doc["fleet"] = {{"turbines", turbines}, {"pv_arrays", pv}};

  ordered_json net;
  if (const auto* agg = std::get_if<AggregateContributions>(&s.network.contributions)) {
    net["mode"] = "aggregate";
    net["generation_buses"] = s.network.generation_buses;
    ordered_json rows = ordered_json::array();
    for (const auto& lp : s.network.load_points) {
      auto it = agg->find(lp.id);
      if (it == agg->end()) continue;
      rows.push_back({{"load_point", lp.id},
                      {"sum_lambda_per_yr", it->second.sum_lambda},
                      {"sum_lambda_r_h_per_yr", it->second.sum_lambda_r}});
    }
    net["contributions"] = rows;
  } else {
    const auto& topo = std::get<FeederTopology>(s.network.contributions);
    net["mode"] = "topology";
    net["generation_buses"] = s.network.generation_buses;
    ordered_json sections = ordered_json::array();
    for (const auto& sec : topo.sections) {
      sections.push_back({{"id", sec.id},
                          {"failure_rate_per_yr", sec.reliability.failure_rate},
                          {"repair_time_h", sec.reliability.repair_time_h},
                          {"parent", sec.parent},
                          {"isolator_upstream", sec.isolator_upstream},
                          {"isolator_downstream", sec.isolator_downstream},
                          {"buses", sec.load_points}});
    }
    ordered_json gear = ordered_json::array();
    for (const auto& sw : topo.switchgear) {
      gear.push_back({{"id", sw.id},
                      {"kind", std::string(to_string(sw.kind))},
                      {"switching_time_h", sw.switching_time_h},
                      {"section", sw.section}});
    }
    net["sections"] = sections;
    net["switchgear"] = gear;
  }
  doc["network"] = net;

  ordered_json loads = ordered_json::array();
  for (const auto& lp : s.network.load_points) {
    loads.push_back({{"id", lp.id},
                     {"level_kw", lp.level_kw},
                     {"customers", lp.customers},
                     {"priority", lp.priority_rank},
                     {"class", lp.customer_class}});
  }
  doc["loads"] = loads;
  doc["priority"] = s.priority;
  doc["upstream"] = {{"failure_rate_per_yr", s.network.upstream.failure_rate},
                     {"repair_time_h", s.network.upstream.repair_time_h}};
  doc["simulation"] = {{"max_years", s.simulation.max_years},
                       {"min_years", s.simulation.min_years},
                       {"window_years", s.simulation.window_years},
                       {"tolerance", s.simulation.tolerance},
                       {"p_islanding", s.p_islanding},
                       {"dispatch", std::string(to_string(s.dispatch))}};
  if (!s.load_factors.empty()) doc["load_factors"] = s.load_factors;
  if (!s.sweep_p.empty()) doc["sensitivity"] = {{"p_islanding", s.sweep_p}};
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Scenario load_scenario_file(const std::filesystem::path& path) { return parse_scenario(read_text_file(path)); }

}  // namespace mgrel
