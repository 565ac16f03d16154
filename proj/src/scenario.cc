#include "mcnet/scenario.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mcnet {

using nlohmann::json;

double WirelessParams::noise_w() const {
  return std::pow(10.0, (noise_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz;
}

void WirelessParams::Validate() const {
  if (!(bandwidth_hz > 0) || !(slot_seconds > 0) || !(packet_bits > 0) || !(carrier_ghz > 0) ||
      !(range_m > 0)) {
    throw InvalidInput("wireless: bandwidth, slot length, packet size, carrier and range must be positive");
  }
  if (shadow_sigma_db < 0 || mobility_sigma_m < 0 || area_half_width_m < 0) {
    throw InvalidInput("wireless: shadowing, mobility and area must be non-negative");
  }
}

double Arrivals::total() const {
  double sum = 0.0;
  for (double r : rate) sum += r;
  return sum;
}

int64_t DefaultArrivalCap(double rate) {
  return static_cast<int64_t>(std::ceil(10.0 * rate - 1e-12));
}

Scenario Scenario::WithTotalLoad(double total) const {
  if (!(total >= 0) || !std::isfinite(total)) throw InvalidInput("load must be finite and >= 0");
  const double current = arrivals.total();
  if (current <= 0) throw InvalidInput("scenario has no arrival direction to scale");
  Scenario out = *this;
  for (size_t i = 0; i < out.arrivals.rate.size(); ++i) {
    out.arrivals.rate[i] = arrivals.rate[i] * (total / current);
    if (!explicit_max[i]) out.arrivals.max[i] = DefaultArrivalCap(out.arrivals.rate[i]);
  }
  return out;
}

Scenario Scenario::WithDestinationCount(int count) const {
  const auto& dests = network.destinations();
  if (count < 1 || count > static_cast<int>(dests.size())) {
    throw InvalidInput("destination count " + std::to_string(count) + " outside [1, " +
                       std::to_string(dests.size()) + "]");
  }
  Scenario out = *this;
  out.network = network.WithDestinations({dests.begin(), dests.begin() + count});
  return out;
}

namespace {

// Accepts plain numbers or "a/b" strings.
double ReadNumber(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
    }
  }
  throw InvalidInput(what + ": expected a number or \"a/b\"");
}

double NumberOr(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return ReadNumber(obj.at(key), where + "." + key);
}

NodeKind ParseKind(const std::string& s) {
  if (s == "plain") return NodeKind::kPlain;
  if (s == "ue") return NodeKind::kUserEquipment;
  if (s == "es") return NodeKind::kEdgeServer;
  throw InvalidInput("unknown node kind '" + s + "' (expected plain, ue or es)");
}

int NodeRef(const NetworkBuilder& b, const json& v, const std::string& where) {
  if (!v.is_string()) throw InvalidInput(where + ": node reference must be a name");
  const int id = b.FindNode(v.get<std::string>());
  if (id < 0) throw InvalidInput(where + ": unknown node '" + v.get<std::string>() + "'");
  return id;
}

Scenario FromJson(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("scenario must be a JSON object");
  Scenario sc;
  sc.name = doc.value("name", std::string("scenario"));

  NetworkBuilder b;
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw InvalidInput("missing 'nodes' array");
  for (const json& jn : doc["nodes"]) {
    Node node;
    node.name = jn.at("name").get<std::string>();
    node.kind = ParseKind(jn.value("kind", std::string("plain")));
    const std::string where = "node '" + node.name + "'";
    node.processing_capacity = NumberOr(jn, "processing_capacity", 0.0, where);
    node.processing_cost = NumberOr(jn, "processing_cost", 0.0, where);
    node.power_budget_w = NumberOr(jn, "power_budget_w", 0.0, where);
    node.energy_cost_per_j = NumberOr(jn, "energy_cost_per_j", 0.0, where);
    if (jn.contains("position")) {
      const json& p = jn["position"];
      if (!p.is_array() || p.size() != 2) throw InvalidInput(where + ": position must be [x, y]");
      node.position = Point{ReadNumber(p[0], where), ReadNumber(p[1], where)};
    }
    b.AddNode(std::move(node));
  }

  if (doc.contains("edges")) {
    for (const json& je : doc["edges"]) {
      Edge e;
      e.from = NodeRef(b, je.at("from"), "edge");
      e.to = NodeRef(b, je.at("to"), "edge");
      const double cap = NumberOr(je, "capacity", 0.0, "edge");
      if (cap != std::floor(cap)) throw InvalidInput("edge capacity must be an integer");
      e.capacity = static_cast<int64_t>(cap);
      e.cost = NumberOr(je, "cost", 0.0, "edge");
      e.wireless = je.value("wireless", false);
      b.AddEdge(e);
    }
  }

  std::map<std::string, Service> services;
  if (doc.contains("services")) {
    for (const json& js : doc["services"]) {
      Service s;
      s.name = js.at("name").get<std::string>();
      for (const json& v : js.value("scaling", json::array())) {
        s.scaling.push_back(ReadNumber(v, "service '" + s.name + "' scaling"));
      }
      for (const json& v : js.value("workload", json::array())) {
        s.workload.push_back(ReadNumber(v, "service '" + s.name + "' workload"));
      }
      s.Validate();
      services[s.name] = s;
    }
  }

  if (!doc.contains("commodities") || !doc["commodities"].is_array() ||
      doc["commodities"].size() != 1) {
    throw InvalidInput("'commodities' must hold exactly one commodity");
  }
  const json& jc = doc["commodities"][0];
  if (jc.contains("service")) {
    const std::string name = jc["service"].get<std::string>();
    auto it = services.find(name);
    if (it == services.end()) throw InvalidInput("commodity references unknown service '" + name + "'");
    sc.service = it->second;
  } else {
    sc.service.name = "forward";
  }
  std::vector<int> sources, dests;
  for (const json& v : jc.at("sources")) sources.push_back(NodeRef(b, v, "commodity source"));
  for (const json& v : jc.at("destinations")) dests.push_back(NodeRef(b, v, "commodity destination"));
  b.SetSources(sources);
  b.SetDestinations(dests);

  if (doc.contains("wireless") && !doc["wireless"].is_null()) {
    const json& jw = doc["wireless"];
    WirelessParams w;
    w.bandwidth_hz = NumberOr(jw, "bandwidth_hz", w.bandwidth_hz, "wireless");
    w.slot_seconds = NumberOr(jw, "slot_seconds", w.slot_seconds, "wireless");
    w.packet_bits = NumberOr(jw, "packet_bits", w.packet_bits, "wireless");
    w.carrier_ghz = NumberOr(jw, "carrier_ghz", w.carrier_ghz, "wireless");
    w.shadow_sigma_db = NumberOr(jw, "shadow_sigma_db", w.shadow_sigma_db, "wireless");
    w.noise_dbm_per_hz = NumberOr(jw, "noise_dbm_per_hz", w.noise_dbm_per_hz, "wireless");
    w.range_m = NumberOr(jw, "range_m", w.range_m, "wireless");
    w.mobility_sigma_m = NumberOr(jw, "mobility_sigma_m", w.mobility_sigma_m, "wireless");
    w.area_half_width_m = NumberOr(jw, "area_half_width_m", w.area_half_width_m, "wireless");
    const std::string mode = jw.value("power_mode", std::string("optimal"));
    if (mode == "optimal") {
      w.power_mode = PowerMode::kOptimal;
    } else if (mode == "uniform") {
      w.power_mode = PowerMode::kUniform;
    } else {
      throw InvalidInput("wireless.power_mode must be 'optimal' or 'uniform'");
    }
    w.Validate();
    if (jw.value("auto_links", false)) {
      const double nominal = NumberOr(jw, "nominal_capacity", 0.0, "wireless");
      Network probe = [&] {
        NetworkBuilder tmp = b;
        tmp.SetSources({});
        tmp.SetDestinations({0});
        return tmp.Build();
      }();
      for (int u = 0; u < probe.num_nodes(); ++u) {
        if (probe.node(u).kind != NodeKind::kUserEquipment) continue;
        for (int s = 0; s < probe.num_nodes(); ++s) {
          if (probe.node(s).kind != NodeKind::kEdgeServer) continue;
          for (auto [from, to] : {std::pair{u, s}, std::pair{s, u}}) {
            if (probe.FindEdge(from, to) >= 0) continue;
            b.AddEdge(Edge{from, to, static_cast<int64_t>(nominal), 0.0, true});
          }
        }
      }
    }
    sc.wireless = w;
    sc.slot_seconds = w.slot_seconds;
  }
  sc.slot_seconds = NumberOr(doc, "slot_seconds", sc.slot_seconds, "scenario");

  sc.network = b.Build();
  if (sc.network.sources().empty()) throw InvalidInput("commodity has no sources");
  if (sc.wireless) {
    for (const Edge& e : sc.network.edges()) {
      if (!e.wireless) continue;
      if (!sc.network.node(e.from).position || !sc.network.node(e.to).position) {
        throw InvalidInput("wireless edge endpoints need positions");
      }
    }
  } else if (sc.network.has_wireless()) {
    throw InvalidInput("wireless edges declared without a 'wireless' section");
  }

  const int n = sc.network.num_nodes();
  sc.arrivals.rate.assign(n, 0.0);
  sc.arrivals.max.assign(n, 0);
  sc.explicit_max.assign(n, false);
  if (doc.contains("arrivals")) {
    const json& ja = doc["arrivals"];
    const json rates = ja.value("rates", json::object());
    const json caps = ja.value("max", json::object());
    for (auto& [name, v] : rates.items()) {
      const int id = sc.network.FindNode(name);
      if (id < 0) throw InvalidInput("arrivals: unknown node '" + name + "'");
      if (!sc.network.IsSource(id)) throw InvalidInput("arrivals at non-source node '" + name + "'");
      const double r = ReadNumber(v, "arrival rate");
      if (!(r >= 0) || !std::isfinite(r)) throw InvalidInput("arrival rates must be finite and >= 0");
      sc.arrivals.rate[id] = r;
    }
    for (auto& [name, v] : caps.items()) {
      const int id = sc.network.FindNode(name);
      if (id < 0) throw InvalidInput("arrivals: unknown node '" + name + "'");
      const double cap = ReadNumber(v, "arrival cap");
      if (cap < 0 || cap != std::floor(cap)) throw InvalidInput("arrival caps must be integers >= 0");
      sc.arrivals.max[id] = static_cast<int64_t>(cap);
      sc.explicit_max[id] = true;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!sc.explicit_max[i]) sc.arrivals.max[i] = DefaultArrivalCap(sc.arrivals.rate[i]);
  }
  // Fail early on a malformed service/network combination.
  LayeredNetwork check(sc.network, sc.service);
  (void)check;
  return sc;
}

}  // namespace

Scenario ParseScenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    return FromJson(doc);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed scenario: ") + e.what());
  }
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseScenario(ss.str());
}

}  // namespace mcnet
