#include "tcpfluid/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace tcpfluid {

namespace {

double require_number(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError("missing field: " + field);
  if (!j[field].is_number()) throw ConfigError("field is not a number: " + field);
  return j[field].get<double>();
}

std::string require_string(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError("missing field: " + field);
  if (!j[field].is_string()) throw ConfigError("field is not a string: " + field);
  return j[field].get<std::string>();
}

LogLinearTable table_from_json(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError("missing field: " + field);
  if (!j[field].is_array()) throw ConfigError("field is not an array of [w,f] pairs: " + field);
  LogLinearTable t;
  for (const auto& row : j[field]) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
      throw ConfigError("field is not an array of [w,f] pairs: " + field);
    t.w.push_back(row[0].get<double>());
    t.f.push_back(row[1].get<double>());
  }
  return t;
}

json table_to_json(const LogLinearTable& t) {
  json rows = json::array();
  for (std::size_t i = 0; i < t.w.size(); ++i) rows.push_back({t.w[i], t.f[i]});
  return rows;
}

}  // namespace

ProtocolSpec protocol_from_json(const json& j) {
  const std::string kind = require_string(j, "kind");
  if (kind == "compound")
    return ProtocolSpec::compound(require_number(j, "alpha"), require_number(j, "beta"),
                                  require_number(j, "k"));
  if (kind == "reno") return ProtocolSpec::reno();
  if (kind == "hstcp")
    return ProtocolSpec::hstcp(table_from_json(j, "f1"), table_from_json(j, "f2"));
  throw ConfigError("unknown protocol kind: " + kind);
}

json protocol_to_json(const ProtocolSpec& spec) {
  switch (spec.kind) {
    case ProtocolKind::compound:
      return {{"kind", "compound"}, {"alpha", spec.alpha}, {"beta", spec.beta}, {"k", spec.k}};
    case ProtocolKind::reno: return {{"kind", "reno"}};
    case ProtocolKind::hstcp:
      return {{"kind", "hstcp"}, {"f1", table_to_json(spec.f1)}, {"f2", table_to_json(spec.f2)}};
  }
  throw ConfigError("unknown protocol kind");
}

LossModel loss_from_json(const json& j) {
  const std::string kind = require_string(j, "kind");
  if (kind == "droptail") {
    DropTailSmallBuffer m;
    m.capacity_per_flow = require_number(j, "capacity_per_flow");
    m.buffer_pkts = require_number(j, "buffer_pkts");
    m.rtt_s = require_number(j, "rtt_s");
    validate(m);
    return m;
  }
  if (kind == "gaussian") {
    GaussianMixedTraffic m;
    m.capacity_per_flow = require_number(j, "capacity_per_flow");
    m.buffer_pkts = require_number(j, "buffer_pkts");
    m.rtt_s = require_number(j, "rtt_s");
    m.v = require_number(j, "v");
    m.sigma1_sq = require_number(j, "sigma1_sq");
    m.sigma2_sq = require_number(j, "sigma2_sq");
    validate(m);
    return m;
  }
  throw ConfigError("unknown loss kind: " + kind);
}

json loss_to_json(const LossModel& loss) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DropTailSmallBuffer>) {
          return {{"kind", "droptail"},
                  {"capacity_per_flow", m.capacity_per_flow},
                  {"buffer_pkts", m.buffer_pkts},
                  {"rtt_s", m.rtt_s}};
        } else {
          return {{"kind", "gaussian"},
                  {"capacity_per_flow", m.capacity_per_flow},
                  {"buffer_pkts", m.buffer_pkts},
                  {"rtt_s", m.rtt_s},
                  {"v", m.v},
                  {"sigma1_sq", m.sigma1_sq},
                  {"sigma2_sq", m.sigma2_sq}};
        }
      },
      loss);
}

MultiTopology topology_from_json(const json& j) {
  MultiTopology t;
  t.B1 = require_number(j, "B1");
  t.B2 = require_number(j, "B2");
  t.B = require_number(j, "B");
  t.C1 = require_number(j, "C1");
  t.C2 = require_number(j, "C2");
  t.C = require_number(j, "C");
  t.tau1 = require_number(j, "tau1_s");
  t.tau2 = require_number(j, "tau2_s");
  if (!j.contains("protocol")) throw ConfigError("missing field: protocol");
  t.spec = protocol_from_json(j["protocol"]);
  t.coeff_variant = j.contains("coeff_variant")
                        ? coeff_variant_from_string(require_string(j, "coeff_variant"))
                        : CoeffVariant::extended;
  validate(t);
  return t;
}

json topology_to_json(const MultiTopology& t) {
  return {{"B1", t.B1},         {"B2", t.B2},
          {"B", t.B},           {"C1", t.C1},
          {"C2", t.C2},         {"C", t.C},
          {"tau1_s", t.tau1},   {"tau2_s", t.tau2},
          {"protocol", protocol_to_json(t.spec)},
          {"coeff_variant", to_string(t.coeff_variant)}};
}

EquilibriumVariant variant_from_string(const std::string& s) {
  if (s == "plain") return EquilibriumVariant::plain;
  if (s == "ack_weighted") return EquilibriumVariant::ack_weighted;
  throw ConfigError("unknown variant: " + s + " (expected plain|ack_weighted)");
}

const char* to_string(EquilibriumVariant v) {
  return v == EquilibriumVariant::plain ? "plain" : "ack_weighted";
}

CoeffVariant coeff_variant_from_string(const std::string& s) {
  if (s == "extended") return CoeffVariant::extended;
  if (s == "appendix") return CoeffVariant::appendix;
  throw ConfigError("unknown coeff_variant: " + s + " (expected extended|appendix)");
}

const char* to_string(CoeffVariant v) {
  return v == CoeffVariant::extended ? "extended" : "appendix";
}

Scenario scenario_from_json(const json& j) {
  Scenario sc;
  const std::string model = j.contains("model") ? require_string(j, "model") : "scalar";
  if (model == "scalar")
    sc.model = ScenarioModel::scalar;
  else if (model == "multibottleneck")
    sc.model = ScenarioModel::multibottleneck;
  else if (model == "normal_form")
    sc.model = ScenarioModel::normal_form;
  else
    throw ConfigError("unknown model: " + model);

  if (sc.model == ScenarioModel::scalar) {
    if (!j.contains("protocol")) throw ConfigError("missing field: protocol");
    sc.protocol = protocol_from_json(j["protocol"]);
    if (!j.contains("loss")) throw ConfigError("missing field: loss");
    sc.loss = loss_from_json(j["loss"]);
    if (j.contains("delay_s")) sc.delay_s = require_number(j, "delay_s");
  } else if (sc.model == ScenarioModel::multibottleneck) {
    if (!j.contains("topology")) throw ConfigError("missing field: topology");
    sc.topology = topology_from_json(j["topology"]);
  } else {
    sc.normal_form_alpha = require_number(j, "alpha");
  }

  if (j.contains("variant")) sc.variant = variant_from_string(require_string(j, "variant"));

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    SweepSpec sw;
    sw.parameter = require_string(s, "parameter");
    sw.min = require_number(s, "min");
    sw.max = require_number(s, "max");
    sw.steps = static_cast<int>(require_number(s, "steps"));
    if (sw.steps < 1) throw ConfigError("sweep.steps must be >= 1");
    sc.sweep = sw;
  }
  if (j.contains("sim")) {
    const json& s = j["sim"];
    if (s.contains("horizon_s")) sc.sim.horizon_s = require_number(s, "horizon_s");
    if (s.contains("dt_s")) sc.sim.dt_s = require_number(s, "dt_s");
    if (s.contains("history_rel")) sc.sim.history_rel = require_number(s, "history_rel");
  }
  if (j.contains("chart")) {
    const json& c = j["chart"];
    ChartSpec ch;
    ch.alpha_min = require_number(c, "alpha_min");
    ch.alpha_max = require_number(c, "alpha_max");
    ch.alpha_steps = static_cast<int>(require_number(c, "alpha_steps"));
    ch.b_min = require_number(c, "b_min");
    ch.b_max = require_number(c, "b_max");
    ch.b_steps = static_cast<int>(require_number(c, "b_steps"));
    if (ch.alpha_steps < 1 || ch.b_steps < 1) throw ConfigError("chart steps must be >= 1");
    sc.chart = ch;
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace tcpfluid
