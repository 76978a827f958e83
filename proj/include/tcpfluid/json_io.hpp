#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tcpfluid/dde_sim.hpp"
#include "tcpfluid/equilibrium.hpp"
#include "tcpfluid/loss_models.hpp"
#include "tcpfluid/multibottleneck_types.hpp"
#include "tcpfluid/protocols.hpp"

namespace tcpfluid {

using json = nlohmann::json;

// Parsers raise ConfigError naming the offending field.

ProtocolSpec protocol_from_json(const json& j);
json protocol_to_json(const ProtocolSpec& spec);

LossModel loss_from_json(const json& j);
json loss_to_json(const LossModel& loss);

MultiTopology topology_from_json(const json& j);
json topology_to_json(const MultiTopology& top);

EquilibriumVariant variant_from_string(const std::string& s);
const char* to_string(EquilibriumVariant v);
CoeffVariant coeff_variant_from_string(const std::string& s);
const char* to_string(CoeffVariant v);

enum class ScenarioModel { scalar, multibottleneck, normal_form };

struct SweepSpec {
  std::string parameter;  // "tau" | "B" | "alpha"
  double min = 0.0, max = 0.0;
  int steps = 0;
};

struct SimSpec {
  double horizon_s = 0.0;    // 0 = default (50 tau)
  double dt_s = 0.0;         // 0 = default (tau/200)
  double history_rel = 0.9;  // constant history as a fraction of w*
};

struct ChartSpec {
  double alpha_min = 0.0, alpha_max = 0.0;
  int alpha_steps = 0;
  double b_min = 0.0, b_max = 0.0;
  int b_steps = 0;
};

/// One experiment description: a protocol over a loss model (scalar), a
/// two-edge-router topology, or the planar calibration ODE; plus optional
/// sweep / simulation / chart blocks.
struct Scenario {
  ScenarioModel model = ScenarioModel::scalar;
  ProtocolSpec protocol;
  LossModel loss;
  MultiTopology topology;
  EquilibriumVariant variant = EquilibriumVariant::plain;
  double delay_s = 0.0;       // scalar: feedback delay; 0 = loss rtt
  double normal_form_alpha = 0.0;
  std::optional<SweepSpec> sweep;
  SimSpec sim;
  std::optional<ChartSpec> chart;
};

Scenario scenario_from_json(const json& j);
Scenario load_scenario(const std::string& path);

// Number formatting shared by every CSV/JSON emitter: shortest representation
// at 12 significant digits, so identical inputs give byte-identical files.
std::string format_number(double x);

}  // namespace tcpfluid
