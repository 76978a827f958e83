#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tcpfluid/cli_ops.hpp"

using namespace tcpfluid;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("TCPFLUID_CLI");
  REQUIRE_MESSAGE(p != nullptr, "TCPFLUID_CLI must point at the built binary");
  return p;
}

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "tcpfluid_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("equilibrium command reproduces the closed form") {
  const auto out = temp_dir() / "eq.json";
  REQUIRE(run("equilibrium --scenario " + fixture("reno-small-buffer.json") + " --out " +
              out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  // 1/w = (w/2)(w/(C tau))^B  =>  w* = (2 (C tau)^B)^{1/(B+2)}
  const double expected = std::pow(2.0 * std::pow(200.0, 8.0), 1.0 / 10.0);
  CHECK(j["w_star"].get<double>() == doctest::Approx(expected).epsilon(1e-9));
  CHECK(j["variant"] == "plain");
  CHECK(std::abs(j["residual"].get<double>()) < 1e-10);

  const auto out2 = temp_dir() / "eq2.json";
  REQUIRE(run("equilibrium --scenario " + fixture("compound-defaults.json") + " --out " +
              out2.string()) == 0);
  const auto j2 = nlohmann::json::parse(slurp(out2));
  // alpha w^{k-2} = beta (w/(C tau))^B  =>  w* = ((alpha/beta)(C tau)^B)^{1/(B-k+2)}
  const double cap_tau = 138.9 * 0.1;
  const double expected2 = std::pow(0.25 * std::pow(cap_tau, 15.0), 1.0 / 16.25);
  CHECK(j2["w_star"].get<double>() == doctest::Approx(expected2).epsilon(1e-9));
  CHECK(j2["x_star"].get<double>() ==
        doctest::Approx(j2["w_star"].get<double>() / 0.1).epsilon(1e-12));
}

TEST_CASE("stability command emits the full verdict stack") {
  const auto out = temp_dir() / "st.json";
  REQUIRE(run("stability --scenario " + fixture("compound-defaults.json") + " --out " +
              out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.contains("sufficient"));
  CHECK(j.contains("necsuf"));
  CHECK(j.contains("non_oscillatory"));
  CHECK(j.contains("hopf_delay_s"));
  CHECK(j.contains("rightmost_root"));
  CHECK(j["necsuf"]["stable"].get<bool>());
  CHECK(j["rightmost_root"]["re"].get<double>() < 0.0);
  // Stable scenario at its own rtt: the critical delay sits above 0.1 s.
  CHECK(j["hopf_delay_s"].get<double>() > 0.1);
}

TEST_CASE("multibottleneck command: case1 and case2 reports") {
  const auto out1 = temp_dir() / "case1.json";
  REQUIRE(run("multibottleneck --scenario " + fixture("case1-symmetric.json") + " --out " +
              out1.string()) == 0);
  const auto j1 = nlohmann::json::parse(slurp(out1));
  CHECK(j1["case"] == "case1");
  CHECK(j1["omegas"]["omega1"].is_number());
  CHECK(j1["critical_delays"]["tau_c_s"].is_number());
  CHECK(j1["verdict"].contains("stable"));
  CHECK(j1["transversality"].get<double>() > 0.0);

  const auto out2 = temp_dir() / "case2.json";
  REQUIRE(run("multibottleneck --scenario " + fixture("case2-heterogeneous.json") + " --out " +
              out2.string()) == 0);
  const auto j2 = nlohmann::json::parse(slurp(out2));
  CHECK(j2["case"] == "case2");
  CHECK(j2["classification"].is_string());
  CHECK(j2.contains("eps_sensitivity"));
}

TEST_CASE("chart command: header, labels, monotone boundary") {
  const auto out = temp_dir() / "chart.csv";
  REQUIRE(run("chart --scenario " + fixture("chart-small.json") + " --jobs 4 --out " +
              out.string()) == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "alpha,B,label,margin_necsuf,margin_nonosc");
  int rows = 0;
  bool saw_nonosc = false, saw_unstable = false;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find("non_oscillatory") != std::string::npos) saw_nonosc = true;
    if (line.find("unstable") != std::string::npos) saw_unstable = true;
    CHECK(line.find("error") == std::string::npos);
  }
  CHECK(rows == 36);
  CHECK(saw_nonosc);     // tiny alpha, tiny B corner
  CHECK(saw_unstable);   // large alpha, large B corner
}

TEST_CASE("chart grid flips stable -> unstable as B grows at fixed alpha") {
  Scenario sc = load_scenario(fixture("chart-small.json"));
  sc.chart->alpha_min = sc.chart->alpha_max = 0.125;
  sc.chart->alpha_steps = 1;
  sc.chart->b_min = 2.0;
  sc.chart->b_max = 60.0;
  sc.chart->b_steps = 30;
  const auto cells = chart_grid(sc, 2);
  bool unstable_seen = false;
  for (const auto& c : cells) {
    if (c.label == "unstable") unstable_seen = true;
    // Once unstable, larger B stays unstable (margin decreases).
    if (unstable_seen) CHECK(c.label == "unstable");
  }
  CHECK(unstable_seen);
  CHECK(cells.front().label != "unstable");
}

TEST_CASE("simulate and bifurcation commands produce the documented CSV") {
  const auto traj = temp_dir() / "traj.csv";
  REQUIRE(run("simulate --scenario " + fixture("compound-defaults.json") + " --out " +
              traj.string()) == 0);
  {
    std::ifstream in(traj);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,w1");
  }
  const auto sweep = temp_dir() / "sweep.csv";
  REQUIRE(run("bifurcation --scenario " + fixture("bifurcation-tau.json") + " --jobs 4 --out " +
              sweep.string()) == 0);
  {
    std::ifstream in(sweep);
    std::string header;
    std::getline(in, header);
    CHECK(header == "param,kind,amplitude,period,mean");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 7);
  }
}

TEST_CASE("identical scenarios give byte-identical outputs") {
  const auto a = temp_dir() / "det_a.csv";
  const auto b = temp_dir() / "det_b.csv";
  for (const auto* cmd : {"simulate", "chart"}) {
    const std::string fix =
        cmd == std::string("chart") ? "chart-small.json" : "compound-defaults.json";
    REQUIRE(run(std::string(cmd) + " --scenario " + fixture(fix) + " --jobs 3 --out " +
                a.string()) == 0);
    REQUIRE(run(std::string(cmd) + " --scenario " + fixture(fix) + " --jobs 2 --out " +
                b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
  }
}

TEST_CASE("queue-dist and buffer-rule commands") {
  const auto out = temp_dir() / "qd.csv";
  REQUIRE(run("queue-dist --kind mm1b --rho 1 --buffer 4 --out " + out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("n,pmf,ccdf") == 0);
  CHECK(text.find("0,0.2,1") != std::string::npos);

  const auto br = temp_dir() / "br.json";
  REQUIRE(run("buffer-rule --capacity-pkts-per-s 8333.333333333334 --rtt-s 0.2501 --flows 60 "
              "--out " + br.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(br));
  CHECK(j["buffer_pkts"].get<long>() == 270);
  // N = 1 returns the ceiling of the bandwidth-delay product.
  const auto br2 = temp_dir() / "br2.json";
  REQUIRE(run("buffer-rule --capacity-pkts-per-s 1000 --rtt-s 0.25 --flows 1 --out " +
              br2.string()) == 0);
  CHECK(nlohmann::json::parse(slurp(br2))["buffer_pkts"].get<long>() == 250);
}

TEST_CASE("exit codes: malformed input 2, numeric trouble 3") {
  const auto bad = temp_dir() / "bad.json";
  std::ofstream(bad) << "{\"model\": \"scalar\", \"protocol\": {\"kind\": \"compound\"}}";
  CHECK(run("equilibrium --scenario " + bad.string()) == 2);

  const auto bad2 = temp_dir() / "bad2.json";
  std::ofstream(bad2) << "this is not json";
  CHECK(run("equilibrium --scenario " + bad2.string()) == 2);

  CHECK(run("buffer-rule --capacity-pkts-per-s -5 --rtt-s 0.1 --flows 10") == 2);
  CHECK(run("equilibrium --scenario " + fixture("missing-file.json")) == 2);
}

TEST_CASE("malformed scenarios name the offending field") {
  CHECK_THROWS_WITH_AS(scenario_from_json(nlohmann::json::parse(
                          R"({"model":"scalar","protocol":{"kind":"compound","alpha":0.1,"beta":0.5,"k":0.75}})")),
                      "missing field: loss", ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_json(nlohmann::json::parse(
                          R"({"model":"scalar","protocol":{"kind":"compound","alpha":"x","beta":0.5,"k":0.75},"loss":{"kind":"droptail","capacity_per_flow":1,"buffer_pkts":2,"rtt_s":0.1}})")),
                      "field is not a number: alpha", ConfigError);
}

TEST_CASE("json round trips preserve specs") {
  const auto spec = ProtocolSpec::compound(0.22, 0.4, 1.1);
  const auto back = protocol_from_json(protocol_to_json(spec));
  CHECK(back.alpha == spec.alpha);
  CHECK(back.beta == spec.beta);
  CHECK(back.k == spec.k);

  LogLinearTable f1, f2;
  f1.w = {1.0, 100.0};
  f1.f = {1.0, 4.0};
  f2.w = {1.0, 100.0};
  f2.f = {0.5, 0.25};
  const auto h = ProtocolSpec::hstcp(f1, f2);
  const auto hb = protocol_from_json(protocol_to_json(h));
  CHECK(hb.f1.value(10.0) == doctest::Approx(h.f1.value(10.0)).epsilon(1e-14));

  const LossModel g = GaussianMixedTraffic{1000.0, 10.0, 0.1, 200.0, 1.5, 2.5};
  const auto gb = loss_from_json(loss_to_json(g));
  CHECK(loss_prob(gb, 30.0).p == loss_prob(g, 30.0).p);

  MultiTopology top;
  top.B1 = 12;
  top.B2 = 10;
  top.B = 15;
  top.C1 = 200;
  top.C2 = 150;
  top.C = 170;
  top.tau1 = 0.1;
  top.tau2 = 0.01;
  top.spec = ProtocolSpec::compound_default();
  top.coeff_variant = CoeffVariant::appendix;
  const auto tb = topology_from_json(topology_to_json(top));
  CHECK(tb.B1 == top.B1);
  CHECK(tb.tau2 == top.tau2);
  CHECK(tb.coeff_variant == CoeffVariant::appendix);
}

TEST_CASE("stability report covers the remaining verdict shapes") {
  // b <= a: Reno with B < 2 reports delay-independent stability.
  Scenario sc;
  sc.model = ScenarioModel::scalar;
  sc.protocol = ProtocolSpec::reno();
  sc.loss = DropTailSmallBuffer{1000.0, 1.5, 0.1};
  auto j = stability_report(sc);
  CHECK(j["necsuf"]["condition"] == "delay_independent");
  CHECK(j["necsuf"]["stable"].get<bool>());
  CHECK(j["hopf_delay_s"].is_null());

  // Verdicts at a delay above the critical one flip to unstable with a
  // right-half-plane root.
  Scenario un = load_scenario(fixture("compound-defaults.json"));
  auto base = stability_report(un);
  un.delay_s = 1.1 * base["hopf_delay_s"].get<double>();
  auto flipped = stability_report(un);
  CHECK_FALSE(flipped["necsuf"]["stable"].get<bool>());
  CHECK(flipped["rightmost_root"]["re"].get<double>() > 0.0);
}

TEST_CASE("single-cell chart emits one row") {
  Scenario sc = load_scenario(fixture("chart-small.json"));
  sc.chart->alpha_steps = 1;
  sc.chart->b_steps = 1;
  const auto cells = chart_grid(sc);
  REQUIRE(cells.size() == 1);
  const std::string csv = chart_csv(cells);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}

TEST_CASE("variant flags override the scenario") {
  Scenario sc = load_scenario(fixture("compound-defaults.json"));
  CHECK(sc.variant == EquilibriumVariant::plain);
  sc.variant = variant_from_string("ack_weighted");
  const auto report = stability_report(sc);
  CHECK(report["variant"] == "ack_weighted");
}
