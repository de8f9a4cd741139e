// Acceptance suite: one line per criterion, nonzero exit if a hard criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../oracles.hpp"
#include "rshock/envelope.hpp"
#include "rshock/experiments.hpp"
#include "rshock/legendre.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CheckRow {
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
};

struct Run {
  int exit_code = -1;
  double seconds = 0.0;
  std::map<std::string, CheckRow> checks;
};

const fs::path kOut = fs::temp_directory_path() / "rshock_acceptance";

Run run(const std::string& config_name, const std::string& tag) {
  std::ifstream in(fs::path(RSHOCK_CONFIG_DIR) / (config_name + ".json"));
  json c = json::parse(in);
  c["output_dir"] = (kOut / tag).string();
  std::ostringstream log;
  Run r;
  const auto t0 = std::chrono::steady_clock::now();
  r.exit_code = rshock::run_experiment(c, false, log);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ifstream checks(kOut / tag / "checks.csv");
  std::string line;
  std::getline(checks, line);
  while (std::getline(checks, line)) {
    // "name",passed,value,bound,soft
    const auto close = line.find('"', 1);
    std::stringstream rest(line.substr(close + 2));
    std::string passed, value, bound;
    std::getline(rest, passed, ',');
    std::getline(rest, value, ',');
    std::getline(rest, bound, ',');
    r.checks[line.substr(1, close - 1)] = {passed == "1", std::stod(value), std::stod(bound)};
  }
  if (r.exit_code != 0) std::cerr << log.str();
  return r;
}

int failures = 0;

void report(const std::string& criterion, bool passed, const std::string& detail, bool soft = false) {
  const char* tag = passed ? "PASS" : (soft ? "WARN" : "FAIL");
  std::printf("[%s] %s: %s\n", tag, criterion.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!passed && !soft) ++failures;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

bool all_pass(const Run& r, const std::vector<std::string>& names, std::string& detail) {
  bool ok = r.exit_code == 0;
  std::ostringstream os;
  if (r.exit_code != 0) os << "exit code " << r.exit_code << "; ";
  for (const auto& n : names) {
    const auto it = r.checks.find(n);
    if (it == r.checks.end()) {
      ok = false;
      os << n << " missing; ";
      continue;
    }
    ok = ok && it->second.passed;
    os << n << " = " << it->second.value << " (bound " << it->second.bound << "); ";
  }
  detail = os.str();
  if (detail.size() >= 2) detail.resize(detail.size() - 2);
  return ok;
}

void oracle_equivalences() {
  using namespace rshock;
  double lft_err = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PeriodicGrid g(seed % 2 ? 2 : 1, seed % 2 ? 12 : 64);
    const QuasiPeriodicConvex phi(oracle::random_convex_part(g, 1000 + seed, 0.9));
    lft_err = std::max(lft_err, oracle::sup_abs(lft(phi).dual.periodic(), oracle::brute_lft(phi)));
  }
  double hull_err = 0.0;
  const PeriodicGrid g1(1, 512);
  for (double a : {0.1, 1.0, 3.0}) {
    const ScalarField f = ScalarField::sample(g1, [a](double x) {
      return a * std::cos(2 * oracle::kPi * x) + 0.3 * a * std::sin(6 * oracle::kPi * x);
    });
    hull_err = std::max(hull_err, oracle::sup_abs(convexify(f).periodic(), oracle::monotone_chain_envelope(f)));
  }
  const PeriodicGrid g2(2, 64);
  ScalarField obstacle = ScalarField::sample(g2, [](double x, double y) {
    return 0.02 * std::cos(2 * oracle::kPi * x) + 0.03 * std::sin(2 * oracle::kPi * y) * std::cos(2 * oracle::kPi * x);
  });
  obstacle[g2.index(20, 40)] -= 0.5;
  const ObstacleProblem2D prob(ScalarField::constant(g2, 1.0), obstacle);
  const double comp = complementarity_residual(prob, project_psh_2d(prob).projected);
  const bool ok = lft_err <= 1e-9 && hull_err <= 1e-9 && comp <= 1e-8;
  std::ostringstream os;
  os << "fast LFT vs brute force " << lft_err << " (bound 1e-9, 50 fields); convexify vs monotone chain " << hull_err
     << " (bound 1e-9); PSOR complementarity " << comp << " (bound 1e-8)";
  report("oracle equivalences", ok, os.str());
}

}  // namespace

int main() {
  fs::remove_all(kOut);
  fs::create_directories(kOut);
  std::string d;

  const Run flow = run("flow_convergence", "flow_convergence");
  bool ok = all_pass(flow, {"error strictly decreasing in beta", "log-log slope against log(beta)/beta in [0.3, 3]"}, d);
  report("beta-rate", ok && flow.seconds < 60.0, d + fmt("; runtime %.1f s (bound %.0f s)", flow.seconds, 60.0));
  report("Hessian trace bound", all_pass(flow, {"Hessian trace bound with 5% slack"}, d), d);

  const Run env = run("envelope_curve", "envelope_curve");
  report("envelope-curve laws",
         all_pass(env, {"envelope concave in t", "projected - tH non-increasing in t", "non-coincidence sets nested"}, d),
         d);

  const Run hopf = run("hopf_duality", "hopf_duality");
  report("Hopf equivalence", all_pass(hopf, {"Legendre dual of the flow matches second Hopf within 5h"}, d), d);

  const Run v2 = run("tropical_voronoi", "tropical_voronoi_2");
  const Run v3 = run("tropical_voronoi_3", "tropical_voronoi_3");
  const std::vector<std::string> vnames = {"shocks match Voronoi boundary within 1-cell dilation",
                                           "tropical limit matches second Hopf within 0.05"};
  std::string d3;
  const bool vok = all_pass(v2, vnames, d) & all_pass(v3, vnames, d3);
  report("Voronoi limit", vok, "two sites: " + d + " | three sites: " + d3);

  const Run hs = run("heleshaw_sweep", "heleshaw_sweep");
  report("Hele-Shaw area law",
         all_pass(hs, {"area law |area - lambda| <= 3h + 5 sqrt(eps)", "Hele-Shaw domains nested",
                       "lambda=0.1 disc radius within 2 cells"},
                  d),
         d);
  report("reparametrization", all_pass(hs, {"envelope and Hele-Shaw domains differ by at most the boundary band"}, d),
         d);

  const Run energy = run("energy_monotone", "energy_monotone");
  report("energy monotonicity",
         all_pass(energy,
                  {"E_theta non-increasing along the envelope curve", "F_beta non-increasing along the normalized flow",
                   "E_theta decrease bounded by -I/(e^s-1)"},
                  d),
         d);

  oracle_equivalences();

  const Run sto = run("random_dimension", "random_dimension");
  report("stochastic soft band", all_pass(sto, {"median box dimension in [0.35, 0.65] (soft)"}, d), d, true);

  std::printf("%d hard criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
