#include "rshock/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "rshock/builtins.hpp"
#include "rshock/energy.hpp"
#include "rshock/envelope.hpp"
#include "rshock/field_io.hpp"
#include "rshock/flow.hpp"
#include "rshock/heleshaw.hpp"
#include "rshock/hj.hpp"
#include "rshock/legendre.hpp"
#include "rshock/shocks.hpp"
#include "rshock/stochastic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rshock {

std::vector<std::string> experiment_names() {
  return {"flow_convergence", "envelope_curve",   "hopf_duality",      "tropical_voronoi",
          "heleshaw_sweep",   "heleshaw_density", "random_dimension", "energy_monotone"};
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return os.str();
}

json apply_overrides(json config, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    const std::string raw = s.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &config;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
      if (!node->is_object()) {
        if (!node->is_null()) throw ConfigError("--set: '" + key + "' descends into a non-object");
        *node = json::object();
      }
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return config;
}

namespace {

// ---------------------------------------------------------------------------
// Configuration access

const json* find_path(const json& j, const std::string& path) {
  const json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

template <class T>
T get(const json& j, const std::string& path, T fallback) {
  const json* node = find_path(j, path);
  if (!node || node->is_null()) return fallback;
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field " + path + " has the wrong type");
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
  return out;
}

struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double bound = 0.0;
  bool soft = false;
};

struct Context {
  json config;
  fs::path dir;
  PeriodicGrid grid;
  FlowConfig flow;
  PsorOptions psor;
  std::vector<std::string> files;
  std::vector<Check> checks;
  std::ostream& log;

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }
  void check(const std::string& name, bool passed, double value, double bound, bool soft = false) {
    checks.push_back({name, passed, value, bound, soft});
  }
};

ScalarField load_hamiltonian(const json& config, const PeriodicGrid& grid, const std::string& fallback) {
  const json* h = find_path(config, "physics.hamiltonian");
  if (!h || h->is_null()) return builtin_hamiltonian(fallback, grid);
  if (h->is_string()) return builtin_hamiltonian(h->get<std::string>(), grid);
  if (h->is_object() && h->contains("file")) {
    const std::string file = (*h)["file"].get<std::string>();
    std::ifstream in(file);
    if (!in) throw ConfigError("hamiltonian file does not exist: " + file);
    ScalarField f = read_field_csv(in);
    if (!(f.grid() == grid)) throw ConfigError("hamiltonian file grid does not match the configured grid");
    return f;
  }
  throw ConfigError("physics.hamiltonian must be a builtin name or {\"file\": path}");
}

std::string hamiltonian_label(const json& config, const std::string& fallback) {
  const json* h = find_path(config, "physics.hamiltonian");
  return (h && h->is_string()) ? h->get<std::string>() : fallback;
}

void write_field(Context& ctx, const std::string& name, const ScalarField& f) {
  std::ofstream out(ctx.path(name));
  write_field_csv(out, f);
}

void write_mask(Context& ctx, const std::string& name, const PeriodicGrid& g, const std::vector<bool>& m) {
  std::ofstream out(ctx.path(name));
  write_mask_csv(out, g, m);
}

std::string indexed(const std::string& stem, std::size_t k) {
  std::ostringstream os;
  os << stem << std::setw(2) << std::setfill('0') << k << ".csv";
  return os.str();
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// sup over nodes of the trace of |D^2 H| (sum of absolute eigenvalues).
double hamiltonian_trace_norm(const ScalarField& h) {
  const PeriodicGrid& g = h.grid();
  ScalarField shifted = h;
  // discrete_hessian adds the identity; remove it per eigenvalue
  const HessianField hess = discrete_hessian(QuasiPeriodicConvex(shifted));
  double m = 0.0;
  for (std::size_t k = 0; k < hess.size(); ++k) {
    if (g.dim() == 1) {
      m = std::max(m, std::abs(hess.min_eig(k) - 1.0));
    } else {
      m = std::max(m, std::abs(hess.min_eig(k) - 1.0) + std::abs(hess.max_eig(k) - 1.0));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Experiments

void flow_convergence(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  const auto betas = get<std::vector<double>>(ctx.config, "physics.beta_list", {10.0, 1e2, 1e3, 1e4});
  const auto ts = get<std::vector<double>>(ctx.config, "physics.t_list", {1.0});
  if (betas.empty() || ts.empty()) throw ConfigError("flow_convergence needs beta_list and t_list");
  const double t_end = ts.back();
  const ScalarField H = load_hamiltonian(ctx.config, g, "cosine:a=1.0");
  const QuasiPeriodicConvex phi0 = QuasiPeriodicConvex::quadratic(g);
  const double trace0 = trace_norm(discrete_hessian(phi0));
  const double bound_scale = std::max(trace0, hamiltonian_trace_norm(H));

  std::ofstream summary(ctx.path("summary.csv"));
  summary << "beta,t,sup_error,log_beta_over_beta,max_trace_ratio\n";
  std::vector<std::pair<double, double>> errors;
  long trace_violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double beta = betas[b];
    if (!(beta > 0.0)) throw ConfigError("beta_list entries must be positive");
    std::vector<TrajectoryRow> rows;
    double max_ratio = 0.0;
    auto observe = [&](const FlowState& s) {
      const EnvelopeResult env = project_convex(phi0, H, s.t);
      rows.push_back(trajectory_row(s, sup_distance(s.phi.periodic(), env.projected)));
      const double ratio = s.max_hess_trace / ((s.t + 1.0) * bound_scale);
      max_ratio = std::max(max_ratio, ratio);
      if (ratio > 1.05) ++trace_violations;
    };
    FlowState state = FlowState::initial(phi0, beta);
    observe(state);
    state = integrate_nonnormalized(std::move(state), H, ctx.flow, t_end, observe);
    write_trajectory_csv(ctx.path(indexed("trajectory_beta", b)), rows);
    const EnvelopeResult env = project_convex(phi0, H, state.t);
    write_field(ctx, indexed("final_error_beta", b), state.phi.periodic() - env.projected);
    const double err = rows.back().sup_err_vs_envelope;
    errors.push_back({beta, err});
    worst_ratio = std::max(worst_ratio, max_ratio);
    summary << format_real(beta) << ',' << format_real(state.t) << ',' << format_real(err) << ','
            << format_real(std::log(beta) / beta) << ',' << format_real(max_ratio) << '\n';
    ctx.log << "  beta=" << beta << " sup error " << err << "\n";
  }
  std::sort(errors.begin(), errors.end());
  bool decreasing = true;
  for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k].second < errors[k - 1].second;
  ctx.check("error strictly decreasing in beta", decreasing, errors.back().second, errors.front().second);
  std::vector<double> lx, ly;
  for (const auto& [beta, err] : errors)
    if (beta > 1.0) {
      lx.push_back(std::log(std::log(beta) / beta));
      ly.push_back(std::log(err));
    }
  if (lx.size() >= 2) {
    const double slope = least_squares_slope(lx, ly);
    ctx.check("log-log slope against log(beta)/beta in [0.3, 3]", slope >= 0.3 && slope <= 3.0, slope, 3.0);
  }
  ctx.check("Hessian trace bound with 5% slack", trace_violations == 0, worst_ratio, 1.05);
}

void envelope_curve_experiment(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  const auto ts = get<std::vector<double>>(ctx.config, "physics.t_list", linspace(0.05, 1.0, 20));
  const ScalarField H = load_hamiltonian(ctx.config, g, "cosine:a=1.0");
  const QuasiPeriodicConvex phi0 = QuasiPeriodicConvex::quadratic(g);
  const auto curve = envelope_curve(phi0, H, ts);
  constexpr double tol = 1e-8;
  std::ofstream out(ctx.path("envelope_curve.csv"));
  out << "t,omega_cells,omega_mass,sup_projected_minus_tH\n";
  double concavity = 0.0, increase = 0.0;
  std::size_t nesting = 0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const ScalarField shifted = curve[k].projected - ts[k] * H;
    out << format_real(ts[k]) << ',' << curve[k].omega_count() << ',' << format_real(curve[k].residual) << ','
        << format_real(shifted.max()) << '\n';
    write_field(ctx, indexed("envelope_t", k), curve[k].projected);
    if (k > 0) {
      const ScalarField prev = curve[k - 1].projected - ts[k - 1] * H;
      for (std::size_t m = 0; m < g.size(); ++m) {
        increase = std::max(increase, shifted[m] - prev[m]);
        if (!curve[k - 1].coincidence[m] && curve[k].coincidence[m]) ++nesting;
      }
    }
    if (k > 0 && k + 1 < curve.size()) {
      const double w = (ts[k] - ts[k - 1]) / (ts[k + 1] - ts[k - 1]);
      for (std::size_t m = 0; m < g.size(); ++m) {
        const double chord = (1.0 - w) * curve[k - 1].projected[m] + w * curve[k + 1].projected[m];
        concavity = std::max(concavity, chord - curve[k].projected[m]);
      }
    }
  }
  ctx.check("envelope concave in t", concavity <= tol, concavity, tol);
  ctx.check("projected - tH non-increasing in t", increase <= tol, increase, tol);
  ctx.check("non-coincidence sets nested", nesting == 0, double(nesting), 0.0);
}

void hopf_duality_experiment(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  const auto ts = get<std::vector<double>>(ctx.config, "physics.t_list", {0.1, 1.0});
  const ScalarField phi0 = load_hamiltonian(ctx.config, g, "cosine:a=0.2");
  std::ofstream out(ctx.path("hopf_duality.csv"));
  out << "t,defect,shock_mismatch,psi_shock_nodes\n";
  double worst = 0.0;
  std::size_t worst_mismatch = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const HopfDuality d = hopf_duality_check(phi0, ts[k]);
    const std::size_t shocks = extract_shocks(d.psi.as_convex()).count();
    out << format_real(ts[k]) << ',' << format_real(d.defect) << ',' << d.shock_mismatch << ',' << shocks << '\n';
    write_field(ctx, indexed("psi_t", k), d.psi.psi);
    write_field(ctx, indexed("hopf_lax_t", k), d.phi.psi);
    worst = std::max(worst, d.defect);
    worst_mismatch = std::max(worst_mismatch, d.shock_mismatch);
  }
  ctx.check("duality defect <= 3h", worst <= 3.0 * g.spacing(), worst, 3.0 * g.spacing());
  ctx.check("shock sets agree within 2 cells", worst_mismatch <= 2, double(worst_mismatch), 2.0);

  // Legendre dual of the large-beta flow against the second Hopf formula.
  const auto eq_ts = get<std::vector<double>>(ctx.config, "physics.equivalence_t_list", {0.1, 1.0, 5.0});
  const double beta = get<std::vector<double>>(ctx.config, "physics.beta_list", {1e4}).back();
  if (eq_ts.empty()) return;
  const QuasiPeriodicConvex psi0 = QuasiPeriodicConvex::quadratic(g);
  std::ofstream eq(ctx.path("hopf_equivalence.csv"));
  eq << "t,beta,sup_diff\n";
  double worst_eq = 0.0;
  std::size_t next = 0;
  auto observe = [&](const FlowState& s) {
    if (next < eq_ts.size() && std::abs(s.t - eq_ts[next]) <= 1e-9 * std::max(1.0, eq_ts[next])) {
      const ScalarField dual = lft(s.phi).dual.periodic();
      const double diff = sup_distance(dual, second_hopf(psi0, phi0, s.t).psi);
      eq << format_real(s.t) << ',' << format_real(beta) << ',' << format_real(diff) << '\n';
      worst_eq = std::max(worst_eq, diff);
      ++next;
    }
  };
  FlowState state = FlowState::initial(psi0, beta);
  for (double t : eq_ts) state = integrate_nonnormalized(std::move(state), phi0, ctx.flow, t, observe);
  ctx.check("Legendre dual of the flow matches second Hopf within 5h", next == eq_ts.size() && worst_eq <= 5.0 * g.spacing(),
            worst_eq, 5.0 * g.spacing());
}

void tropical_voronoi(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  const std::string site_name = get<std::string>(ctx.config, "physics.sites", "wells2");
  const double t = get<std::vector<double>>(ctx.config, "physics.t_list", {50.0}).back();
  const std::vector<Site> sites = builtin_sites(site_name, g.dim());
  const ScalarField H = load_hamiltonian(ctx.config, g, site_name);
  const QuasiPeriodicConvex psi0 = QuasiPeriodicConvex::quadratic(g);
  const HopfSolution psi_t = second_hopf(psi0, H, t);
  const QuasiPeriodicConvex psi_inf = tropical_limit(psi0, sites);
  const ShockSet shocks = extract_shocks(psi_t.as_convex());
  const Tessellation tess = voronoi_delaunay(g, sites);
  const ShockVoronoiAgreement agree = shock_voronoi_agreement(shocks, tess);
  const double sup_diff = sup_distance(psi_t.psi, psi_inf.periodic());

  write_tessellation_csv(ctx.path("tessellation.csv"), tess, shocks);
  write_sites_csv(ctx.path("sites.csv"), sites);
  write_field(ctx, "psi_t.csv", psi_t.psi);
  write_field(ctx, "psi_inf.csv", psi_inf.periodic());
  std::ofstream out(ctx.path("summary.csv"));
  out << "t,sup_diff,mismatch,symmetric_difference,shock_nodes,boundary_nodes,delaunay_edges\n";
  out << format_real(t) << ',' << format_real(sup_diff) << ',' << agree.mismatch << ',' << agree.symmetric_difference
      << ',' << agree.shock_nodes << ',' << agree.boundary_nodes << ',' << tess.delaunay_edges.size() << '\n';
  std::ofstream edges(ctx.path("delaunay_edges.csv"));
  edges << "a,b\n";
  for (const auto& [a, b] : tess.delaunay_edges) edges << a << ',' << b << '\n';

  ctx.check("shocks match Voronoi boundary within 1-cell dilation", agree.mismatch == 0, double(agree.mismatch), 0.0);
  ctx.check("tropical limit matches second Hopf within 0.05", sup_diff <= 0.05, sup_diff, 0.05);
}

std::array<int, 2> injection_point(const json& config, const PeriodicGrid& g) {
  const auto p = get<std::vector<int>>(config, "physics.injection_node", {g.n() / 2, g.n() / 2});
  if (p.size() != 2) throw ConfigError("physics.injection_node must have two entries");
  return {p[0], p[1]};
}

double hs_epsilon(const json& config, const PeriodicGrid& g) {
  const std::string mode = get<std::string>(config, "numerics.epsilon", "h2");
  const double h = g.spacing();
  if (mode == "h") return h;
  if (mode == "h2") return h * h;
  if (mode == "h3") return h * h * h;
  throw ConfigError("numerics.epsilon must be one of h, h2, h3");
}

ScalarField flat_density(const PeriodicGrid& g) { return ScalarField::constant(g, 1.0); }

void heleshaw_sweep_experiment(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  if (g.dim() != 2) throw ConfigError("heleshaw_sweep requires grid.dim = 2");
  std::vector<double> def;
  for (int k = 1; k <= 19; ++k) def.push_back(0.05 * k);
  const auto lambdas = get<std::vector<double>>(ctx.config, "physics.lambda_list", def);
  const auto p = injection_point(ctx.config, g);
  HeleShawOptions opt{hs_epsilon(ctx.config, g), ctx.psor};
  const ScalarField rho0 = flat_density(g);
  const auto states = hs_sweep(rho0, p, lambdas, opt);
  write_hs_sweep_csv(ctx.path("heleshaw_sweep.csv"), states);
  const double h = g.spacing();
  const double tol = 3.0 * h + 5.0 * std::sqrt(opt.epsilon);
  double worst = 0.0;
  std::size_t nest = 0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    write_mask(ctx, indexed("omega_lambda", k), g, states[k].omega_mask);
    worst = std::max(worst, std::abs(states[k].area - states[k].lambda));
    if (k > 0)
      for (std::size_t m = 0; m < g.size(); ++m)
        if (states[k - 1].omega_mask[m] && !states[k].omega_mask[m]) ++nest;
    if (std::abs(states[k].lambda - 0.1) < 1e-12) {
      double rin = 0.0, rout = HUGE_VAL;
      for (std::size_t m = 0; m < g.size(); ++m) {
        const auto [i, j] = g.coords(m);
        int di = std::abs(i - p[0]), dj = std::abs(j - p[1]);
        di = std::min(di, g.n() - di);
        dj = std::min(dj, g.n() - dj);
        const double r = std::hypot(double(di), double(dj));
        if (states[k].omega_mask[m]) rin = std::max(rin, r);
        else rout = std::min(rout, r);
      }
      const double expect = std::sqrt(0.1 / std::numbers::pi) / h;
      const double dev = std::max(std::abs(rin - expect), std::abs(rout - expect));
      ctx.check("lambda=0.1 disc radius within 2 cells", dev <= 2.0, dev, 2.0);
    }
  }
  ctx.check("area law |area - lambda| <= 3h + 5 sqrt(eps)", worst <= tol, worst, tol);
  ctx.check("Hele-Shaw domains nested", nest == 0, double(nest), 0.0);

  const auto rep_ts = get<std::vector<double>>(ctx.config, "physics.reparam_t_list", {0.25, 1.0, 3.0});
  if (rep_ts.empty()) return;
  const auto cmp = hs_vs_envelope_curve(rho0, p, rep_ts, opt);
  std::ofstream out(ctx.path("heleshaw_vs_envelope.csv"));
  out << "t,lambda,defect,omega_nodes,boundary_band\n";
  long excess = 0;
  for (const auto& c : cmp) {
    out << format_real(c.t) << ',' << format_real(c.lambda) << ',' << c.defect << ',' << c.omega_nodes << ','
        << c.boundary_band << '\n';
    excess = std::max(excess, long(c.defect) - long(c.boundary_band));
  }
  ctx.check("envelope and Hele-Shaw domains differ by at most the boundary band", excess <= 0, double(excess), 0.0);
}

void heleshaw_density_experiment(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  if (g.dim() != 2) throw ConfigError("heleshaw_density requires grid.dim = 2");
  const auto betas = get<std::vector<double>>(ctx.config, "physics.beta_list", {1e2, 1e3});
  const double t = get<std::vector<double>>(ctx.config, "physics.t_list", {1.0}).back();
  const auto p = injection_point(ctx.config, g);
  HeleShawOptions opt{hs_epsilon(ctx.config, g), ctx.psor};
  const ScalarField rho0 = flat_density(g);
  const ScalarField source = hs_flow_source(rho0, p, opt.epsilon);
  std::ofstream out(ctx.path("heleshaw_density.csv"));
  out << "beta,t,defect,ratio_min,ratio_max,compared,mass,max_density_away_from_pole\n";
  std::vector<std::pair<double, double>> defects;
  double worst_ratio_dev = 0.0, worst_upper = 0.0;
  std::vector<bool> pole(g.size(), false);
  pole[g.index(p[0], p[1])] = true;
  const std::vector<bool> near_pole = dilate(g, pole, 3);
  for (std::size_t b = 0; b < betas.size(); ++b) {
    LogDiffusionState s = LogDiffusionState::from_density(rho0);
    s = integrate_log_diffusion_2d(std::move(s), source, betas[b], ctx.flow, t);
    const HSDensityDefect d = hs_density_limit(s, rho0, p, opt);
    const ScalarField rho = s.density();
    double upper = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m)
      if (!near_pole[m]) upper = std::max(upper, rho[m]);
    out << format_real(betas[b]) << ',' << format_real(s.t) << ',' << format_real(d.defect) << ','
        << format_real(d.ratio_min) << ',' << format_real(d.ratio_max) << ',' << d.compared << ','
        << format_real(s.mass()) << ',' << format_real(upper) << '\n';
    write_field(ctx, indexed("density_beta", b), rho);
    defects.push_back({betas[b], d.defect});
    worst_ratio_dev = std::max({worst_ratio_dev, std::abs(d.ratio_min / (t + 1.0) - 1.0),
                                std::abs(d.ratio_max / (t + 1.0) - 1.0)});
    worst_upper = std::max(worst_upper, upper / ((t + 1.0) * rho0.max()));
    ctx.log << "  beta=" << betas[b] << " density defect " << d.defect << "\n";
  }
  std::sort(defects.begin(), defects.end());
  bool decreasing = true;
  for (std::size_t k = 1; k < defects.size(); ++k) decreasing = decreasing && defects[k].second < defects[k - 1].second;
  ctx.check("density defect decreasing in beta", decreasing, defects.back().second, defects.front().second);
  ctx.check("density / rho0 within (t+1)(1 +- 0.1) on X", worst_ratio_dev <= 0.1, worst_ratio_dev, 0.1);
  ctx.check("density <= 1.05 (t+1) sup rho0 away from the pole", worst_upper <= 1.05, worst_upper, 1.05);
}

void random_dimension_experiment(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  if (g.dim() != 1) throw ConfigError("random_dimension requires grid.dim = 1");
  const double h = get<double>(ctx.config, "physics.h_exponent", 0.5);
  const double t = get<std::vector<double>>(ctx.config, "physics.t_list", {1.0}).back();
  const int seeds = get<int>(ctx.config, "physics.ensemble_size", 20);
  const auto seed0 = get<std::uint64_t>(ctx.config, "physics.seed", 0);
  const double amp = get<double>(ctx.config, "physics.amplitude", 1e-3);
  const int kmax = get<int>(ctx.config, "physics.k_max", g.n() / 2);
  if (seeds < 1) throw ConfigError("physics.ensemble_size must be positive");
  std::vector<DimensionSample> rows;
  for (int s = 0; s < seeds; ++s)
    rows.push_back(random_envelope_dimension(RandomFieldSpec{h, kmax, amp, seed0 + std::uint64_t(s)}, g, t));
  write_ensemble_csv(ctx.path("ensemble.csv"), rows);
  std::vector<double> dims;
  for (const auto& r : rows) dims.push_back(r.dimension);
  std::sort(dims.begin(), dims.end());
  const double median = dims.size() % 2 ? dims[dims.size() / 2] : 0.5 * (dims[dims.size() / 2 - 1] + dims[dims.size() / 2]);
  ctx.check("median box dimension in [0.35, 0.65] (soft)", median >= 0.35 && median <= 0.65, median, 0.65, true);
}

void energy_monotone_experiment(Context& ctx) {
  const PeriodicGrid& g = ctx.grid;
  const ScalarField f = load_hamiltonian(ctx.config, g, "cosine:a=1.0");
  const auto ts = get<std::vector<double>>(ctx.config, "physics.t_list", linspace(0.0, 2.0, 21));
  const double beta = get<std::vector<double>>(ctx.config, "physics.beta_list", {100.0}).front();
  const QuasiPeriodicConvex zero = QuasiPeriodicConvex::quadratic(g);
  const MongeAmpereMeasure mu0 = MongeAmpereMeasure::uniform(g);
  constexpr double tol = 1e-8;

  // Envelope curve phi_t = P((1 - e^{-t}) f).
  auto envelope = [&](double t) { return project_convex(zero, f, -std::expm1(-t)).as_convex(); };
  std::vector<EnergyReport> env_rows;
  std::vector<QuasiPeriodicConvex> env_phi;
  long env_violations = 0;
  for (double t : ts) {
    env_phi.push_back(envelope(t));
    const QuasiPeriodicConvex* prev = env_phi.size() > 1 ? &env_phi[env_phi.size() - 2] : nullptr;
    env_rows.push_back(energy_report(t, env_phi.back(), signed_monge_ampere(env_phi.back()), f, mu0, beta, prev));
    if (env_rows.size() > 1 && env_rows.back().E_theta > env_rows[env_rows.size() - 2].E_theta + tol) ++env_violations;
  }
  write_energy_csv(ctx.path("energy_envelope.csv"), env_rows);
  ctx.check("E_theta non-increasing along the envelope curve", env_violations == 0, double(env_violations), 0.0);

  // Strict decrease inequality at sampled (t, s).
  const std::vector<std::pair<double, double>> pairs = {{0.5, 0.5}, {0.25, 0.25}, {1.0, 0.5}, {0.5, 1.0}, {1.5, 0.5}};
  std::ofstream ineq(ctx.path("energy_inequality.csv"));
  ineq << "t,s,lhs,rhs\n";
  double worst = -HUGE_VAL;
  for (const auto& [t, s] : pairs) {
    const QuasiPeriodicConvex a = envelope(t), b = envelope(t + s);
    const double lhs = e_theta(b, f) - e_theta(a, f);
    const double rhs = -i_functional(b, a) / std::expm1(s);
    ineq << format_real(t) << ',' << format_real(s) << ',' << format_real(lhs) << ',' << format_real(rhs) << '\n';
    worst = std::max(worst, lhs - rhs);
  }
  ctx.check("E_theta decrease bounded by -I/(e^s-1)", worst <= tol, worst, tol);

  // Finite-beta normalized flow.
  std::vector<EnergyReport> flow_rows;
  long flow_violations = 0;
  std::optional<QuasiPeriodicConvex> prev;
  auto observe = [&](const FlowState& st) {
    flow_rows.push_back(energy_report(st.t, st.phi, st.measure(), f, mu0, beta, prev ? &*prev : nullptr));
    if (flow_rows.size() > 1 && flow_rows.back().F_beta > flow_rows[flow_rows.size() - 2].F_beta + tol)
      ++flow_violations;
    prev = st.phi;
  };
  FlowState state = FlowState::initial(zero, beta);
  observe(state);
  integrate_normalized(std::move(state), f, mu0, ctx.flow, ts.back(), observe);
  write_energy_csv(ctx.path("energy_flow.csv"), flow_rows);
  ctx.check("F_beta non-increasing along the normalized flow", flow_violations == 0, double(flow_violations), 0.0);
}

struct Defaults {
  int dim;
  int n;
};

const std::map<std::string, Defaults>& experiment_defaults() {
  static const std::map<std::string, Defaults> d = {
      {"flow_convergence", {1, 512}}, {"envelope_curve", {1, 512}},   {"hopf_duality", {1, 256}},
      {"tropical_voronoi", {2, 128}}, {"heleshaw_sweep", {2, 128}},   {"heleshaw_density", {2, 64}},
      {"random_dimension", {1, 4096}}, {"energy_monotone", {1, 512}},
  };
  return d;
}

FlowConfig flow_config(const json& c) {
  FlowConfig f;
  f.dt_initial = get<double>(c, "numerics.dt_initial", 1e-2);
  f.dt_min = get<double>(c, "numerics.dt_min", f.dt_min);
  f.delta_min = get<double>(c, "numerics.delta_min", f.delta_min);
  f.newton_tol = get<double>(c, "numerics.newton_tol", f.newton_tol);
  f.newton_max_iters = get<int>(c, "numerics.newton_max_iters", f.newton_max_iters);
  const std::string scheme = get<std::string>(c, "numerics.scheme", "semi_implicit_newton");
  if (scheme == "semi_implicit_newton") f.scheme = Scheme::semi_implicit_newton;
  else if (scheme == "explicit_adaptive") f.scheme = Scheme::explicit_adaptive;
  else throw ConfigError("numerics.scheme must be semi_implicit_newton or explicit_adaptive");
  try {
    f.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return f;
}

}  // namespace

int run_experiment(const json& config, bool assert_mode, std::ostream& log) {
  std::optional<Context> ctx;
  std::string name;
  try {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    name = get<std::string>(config, "experiment", "");
    const auto& defs = experiment_defaults();
    const auto it = defs.find(name);
    if (it == defs.end()) throw ConfigError("unknown experiment '" + name + "'");
    const int dim = get<int>(config, "grid.dim", it->second.dim);
    const int n = get<int>(config, "grid.N", it->second.n);
    if (dim != 1 && dim != 2) throw ConfigError("grid.dim must be 1 or 2");
    PeriodicGrid grid(dim, n);
    const std::string out = get<std::string>(config, "output_dir", "");
    if (out.empty()) throw ConfigError("output_dir is required");
    PsorOptions psor;
    psor.tol = get<double>(config, "numerics.psor_tol", psor.tol);
    psor.relaxation = get<double>(config, "numerics.psor_relaxation", psor.relaxation);
    if (!(psor.relaxation > 0.0 && psor.relaxation < 2.0)) throw ConfigError("numerics.psor_relaxation must lie in (0,2)");
    ctx.emplace(Context{config, fs::path(out), grid, flow_config(config), psor, {}, {}, log});
    // Unknown builtins are configuration errors; resolve early.
    const std::string label = hamiltonian_label(config, "");
    if (!label.empty()) builtin_hamiltonian(label, grid);
    fs::create_directories(ctx->dir);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownBuiltin& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    {
      std::ofstream params(ctx->path("params.json"));
      params << config.dump(2) << "\n";
    }
    log << "running " << name << "\n";
    if (name == "flow_convergence") flow_convergence(*ctx);
    else if (name == "envelope_curve") envelope_curve_experiment(*ctx);
    else if (name == "hopf_duality") hopf_duality_experiment(*ctx);
    else if (name == "tropical_voronoi") tropical_voronoi(*ctx);
    else if (name == "heleshaw_sweep") heleshaw_sweep_experiment(*ctx);
    else if (name == "heleshaw_density") heleshaw_density_experiment(*ctx);
    else if (name == "random_dimension") random_dimension_experiment(*ctx);
    else if (name == "energy_monotone") energy_monotone_experiment(*ctx);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownBuiltin& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }

  bool failed = false;
  {
    std::ofstream checks(ctx->path("checks.csv"));
    checks << "check,passed,value,bound,soft\n";
    for (const Check& c : ctx->checks) {
      checks << '"' << c.name << "\"," << (c.passed ? 1 : 0) << ',' << format_real(c.value) << ','
             << format_real(c.bound) << ',' << (c.soft ? 1 : 0) << '\n';
      log << (c.passed ? "  [pass] " : (c.soft ? "  [warn] " : "  [FAIL] ")) << c.name << " (value " << c.value
          << ", bound " << c.bound << ")\n";
      if (!c.passed && !c.soft) failed = true;
    }
  }

  json manifest;
  manifest["experiment"] = name;
  manifest["files"] = json::array();
  std::vector<std::string> files = ctx->files;
  std::sort(files.begin(), files.end());
  for (const std::string& f : files) {
    const std::string full = (ctx->dir / f).string();
    manifest["files"].push_back({{"path", f}, {"sha256", sha256_file(full)}, {"bytes", fs::file_size(full)}});
  }
  {
    std::ofstream m(ctx->dir / "manifest.json");
    m << manifest.dump(2) << "\n";
  }
  log << "manifest: " << (ctx->dir / "manifest.json").string() << "\n";
  return (assert_mode && failed) ? kExitAssert : kExitOk;
}

}  // namespace rshock
