#pragma once

// Subcommand dispatch for econ-ensemble.
//
// Exit codes: 0 success, 1 input or validation error, 2 numerical failure.

#include "econ_cli/format.hpp"
#include "econ_cli/scenario.hpp"
#include "econ_cli/svg.hpp"

#include <CLI11.hpp>
#include <econ_ensemble/econ_ensemble.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace econ::cli
{

enum ExitCode : int
{
  exit_ok = 0,
  exit_input = 1,
  exit_numerical = 2,
};

struct Options
{
  std::string command;
  std::string scenario;
  std::filesystem::path out = ".";
  bool svg = false;
  bool verbose = false;
};

inline unsigned worker_threads()
{
  if (const char* env = std::getenv("ECON_ENSEMBLE_THREADS"))
  {
    try
    {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    }
    catch (const std::exception&)
    {
    }
    throw ScenarioError("ECON_ENSEMBLE_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write '" + path.string() + "'");
  out << text;
}

namespace detail
{

template <class T>
const T& need(const std::optional<T>& v, const char* what)
{
  if (!v) throw ScenarioError(std::string("scenario is missing the '") + what + "' section");
  return *v;
}

inline Json occupation_json(const OccupationVector& occ)
{
  Json a = Json::array();
  for (unsigned k : occ.a) a.push_back(k);
  return a;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

inline Json stationarity_json(const StationarityReport& r)
{
  Json j;
  j["first_variation"] = number_or_null(r.first_variation);
  j["increment_full"] = number_or_null(r.increment_full);
  j["increment_half"] = number_or_null(r.increment_half);
  j["reduction_ratio"] = number_or_null(r.reduction_ratio);
  return j;
}

}

inline int cmd_observables(const Scenario& s, const Options& opt)
{
  const auto& dos = detail::need(s.dos, "dos");
  const auto& params = detail::need(s.params, "params");
  const Observables o = observe(dos, params);

  Json j;
  j["ln_z"] = o.ln_z;
  j["U"] = o.wealth_u;
  j["N"] = o.population_n;
  j["p"] = o.pressure_p;
  j["T"] = params.temperature();
  j["mu"] = number_or_null(params.potential());
  if (opt.verbose)
  {
    j["alpha"] = params.alpha();
    j["beta"] = params.beta();
    j["volume"] = params.volume();
    // The derivation's signed form -(1/beta) d lnZ/dV, next to the reported p.
    j["p_volume_derivative"] = pressure_volume_derivative(dos, params);
  }
  write_file(opt.out / "result.json", to_json_text(j));
  return exit_ok;
}

inline int cmd_sweep(const Scenario& s, const Options& opt)
{
  const auto& dos = detail::need(s.dos, "dos");
  const auto& sw = detail::need(s.sweep, "sweep");
  const SweepTable table =
      sweep_temperature(dos, sw.alpha, sw.t_min, sw.t_max, sw.steps, sw.volume, worker_threads());

  std::string csv = "T,ln_z,U,N,p\n";
  for (const auto& r : table.rows)
  {
    csv += format_number(r.temperature) + "," + format_number(r.ln_z) + "," +
           format_number(r.wealth_u) + "," + format_number(r.population_n) + "," +
           format_number(r.pressure_p) + "\n";
  }
  write_file(opt.out / "sweep.csv", csv);

  if (opt.svg)
  {
    Series ln_z, u, n, p;
    for (const auto& r : table.rows)
    {
      for (Series* series : {&ln_z, &u, &n, &p}) series->x.push_back(r.temperature);
      ln_z.y.push_back(r.ln_z);
      u.y.push_back(r.wealth_u);
      n.y.push_back(r.population_n);
      p.y.push_back(r.pressure_p);
    }
    write_file(opt.out / "fig_ln_z.svg", render_line_chart(ln_z, "ln Z vs T", "T", "ln Z"));
    write_file(opt.out / "fig_wealth.svg", render_line_chart(u, "Wealth U vs T", "T", "U"));
    write_file(opt.out / "fig_population.svg",
               render_line_chart(n, "Population N vs T", "T", "N"));
    write_file(opt.out / "fig_pressure.svg",
               render_line_chart(p, "Economic pressure p vs T", "T", "p"));
  }
  return exit_ok;
}

inline int cmd_enumerate(const Scenario& s, const Options& opt)
{
  const auto& spec = detail::need(s.enumerate, "enumerate");
  const auto dists =
      enumerate_distributions(spec.system, spec.n, spec.e, spec.e_tol, spec.limits);

  Json j;
  j["n"] = spec.n;
  j["e"] = spec.e;
  j["mode"] = to_string(spec.mode);
  j["infeasible"] = dists.empty();
  Json list = Json::array();
  double total = 0.0;
  for (const auto& d : dists)
  {
    const double omega = microstate_count(d, spec.system, spec.mode);
    total += omega;
    list.push_back({{"a", detail::occupation_json(d)}, {"omega", omega}});
  }
  j["distributions"] = list;
  j["total_omega"] = total;
  j["most_probable"] = dists.empty()
                           ? Json(nullptr)
                           : detail::occupation_json(most_probable_distribution(
                                 spec.system, spec.n, spec.e, spec.e_tol, spec.mode, spec.limits));

  // Forward lattice quotients; null where the neighbour is infeasible or flat.
  auto quotient = [&](auto&& compute, const char* key) {
    try
    {
      j[key] = number_or_null(compute());
    }
    catch (const DegenerateDifferenceError& e)
    {
      j[key] = nullptr;
      j[std::string(key) + "_note"] = e.what();
    }
  };
  quotient([&] { return temperature_from_entropy(spec.system, spec.n, spec.e, spec.delta_e,
                                                 spec.mode, spec.e_tol); },
           "temperature");
  quotient([&] { return potential_from_entropy(spec.system, spec.n, spec.e, 1, spec.mode,
                                               spec.e_tol); },
           "potential");
  write_file(opt.out / "result.json", to_json_text(j));
  return exit_ok;
}

inline int cmd_equilibrate(const Scenario& s, const Options& opt)
{
  const auto& spec = detail::need(s.equilibrate, "equilibrate");
  const JointEquilibrium eq = joint_equilibrium(spec.system1, spec.system2, spec.e_total,
                                                spec.n_total, spec.mode, spec.e_step, 1e-9,
                                                spec.limits);
  Json j;
  Json joint;
  joint["e1"] = eq.e1;
  joint["n1"] = eq.n1;
  joint["T1"] = number_or_null(eq.first.temperature);
  joint["mu1"] = number_or_null(eq.first.potential);
  joint["T2"] = number_or_null(eq.second.temperature);
  joint["mu2"] = number_or_null(eq.second.potential);
  joint["t_common"] = number_or_null(eq.t_common);
  joint["mu_common"] = number_or_null(eq.mu_common);
  joint["omega_log_total"] = eq.omega_log_total;
  j["joint_equilibrium"] = joint;

  // Flow is predicted from the initial split when given, else at the optimum.
  SubsystemIntensives first = eq.first, second = eq.second;
  std::string source = "optimum";
  if (spec.initial_split)
  {
    const JointLandscape land(spec.system1, spec.system2, spec.e_total, spec.n_total, spec.mode,
                              spec.e_step, 1e-9, spec.limits);
    const double k = std::round(spec.initial_split->first / spec.e_step);
    if (k < 0 || k > static_cast<double>(land.k_total()) || spec.initial_split->second > spec.n_total)
      throw ScenarioError("scenario.equilibrate.initial_split: outside the totals");
    const auto k1 = static_cast<std::size_t>(k);
    const unsigned n1 = spec.initial_split->second;
    if (!land.first().feasible(k1, n1) || !land.second().feasible(land.k_total() - k1, spec.n_total - n1))
      throw ScenarioError("scenario.equilibrate.initial_split: a subsystem has no distribution there");
    std::tie(first, second) = land.intensives(k1, n1);
    source = "initial_split";
  }
  Json flow;
  flow["source"] = source;
  flow["T1"] = number_or_null(first.temperature);
  flow["mu1"] = number_or_null(first.potential);
  flow["T2"] = number_or_null(second.temperature);
  flow["mu2"] = number_or_null(second.potential);
  if (first.temperature > 0.0 && second.temperature > 0.0 && !std::isnan(first.potential) &&
      !std::isnan(second.potential))
  {
    const FlowPrediction f = flow_direction(first.temperature, first.potential,
                                            second.temperature, second.potential,
                                            s.equality_tolerance);
    flow["wealth"] = to_string(f.wealth_flow);
    flow["individuals"] = to_string(f.individual_flow);
  }
  else
  {
    flow["wealth"] = nullptr;
    flow["individuals"] = nullptr;
  }
  j["flow"] = flow;

  if (spec.pressures)
  {
    j["invasion"] = to_string(
        invasion_outcome(spec.pressures->first, spec.pressures->second, s.equality_tolerance));
  }
  else
  {
    j["invasion"] = nullptr;
  }

  if (opt.verbose)
  {
    Json splits = Json::array();
    for (const auto& sp : eq.splits)
      splits.push_back({{"e1", sp.e1}, {"n1", sp.n1}, {"omega_log_total", sp.omega_log_total}});
    j["splits"] = splits;
  }
  write_file(opt.out / "result.json", to_json_text(j));
  return exit_ok;
}

inline int cmd_optimize_dos(const Scenario& s, const Options& opt)
{
  const OptimizeSpec o = s.optimize.value_or(OptimizeSpec{});
  const VolumeProfile vp = optimal_volume_profile(o.c1, o.c2, o.alpha, o.beta);
  const MaxPressureDos gp = optimal_dos_profile(o.c3, o.c4, o.alpha, o.beta);

  Json j;
  j["constants"] = {{"c1", o.c1}, {"c2", o.c2}, {"c3", o.c3}, {"c4", o.c4},
                    {"alpha", o.alpha}, {"beta", o.beta}};
  j["V0"] = vp(0.0);
  j["g0"] = profile_value(gp, 0.0);

  const auto grid = detail::linspace(o.residual_grid.lo, o.residual_grid.hi, o.residual_grid.points);
  const EulerLagrangeResidual res = euler_lagrange_residual(vp, gp, grid);
  j["residuals"] = {{"grid_min", o.residual_grid.lo},
                    {"grid_max", o.residual_grid.hi},
                    {"grid_points", o.residual_grid.points},
                    {"max_abs_residual_v", res.max_abs_residual_v},
                    {"max_abs_residual_g", res.max_abs_residual_g}};

  if (o.b)
  {
    const CutoffResult cut = wealth_cutoff_with_mass(vp, gp, *o.b);
    j["cutoff"] = {{"b", *o.b}, {"eps0", cut.eps0}, {"level_mass", cut.level_mass}};
  }
  else
  {
    j["cutoff"] = nullptr;
  }

  const auto samples = sample_profile(gp, o.stationarity_grid.lo, o.stationarity_grid.hi,
                                      o.stationarity_grid.points);
  StationarityConfig config = o.stationarity;
  config.alpha = o.alpha;
  config.beta = o.beta;
  Json st;
  st["grid_points"] = o.stationarity_grid.points;
  st["scale"] = config.scale;
  st["seed"] = config.seed;
  std::vector<std::string> annihilating;
  for (PressureReading reading : {PressureReading::Printed, PressureReading::ProductRule})
  {
    config.reading = reading;
    const StationarityReport r = stationarity_check(samples, vp, config);
    st[to_string(reading)] = detail::stationarity_json(r);
    if (r.reduction_ratio >= 3.5) annihilating.push_back(to_string(reading));
  }
  st["stationary_readings"] = annihilating;
  j["stationarity"] = st;
  write_file(opt.out / "result.json", to_json_text(j));

  if (opt.svg)
  {
    auto plot = [&](auto&& f, std::pair<double, double> range, const std::string& file,
                    const std::string& title, const std::string& y_label) {
      Series series;
      for (double x : detail::linspace(range.first, range.second, 400))
      {
        series.x.push_back(x);
        try
        {
          series.y.push_back(f(x));
        }
        catch (const OverflowError&)
        {
          series.y.push_back(std::numeric_limits<double>::quiet_NaN());
        }
      }
      write_file(opt.out / file, render_line_chart(series, title, "eps", y_label));
    };
    auto volume = [&](double x) { return vp(x); };
    auto dos = [&](double x) { return profile_value(gp, x); };
    plot(volume, o.plot_range, "fig_volume.svg", "Optimal volume profile V(eps)", "V");
    plot(volume, o.zoom_range, "fig_volume_zoom.svg", "V(eps), zoom", "V");
    plot(dos, o.plot_range, "fig_dos.svg", "Optimal density of states g(eps)", "g");
    plot(dos, o.zoom_range, "fig_dos_zoom.svg", "g(eps), zoom", "g");
  }
  return exit_ok;
}

inline int cmd_validate(const Scenario& s, const Options& opt)
{
  Json j;
  Json issues = Json::array();
  if (s.dos)
    for (DosIssue issue : validate_dos(*s.dos).issues) issues.push_back(to_string(issue));
  j["valid"] = issues.empty();
  j["issues"] = issues;
  write_file(opt.out / "result.json", to_json_text(j));
  return issues.empty() ? exit_ok : exit_input;
}

inline int dispatch(const Options& opt)
{
  try
  {
    const Scenario scenario = load_scenario(opt.scenario);
    if (opt.command == "observables") return cmd_observables(scenario, opt);
    if (opt.command == "sweep") return cmd_sweep(scenario, opt);
    if (opt.command == "enumerate") return cmd_enumerate(scenario, opt);
    if (opt.command == "equilibrate") return cmd_equilibrate(scenario, opt);
    if (opt.command == "optimize-dos") return cmd_optimize_dos(scenario, opt);
    if (opt.command == "validate") return cmd_validate(scenario, opt);
    std::cerr << "econ-ensemble: unknown command '" << opt.command << "'\n";
    return exit_input;
  }
  catch (const InputError& e)
  {
    std::cerr << "econ-ensemble: input error: " << e.what() << "\n";
    return exit_input;
  }
  catch (const NumericalError& e)
  {
    std::cerr << "econ-ensemble: numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
  catch (const std::filesystem::filesystem_error& e)
  {
    std::cerr << "econ-ensemble: output error: " << e.what() << "\n";
    return exit_input;
  }
  catch (const nlohmann::json::exception& e)
  {
    std::cerr << "econ-ensemble: input error: " << e.what() << "\n";
    return exit_input;
  }
}

inline int run(int argc, const char* const* argv)
{
  CLI::App app{"Equilibrium statistical model of economic systems"};
  Options opt;
  app.add_option("command", opt.command,
                 "observables | sweep | enumerate | equilibrate | optimize-dos | validate")
      ->required()
      ->check(CLI::IsMember({"observables", "sweep", "enumerate", "equilibrate", "optimize-dos",
                             "validate"}));
  app.add_option("--scenario", opt.scenario, "scenario JSON file")->required();
  app.add_option("--out", opt.out, "output directory");
  app.add_flag("--svg", opt.svg, "also write SVG charts");
  app.add_flag("--verbose", opt.verbose, "include diagnostic fields");
  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }
  return dispatch(opt);
}

}
