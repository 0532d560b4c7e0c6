#pragma once

// Scenario files: a single JSON document, "schema_version": 1. Every object
// is checked against its allowed key set before any computation runs.

#include "econ_cli/format.hpp"

#include <econ_ensemble/econ_ensemble.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace econ::cli
{

class ScenarioError : public InputError
{
public:
  using InputError::InputError;
};

/// Read-only view of one JSON object with a fixed key vocabulary.
class ObjectReader
{
public:
  ObjectReader(const Json& j, std::string path, std::initializer_list<const char*> allowed)
    : j_(j), path_(std::move(path))
  {
    if (!j.is_object()) throw ScenarioError(path_ + ": expected an object");
    for (const auto& [key, value] : j.items())
    {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        throw ScenarioError(path_ + ": unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& raw(const char* key) const
  {
    if (!has(key)) throw ScenarioError(path_ + ": missing required key '" + key + "'");
    return j_.at(key);
  }
  std::string child(const char* key) const { return path_ + "." + key; }

  double number(const char* key) const
  {
    const Json& v = raw(key);
    if (!v.is_number()) throw ScenarioError(child(key) + ": expected a number");
    return v.get<double>();
  }
  double number_or(const char* key, double fallback) const
  {
    return has(key) ? number(key) : fallback;
  }
  std::optional<double> maybe_number(const char* key) const
  {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  std::uint64_t count(const char* key) const
  {
    const Json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ScenarioError(child(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t count_or(const char* key, std::uint64_t fallback) const
  {
    return has(key) ? count(key) : fallback;
  }
  std::string text(const char* key) const
  {
    const Json& v = raw(key);
    if (!v.is_string()) throw ScenarioError(child(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::pair<double, double> range(const char* key) const
  {
    const Json& v = raw(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ScenarioError(child(key) + ": expected [lo, hi]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

private:
  const Json& j_;
  std::string path_;
};

inline std::optional<VolumeCoupling> parse_coupling(const ObjectReader& r)
{
  if (!r.has("volume_coupling")) return std::nullopt;
  const std::string c = r.text("volume_coupling");
  if (c == "proportional") return VolumeCoupling::Proportional;
  if (c == "fixed") return VolumeCoupling::Fixed;
  throw ScenarioError(r.child("volume_coupling") + ": expected 'proportional' or 'fixed'");
}

inline DensityOfStates parse_dos(const Json& j, const std::string& path)
{
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ScenarioError(path + ": expected an object with a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "parabolic")
  {
    const ObjectReader r(j, path, {"kind", "C", "eps_star", "volume_coupling"});
    if (parse_coupling(r).value_or(VolumeCoupling::Proportional) != VolumeCoupling::Proportional)
      throw ScenarioError(path + ": parabolic DOS is always proportional to V");
    return DensityOfStates::parabolic(r.number("C"), r.number("eps_star"));
  }
  if (kind == "max_pressure")
  {
    const ObjectReader r(j, path,
                         {"kind", "c3", "c4", "alpha", "beta", "volume_coupling", "support_max"});
    const auto coupling = parse_coupling(r);
    if (!coupling) throw ScenarioError(path + ": missing required key 'volume_coupling'");
    return DensityOfStates::max_pressure(r.number("c3"), r.number("c4"), r.number("alpha"),
                                         r.number("beta"), coupling, r.maybe_number("support_max"));
  }
  if (kind == "tabulated")
  {
    const ObjectReader r(j, path, {"kind", "samples", "volume_coupling"});
    const auto coupling = parse_coupling(r);
    if (!coupling) throw ScenarioError(path + ": missing required key 'volume_coupling'");
    const Json& samples = r.raw("samples");
    if (!samples.is_array() || samples.empty())
      throw ScenarioError(r.child("samples") + ": expected a non-empty array of [eps, g]");
    std::vector<DosSample> out;
    for (const auto& s : samples)
    {
      if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
        throw ScenarioError(r.child("samples") + ": each sample must be [eps, g]");
      out.push_back({s[0].get<double>(), s[1].get<double>()});
    }
    return DensityOfStates::tabulated(std::move(out), coupling);
  }
  throw ScenarioError(path + ": unknown DOS kind '" + kind + "'");
}

inline EnsembleParams parse_params(const Json& j, const std::string& path)
{
  const ObjectReader r(j, path, {"alpha", "beta", "T", "volume"});
  if (r.has("beta") == r.has("T")) throw ScenarioError(path + ": give exactly one of beta, T");
  const double volume = r.number_or("volume", 1.0);
  if (r.has("T")) return EnsembleParams::from_temperature(r.number("alpha"), r.number("T"), volume);
  return {r.number("alpha"), r.number("beta"), volume};
}

inline LevelSystem parse_levels(const Json& j, const std::string& path)
{
  if (!j.is_array() || j.empty()) throw ScenarioError(path + ": expected a non-empty level array");
  std::vector<Level> levels;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    const ObjectReader r(j[i], path + "[" + std::to_string(i) + "]", {"eps", "weight"});
    const auto weight = r.count("weight");
    if (weight < 1 || weight > 1000000) throw ScenarioError(r.child("weight") + ": out of range");
    levels.push_back({r.number("eps"), static_cast<unsigned>(weight)});
  }
  return LevelSystem(std::move(levels));
}

inline CountingMode parse_mode(const ObjectReader& r)
{
  if (!r.has("mode")) return CountingMode::CorrectedBoltzmann;
  const std::string m = r.text("mode");
  if (m == "corrected_boltzmann") return CountingMode::CorrectedBoltzmann;
  if (m == "distinguishable") return CountingMode::Distinguishable;
  throw ScenarioError(r.child("mode") + ": expected 'corrected_boltzmann' or 'distinguishable'");
}

inline const char* to_string(CountingMode m)
{
  return m == CountingMode::CorrectedBoltzmann ? "corrected_boltzmann" : "distinguishable";
}

struct SweepSpec
{
  double alpha;
  double volume;
  double t_min;
  double t_max;
  std::size_t steps;
};

struct EnumerateSpec
{
  LevelSystem system;
  unsigned n;
  double e;
  double e_tol;
  double delta_e;
  CountingMode mode;
  EnumerationLimits limits;
};

struct EquilibrateSpec
{
  LevelSystem system1;
  LevelSystem system2;
  double e_total;
  unsigned n_total;
  double e_step;
  CountingMode mode;
  EnumerationLimits limits;
  std::optional<std::pair<double, unsigned>> initial_split;
  std::optional<std::pair<double, double>> pressures;
};

struct GridSpec
{
  double lo;
  double hi;
  std::size_t points;
};

struct OptimizeSpec
{
  double alpha = 1.0;
  double beta = 1.0;
  double c1 = 1.0;
  double c2 = 0.0;
  double c3 = 1.0;
  double c4 = 0.0;
  std::optional<double> b;
  GridSpec residual_grid{0.0, 3.0, 64};
  GridSpec stationarity_grid{0.0, 1.0, 1025};
  StationarityConfig stationarity;
  std::pair<double, double> plot_range{0.0, 3.0};
  std::pair<double, double> zoom_range{0.0, 1.0};
};

struct Scenario
{
  std::optional<DensityOfStates> dos;
  std::optional<EnsembleParams> params;
  std::optional<SweepSpec> sweep;
  std::optional<EnumerateSpec> enumerate;
  std::optional<EquilibrateSpec> equilibrate;
  std::optional<OptimizeSpec> optimize;
  double equality_tolerance = default_equality_tolerance;
};

inline GridSpec parse_grid(const Json& j, const std::string& path, GridSpec fallback)
{
  const ObjectReader r(j, path, {"min", "max", "points"});
  GridSpec g{r.number_or("min", fallback.lo), r.number_or("max", fallback.hi),
             r.count_or("points", fallback.points)};
  if (!(g.hi > g.lo) || g.points < 2) throw ScenarioError(path + ": need max > min, points >= 2");
  return g;
}

inline EnumerationLimits parse_limits(const ObjectReader& r)
{
  EnumerationLimits limits;
  limits.max_n = static_cast<unsigned>(r.count_or("max_n", limits.max_n));
  limits.max_levels = r.count_or("max_levels", limits.max_levels);
  return limits;
}

inline Scenario parse_scenario(const Json& j)
{
  const ObjectReader root(j, "scenario",
                          {"schema_version", "dos", "params", "sweep", "enumerate", "equilibrate",
                           "optimize", "tolerances"});
  if (!root.has("schema_version") || root.count("schema_version") != 1)
    throw ScenarioError("scenario: schema_version must be 1");

  Scenario s;
  if (root.has("dos")) s.dos = parse_dos(root.raw("dos"), "scenario.dos");
  if (root.has("params")) s.params = parse_params(root.raw("params"), "scenario.params");
  if (root.has("tolerances"))
  {
    const ObjectReader r(root.raw("tolerances"), "scenario.tolerances", {"equality"});
    s.equality_tolerance = r.number_or("equality", s.equality_tolerance);
    if (!(s.equality_tolerance >= 0.0))
      throw ScenarioError("scenario.tolerances.equality: must be >= 0");
  }
  if (root.has("sweep"))
  {
    const ObjectReader r(root.raw("sweep"), "scenario.sweep",
                         {"alpha", "volume", "t_min", "t_max", "steps"});
    s.sweep = SweepSpec{r.number("alpha"), r.number_or("volume", 1.0), r.number("t_min"),
                        r.number("t_max"), r.count("steps")};
    if (!(s.sweep->t_min > 0.0) || s.sweep->steps < 1 ||
        (s.sweep->steps > 1 && !(s.sweep->t_min < s.sweep->t_max)))
      throw ScenarioError("scenario.sweep: need 0 < t_min < t_max and steps >= 1");
  }
  if (root.has("enumerate"))
  {
    const ObjectReader r(root.raw("enumerate"), "scenario.enumerate",
                         {"levels", "n", "e", "e_tol", "delta_e", "mode", "max_n", "max_levels"});
    s.enumerate = EnumerateSpec{parse_levels(r.raw("levels"), r.child("levels")),
                                static_cast<unsigned>(r.count("n")),
                                r.number("e"),
                                r.number_or("e_tol", 1e-9),
                                r.number_or("delta_e", 1.0),
                                parse_mode(r),
                                parse_limits(r)};
  }
  if (root.has("equilibrate"))
  {
    const ObjectReader r(root.raw("equilibrate"), "scenario.equilibrate",
                         {"system1", "system2", "e_total", "n_total", "e_step", "mode", "max_n",
                          "max_levels", "initial_split", "pressures"});
    EquilibrateSpec spec{parse_levels(r.raw("system1"), r.child("system1")),
                         parse_levels(r.raw("system2"), r.child("system2")),
                         r.number("e_total"),
                         static_cast<unsigned>(r.count("n_total")),
                         r.number_or("e_step", 1.0),
                         parse_mode(r),
                         parse_limits(r),
                         std::nullopt,
                         std::nullopt};
    if (r.has("initial_split"))
    {
      const ObjectReader split(r.raw("initial_split"), r.child("initial_split"), {"e1", "n1"});
      spec.initial_split = {{split.number("e1"), static_cast<unsigned>(split.count("n1"))}};
    }
    if (r.has("pressures"))
    {
      const ObjectReader p(r.raw("pressures"), r.child("pressures"), {"p1", "p2"});
      spec.pressures = {{p.number("p1"), p.number("p2")}};
    }
    s.equilibrate = std::move(spec);
  }
  if (root.has("optimize"))
  {
    const ObjectReader r(root.raw("optimize"), "scenario.optimize",
                         {"alpha", "beta", "c1", "c2", "c3", "c4", "b", "residual_grid",
                          "stationarity", "plot_range", "zoom_range"});
    OptimizeSpec o;
    o.alpha = r.number_or("alpha", o.alpha);
    o.beta = r.number_or("beta", o.beta);
    o.c1 = r.number_or("c1", o.c1);
    o.c2 = r.number_or("c2", o.c2);
    o.c3 = r.number_or("c3", o.c3);
    o.c4 = r.number_or("c4", o.c4);
    o.b = r.maybe_number("b");
    if (r.has("residual_grid"))
      o.residual_grid = parse_grid(r.raw("residual_grid"), r.child("residual_grid"), o.residual_grid);
    if (r.has("stationarity"))
    {
      const Json& st = r.raw("stationarity");
      const ObjectReader sr(st, r.child("stationarity"),
                            {"min", "max", "points", "perturbations", "scale", "seed"});
      Json grid = Json::object();
      for (const char* k : {"min", "max", "points"})
        if (sr.has(k)) grid[k] = st[k];
      o.stationarity_grid = parse_grid(grid, r.child("stationarity"), o.stationarity_grid);
      o.stationarity.perturbations =
          static_cast<unsigned>(sr.count_or("perturbations", o.stationarity.perturbations));
      o.stationarity.scale = sr.number_or("scale", o.stationarity.scale);
      o.stationarity.seed = sr.count_or("seed", o.stationarity.seed);
    }
    if (r.has("plot_range")) o.plot_range = r.range("plot_range");
    if (r.has("zoom_range")) o.zoom_range = r.range("zoom_range");
    s.optimize = o;
  }
  return s;
}

inline Scenario load_scenario(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j;
  try
  {
    j = Json::parse(buffer.str());
  }
  catch (const Json::parse_error& e)
  {
    throw ScenarioError(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

}
