#pragma once

// JSON experiment files and run manifests.
//
//   {
//     "name": "table1_cnst",
//     "dgp": "continuous",            // or "discrete"
//     "beta": [0], "kappa": [0, 5, 20], "T": [5, 20, 50],
//     "vol": ["CNST"],
//     "methods": ["t8", "t12", "t16", "tau"],
//     "n_reps": 2000, "alpha": 0.05, "sided": "two", "master_seed": 1,
//     "volatility": {"sigma0": 1, "sigma1": 4, "lambda_bar": 60, "omega_bar": 9,
//                    "break_fraction": 0.8, "gbm_diffusion": "omega"},
//     "continuous": {"delta": 0.003968..., "rho_vw": -0.98, "rho_wz": -0.4,
//                    "predictor_clock": "observation",
//                    "jumps": {"intensity": 0, "sd": 0}},
//     "discrete": {"ma_order": 2, "ma_weights": [], "slope_scale": "raw",
//                  "rho": -0.98, "endogeneity": "v_eps"}
//   }
//
// Every key is optional except "methods"; unknown keys are rejected. A run
// manifest wraps the config under "config" and is accepted wherever a config
// is.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cauchyreg/errors.hpp"
#include "cauchyreg/experiments.hpp"

namespace cauchyreg::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

struct ExperimentFile {
  std::string name;
  ExperimentGrid grid;
};

namespace detail {

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw SchemaError(where.empty() ? "config must be an object" : "'" + where + "' must be an object", where);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) {
      const std::string path = where.empty() ? key : where + "." + key;
      throw SchemaError("unknown key '" + path + "'", path);
    }
  }
}

inline std::string key_path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw SchemaError("'" + key_path(where, key) + "' must be a number", key_path(where, key));
  return v.get<double>();
}

inline std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw SchemaError("'" + key_path(where, key) + "' must be a string", key_path(where, key));
  return v.get<std::string>();
}

inline std::uint64_t get_unsigned(const json& obj, const std::string& where, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw SchemaError("'" + key_path(where, key) + "' must be a nonnegative integer", key_path(where, key));
  }
  return v.get<std::uint64_t>();
}

inline std::vector<double> get_numbers(const json& obj, const char* key, const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) throw SchemaError(std::string("'") + key + "' must be an array of numbers", key);
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw SchemaError(std::string("'") + key + "' must be an array of numbers", key);
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::vector<std::string> get_strings(const json& obj, const char* key, const std::vector<std::string>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) throw SchemaError(std::string("'") + key + "' must be an array of strings", key);
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) throw SchemaError(std::string("'") + key + "' must be an array of strings", key);
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Converts value errors thrown while interpreting a key into schema errors
// naming that key.
template <class Fn>
auto with_key(const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError("'" + key + "': " + e.what(), key);
  }
}

inline Sided parse_sided(const std::string& s) {
  if (s == "two") return Sided::two_sided;
  if (s == "right") return Sided::right;
  if (s == "left") return Sided::left;
  throw std::invalid_argument("unknown side '" + s + "' (expected two, right or left)");
}

}  // namespace detail

using detail::parse_sided;

/// Schema-validates a config (or a manifest wrapping one) and builds the grid.
/// Nothing is simulated here, but the grid's own validation runs so that
/// impossible cells are reported before any compute starts.
inline ExperimentFile parse_experiment(const json& doc) {
  if (doc.is_object() && doc.contains("config") && doc.contains("tool")) return parse_experiment(doc.at("config"));
  detail::check_keys(doc, "",
                     {"name", "dgp", "beta", "kappa", "T", "vol", "methods", "n_reps", "alpha", "sided", "master_seed",
                      "volatility", "continuous", "discrete"});
  using namespace detail;
  ExperimentFile f;
  ExperimentGrid& g = f.grid;
  f.name = get_string(doc, "", "name", "experiment");

  const std::string dgp = get_string(doc, "", "dgp", "continuous");
  if (dgp == "continuous") {
    g.dgp = DgpKind::continuous;
  } else if (dgp == "discrete") {
    g.dgp = DgpKind::discrete;
    g.T_values = {240};
  } else {
    throw SchemaError("'dgp' must be \"continuous\" or \"discrete\"", "dgp");
  }
  g.beta_values = get_numbers(doc, "beta", g.beta_values);
  g.kappa_values = get_numbers(doc, "kappa", g.kappa_values);
  g.T_values = get_numbers(doc, "T", g.T_values);
  g.vol_models.clear();
  for (const std::string& v : get_strings(doc, "vol", {"CNST"})) {
    g.vol_models.push_back(with_key("vol", [&] { return parse_vol_model(v); }));
  }
  if (!doc.contains("methods")) throw SchemaError("'methods' is required", "methods");
  for (const std::string& m : get_strings(doc, "methods", {})) {
    g.methods.push_back(with_key("methods", [&] { return MethodSpec::parse(m); }));
  }
  g.n_reps = get_unsigned(doc, "", "n_reps", g.n_reps);
  g.alpha = get_number(doc, "", "alpha", g.alpha);
  g.sided = with_key("sided", [&] { return parse_sided(get_string(doc, "", "sided", "two")); });
  g.master_seed = get_unsigned(doc, "", "master_seed", g.master_seed);

  VolParams vp;
  if (doc.contains("volatility")) {
    const json& v = doc.at("volatility");
    check_keys(v, "volatility", {"sigma0", "sigma1", "lambda_bar", "omega_bar", "break_fraction", "gbm_diffusion"});
    vp.sigma0 = get_number(v, "volatility", "sigma0", vp.sigma0);
    vp.sigma1 = get_number(v, "volatility", "sigma1", vp.sigma1);
    vp.lambda_bar = get_number(v, "volatility", "lambda_bar", vp.lambda_bar);
    vp.omega_bar = get_number(v, "volatility", "omega_bar", vp.omega_bar);
    vp.break_fraction = get_number(v, "volatility", "break_fraction", vp.break_fraction);
    const std::string diff = get_string(v, "volatility", "gbm_diffusion", "omega");
    if (diff == "omega") {
      vp.gbm_diffusion = GbmDiffusion::omega;
    } else if (diff == "omega_sq") {
      vp.gbm_diffusion = GbmDiffusion::omega_sq;
    } else {
      throw SchemaError("'volatility.gbm_diffusion' must be \"omega\" or \"omega_sq\"", "volatility.gbm_diffusion");
    }
  }
  g.continuous.vol_params = vp;
  g.discrete.vol_params = vp;

  if (doc.contains("continuous")) {
    const json& c = doc.at("continuous");
    check_keys(c, "continuous", {"delta", "rho_vw", "rho_wz", "predictor_clock", "predictor_demeaning", "jumps"});
    g.continuous.delta = get_number(c, "continuous", "delta", g.continuous.delta);
    g.continuous.rho_vw = get_number(c, "continuous", "rho_vw", g.continuous.rho_vw);
    g.continuous.rho_wz = get_number(c, "continuous", "rho_wz", g.continuous.rho_wz);
    const std::string clock = get_string(c, "continuous", "predictor_clock", "observation");
    if (clock == "observation") {
      g.continuous.clock = PredictorClock::observation;
    } else if (clock == "calendar") {
      g.continuous.clock = PredictorClock::calendar;
    } else {
      throw SchemaError("'continuous.predictor_clock' must be \"observation\" or \"calendar\"",
                        "continuous.predictor_clock");
    }
    const std::string demean = get_string(c, "continuous", "predictor_demeaning", "recursive");
    if (demean == "recursive") {
      g.continuous.demeaning = PredictorDemeaning::recursive;
    } else if (demean == "none") {
      g.continuous.demeaning = PredictorDemeaning::none;
    } else {
      throw SchemaError("'continuous.predictor_demeaning' must be \"recursive\" or \"none\"",
                        "continuous.predictor_demeaning");
    }
    if (c.contains("jumps")) {
      const json& j = c.at("jumps");
      check_keys(j, "continuous.jumps", {"intensity", "sd"});
      g.continuous.jump_intensity = get_number(j, "continuous.jumps", "intensity", 0.0);
      g.continuous.jump_sd = get_number(j, "continuous.jumps", "sd", 0.0);
    }
  }
  if (doc.contains("discrete")) {
    const json& d = doc.at("discrete");
    check_keys(d, "discrete", {"ma_order", "ma_weights", "slope_scale", "rho", "endogeneity"});
    g.discrete.ma_order = static_cast<int>(get_unsigned(d, "discrete", "ma_order", 2));
    g.discrete.custom_ma_weights = get_numbers(d, "ma_weights", {});
    const std::string scale = get_string(d, "discrete", "slope_scale", "raw");
    if (scale == "raw") {
      g.discrete.slope_scale = SlopeScale::raw;
    } else if (scale == "per_sample") {
      g.discrete.slope_scale = SlopeScale::per_sample;
    } else {
      throw SchemaError("'discrete.slope_scale' must be \"raw\" or \"per_sample\"", "discrete.slope_scale");
    }
    g.discrete.rho = get_number(d, "discrete", "rho", g.discrete.rho);
    const std::string endo = get_string(d, "discrete", "endogeneity", "v_eps");
    if (endo == "v_eps") {
      g.discrete.endogeneity = Endogeneity::v_eps;
    } else if (endo == "eta_eps") {
      g.discrete.endogeneity = Endogeneity::eta_eps;
    } else {
      throw SchemaError("'discrete.endogeneity' must be \"v_eps\" or \"eta_eps\"", "discrete.endogeneity");
    }
  }
  with_key("grid", [&] {
    g.validate();
    return 0;
  });
  return f;
}

inline ExperimentFile parse_experiment_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "");
  }
  return parse_experiment(doc);
}

inline ExperimentFile load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_text(ss.str());
}

/// Full config echo; parse_experiment(to_json(f)) rebuilds the same grid.
inline json to_json(const ExperimentFile& f) {
  const ExperimentGrid& g = f.grid;
  json doc;
  doc["name"] = f.name;
  doc["dgp"] = to_string(g.dgp);
  doc["beta"] = g.beta_values;
  doc["kappa"] = g.kappa_values;
  doc["T"] = g.T_values;
  json vols = json::array();
  for (VolModel v : g.vol_models) vols.push_back(to_string(v));
  doc["vol"] = vols;
  json methods = json::array();
  for (const MethodSpec& m : g.methods) methods.push_back(m.label());
  doc["methods"] = methods;
  doc["n_reps"] = g.n_reps;
  doc["alpha"] = g.alpha;
  doc["sided"] = to_string(g.sided);
  doc["master_seed"] = g.master_seed;
  const VolParams& vp = g.continuous.vol_params;
  doc["volatility"] = {{"sigma0", vp.sigma0},
                       {"sigma1", vp.sigma1},
                       {"lambda_bar", vp.lambda_bar},
                       {"omega_bar", vp.omega_bar},
                       {"break_fraction", vp.break_fraction},
                       {"gbm_diffusion", vp.gbm_diffusion == GbmDiffusion::omega ? "omega" : "omega_sq"}};
  const DgpContinuousConfig& c = g.continuous;
  doc["continuous"] = {{"delta", c.delta},
                       {"rho_vw", c.rho_vw},
                       {"rho_wz", c.rho_wz},
                       {"predictor_clock", c.clock == PredictorClock::observation ? "observation" : "calendar"},
                       {"predictor_demeaning", c.demeaning == PredictorDemeaning::recursive ? "recursive" : "none"},
                       {"jumps", {{"intensity", c.jump_intensity}, {"sd", c.jump_sd}}}};
  const DgpDiscreteConfig& d = g.discrete;
  doc["discrete"] = {{"ma_order", d.ma_order},
                     {"ma_weights", d.custom_ma_weights},
                     {"slope_scale", d.slope_scale == SlopeScale::raw ? "raw" : "per_sample"},
                     {"rho", d.rho},
                     {"endogeneity", d.endogeneity == Endogeneity::v_eps ? "v_eps" : "eta_eps"}};
  return doc;
}

/// Run manifest: config echo plus everything else needed to rerun bitwise.
inline json make_manifest(const ExperimentFile& f, std::size_t workers) {
  return json{{"tool", "cauchyreg"},
              {"version", kToolVersion},
              {"master_seed", f.grid.master_seed},
              {"workers", workers},
              {"config", to_json(f)}};
}

}  // namespace cauchyreg::io
