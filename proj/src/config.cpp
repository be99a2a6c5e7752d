#include "macsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "macsim/error.hpp"

namespace macsim {
namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

PerturbationPlan parse_plan(const json& j) {
  reject_unknown(j,
                 {"sa1_adjacent", "mb_within_sa1", "bday_missing", "bday_altered", "byear_minus2",
                  "byear_plus2", "byear_minus1", "byear_plus1", "sex_flip", "eye_missing",
                  "eye_replace", "cob_missing_majority", "cob_missing_other", "cob_recode_other",
                  "cob_recode_to_majority"},
                 "perturbation");
  PerturbationPlan p;
  p.sa1_adjacent = get_or(j, "sa1_adjacent", p.sa1_adjacent);
  p.mb_within_sa1 = get_or(j, "mb_within_sa1", p.mb_within_sa1);
  p.bday_missing = get_or(j, "bday_missing", p.bday_missing);
  p.bday_altered = get_or(j, "bday_altered", p.bday_altered);
  p.byear_minus2 = get_or(j, "byear_minus2", p.byear_minus2);
  p.byear_plus2 = get_or(j, "byear_plus2", p.byear_plus2);
  p.byear_minus1 = get_or(j, "byear_minus1", p.byear_minus1);
  p.byear_plus1 = get_or(j, "byear_plus1", p.byear_plus1);
  p.sex_flip = get_or(j, "sex_flip", p.sex_flip);
  p.eye_missing = get_or(j, "eye_missing", p.eye_missing);
  p.eye_replace = get_or(j, "eye_replace", p.eye_replace);
  p.cob_missing_majority = get_or(j, "cob_missing_majority", p.cob_missing_majority);
  p.cob_missing_other = get_or(j, "cob_missing_other", p.cob_missing_other);
  p.cob_recode_other = get_or(j, "cob_recode_other", p.cob_recode_other);
  p.cob_recode_to_majority = get_or(j, "cob_recode_to_majority", p.cob_recode_to_majority);
  return p;
}

GeneratorConfig parse_generator(const json& j) {
  if (!j.is_object()) throw ConfigError("synthgen section must be an object");
  reject_unknown(j,
                 {"n_y", "n_x", "seed", "sa1_count", "sa1_first", "mb_per_sa1", "mb_digits",
                  "bday_min", "bday_max", "byear_min", "byear_max", "eye_categories",
                  "cob_majority_code", "cob_majority_share", "cob_codes", "perturbation"},
                 "synthgen");
  GeneratorConfig g;
  g.n_y = get_or(j, "n_y", g.n_y);
  g.n_x = get_or(j, "n_x", g.n_x);
  g.seed = get_or(j, "seed", g.seed);
  g.sa1_count = get_or(j, "sa1_count", g.sa1_count);
  g.sa1_first = get_or(j, "sa1_first", g.sa1_first);
  g.mb_per_sa1 = get_or(j, "mb_per_sa1", g.mb_per_sa1);
  g.mb_digits = get_or(j, "mb_digits", g.mb_digits);
  g.bday_min = get_or(j, "bday_min", g.bday_min);
  g.bday_max = get_or(j, "bday_max", g.bday_max);
  g.byear_min = get_or(j, "byear_min", g.byear_min);
  g.byear_max = get_or(j, "byear_max", g.byear_max);
  g.eye_categories = get_or(j, "eye_categories", g.eye_categories);
  g.cob_majority_code = get_or(j, "cob_majority_code", g.cob_majority_code);
  g.cob_majority_share = get_or(j, "cob_majority_share", g.cob_majority_share);
  if (const auto it = j.find("cob_codes"); it != j.end()) {
    g.cob_codes.clear();
    for (const auto& c : *it) {
      g.cob_codes.push_back({get_or(c, "code", 0), get_or(c, "weight", 1.0)});
    }
  }
  if (const auto it = j.find("perturbation"); it != j.end()) {
    g.plan = it->is_string() && it->get<std::string>() == "none" ? PerturbationPlan::none()
                                                                  : parse_plan(*it);
  }
  g.validate();
  return g;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

GeneratorConfig parse_generator_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  // A full run config is accepted too; its synthgen section is used.
  if (j.is_object() && j.contains("synthgen")) return parse_generator(j.at("synthgen"));
  return parse_generator(j);
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"input", "synthgen", "variables", "blocking", "mode", "cutoff", "samples",
                  "thinning", "seed", "mug", "reestimate_per_sample", "skip_infeasible_blocks",
                  "dump_snapshots", "threads", "output", "compare"},
                 "config");
  RunConfig cfg;
  if (const auto it = j.find("input"); it != j.end()) {
    const auto& in = *it;
    reject_unknown(in, {"x", "y", "alignment", "id_column", "missing_token"}, "input");
    InputFiles files;
    if (!in.contains("x") || !in.contains("y")) throw ConfigError("input needs both 'x' and 'y'");
    files.x = resolve(base_dir, in.at("x").get<std::string>());
    files.y = resolve(base_dir, in.at("y").get<std::string>());
    if (in.contains("alignment")) files.alignment = resolve(base_dir, in.at("alignment").get<std::string>());
    files.csv.id_column = get_or<std::string>(in, "id_column", files.csv.id_column);
    files.csv.missing_token = get_or<std::string>(in, "missing_token", files.csv.missing_token);
    cfg.input = std::move(files);
  }
  if (const auto it = j.find("synthgen"); it != j.end()) cfg.synthgen = parse_generator(*it);

  std::vector<VariableSpec> defaults;
  if (cfg.synthgen) defaults = default_variable_specs(*cfg.synthgen);
  const auto vars = j.find("variables");
  if (vars == j.end()) throw ConfigError("missing required key 'variables'");
  for (const auto& v : *vars) {
    VariableSpec spec;
    if (v.is_string()) {
      spec.name = v.get<std::string>();
    } else {
      reject_unknown(v, {"name", "range", "tolerance", "missing"}, "variable");
      if (!v.contains("name")) throw ConfigError("variable entry without 'name'");
      spec.name = v.at("name").get<std::string>();
    }
    bool have_range = false;
    for (const auto& d : defaults) {
      if (d.name == spec.name) {
        spec.t_range = d.t_range;
        have_range = true;
      }
    }
    if (v.is_object()) {
      if (v.contains("range")) {
        spec.t_range = v.at("range").get<double>();
        have_range = true;
      }
      spec.tolerance = get_or(v, "tolerance", 0.0);
      if (v.contains("missing") && !v.at("missing").is_null()) {
        spec.missing_sentinel = v.at("missing").get<double>();
      }
    }
    if (!have_range) throw ConfigError("variable '" + spec.name + "' needs a 'range'");
    cfg.variables.push_back(std::move(spec));
  }

  cfg.blocking = get_or(j, "blocking", cfg.blocking);
  cfg.mode = parse_mode(get_or<std::string>(j, "mode", "extended"));
  cfg.cutoff = get_or(j, "cutoff", cfg.cutoff);
  cfg.samples = get_or(j, "samples", cfg.samples);
  cfg.thinning = get_or(j, "thinning", cfg.thinning);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.reestimate_per_sample = get_or(j, "reestimate_per_sample", cfg.reestimate_per_sample);
  cfg.skip_infeasible_blocks = get_or(j, "skip_infeasible_blocks", cfg.skip_infeasible_blocks);
  cfg.dump_snapshots = get_or(j, "dump_snapshots", cfg.dump_snapshots);
  cfg.threads = get_or(j, "threads", cfg.threads);
  if (j.contains("output")) cfg.output_dir = resolve(base_dir, j.at("output").get<std::string>());

  if (const auto it = j.find("mug"); it != j.end()) {
    for (const auto& [name, v] : it->items()) {
      cfg.external_mug[name] = {get_or(v, "m", 0.0), get_or(v, "u", 0.0), get_or(v, "g", 0.0)};
    }
  }
  if (const auto it = j.find("compare"); it != j.end()) {
    for (const auto& v : *it) {
      reject_unknown(v, {"name", "mode", "tolerances", "cutoff"}, "compare variant");
      Variant var;
      var.name = get_or<std::string>(v, "name", "");
      if (v.contains("mode")) var.mode = parse_mode(v.at("mode").get<std::string>());
      var.tolerances = get_or(v, "tolerances", var.tolerances);
      if (v.contains("cutoff")) var.cutoff = v.at("cutoff").get<double>();
      cfg.variants.push_back(std::move(var));
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

void RunConfig::validate() const {
  if (input.has_value() == synthgen.has_value()) {
    throw ConfigError("exactly one of 'input' and 'synthgen' must be given");
  }
  if (variables.empty()) throw ConfigError("at least one linking variable is required");
  std::set<std::string> names;
  for (const auto& v : variables) {
    v.validate();
    if (!names.insert(v.name).second) throw ConfigError("variable '" + v.name + "' listed twice");
  }
  if (samples < 1) throw ConfigError("samples must be >= 1");
  if (thinning < 1) throw ConfigError("thinning must be >= 1");
  if (std::isnan(cutoff)) throw ConfigError("cutoff must be a number");
  for (const auto& [name, mug] : external_mug) {
    if (!names.count(name)) throw ConfigError("m/u/g given for unknown variable '" + name + "'");
    MugProfile{{mug}}.validate();
  }
  if (!external_mug.empty() && external_mug.size() != names.size()) {
    bool all_blocking = true;
    for (const auto& n : names) {
      const bool is_block = std::find(blocking.begin(), blocking.end(), n) != blocking.end();
      if (!external_mug.count(n) && !is_block) all_blocking = false;
    }
    if (!all_blocking) throw ConfigError("external m/u/g must cover every linking variable");
  }
  std::set<std::string> variant_names;
  for (const auto& v : variants) {
    if (v.name.empty()) throw ConfigError("compare variants need a name");
    if (!variant_names.insert(v.name).second) throw ConfigError("duplicate variant '" + v.name + "'");
    for (const auto& [name, tol] : v.tolerances) {
      if (!names.count(name)) throw ConfigError("variant '" + v.name + "' names unknown variable '" + name + "'");
    }
  }
}

}  // namespace macsim
