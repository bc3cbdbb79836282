#include "cardiomesh/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cardiomesh {

using nlohmann::json;

namespace {

void check_known_fields(const json& section, const std::string& name,
                        std::initializer_list<const char*> known) {
  for (const auto& [key, value] : section.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ValidationError("config: unknown field '" + key + "' in [" +
                            name + "]");
  }
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }

  Config config;
  if (j.contains("loss")) {
    const auto& l = j["loss"];
    check_known_fields(l, "loss",
                       {"alpha", "beta", "lambda1", "lambda2", "lambda3",
                        "inlet_weight"});
    config.loss.alpha = l.value("alpha", config.loss.alpha);
    config.loss.beta = l.value("beta", config.loss.beta);
    config.loss.lambda1 = l.value("lambda1", config.loss.lambda1);
    config.loss.lambda2 = l.value("lambda2", config.loss.lambda2);
    config.loss.lambda3 = l.value("lambda3", config.loss.lambda3);
    config.loss.inlet_weight = l.value("inlet_weight", config.loss.inlet_weight);
    config.loss.validate();
  }
  if (j.contains("fit")) {
    const auto& f = j["fit"];
    check_known_fields(f, "fit",
                       {"schedule", "iters_per_block", "step_size",
                        "optimizer", "seed", "recompute_energy_per_block",
                        "fps_start_index", "target_samples"});
    if (f.contains("schedule"))
      config.fit.schedule = f["schedule"].get<std::vector<int>>();
    config.fit.iters_per_block =
        f.value("iters_per_block", config.fit.iters_per_block);
    config.fit.step_size = f.value("step_size", config.fit.step_size);
    if (f.contains("optimizer"))
      config.fit.optimizer =
          optimizer_from_string(f["optimizer"].get<std::string>());
    config.fit.seed = f.value("seed", config.fit.seed);
    config.fit.recompute_energy_per_block = f.value(
        "recompute_energy_per_block", config.fit.recompute_energy_per_block);
    config.fit.fps_start_index =
        f.value("fps_start_index", config.fit.fps_start_index);
    config.fit.target_samples =
        f.value("target_samples", config.fit.target_samples);
  }
  config.fit.loss = config.loss;
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream oss;
  oss << in.rdbuf();
  return parse_config(oss.str());
}

std::string config_to_json(const Config& config) {
  json j;
  j["loss"] = {{"alpha", config.loss.alpha},
               {"beta", config.loss.beta},
               {"lambda1", config.loss.lambda1},
               {"lambda2", config.loss.lambda2},
               {"lambda3", config.loss.lambda3},
               {"inlet_weight", config.loss.inlet_weight}};
  j["fit"] = {{"schedule", config.fit.schedule},
              {"iters_per_block", config.fit.iters_per_block},
              {"step_size", config.fit.step_size},
              {"optimizer", to_string(config.fit.optimizer)},
              {"seed", config.fit.seed},
              {"recompute_energy_per_block",
               config.fit.recompute_energy_per_block},
              {"fps_start_index", config.fit.fps_start_index},
              {"target_samples", config.fit.target_samples}};
  return j.dump(2);
}

}  // namespace cardiomesh
