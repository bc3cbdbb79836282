#pragma once

#include <string>

#include "cardiomesh/fit.hpp"

namespace cardiomesh {

/// JSON config with "loss" and "fit" sections; missing fields keep their
/// defaults. Unknown fields raise ValidationError to catch typos.
struct Config {
  LossWeights loss;
  FitConfig fit;
};

Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);

/// Resolved config serialized back to JSON (used by run manifests).
std::string config_to_json(const Config& config);

}  // namespace cardiomesh
