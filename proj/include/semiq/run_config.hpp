// Copyright 2026 The semiq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "semiq/monte_carlo.hpp"

namespace semiq {

/// Squeezing in decibels <-> squeezing factor r. The convention is
/// dB = 10 log10(e^{2r}), i.e. the anti-squeezed variance ratio; 3 dB is
/// r = ln(2)/2 and gives e^{-2r} = 1/2.
inline double squeezing_from_db(double db) {
  if (!(db >= 0)) {
    throw std::domain_error("squeezing in dB must be >= 0");
  }
  return db * std::numbers::ln10 / 20.0;
}

inline double squeezing_to_db(double squeezing) {
  return 20.0 * squeezing / std::numbers::ln10;
}

/// Complete, serializable description of one engine run: protocol knobs
/// plus sampling settings. The CLI fills it from flags and/or a JSON file
/// so any result can be reproduced from its saved config.
struct RunConfig {
  /// Exactly one of squeezing / squeezing_db may be set; both empty means
  /// no squeezing.
  std::optional<double> squeezing{};
  std::optional<double> squeezing_db{};
  double reflectivity{0.5};
  double transmission{1.0};
  /// Explicit feedforward gain. When set the gain policy is Manual;
  /// otherwise the gain is the cancellation value for a lossless channel
  /// and the loss-compensated value when transmission < 1.
  std::optional<double> manual_gain{};
  std::optional<int> clone_count{};
  std::array<double, 2> input_mean{0.0, 0.0};
  /// Input quadrature variances for signal-to-noise runs.
  std::array<double, 2> input_variance{1.0, 1.0};

  std::uint64_t shots{1000000};
  std::uint64_t seed{20260823};
  std::uint64_t chunk_shots{65536};
  unsigned threads{0};

  double resolved_squeezing() const {
    if (squeezing && squeezing_db) {
      throw std::invalid_argument(
          "give squeezing either as a factor or in dB, not both");
    }
    if (squeezing_db) return squeezing_from_db(*squeezing_db);
    return squeezing.value_or(0.0);
  }

  GainPolicy gain_policy() const {
    if (manual_gain) return GainPolicy::Manual;
    return transmission < 1.0 ? GainPolicy::LossCompensated
                              : GainPolicy::Cancellation;
  }

  ProtocolParams<double> protocol_params() const {
    ProtocolParams<double> params;
    params.reflectivity = reflectivity;
    params.squeezing = resolved_squeezing();
    params.transmission = transmission;
    params.gain_policy = gain_policy();
    params.manual_gain = manual_gain.value_or(0.0);
    params.clone_count = clone_count;
    params.input_mean = {input_mean[0], input_mean[1]};
    return params;
  }

  MCConfig mc_config() const {
    return {shots, seed, chunk_shots, threads};
  }
};

inline void to_json(nlohmann::json& j, const RunConfig& config) {
  j = nlohmann::json::object();
  if (config.squeezing) j["squeezing"] = *config.squeezing;
  if (config.squeezing_db) j["squeezing_db"] = *config.squeezing_db;
  j["reflectivity"] = config.reflectivity;
  j["transmission"] = config.transmission;
  if (config.manual_gain) j["gain"] = *config.manual_gain;
  if (config.clone_count) j["clones"] = *config.clone_count;
  j["input_mean"] = config.input_mean;
  j["input_variance"] = config.input_variance;
  j["shots"] = config.shots;
  j["seed"] = config.seed;
  j["chunk_shots"] = config.chunk_shots;
  j["threads"] = config.threads;
}

inline void from_json(const nlohmann::json& j, RunConfig& config) {
  static const char* known[] = {
      "squeezing",  "squeezing_db",   "reflectivity", "transmission",
      "gain",       "clones",         "input_mean",   "input_variance",
      "shots",      "seed",           "chunk_shots",  "threads"};
  for (const auto& [key, value] : j.items()) {
    bool recognized = false;
    for (const char* name : known) {
      if (key == name) {
        recognized = true;
        break;
      }
    }
    if (!recognized) {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  if (j.contains("squeezing")) config.squeezing = j["squeezing"].get<double>();
  if (j.contains("squeezing_db")) {
    config.squeezing_db = j["squeezing_db"].get<double>();
  }
  if (j.contains("reflectivity")) j["reflectivity"].get_to(config.reflectivity);
  if (j.contains("transmission")) j["transmission"].get_to(config.transmission);
  if (j.contains("gain")) config.manual_gain = j["gain"].get<double>();
  if (j.contains("clones")) config.clone_count = j["clones"].get<int>();
  if (j.contains("input_mean")) j["input_mean"].get_to(config.input_mean);
  if (j.contains("input_variance")) {
    j["input_variance"].get_to(config.input_variance);
  }
  if (j.contains("shots")) j["shots"].get_to(config.shots);
  if (j.contains("seed")) j["seed"].get_to(config.seed);
  if (j.contains("chunk_shots")) j["chunk_shots"].get_to(config.chunk_shots);
  if (j.contains("threads")) j["threads"].get_to(config.threads);
}

/// Loads a RunConfig from a JSON file. Unknown keys and malformed values
/// are reported with the file name.
inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
    return j.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("bad config file " + path + ": " + e.what());
  }
}

}  // namespace semiq
