#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psne/error.hpp"
#include "psne/game.hpp"

namespace psne {

inline NoiseModel noise_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return NoiseModel::gaussian(j.value("sigma", 1.0));
  if (kind == "bernoulli") return NoiseModel::bernoulli();
  if (kind == "zero") return NoiseModel::zero();
  throw Error(ErrorCode::kConfig, "unknown noise kind '" + kind + "'");
}

inline nlohmann::json noise_to_json(const NoiseModel& noise) {
  nlohmann::json j{{"kind", to_string(noise.kind)}};
  if (noise.kind == NoiseKind::kGaussian) j["sigma"] = noise.sigma;
  return j;
}

// {"n", "m", "entries": [[...], ...], "noise": {...}, "tags": [...]}.
// Without a "noise" object, dueling-tagged instances get Bernoulli noise and
// everything else Gaussian(1).
inline GameMatrix instance_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    const auto& rows = j.at("entries");
    if (!rows.is_array() || rows.size() != n) {
      throw Error(ErrorCode::kInvalidMatrix, "\"entries\" must hold n rows");
    }
    std::vector<double> flat;
    flat.reserve(n * m);
    for (const auto& r : rows) {
      if (!r.is_array() || r.size() != m) {
        throw Error(ErrorCode::kInvalidMatrix, "every row of \"entries\" must hold m numbers");
      }
      for (const auto& v : r) flat.push_back(v.get<double>());
    }
    std::vector<std::string> tags;
    if (j.contains("tags")) tags = j.at("tags").get<std::vector<std::string>>();
    NoiseModel noise = NoiseModel::gaussian();
    if (j.contains("noise")) {
      noise = noise_from_json(j.at("noise"));
    } else if (std::find(tags.begin(), tags.end(), "dueling") != tags.end()) {
      noise = NoiseModel::bernoulli();
    }
    return GameMatrix(n, m, std::move(flat), noise, std::move(tags));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad instance JSON: ") + e.what());
  }
}

inline nlohmann::json instance_to_json(const GameMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) r.push_back(a(i, j));
    rows.push_back(std::move(r));
  }
  return {{"n", a.rows()},
          {"m", a.cols()},
          {"entries", std::move(rows)},
          {"noise", noise_to_json(a.noise())},
          {"tags", a.tags()}};
}

inline GameMatrix load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline void save_instance(const GameMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << instance_to_json(a).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace psne
