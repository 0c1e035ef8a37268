#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtnlab/coeffs.hpp"
#include "dtnlab/mesh.hpp"
#include "json.hpp"

namespace dtnlab::cli {

inline constexpr const char* kVersion = "1.0.0";

// A fully resolved experiment description. Every field has a value after
// load_config; `resolved()` serializes it back, and hash() is taken over that
// serialization.
struct ExperimentConfig {
  std::string name = "default";
  nlohmann::json domain;          // {"type": "square", "n": 16} and friends
  nlohmann::json gamma0;          // {"sides": [...]} or {"predicate": "..."}
  nlohmann::json coefficients;    // exprlang strings
  std::optional<nlohmann::json> coefficients_b;
  std::vector<double> lambda;     // empty: spectral gap points
  int lambda_gaps = 3;
  std::vector<double> mu;         // Robin parameters for tables
  double mu_min = -50.0;
  double mu_max = 50.0;
  int mu_steps = 101;
  int k = 5;
  std::vector<double> t;
  int trials = 50;
  std::uint64_t seed = 1;
  int refinements = 3;
  bool lump_boundary_mass = false;
  bool lump_potential = false;
  nlohmann::json semigroup;       // {"domination_sides": [...], "potential_shift": 5}
  nlohmann::json limit;           // {"mu": [...], "k": 4}
  nlohmann::json gauge;           // {"domain": ..., "epsilon": ..., "lambda": ..., "mu": ..., "k": ...}
  std::string output = "dtnlab_out";

  nlohmann::json resolved() const;
  std::string hash() const;  // 16 hex digits, FNV-1a 64 of resolved().dump()
};

// Defaults when path is empty. Throws InvalidInput on unknown keys or bad
// values, nlohmann::json::exception on malformed JSON.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j);

// The builders accept raw config blocks and validate them like load_config.
Mesh build_domain(const nlohmann::json& domain);
BoundaryPartition build_partition(const Mesh& mesh, const nlohmann::json& gamma0);
CoefficientSet build_coefficients(const nlohmann::json& block);
Diffeo build_diffeo(const nlohmann::json& gauge);

}  // namespace dtnlab::cli
