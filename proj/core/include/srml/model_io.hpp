#pragma once

#include <string>
#include <vector>

#include "srml/config.hpp"
#include "srml/losses.hpp"
#include "srml/weights.hpp"

namespace srml::harness {

inline constexpr int kModelFormatVersion = 1;

// Self-describing, versioned model container; round-trips losslessly.
struct ModelFile {
  int version = kModelFormatVersion;
  WeightMatrix weights;  // d x T
  LossKind loss = LossKind::Squared;
  SolverConfig config;
  std::vector<std::string> task_ids;
};

void save_model(const std::string& path, const ModelFile& model);

// Throws IoError on unreadable/corrupt files and VersionMismatch when the
// stored format version differs.
ModelFile load_model(const std::string& path);

// Enum <-> string helpers shared by the model file, reports and the CLI.
std::string to_string(LossKind k);
std::string to_string(RegKind k);
std::string to_string(RhoPolicy p);
LossKind loss_from_string(const std::string& s);
RegKind reg_from_string(const std::string& s);
RhoPolicy rho_policy_from_string(const std::string& s);

}  // namespace srml::harness
