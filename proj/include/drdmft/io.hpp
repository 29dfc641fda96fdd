#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "drdmft/solver.hpp"

namespace drdmft {

using json = nlohmann::json;

json grid_to_json(const UniformGrid& grid);
UniformGrid grid_from_json(const json& j);
json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const json& j);
json settings_to_json(const SCFSettings& s);
SCFSettings settings_from_json(const json& j);

/// Flat binary container: magic, little-endian header length, JSON header,
/// then the named arrays as raw column-major doubles in header order.
struct Container {
  json header;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> arrays;

  const Eigen::MatrixXd& array(const std::string& name) const;
};

void save_container(const std::filesystem::path& path, const Container& c);
Container load_container(const std::filesystem::path& path);

void save_orbital_set(const std::filesystem::path& path, const OrbitalSet& basis,
                      const ModelSpec& model);
OrbitalSet load_orbital_set(const std::filesystem::path& path);

void save_integral_table(const std::filesystem::path& path, const IntegralTable& table);
IntegralTable load_integral_table(const std::filesystem::path& path);

struct Checkpoint {
  OneRDM rdm;
  SCFSettings settings;
  ModelSpec model;
  UniformGrid grid;
  std::string functional;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace drdmft
