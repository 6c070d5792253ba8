#pragma once

#include "hygronet/homog.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hygronet {

/// Invalid or unknown configuration entry. key() names the offending field.
class ConfigError : public InputDomainError {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : InputDomainError(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  GenerationParams generation;
  std::vector<std::uint64_t> seeds;  ///< sweep seeds; empty means generation.seed only
  std::optional<std::filesystem::path> network_file;

  MeshOptions mesh;
  double delta_chi = 1.0;

  LoadKind load = LoadKind::FreeSwelling;
  Vec3 macro_stress = Vec3::Zero();
  Preset preset = Preset::ParallelStrip;
  double sigma0 = 1.0;
  double width_frac = 0.43;

  std::filesystem::path output_dir = "out";
  double magnification = 50.0;
  bool write_vtk = true;
  bool write_matrix = false;
  int profile_samples = 200;

  /// Rechecks every bound; throws ConfigError.
  void validate() const;
};

/// INI text with [cell], [fibre], [material], [network], [mesh], [load] and
/// [output] sections. Overrides are "section.key=value" strings applied on
/// top of the text. Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Round-trips through parse_config.
std::string to_ini(const RunConfig& config);

}  // namespace hygronet
