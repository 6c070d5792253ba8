#pragma once

#include "hygronet/homog.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace hygronet {

using Json = nlohmann::ordered_json;

Json to_json(const Material& m);
Material material_from_json(const Json& j);

Json to_json(const Network& net);
/// Throws InputDomainError on missing fields or an invalid network.
Network network_from_json(const Json& j);

Network read_network(const std::filesystem::path& path);
void write_network(const std::filesystem::path& path, const Network& net);

/// Deterministic record: no timings, no paths.
Json to_json(const EffectiveExpansion& e);
Json timings_json(const Timings& t);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// Legacy ASCII unstructured grid with cell data on covered elements.
/// With deformed = true the points are moved by magnification * u.
void write_vtk(const std::filesystem::path& path, const FieldSnapshot& snapshot,
               bool deformed = false);

/// Coordinate format, general symmetric entries written in full.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& K);
void write_matrix_market(const std::filesystem::path& path, const Eigen::VectorXd& f);

void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfilePoint>& profile);
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows);

}  // namespace hygronet
