#pragma once

#include <crystgraph/cif.hpp>
#include <crystgraph/structure.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace crystgraph {

/// {"lattice": [[...],[...],[...]], "sites": [{"z": 11, "frac": [0,0,0]}, ...]}
nlohmann::ordered_json structure_to_json(const CrystalStructure &structure);
CrystalStructure structure_from_json(const nlohmann::json &j, std::string provenance = {});

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

/// Loads a .json structure or a CIF file (any other extension). CIF files
/// return their listed symmetry operations as well.
CifStructure load_structure(const std::filesystem::path &path);

} // namespace crystgraph
