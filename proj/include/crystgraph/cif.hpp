#pragma once

#include <crystgraph/structure.hpp>
#include <crystgraph/symmetry_op.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crystgraph {

struct CifLoop {
    std::vector<std::string> columns; // lower-cased tags
    std::vector<std::vector<std::string>> rows;

    std::optional<size_t> column(std::string_view tag) const;
};

/// One `data_` block. Tags are stored lower-cased; values keep their raw text.
struct CifBlock {
    std::string name;
    std::vector<std::pair<std::string, std::string>> items;
    std::vector<CifLoop> loops;

    const std::string *find(std::string_view tag) const;
    const CifLoop *find_loop(std::string_view tag) const;
};

struct CifDocument {
    std::vector<CifBlock> blocks;
    /// Operation strings of the first block, verbatim.
    std::vector<std::string> symmetry_xyz;

    const CifBlock &first() const { return blocks.front(); }
};

/// Parses a CIF 1.1 subset: data blocks, loops, quoted and ;-delimited text
/// values, comments. Throws Error(MalformedCif) with the offending line.
CifDocument parse_cif(std::string_view text);

/// Numeric value of a CIF field with any standard uncertainty suffix
/// stripped ("5.64(3)" -> 5.64). Returns nullopt for '?', '.' or text.
std::optional<double> cif_number(std::string_view raw);

/// Parses an "x,y,z"-style operation, e.g. "-y,x-y,z+1/3".
SymmetryOp parse_xyz_op(std::string_view text);

struct CifStructure {
    CrystalStructure structure;
    std::vector<SymmetryOp> ops; // empty when the file lists none
};

/// Builds the full unit cell. When operations are present the listed sites
/// are expanded by every op and merged within kMinSiteSeparation.
CifStructure cif_to_structure(const CifDocument &doc, std::string provenance = {});

} // namespace crystgraph
