#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace crystgraph {

/// Static per-element data used as node features. Unknown quantities are 0.
struct ElementData {
    std::string_view symbol;
    double mass;              // u
    double covalent_radius;   // Å
    double electronegativity; // Pauling
    double ionization_energy; // first ionization, eV
    int oxidation_state;      // most common
};

inline constexpr int kMaxAtomicNumber = 118;
inline constexpr int kNumNodeFeatures = 6;

const ElementData &element(int z);
std::optional<int> atomic_number(std::string_view symbol);

/// Strips a CIF-style species token ("Fe2+", "O1", "Na") to an element
/// symbol and resolves it.
std::optional<int> atomic_number_from_label(std::string_view label);

/// [Z, mass, radius, electronegativity, ionization, oxidation]
std::array<double, kNumNodeFeatures> node_features(int z);

} // namespace crystgraph
