#pragma once

#include <crystgraph/cif.hpp>
#include <crystgraph/neighbors.hpp>
#include <crystgraph/structure.hpp>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace crystgraph;

std::filesystem::path data_dir();
std::vector<CifStructure> load_corpus();
CifStructure load_corpus_file(const std::string &stem);

CrystalStructure simple_cubic(double a, int z = 84);
CrystalStructure fcc(double a, int z = 29);
CrystalStructure bcc(double a, int z = 26);
CrystalStructure rocksalt(double a = 5.64);

/// Random lattice (lengths 3-6 Å, angles 70-110 deg) with n sites at least
/// `min_sep` Å apart.
CrystalStructure random_structure(std::mt19937_64 &rng, int n, double min_sep = 0.8);

/// Cell built from a random group (point-group generators on a compatible
/// lattice) applied to 1-3 random seed positions; orbit sizes up to 48.
CifStructure random_symmetric(std::mt19937_64 &rng);

/// All ops generated by `generators` (x,y,z strings), identity first.
std::vector<SymmetryOp> group_closure(const std::vector<std::string> &generators);

/// Brute-force edge enumeration over offsets in [-range, range]^3.
struct BruteEdge {
    int src, dst;
    IVec3 offset;
    double distance;
};
std::vector<BruteEdge> brute_images(const CrystalStructure &s, int range = 3);
std::vector<BruteEdge> brute_radius(const CrystalStructure &s, double r, int range = 3);
std::vector<BruteEdge> brute_knn(const CrystalStructure &s, int k, double eps, int range = 3);

/// Random proper rotation.
Mat3 random_rotation(std::mt19937_64 &rng);

/// Relative difference |a - b| / (|a| + 1e-12).
double rel(double a, double b);

} // namespace fixtures
