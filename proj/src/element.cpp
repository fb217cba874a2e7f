#include <crystgraph/element.hpp>

#include <cctype>
#include <stdexcept>
#include <string>

namespace crystgraph {

namespace {

// clang-format off
constexpr std::array<ElementData, kMaxAtomicNumber + 1> kElements{{
    {"X",    0.0,     0.00, 0.00,  0.000,  0},
    {"H",    1.008,   0.31, 2.20, 13.598,  1},
    {"He",   4.0026,  0.28, 0.00, 24.587,  0},
    {"Li",   6.94,    1.28, 0.98,  5.392,  1},
    {"Be",   9.0122,  0.96, 1.57,  9.323,  2},
    {"B",   10.81,    0.84, 2.04,  8.298,  3},
    {"C",   12.011,   0.76, 2.55, 11.260,  4},
    {"N",   14.007,   0.71, 3.04, 14.534, -3},
    {"O",   15.999,   0.66, 3.44, 13.618, -2},
    {"F",   18.998,   0.57, 3.98, 17.423, -1},
    {"Ne",  20.180,   0.58, 0.00, 21.565,  0},
    {"Na",  22.990,   1.66, 0.93,  5.139,  1},
    {"Mg",  24.305,   1.41, 1.31,  7.646,  2},
    {"Al",  26.982,   1.21, 1.61,  5.986,  3},
    {"Si",  28.085,   1.11, 1.90,  8.152,  4},
    {"P",   30.974,   1.07, 2.19, 10.487,  5},
    {"S",   32.06,    1.05, 2.58, 10.360, -2},
    {"Cl",  35.45,    1.02, 3.16, 12.968, -1},
    {"Ar",  39.948,   1.06, 0.00, 15.760,  0},
    {"K",   39.098,   2.03, 0.82,  4.341,  1},
    {"Ca",  40.078,   1.76, 1.00,  6.113,  2},
    {"Sc",  44.956,   1.70, 1.36,  6.561,  3},
    {"Ti",  47.867,   1.60, 1.54,  6.828,  4},
    {"V",   50.942,   1.53, 1.63,  6.746,  5},
    {"Cr",  51.996,   1.39, 1.66,  6.767,  3},
    {"Mn",  54.938,   1.39, 1.55,  7.434,  2},
    {"Fe",  55.845,   1.32, 1.83,  7.902,  3},
    {"Co",  58.933,   1.26, 1.88,  7.881,  2},
    {"Ni",  58.693,   1.24, 1.91,  7.640,  2},
    {"Cu",  63.546,   1.32, 1.90,  7.726,  2},
    {"Zn",  65.38,    1.22, 1.65,  9.394,  2},
    {"Ga",  69.723,   1.22, 1.81,  5.999,  3},
    {"Ge",  72.630,   1.20, 2.01,  7.900,  4},
    {"As",  74.922,   1.19, 2.18,  9.789,  3},
    {"Se",  78.971,   1.20, 2.55,  9.752, -2},
    {"Br",  79.904,   1.20, 2.96, 11.814, -1},
    {"Kr",  83.798,   1.16, 3.00, 14.000,  0},
    {"Rb",  85.468,   2.20, 0.82,  4.177,  1},
    {"Sr",  87.62,    1.95, 0.95,  5.695,  2},
    {"Y",   88.906,   1.90, 1.22,  6.217,  3},
    {"Zr",  91.224,   1.75, 1.33,  6.634,  4},
    {"Nb",  92.906,   1.64, 1.60,  6.759,  5},
    {"Mo",  95.95,    1.54, 2.16,  7.092,  6},
    {"Tc",  98.0,     1.47, 1.90,  7.280,  7},
    {"Ru", 101.07,    1.46, 2.20,  7.361,  3},
    {"Rh", 102.91,    1.42, 2.28,  7.459,  3},
    {"Pd", 106.42,    1.39, 2.20,  8.337,  2},
    {"Ag", 107.87,    1.45, 1.93,  7.576,  1},
    {"Cd", 112.41,    1.44, 1.69,  8.994,  2},
    {"In", 114.82,    1.42, 1.78,  5.786,  3},
    {"Sn", 118.71,    1.39, 1.96,  7.344,  4},
    {"Sb", 121.76,    1.39, 2.05,  8.608,  3},
    {"Te", 127.60,    1.38, 2.10,  9.010, -2},
    {"I",  126.90,    1.39, 2.66, 10.451, -1},
    {"Xe", 131.29,    1.40, 2.60, 12.130,  0},
    {"Cs", 132.91,    2.44, 0.79,  3.894,  1},
    {"Ba", 137.33,    2.15, 0.89,  5.212,  2},
    {"La", 138.91,    2.07, 1.10,  5.577,  3},
    {"Ce", 140.12,    2.04, 1.12,  5.539,  3},
    {"Pr", 140.91,    2.03, 1.13,  5.473,  3},
    {"Nd", 144.24,    2.01, 1.14,  5.525,  3},
    {"Pm", 145.0,     1.99, 1.13,  5.582,  3},
    {"Sm", 150.36,    1.98, 1.17,  5.644,  3},
    {"Eu", 151.96,    1.98, 1.20,  5.670,  3},
    {"Gd", 157.25,    1.96, 1.20,  6.150,  3},
    {"Tb", 158.93,    1.94, 1.10,  5.864,  3},
    {"Dy", 162.50,    1.92, 1.22,  5.939,  3},
    {"Ho", 164.93,    1.92, 1.23,  6.022,  3},
    {"Er", 167.26,    1.89, 1.24,  6.108,  3},
    {"Tm", 168.93,    1.90, 1.25,  6.184,  3},
    {"Yb", 173.05,    1.87, 1.10,  6.254,  3},
    {"Lu", 174.97,    1.87, 1.27,  5.426,  3},
    {"Hf", 178.49,    1.75, 1.30,  6.825,  4},
    {"Ta", 180.95,    1.70, 1.50,  7.550,  5},
    {"W",  183.84,    1.62, 2.36,  7.864,  6},
    {"Re", 186.21,    1.51, 1.90,  7.834,  4},
    {"Os", 190.23,    1.44, 2.20,  8.438,  4},
    {"Ir", 192.22,    1.41, 2.20,  8.967,  4},
    {"Pt", 195.08,    1.36, 2.28,  8.959,  2},
    {"Au", 196.97,    1.36, 2.54,  9.226,  3},
    {"Hg", 200.59,    1.32, 2.00, 10.438,  2},
    {"Tl", 204.38,    1.45, 1.62,  6.108,  1},
    {"Pb", 207.2,     1.46, 2.33,  7.417,  2},
    {"Bi", 208.98,    1.48, 2.02,  7.286,  3},
    {"Po", 209.0,     1.40, 2.00,  8.414,  4},
    {"At", 210.0,     1.50, 2.20,  9.318, -1},
    {"Rn", 222.0,     1.50, 0.00, 10.749,  0},
    {"Fr", 223.0,     2.60, 0.70,  4.073,  1},
    {"Ra", 226.0,     2.21, 0.90,  5.278,  2},
    {"Ac", 227.0,     2.15, 1.10,  5.170,  3},
    {"Th", 232.04,    2.06, 1.30,  6.307,  4},
    {"Pa", 231.04,    2.00, 1.50,  5.890,  5},
    {"U",  238.03,    1.96, 1.38,  6.194,  6},
    {"Np", 237.0,     1.90, 1.36,  6.266,  5},
    {"Pu", 244.0,     1.87, 1.28,  6.026,  4},
    {"Am", 243.0,     1.80, 1.30,  5.974,  3},
    {"Cm", 247.0,     1.69, 1.30,  5.991,  3},
    {"Bk", 247.0,     0.00, 1.30,  6.198,  3},
    {"Cf", 251.0,     0.00, 1.30,  6.282,  3},
    {"Es", 252.0,     0.00, 1.30,  6.368,  3},
    {"Fm", 257.0,     0.00, 1.30,  6.500,  3},
    {"Md", 258.0,     0.00, 1.30,  6.580,  3},
    {"No", 259.0,     0.00, 1.30,  6.650,  2},
    {"Lr", 266.0,     0.00, 1.30,  4.900,  3},
    {"Rf", 267.0,     0.00, 0.00,  6.000,  4},
    {"Db", 268.0,     0.00, 0.00,  0.000,  5},
    {"Sg", 269.0,     0.00, 0.00,  0.000,  6},
    {"Bh", 270.0,     0.00, 0.00,  0.000,  7},
    {"Hs", 277.0,     0.00, 0.00,  0.000,  8},
    {"Mt", 278.0,     0.00, 0.00,  0.000,  0},
    {"Ds", 281.0,     0.00, 0.00,  0.000,  0},
    {"Rg", 282.0,     0.00, 0.00,  0.000,  0},
    {"Cn", 285.0,     0.00, 0.00,  0.000,  2},
    {"Nh", 286.0,     0.00, 0.00,  0.000,  0},
    {"Fl", 289.0,     0.00, 0.00,  0.000,  0},
    {"Mc", 290.0,     0.00, 0.00,  0.000,  0},
    {"Lv", 293.0,     0.00, 0.00,  0.000,  0},
    {"Ts", 294.0,     0.00, 0.00,  0.000,  0},
    {"Og", 294.0,     0.00, 0.00,  0.000,  0},
}};
// clang-format on

} // namespace

const ElementData &element(int z) {
    if (z < 1 || z > kMaxAtomicNumber)
        throw std::out_of_range("atomic number out of range: " + std::to_string(z));
    return kElements[static_cast<size_t>(z)];
}

std::optional<int> atomic_number(std::string_view symbol) {
    for (int z = 1; z <= kMaxAtomicNumber; ++z) {
        if (kElements[static_cast<size_t>(z)].symbol == symbol)
            return z;
    }
    return std::nullopt;
}

std::optional<int> atomic_number_from_label(std::string_view label) {
    // Leading letters only: "Fe2+" -> "Fe", "O1" -> "O", "Cl-" -> "Cl".
    std::string letters;
    for (char c : label) {
        if (!std::isalpha(static_cast<unsigned char>(c)))
            break;
        letters.push_back(c);
    }
    if (letters.empty())
        return std::nullopt;
    auto normalize = [](std::string s) {
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
        for (size_t i = 1; i < s.size(); ++i)
            s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
        return s;
    };
    // Prefer the two-letter symbol, fall back to the first letter ("OH" -> O).
    if (letters.size() >= 2) {
        if (auto z = atomic_number(normalize(letters.substr(0, 2))))
            return z;
    }
    return atomic_number(normalize(letters.substr(0, 1)));
}

std::array<double, kNumNodeFeatures> node_features(int z) {
    const auto &e = element(z);
    return {static_cast<double>(z), e.mass, e.covalent_radius, e.electronegativity,
            e.ionization_energy, static_cast<double>(e.oxidation_state)};
}

} // namespace crystgraph
