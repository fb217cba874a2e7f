#include <crystgraph/error.hpp>
#include <crystgraph/io.hpp>

#include <fstream>
#include <sstream>

namespace crystgraph {

nlohmann::ordered_json structure_to_json(const CrystalStructure &structure) {
    nlohmann::ordered_json j;
    auto lattice = nlohmann::ordered_json::array();
    const Mat3 &b = structure.lattice().basis();
    for (int r = 0; r < 3; ++r)
        lattice.push_back({b(r, 0), b(r, 1), b(r, 2)});
    j["lattice"] = std::move(lattice);
    auto sites = nlohmann::ordered_json::array();
    for (const auto &s : structure.sites()) {
        nlohmann::ordered_json site;
        site["z"] = s.species;
        site["frac"] = {s.frac[0], s.frac[1], s.frac[2]};
        sites.push_back(std::move(site));
    }
    j["sites"] = std::move(sites);
    return j;
}

CrystalStructure structure_from_json(const nlohmann::json &j, std::string provenance) {
    try {
        Mat3 basis;
        const auto &rows = j.at("lattice");
        if (rows.size() != 3)
            throw Error(ErrorKind::InvalidStructure, "lattice needs three rows");
        for (int r = 0; r < 3; ++r) {
            const auto &row = rows.at(static_cast<size_t>(r));
            if (row.size() != 3)
                throw Error(ErrorKind::InvalidStructure, "lattice rows need three values");
            for (int c = 0; c < 3; ++c)
                basis(r, c) = row.at(static_cast<size_t>(c)).get<double>();
        }
        std::vector<AtomSite> sites;
        for (const auto &s : j.at("sites")) {
            const auto &f = s.at("frac");
            if (f.size() != 3)
                throw Error(ErrorKind::InvalidStructure, "frac needs three values");
            sites.push_back({s.at("z").get<int>(),
                             Vec3(f[0].get<double>(), f[1].get<double>(), f[2].get<double>()),
                             0});
        }
        if (provenance.empty() && j.contains("id"))
            provenance = j["id"].get<std::string>();
        return CrystalStructure(Lattice(basis), std::move(sites), std::move(provenance));
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::InvalidStructure, std::string("structure JSON: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << text;
}

CifStructure load_structure(const std::filesystem::path &path) {
    const std::string text = read_text_file(path);
    const std::string id = path.stem().string();
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorKind::InvalidStructure, e.what());
        }
        return {structure_from_json(j, id), {}};
    }
    return cif_to_structure(parse_cif(text), id);
}

} // namespace crystgraph
