#include <crystgraph/cif.hpp>
#include <crystgraph/element.hpp>
#include <crystgraph/error.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace crystgraph {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size())
        return false;
    return lower(s.substr(0, prefix.size())) == prefix;
}

[[noreturn]] void malformed(int line, const std::string &reason) {
    throw Error(ErrorKind::MalformedCif, "line " + std::to_string(line) + ": " + reason);
}

struct Token {
    std::string text;
    int line = 0;
    bool quoted = false; // quoted or text-field values are never keywords
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    size_t pos = 0;
    int line = 1;
    bool at_line_start = true;
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };

    while (pos < text.size()) {
        const char c = text[pos];
        if (c == '\n') {
            ++line;
            ++pos;
            at_line_start = true;
            continue;
        }
        if (is_space(c)) {
            ++pos;
            at_line_start = false;
            continue;
        }
        if (c == '#') {
            while (pos < text.size() && text[pos] != '\n')
                ++pos;
            continue;
        }
        if (c == ';' && at_line_start) {
            // Text field: runs until a line that begins with ';'.
            const int start_line = line;
            size_t end = pos + 1;
            std::string value;
            bool closed = false;
            while (end < text.size()) {
                const size_t nl = text.find('\n', end);
                if (nl == std::string_view::npos) {
                    value.append(text.substr(end));
                    end = text.size();
                    break;
                }
                value.append(text.substr(end, nl - end + 1));
                end = nl + 1;
                ++line;
                if (end < text.size() && text[end] == ';') {
                    closed = true;
                    ++end;
                    break;
                }
            }
            if (!closed)
                malformed(start_line, "unterminated text field");
            while (!value.empty() && (value.back() == '\n' || value.back() == '\r'))
                value.pop_back();
            if (!value.empty() && value.front() == '\n')
                value.erase(value.begin());
            tokens.push_back({std::move(value), start_line, true});
            pos = end;
            at_line_start = false;
            continue;
        }
        at_line_start = false;
        if (c == '\'' || c == '"') {
            // A quote closes only when followed by whitespace or end of line.
            size_t end = pos + 1;
            for (;;) {
                if (end >= text.size() || text[end] == '\n')
                    malformed(line, "unterminated quoted value");
                if (text[end] == c &&
                    (end + 1 >= text.size() || is_space(text[end + 1]) || text[end + 1] == '\n'))
                    break;
                ++end;
            }
            tokens.push_back({std::string(text.substr(pos + 1, end - pos - 1)), line, true});
            pos = end + 1;
            continue;
        }
        size_t end = pos;
        while (end < text.size() && !is_space(text[end]) && text[end] != '\n')
            ++end;
        tokens.push_back({std::string(text.substr(pos, end - pos)), line, false});
        pos = end;
    }
    return tokens;
}

bool is_tag(const Token &t) { return !t.quoted && !t.text.empty() && t.text[0] == '_'; }
bool is_keyword(const Token &t) {
    return !t.quoted && (starts_with_ci(t.text, "data_") || starts_with_ci(t.text, "loop_") ||
                         starts_with_ci(t.text, "save_") || starts_with_ci(t.text, "global_") ||
                         starts_with_ci(t.text, "stop_"));
}

const std::vector<std::string> &symmetry_tags() {
    static const std::vector<std::string> tags = {"_symmetry_equiv_pos_as_xyz",
                                                  "_space_group_symop_operation_xyz"};
    return tags;
}

} // namespace

std::optional<size_t> CifLoop::column(std::string_view tag) const {
    const auto key = lower(tag);
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == key)
            return i;
    return std::nullopt;
}

const std::string *CifBlock::find(std::string_view tag) const {
    const auto key = lower(tag);
    for (const auto &[k, v] : items)
        if (k == key)
            return &v;
    return nullptr;
}

const CifLoop *CifBlock::find_loop(std::string_view tag) const {
    for (const auto &loop : loops)
        if (loop.column(tag))
            return &loop;
    return nullptr;
}

CifDocument parse_cif(std::string_view text) {
    const auto tokens = tokenize(text);
    CifDocument doc;
    CifBlock *block = nullptr;
    size_t i = 0;
    while (i < tokens.size()) {
        const Token &tok = tokens[i];
        if (!tok.quoted && starts_with_ci(tok.text, "data_")) {
            doc.blocks.push_back({tok.text.substr(5), {}, {}});
            block = &doc.blocks.back();
            ++i;
            continue;
        }
        if (!tok.quoted && (starts_with_ci(tok.text, "save_") ||
                            starts_with_ci(tok.text, "global_"))) {
            ++i;
            continue;
        }
        if (block == nullptr)
            malformed(tok.line, "content before first data_ block");
        if (!tok.quoted && starts_with_ci(tok.text, "loop_")) {
            CifLoop loop;
            const int loop_line = tok.line;
            ++i;
            while (i < tokens.size() && is_tag(tokens[i]))
                loop.columns.push_back(lower(tokens[i++].text));
            if (loop.columns.empty())
                malformed(loop_line, "loop_ without column tags");
            std::vector<std::string> values;
            int last_line = loop_line;
            while (i < tokens.size() && !is_tag(tokens[i]) && !is_keyword(tokens[i])) {
                last_line = tokens[i].line;
                values.push_back(tokens[i++].text);
            }
            if (values.size() % loop.columns.size() != 0)
                malformed(last_line, "loop has " + std::to_string(values.size()) +
                                         " values for " + std::to_string(loop.columns.size()) +
                                         " columns");
            for (size_t r = 0; r < values.size(); r += loop.columns.size())
                loop.rows.emplace_back(values.begin() + static_cast<long>(r),
                                       values.begin() + static_cast<long>(r + loop.columns.size()));
            block->loops.push_back(std::move(loop));
            continue;
        }
        if (is_tag(tok)) {
            if (i + 1 >= tokens.size() || is_tag(tokens[i + 1]) || is_keyword(tokens[i + 1]))
                malformed(tok.line, "tag " + tok.text + " has no value");
            block->items.emplace_back(lower(tok.text), tokens[i + 1].text);
            i += 2;
            continue;
        }
        malformed(tok.line, "unexpected value '" + tok.text + "'");
    }
    if (doc.blocks.empty())
        malformed(1, "no data_ block");

    const CifBlock &first = doc.blocks.front();
    for (const auto &tag : symmetry_tags()) {
        if (const auto *loop = first.find_loop(tag)) {
            const size_t col = *loop->column(tag);
            for (const auto &row : loop->rows)
                doc.symmetry_xyz.push_back(row[col]);
            break;
        }
        if (const auto *value = first.find(tag)) {
            doc.symmetry_xyz.push_back(*value);
            break;
        }
    }
    return doc;
}

std::optional<double> cif_number(std::string_view raw) {
    if (raw.empty() || raw == "?" || raw == ".")
        return std::nullopt;
    std::string_view s = raw;
    if (const auto paren = s.find('('); paren != std::string_view::npos)
        s = s.substr(0, paren);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return value;
}

namespace {

// Parses one component expression such as "x-y", "-x+1/2", "z+0.25", "1/3+y".
void parse_component(std::string_view expr, int row, SymmetryOp &op, std::string_view full) {
    const auto fail = [&](const std::string &why) {
        throw Error(ErrorKind::MalformedCif,
                    "symmetry operation '" + std::string(full) + "': " + why);
    };
    std::string s;
    for (char c : expr)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s.empty())
        fail("empty component");

    double translation = 0.0;
    size_t pos = 0;
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        }
        // Optional numeric coefficient or constant: digits, '.', '/'.
        size_t num_end = pos;
        while (num_end < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[num_end])) || s[num_end] == '.' ||
                s[num_end] == '/'))
            ++num_end;
        double number = 1.0;
        const bool has_number = num_end > pos;
        if (has_number) {
            const std::string_view tok(s.data() + pos, num_end - pos);
            const auto slash = tok.find('/');
            const auto parse = [&](std::string_view part) {
                double v = 0.0;
                const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
                if (ec != std::errc() || p != part.data() + part.size())
                    fail("bad number '" + std::string(tok) + "'");
                return v;
            };
            if (slash == std::string_view::npos) {
                number = parse(tok);
            } else {
                const double den = parse(tok.substr(slash + 1));
                if (den == 0.0)
                    fail("zero denominator");
                number = parse(tok.substr(0, slash)) / den;
            }
        }
        pos = num_end;
        if (pos < s.size() && s[pos] == '*')
            ++pos;
        if (pos < s.size() && (s[pos] == 'x' || s[pos] == 'y' || s[pos] == 'z')) {
            const double coeff = sign * number;
            if (std::abs(coeff - std::round(coeff)) > 1e-12)
                fail("non-integer rotation coefficient");
            op.rotation(row, s[pos] - 'x') += static_cast<int>(std::lround(coeff));
            ++pos;
        } else if (has_number) {
            translation += sign * number;
        } else {
            fail("unexpected character");
        }
        if (pos < s.size() && s[pos] != '+' && s[pos] != '-')
            fail("unexpected character '" + std::string(1, s[pos]) + "'");
    }
    op.translation[row] = translation;
}

} // namespace

SymmetryOp parse_xyz_op(std::string_view text) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() != 3)
        throw Error(ErrorKind::MalformedCif,
                    "symmetry operation '" + std::string(text) + "' needs three components");
    SymmetryOp op;
    op.rotation.setZero();
    for (int r = 0; r < 3; ++r)
        parse_component(parts[static_cast<size_t>(r)], r, op, text);
    if (std::abs(op.rotation.cast<double>().determinant()) != 1.0)
        throw Error(ErrorKind::MalformedCif,
                    "symmetry operation '" + std::string(text) + "' is not unimodular");
    op.translation = reduce_translation(op.translation);
    return op;
}

namespace {

double require_number(const CifBlock &block, std::string_view tag) {
    const auto *raw = block.find(tag);
    if (raw == nullptr)
        throw Error(ErrorKind::MissingField, std::string(tag));
    const auto value = cif_number(*raw);
    if (!value)
        throw Error(ErrorKind::MissingField, std::string(tag) + " is not numeric");
    return *value;
}

} // namespace

CifStructure cif_to_structure(const CifDocument &doc, std::string provenance) {
    if (doc.blocks.empty())
        throw Error(ErrorKind::MissingField, "data block");
    const CifBlock &block = doc.first();
    const Lattice lattice = Lattice::from_parameters(
        require_number(block, "_cell_length_a"), require_number(block, "_cell_length_b"),
        require_number(block, "_cell_length_c"), require_number(block, "_cell_angle_alpha"),
        require_number(block, "_cell_angle_beta"), require_number(block, "_cell_angle_gamma"));

    const CifLoop *atoms = block.find_loop("_atom_site_fract_x");
    if (atoms == nullptr)
        throw Error(ErrorKind::MissingField, "_atom_site_fract_x");
    std::array<size_t, 3> xyz{};
    for (int k = 0; k < 3; ++k) {
        const std::string tag = std::string("_atom_site_fract_") + "xyz"[k];
        const auto col = atoms->column(tag);
        if (!col)
            throw Error(ErrorKind::MissingField, tag);
        xyz[static_cast<size_t>(k)] = *col;
    }
    const auto type_col = atoms->column("_atom_site_type_symbol");
    const auto label_col = atoms->column("_atom_site_label");
    if (!type_col && !label_col)
        throw Error(ErrorKind::MissingField, "_atom_site_type_symbol or _atom_site_label");
    const auto occ_col = atoms->column("_atom_site_occupancy");

    std::vector<AtomSite> asym;
    for (const auto &row : atoms->rows) {
        const std::string &symbol = type_col ? row[*type_col] : row[*label_col];
        const auto z = atomic_number_from_label(symbol);
        if (!z)
            throw Error(ErrorKind::UnknownElement, symbol);
        if (occ_col) {
            const auto occ = cif_number(row[*occ_col]);
            if (occ && *occ < 1.0 - 1e-3)
                throw Error(ErrorKind::UnsupportedOccupancy,
                            symbol + " has occupancy " + row[*occ_col]);
        }
        Vec3 frac;
        for (int k = 0; k < 3; ++k) {
            const auto v = cif_number(row[xyz[static_cast<size_t>(k)]]);
            if (!v)
                throw Error(ErrorKind::MissingField,
                            "fractional coordinate of " + symbol + " is not numeric");
            frac[k] = *v;
        }
        asym.push_back({*z, frac, 0});
    }

    CifStructure out;
    for (const auto &text : doc.symmetry_xyz)
        out.ops.push_back(parse_xyz_op(text));

    std::vector<AtomSite> sites;
    if (out.ops.empty()) {
        sites = std::move(asym);
    } else {
        for (const auto &a : asym) {
            for (const auto &op : out.ops) {
                const Vec3 f = wrap_frac(op.apply(a.frac));
                bool merged = false;
                for (const auto &s : sites) {
                    Vec3 d = f - s.frac;
                    d = d.array() - d.array().round();
                    if (lattice.to_cart(d).norm() < kMinSiteSeparation) {
                        if (s.species != a.species)
                            throw Error(ErrorKind::InconsistentSymmetry,
                                        "symmetry images of different species overlap");
                        merged = true;
                        break;
                    }
                }
                if (!merged)
                    sites.push_back({a.species, f, 0});
            }
        }
    }
    out.structure = CrystalStructure(lattice, std::move(sites),
                                     provenance.empty() ? block.name : std::move(provenance));
    return out;
}

} // namespace crystgraph
