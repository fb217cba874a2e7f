#include <crystgraph/symmetry_op.hpp>

#include <cmath>
#include <fmt/format.h>

namespace crystgraph {

Vec3 reduce_translation(const Vec3 &t) {
    Vec3 out;
    for (int k = 0; k < 3; ++k) {
        double x = t[k] - std::floor(t[k]);
        if (x > 1.0 - 1e-9 || x < 1e-9)
            x = 0.0;
        out[k] = x;
    }
    return out;
}

bool SymmetryOp::is_identity(double tol) const {
    return rotation == IMat3::Identity() && reduce_translation(translation).norm() <= tol;
}

SymmetryOp SymmetryOp::compose(const SymmetryOp &other) const {
    SymmetryOp out;
    out.rotation = rotation * other.rotation;
    out.translation =
        reduce_translation(rotation.cast<double>() * other.translation + translation);
    return out;
}

SymmetryOp SymmetryOp::inverse() const {
    SymmetryOp out;
    // Unimodular integer matrix: the inverse is integral.
    const Mat3 inv = rotation.cast<double>().inverse();
    out.rotation = inv.array().round().cast<int>();
    out.translation = reduce_translation(-(out.rotation.cast<double>() * translation));
    return out;
}

bool SymmetryOp::equivalent(const SymmetryOp &other, double tol) const {
    if (rotation != other.rotation)
        return false;
    Vec3 d = translation - other.translation;
    d = d.array() - d.array().round();
    return d.cwiseAbs().maxCoeff() <= tol;
}

namespace {

std::string format_fraction(double value) {
    for (int den : {1, 2, 3, 4, 6, 8, 12}) {
        const double num = value * den;
        if (std::abs(num - std::round(num)) < 1e-9) {
            const long n = std::lround(num);
            return den == 1 ? fmt::format("{}", n) : fmt::format("{}/{}", n, den);
        }
    }
    return fmt::format("{}", value);
}

} // namespace

std::string SymmetryOp::to_xyz() const {
    static constexpr char axes[3] = {'x', 'y', 'z'};
    std::string out;
    for (int r = 0; r < 3; ++r) {
        std::string term;
        for (int c = 0; c < 3; ++c) {
            const int w = rotation(r, c);
            if (w == 0)
                continue;
            if (w < 0)
                term += '-';
            else if (!term.empty())
                term += '+';
            if (std::abs(w) != 1)
                term += std::to_string(std::abs(w));
            term += axes[c];
        }
        const double t = reduce_translation(translation)[r];
        if (t != 0.0)
            term += "+" + format_fraction(t);
        if (term.empty())
            term = "0";
        out += term;
        if (r < 2)
            out += ',';
    }
    return out;
}

} // namespace crystgraph
