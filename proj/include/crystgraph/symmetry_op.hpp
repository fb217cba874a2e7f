#pragma once

#include <crystgraph/structure.hpp>

#include <string>

namespace crystgraph {

/// Affine operation on fractional coordinates, x' = rotation * x + translation.
/// The translation is kept reduced into [0, 1).
struct SymmetryOp {
    IMat3 rotation = IMat3::Identity();
    Vec3 translation = Vec3::Zero();

    static SymmetryOp identity() { return {}; }

    Vec3 apply(const Vec3 &frac) const {
        return rotation.cast<double>() * frac + translation;
    }
    bool is_identity(double tol = 1e-9) const;
    /// (*this) after `other`: x -> this(other(x)).
    SymmetryOp compose(const SymmetryOp &other) const;
    SymmetryOp inverse() const;
    /// Same rotation and translations equal modulo lattice within `tol`.
    bool equivalent(const SymmetryOp &other, double tol) const;

    /// Formats as an "x,y,z"-style triplet, e.g. "-y,x-y,z+1/3".
    std::string to_xyz() const;
};

/// Translation reduced into [0, 1) with a 1e-9 snap to zero.
Vec3 reduce_translation(const Vec3 &t);

} // namespace crystgraph
