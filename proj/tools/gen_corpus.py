#!/usr/bin/env python3
"""Writes the bundled structure corpus to data/corpus/.

Symmetric prototypes list their asymmetric sites and the full operation set
of their space group (built by closure from generators). Low-symmetry cells
come from a seeded RNG.
"""
import argparse
import itertools
import math
import pathlib
import random
from fractions import Fraction as F


def parse_op(text):
    rows, trans = [], []
    for expr in text.split(","):
        coef = {"x": 0, "y": 0, "z": 0}
        t = F(0)
        expr = expr.replace("-", "+-")
        for term in filter(None, expr.split("+")):
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("-")
            if term in coef:
                coef[term] += sign
            else:
                t += sign * F(term)
        rows.append((coef["x"], coef["y"], coef["z"]))
        trans.append(t % 1)
    return tuple(rows), tuple(trans)


def compose(a, b):
    ra, ta = a
    rb, tb = b
    r = tuple(tuple(sum(ra[i][k] * rb[k][j] for k in range(3)) for j in range(3)) for i in range(3))
    t = tuple((sum(ra[i][k] * tb[k] for k in range(3)) + ta[i]) % 1 for i in range(3))
    return r, t


def closure(generators):
    ident = (((1, 0, 0), (0, 1, 0), (0, 0, 1)), (F(0), F(0), F(0)))
    group = [ident]
    seen = {ident}
    gens = [parse_op(g) for g in generators]
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = compose(g, a)
                if c not in seen:
                    seen.add(c)
                    group.append(c)
                    nxt.append(c)
        frontier = nxt
    assert len(group) <= 192, len(group)
    return group


def format_op(op):
    r, t = op
    parts = []
    for i in range(3):
        s = ""
        for c, name in zip(r[i], "xyz"):
            if c == 1:
                s += ("+" if s else "") + name
            elif c == -1:
                s += "-" + name
        if t[i] != 0:
            s += "+" + str(t[i])
        parts.append(s)
    return ",".join(parts)


def apply(op, p):
    r, t = op
    return tuple((sum(float(r[i][k]) * p[k] for k in range(3)) + float(t[i])) % 1.0 for i in range(3))


def expand(ops, sites):
    full = []
    for sym, p in sites:
        for op in ops:
            q = apply(op, p)
            if not any(
                s == sym and all(min(abs(a - b), 1 - abs(a - b)) < 1e-6 for a, b in zip(q, fp))
                for s, fp in full
            ):
                full.append((sym, q))
    return full


CENTER_F = ["x,y+1/2,z+1/2", "x+1/2,y,z+1/2", "x+1/2,y+1/2,z"]
CENTER_I = ["x+1/2,y+1/2,z+1/2"]
OH = ["-y,x,z", "z,x,y", "-x,-y,-z", "y,x,z"]
TD = ["y,-x,-z", "z,x,y", "y,x,z"]
P63_MMC = ["x-y,x,z+1/2", "-x,-y,-z", "-y,-x,z"]
P63_MC = ["x-y,x,z+1/2", "-y,-x,z"]
P42_MNM = ["-y+1/2,x+1/2,z+1/2", "-x,-y,-z", "y,x,-z"]
P2_M = ["-x,y,-z", "-x,-y,-z"]

GROUPS = {
    "Fm-3m": OH + CENTER_F,
    "F-43m": TD + CENTER_F,
    "Pm-3m": OH,
    "Im-3m": OH + CENTER_I,
    "P6_3/mmc": P63_MMC,
    "P6_3mc": P63_MC,
    "P4_2/mnm": P42_MNM,
    "P2/m": P2_M,
}


def write_cif(path, name, cell, group, ops, sites, expected=None):
    full = expand(ops, sites)
    if expected is not None:
        assert len(full) == expected, (name, len(full), expected)
    a, b, c, al, be, ga = cell
    lines = [
        f"data_{name}",
        f"_chemical_name_common '{name}'",
        f"_cell_length_a {a:.4f}",
        f"_cell_length_b {b:.4f}",
        f"_cell_length_c {c:.4f}",
        f"_cell_angle_alpha {al:.4f}",
        f"_cell_angle_beta {be:.4f}",
        f"_cell_angle_gamma {ga:.4f}",
        f"_symmetry_space_group_name_H-M '{group}'",
        "loop_",
        "_symmetry_equiv_pos_as_xyz",
    ]
    lines += [f"'{format_op(op)}'" for op in ops]
    lines += [
        "loop_",
        "_atom_site_label",
        "_atom_site_type_symbol",
        "_atom_site_fract_x",
        "_atom_site_fract_y",
        "_atom_site_fract_z",
        "_atom_site_occupancy",
    ]
    counts = {}
    for sym, p in sites:
        counts[sym] = counts.get(sym, 0) + 1
        lines.append(f"{sym}{counts[sym]} {sym} {p[0]:.10f} {p[1]:.10f} {p[2]:.10f} 1.0")
    path.write_text("\n".join(lines) + "\n")
    return len(full)


def cubic(a):
    return (a, a, a, 90.0, 90.0, 90.0)


def hexagonal(a, c):
    return (a, a, c, 90.0, 90.0, 120.0)


def tetragonal(a, c):
    return (a, a, c, 90.0, 90.0, 90.0)


def random_cell(rng, n, species, name):
    a, b, c = (rng.uniform(3.0, 6.0) for _ in range(3))
    al, be, ga = (rng.uniform(75.0, 105.0) for _ in range(3))
    sites = []
    while len(sites) < n:
        p = tuple(rng.random() for _ in range(3))
        # coarse separation check in fractional units
        if all(
            math.dist((0, 0, 0), [min(abs(x - y), 1 - abs(x - y)) for x, y in zip(p, q)]) > 0.2
            for _, q in sites
        ):
            sites.append((rng.choice(species), p))
    return name, (a, b, c, al, be, ga), sites


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "corpus"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ops = {k: closure(v) for k, v in GROUPS.items()}
    ops["P1"] = closure([])
    expected_orders = {"Fm-3m": 192, "F-43m": 96, "Pm-3m": 48, "Im-3m": 96,
                       "P6_3/mmc": 24, "P6_3mc": 12, "P4_2/mnm": 16, "P2/m": 4}
    for k, n in expected_orders.items():
        assert len(ops[k]) == n, (k, len(ops[k]))

    entries = []
    for sym, x, a in [("Na", "Cl", 5.64), ("K", "Cl", 6.29), ("Mg", "O", 4.21), ("Li", "F", 4.03),
                      ("Na", "F", 4.63), ("K", "Br", 6.60), ("Ca", "O", 4.81), ("Ag", "Cl", 5.55)]:
        entries.append((f"{sym}{x}_rocksalt", cubic(a), "Fm-3m",
                        [(sym, (0, 0, 0)), (x, (0.5, 0, 0))], 8))
    for m, x, a in [("Ca", "F", 5.46), ("Sr", "F", 5.80), ("Ba", "F", 6.20)]:
        entries.append((f"{m}{x}2_fluorite", cubic(a), "Fm-3m",
                        [(m, (0, 0, 0)), (x, (0.25, 0.25, 0.25))], 12))
    entries.append(("Li2O_antifluorite", cubic(4.61), "Fm-3m",
                    [("O", (0, 0, 0)), ("Li", (0.25, 0.25, 0.25))], 12))
    for el, a in [("Cu", 3.61), ("Al", 4.05), ("Ni", 3.52), ("Ag", 4.09), ("Au", 4.08), ("Pt", 3.92), ("Pb", 4.95)]:
        entries.append((f"{el}_fcc", cubic(a), "Fm-3m", [(el, (0, 0, 0))], 4))
    for m, x, a in [("Zn", "S", 5.41), ("Ga", "As", 5.65), ("Si", "C", 4.36), ("Cd", "Te", 6.48)]:
        entries.append((f"{m}{x}_zincblende", cubic(a), "F-43m",
                        [(m, (0, 0, 0)), (x, (0.25, 0.25, 0.25))], 8))
    for el, a in [("Si", 5.43), ("C", 3.567), ("Ge", 5.66)]:
        entries.append((f"{el}_diamond", cubic(a), "F-43m",
                        [(el, (0, 0, 0)), (el, (0.25, 0.25, 0.25))], 8))
    for m, x, a in [("Cs", "Cl", 4.12), ("Cs", "Br", 4.29), ("Ni", "Al", 2.88)]:
        entries.append((f"{m}{x}_cscl", cubic(a), "Pm-3m",
                        [(m, (0, 0, 0)), (x, (0.5, 0.5, 0.5))], 2))
    for a_, b_, x, a in [("Sr", "Ti", "O", 3.905), ("Ba", "Ti", "O", 4.00), ("K", "Mg", "F", 3.99)]:
        entries.append((f"{a_}{b_}{x}3_perovskite", cubic(a), "Pm-3m",
                        [(a_, (0, 0, 0)), (b_, (0.5, 0.5, 0.5)), (x, (0.5, 0.5, 0))], 5))
    entries.append(("Cu3Au_L12", cubic(3.75), "Pm-3m", [("Au", (0, 0, 0)), ("Cu", (0.5, 0.5, 0))], 4))
    entries.append(("Po_simple_cubic", cubic(3.35), "Pm-3m", [("Po", (0, 0, 0))], 1))
    for el, a in [("Fe", 2.87), ("W", 3.16), ("Na", 4.29), ("Cr", 2.91)]:
        entries.append((f"{el}_bcc", cubic(a), "Im-3m", [(el, (0, 0, 0))], 2))
    for el, a, c in [("Mg", 3.21, 5.21), ("Ti", 2.95, 4.68), ("Zn", 2.66, 4.95), ("Co", 2.51, 4.07)]:
        entries.append((f"{el}_hcp", hexagonal(a, c), "P6_3/mmc", [(el, (1 / 3, 2 / 3, 0.25))], 2))
    for m, x, a, c, u in [("Zn", "O", 3.25, 5.21, 0.382), ("Ga", "N", 3.19, 5.19, 0.377)]:
        entries.append((f"{m}{x}_wurtzite", hexagonal(a, c), "P6_3mc",
                        [(m, (1 / 3, 2 / 3, 0)), (x, (1 / 3, 2 / 3, u))], 4))
    entries.append(("BN_hexagonal", hexagonal(2.50, 6.66), "P6_3/mmc",
                    [("B", (1 / 3, 2 / 3, 0.25)), ("N", (2 / 3, 1 / 3, 0.25))], 4))
    for m, a, c, u in [("Ti", 4.59, 2.96, 0.305), ("Sn", 4.74, 3.19, 0.307), ("Ru", 4.49, 3.11, 0.306)]:
        entries.append((f"{m}O2_rutile", tetragonal(a, c), "P4_2/mnm",
                        [(m, (0, 0, 0)), ("O", (u, u, 0))], 6))

    rng = random.Random(20240517)
    for i, (n, species) in enumerate([(3, ["Li", "O"]), (4, ["Fe", "O", "S"]), (5, ["Al", "N"])]):
        name, cell, sites = random_cell(rng, n, species, f"random_triclinic_{i + 1}")
        entries.append((name, cell, "P1", sites, n))
    for i, species in enumerate([["Mg", "Si", "O"], ["Ca", "C"]]):
        cell = (rng.uniform(4, 6), rng.uniform(4, 6), rng.uniform(4, 6), 90.0, rng.uniform(95, 110), 90.0)
        sites = [(species[j % len(species)], (rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.2) + 0.25 * j, rng.uniform(0.05, 0.45)))
                 for j in range(2)]
        entries.append((f"monoclinic_p2m_{i + 1}", cell, "P2/m", sites, 8))
    # rocksalt primitive cell, listed without operations
    a = 5.64 / math.sqrt(2)
    entries.append(("NaCl_primitive", (a, a, a, 60.0, 60.0, 60.0), "P1",
                    [("Na", (0, 0, 0)), ("Cl", (0.5, 0.5, 0.5))], 2))

    for name, cell, group, sites, expected in entries:
        write_cif(out / f"{name}.cif", name, cell, group, ops[group], sites, expected)
    print(f"wrote {len(entries)} structures to {out}")


if __name__ == "__main__":
    main()
