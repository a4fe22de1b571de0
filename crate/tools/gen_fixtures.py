#!/usr/bin/env python3
"""Regenerate the bundled S_2(Gamma_0(N)) basis fixtures.

Requires cypari2 (for example from the `passagemath-pari` wheel). For every
level with genus >= 2 the script takes PARI's cuspidal basis, brings it to
reduced row echelon form over Q (the listing convention of Sage's
CuspForms(N).basis()), checks integrality and writes one fixture file per
level in the plain-text basis format read by `basis_io::load_basis`.

    python3 tools/gen_fixtures.py [--max-level 100] [--prec 121] [--out DIR]
"""
import argparse
import os
from fractions import Fraction
from math import gcd

import cypari2

pari = cypari2.Pari()
pari.allocatemem(512 * 1024 * 1024)


def rref(rows):
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        sel = next((r for r in range(pivot_row, len(rows)) if rows[r][col] != 0), None)
        if sel is None:
            continue
        rows[pivot_row], rows[sel] = rows[sel], rows[pivot_row]
        inv = 1 / rows[pivot_row][col]
        rows[pivot_row] = [c * inv for c in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    assert pivot_row == len(rows), "basis rows are dependent at this precision"
    return rows


def integral_hnf(rows):
    """Row Hermite normal form of (Q-span of rows) intersected with Z^n."""
    den = 1
    for r in rows:
        for c in r:
            den = den * c.denominator // gcd(den, c.denominator)
    n = len(rows[0])
    cols = pari.matrix(n, len(rows), [int(r[i] * den) for i in range(n) for r in rows])
    sat = pari.matrixqz(cols, -2)
    work = [[int(sat[i, j]) for i in range(n)] for j in range(len(rows))]
    out = []
    for col in range(n):
        if not work:
            break
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            reduced = [piv] + [[a - (r[col] // piv[col]) * b for a, b in zip(r, piv)] for r in nz[1:]]
            work = [r for r in work if r[col] == 0] + reduced
        nz = [r for r in work if r[col] != 0]
        if not nz:
            continue
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        work = [r for r in work if r[col] == 0]
        out.append(piv)
    for i, r in enumerate(out):
        pc = next(k for k, c in enumerate(r) if c)
        for j in range(i):
            q = out[j][pc] // r[pc]
            out[j] = [a - q * b for a, b in zip(out[j], r)]
    assert len(out) == len(rows)
    return [[Fraction(c) for c in r] for r in out]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-level", type=int, default=100)
    ap.add_argument("--prec", type=int, default=121)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    top = args.prec - 1
    for level in range(1, args.max_level + 1):
        mf = pari.mfinit([level, 2], 1)
        genus = int(pari.mfdim(mf))
        if genus < 2:
            continue
        basis = pari.mfbasis(mf)
        rows = []
        for f in basis:
            coeffs = pari.mfcoefs(f, top)
            rows.append(list(coeffs)[1:])
        # Coefficients may live in Q; scale through Fraction.
        rows = [[Fraction(str(c)) for c in r] for r in rows]
        ech = rref(rows)
        if any(c.denominator != 1 for r in ech for c in r):
            ech = integral_hnf(rows)
        path = os.path.join(args.out, f"gamma0_{level:03}.basis")
        with open(path, "w") as fh:
            fh.write(f"level={level} weight=2 genus={genus} prec={args.prec} echelon=true\n")
            for i, r in enumerate(ech):
                fh.write(f"form {i}: " + ",".join(str(c.numerator) for c in r) + "\n")
        print(level, genus)


if __name__ == "__main__":
    main()
