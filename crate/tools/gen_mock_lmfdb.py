#!/usr/bin/env python3
"""Write canned LMFDB-style API responses used by the fetch-client tests.

For each requested level N and every divisor M of N this emits
`mf_newforms_<M>.json` (newform labels and dimensions) and, per newform,
`mf_hecke_nf_<label>.json` with `an` as coordinate vectors of a_1..a_100 in
the power basis of the Hecke field.
"""
import json
import os
import sys
from fractions import Fraction
from math import gcd

import cypari2

pari = cypari2.Pari()
OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "data", "lmfdb")
NUM = 100


def coords(c, dim):
    if dim == 1:
        return [Fraction(str(c))]
    poly = pari.lift(c)
    if str(pari.type(poly)) != "t_POL":
        return [Fraction(str(poly))] + [Fraction(0)] * (dim - 1)
    return [Fraction(str(pari.polcoef(poly, k))) for k in range(dim)]


def integral_columns(rows):
    # Scale each coordinate series by the lcm of its denominators; this keeps
    # the Q-span of the coordinate series unchanged.
    dim = len(rows[0])
    out = [[0] * dim for _ in rows]
    for k in range(dim):
        den = 1
        for r in rows:
            den = den * r[k].denominator // gcd(den, r[k].denominator)
        for i, r in enumerate(rows):
            out[i][k] = int(r[k] * den)
    return out


def main(levels):
    os.makedirs(OUT, exist_ok=True)
    done = set()
    for n in levels:
        for m in [d for d in range(1, n + 1) if n % d == 0]:
            if m in done:
                continue
            done.add(m)
            mf = pari.mfinit([m, 2], 0)
            entries = []
            if int(pari.mfdim(mf)) > 0:
                for idx, f in enumerate(pari.mfeigenbasis(mf)):
                    coeffs = list(pari.mfcoefs(f, NUM))[1:]
                    dim = max((int(pari.poldegree(pari.component(c, 1))) for c in coeffs
                               if str(pari.type(c)) == "t_POLMOD"), default=1)
                    label = f"{m}.2.a.{chr(ord('a') + idx)}"
                    an = integral_columns([coords(c, dim) for c in coeffs])
                    if dim == 1:
                        an = [r[0] for r in an]
                    entries.append({"label": label, "dim": dim})
                    with open(os.path.join(OUT, f"mf_hecke_nf_{label}.json"), "w") as fh:
                        json.dump({"data": [{"label": label, "an": an}]}, fh)
            with open(os.path.join(OUT, f"mf_newforms_{m}.json"), "w") as fh:
                json.dump({"data": entries}, fh)
            print(m, entries)


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [34, 55])
