#!/usr/bin/env python3
"""Independent reference computations for the regression values frozen in the
Rust test suites.

Everything here is written from scratch in pure Python (integer 4-tuples for
Z[gamma], gamma^4 = gamma^2 + 1) and shares no code with the Rust crates.
Run: python3 tools/oracle.py
"""

import math
from fractions import Fraction

GAMMA = math.sqrt((1 + math.sqrt(5)) / 2)


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def neg(a):
    return tuple(-x for x in a)


def mul(a, b):
    d = [0] * 7
    for i in range(4):
        for j in range(4):
            d[i + j] += a[i] * b[j]
    return (d[0] + d[4] + d[6], d[1] + d[5], d[2] + d[4] + 2 * d[6], d[3] + d[5])


def to_float(a):
    return sum(float(c) * GAMMA ** i for i, c in enumerate(a))


ZERO = (0, 0, 0, 0)
ONE = (1, 0, 0, 0)
G = (0, 1, 0, 0)
GINV = (0, -1, 0, 1)


def gpow(k):
    r = ONE
    base = G if k >= 0 else GINV
    for _ in range(abs(k)):
        r = mul(r, base)
    return r


PHI = gpow(2)
PHI_INV = gpow(-2)
PHI3 = gpow(6)
PHI52 = gpow(5)


def L(p):
    x, y = p
    return (sub(PHI52, mul(GINV, y)), mul(GINV, x))


def S(p):
    x, y = p
    return (mul(PHI_INV, x), sub(PHI3, mul(PHI_INV, y)))


BASE0 = [
    (ZERO, ZERO),
    (PHI52, ZERO),
    (PHI52, gpow(4)),
    (gpow(3), gpow(4)),
    (gpow(3), PHI3),
    (ZERO, PHI3),
]
BASE1 = BASE0 + [(ZERO, PHI), (G, PHI), (G, gpow(4))]


def chair_levels(n):
    levels = [set(BASE0), set(BASE1)]
    for k in range(2, n + 1):
        levels.append({L(p) for p in levels[k - 1]} | {S(p) for p in levels[k - 2]})
    return levels[: n + 1]


def sqdist(p, q):
    dx = sub(p[0], q[0])
    dy = sub(p[1], q[1])
    return add(mul(dx, dx), mul(dy, dy))


def dset(a, b):
    out = set()
    for p in a:
        for q in b:
            if p != q:
                out.add(sqdist(p, q))
    return out


def scale_set(vals, f):
    return {mul(v, f) for v in vals}


CONSTS = {
    2: (mul(PHI_INV, mul((2, 0, 0, 0), PHI3)), mul(PHI_INV, mul((2, 0, 0, 0), gpow(4)))),
    3: (mul(gpow(-3), mul((2, 0, 0, 0), gpow(8))), mul(gpow(-3), mul((2, 0, 0, 0), PHI3))),
    4: (ZERO, ZERO),
    5: (mul(gpow(-4), mul((-2, 0, 0, 0), PHI3)), mul(gpow(-4), mul((-2, 0, 0, 0), gpow(4)))),
}
SIGNS = {2: (1, -1), 3: (1, 1), 4: (-1, 1), 5: (-1, -1)}


def component(i, pts):
    scale = gpow(-i)
    sp = [(mul(scale, x), mul(scale, y)) for x, y in pts]
    cx, cy = CONSTS[i]
    sx, sy = SIGNS[i]
    out = set()
    for x1, y1 in sp:
        for x2, y2 in sp:
            u = sub(add(x1, x2) if sx > 0 else sub(x1, x2), cx)
            v = sub(add(y1, y2) if sy > 0 else sub(y1, y2), cy)
            out.add(add(mul(u, u), mul(v, v)))
    return out


def stacked(n, levels):
    D = [None] * (n + 1)
    for k in (n, n - 1, n - 2, n - 4):
        lv = list(levels[k])
        out = set()
        for i in range(len(lv)):
            for j in range(i + 1, len(lv)):
                out.add(sqdist(lv[i], lv[j]))
        D[k] = out
    comps = [
        ("RHS(n-1)", scale_set(D[n - 1], PHI_INV)),
        ("RHS(n-2)", scale_set(D[n - 2], gpow(-4))),
        ("RHS_2(n-2)", component(2, levels[n - 2])),
        ("RHS_3(n-3)", component(3, levels[n - 3])),
        ("RHS_4(n-4)", component(4, levels[n - 4])),
        ("RHS_5(n-5)", component(5, levels[n - 5])),
        ("RHS(n-4)", scale_set(D[n - 4], gpow(-8))),
    ]
    full = D[n]
    union = set()
    rows = []
    for name, c in comps:
        union |= c
        rows.append((name, len(c), len(c & full), len(c - full), Fraction(len(union & full), len(full))))
    residual = full - union
    return full, rows, residual, union - full


def median_bin(vals, edges):
    counts = [0] * (len(edges) - 1)
    for v in vals:
        for b in range(len(edges) - 1):
            if edges[b] <= v < edges[b + 1]:
                counts[b] += 1
                break
    half = sum(counts) / 2
    acc = 0
    for b, c in enumerate(counts):
        acc += c
        if acc >= half:
            return b
    return len(counts) - 1


def angles_ks(points):
    vals = sorted(
        math.atan2(to_float(y), to_float(x)) for x, y in points if not (x == ZERO and y == ZERO)
    )
    n = len(vals)
    a, b = 0.0, math.pi / 2
    d = 0.0
    for i, v in enumerate(vals):
        u = (v - a) / (b - a)
        d = max(d, (i + 1) / n - u, u - i / n)
    return d


def hecke(n, depth, amax=8, pmax=12):
    levels = chair_levels(depth)
    first = {}
    for m in range(1, depth + 1):
        for p in levels[m]:
            first.setdefault(p, m)
    inv_pows = [gpow(-p) for p in range(pmax + 1)]
    gens = {
        1: lambda v: (add(v[0], mul(PHI, v[1])), v[1]),
        2: lambda v: (v[0], add(mul(PHI, v[0]), v[1])),
    }
    found = {1: 0, 2: 0}
    total = len(levels[n])
    for i, g in gens.items():
        for v in levels[n]:
            gv = g(v)
            ok = False
            for p in range(pmax + 1):
                wx = mul(inv_pows[p], gv[0])
                wy = mul(inv_pows[p], gv[1])
                for a in range(1, amax + 1):
                    if all(c % a == 0 for c in wx + wy):
                        w = (tuple(c // a for c in wx), tuple(c // a for c in wy))
                        if w in first:
                            ok = True
                            break
                if ok:
                    break
            found[i] += ok
    return total, found


def main():
    levels = chair_levels(12)
    print("chair sizes", [len(l) for l in levels])
    print("nested", all(levels[k] <= levels[k + 1] for k in range(11)))
    d1 = dset(levels[1], levels[1])
    print("|dset(L1)|", len(d1), sorted(round(to_float(v), 9) for v in d1))
    print("|component(2, L0)|", len(component(2, levels[0])))
    c = component(2, levels[0])
    print("component(2,L0) floats", sorted(round(to_float(v), 9) for v in c))

    for n in (8, 9, 10):
        full, rows, residual, spurious = stacked(n, levels)
        print(f"stacked n={n} |D_n|={len(full)} residual={len(residual)} spurious={len(spurious)}")
        for r in rows:
            print("   ", r[0], "size", r[1], "in", r[2], "spurious", r[3], "coverage", r[4], float(r[4]))
        if n == 8:
            fl = [to_float(v) for v in full]
            hi = max(fl)
            edges = [hi * k / 20 for k in range(21)]
            edges[-1] = hi * 1.000001
            print("    median bin full", median_bin(fl, edges),
                  "residual", median_bin([to_float(v) for v in residual], edges))

    print("ks angles L6", repr(angles_ks(levels[6])), "L12", repr(angles_ks(levels[12])))
    total, found = hecke(1, 6)
    print("hecke n=1 depth=6", total, found)
    total, found = hecke(2, 6)
    print("hecke n=2 depth=6", total, found)

    # Farey: reduced fractions y/x with 0<y<x<=Q
    for q in (5, 300):
        fr = sorted({Fraction(y, x) for x in range(2, q + 1) for y in range(1, x)})
        gaps = [fr[i + 1] - fr[i] for i in range(len(fr) - 1)]
        print(f"farey Q={q} count={len(fr)} min normalized gap={float(min(gaps) * len(fr))}")

    # min-magnitude enumeration for unit basis
    for n in (5, 7):
        pts = [(a, n + 1 - a) for a in range(0, n + 2)]
        pts = [p for p in pts if p[0] == 1 or p[1] == 1 or (p[0] % 2 == 1 and p[1] % 2 == 1 and p[0] >= 3 and p[1] >= 3)]
        m = min(a * a + b * b for a, b in pts)
        print("minmag n", n, [p for p in pts if p[0] ** 2 + p[1] ** 2 == m], m)


if __name__ == "__main__":
    main()
