#!/usr/bin/env python3
"""Generate the shipped catalog (lattice + cohomology model JSON) with exact rationals.

Each model is a truncated graded ring Q[x_1..x_k]/I given by a monomial basis,
reduction rules for products, a top-degree integration functional and the Todd
class computed from the toric / product structure.
"""
import itertools
import json
import os
import sys

import sympy as sp

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "catalog")


def rat(x):
    x = sp.Rational(x)
    return str(x.p) if x.q == 1 else f"{x.p}/{x.q}"


def todd_factor(d, n):
    """Truncated series d/(1-exp(-d)) up to degree n."""
    t = sp.Symbol("t")
    ser = sp.series(t / (1 - sp.exp(-t)), t, 0, n + 1).removeO()
    return sp.expand(ser.subs(t, d))


class Ring:
    def __init__(self, name, gens, relations, top_monomial, dim, deg1_names):
        self.name = name
        self.gens = gens
        self.dim = dim
        self.G = sp.groebner(relations, *gens, order="grevlex", domain=sp.QQ)
        # standard monomials up to degree dim
        basis = []
        for deg in range(dim + 1):
            for exps in itertools.product(range(deg + 1), repeat=len(gens)):
                if sum(exps) != deg:
                    continue
                m = sp.Mul(*[g**e for g, e in zip(gens, exps)])
                if self.reduce(m) == m:
                    basis.append((m, deg))
        basis.sort(key=lambda b: (b[1], [-e for e in sp.Poly(b[0], *gens).monoms()[0]]))
        self.basis = basis
        self.top = top_monomial
        self.deg1_names = deg1_names

    def reduce(self, expr):
        expr = sp.expand(expr)
        # truncate above dim
        p = sp.Poly(expr, *self.gens) if expr != 0 else None
        if p is None:
            return sp.Integer(0)
        kept = sum(c * sp.Mul(*[g**e for g, e in zip(self.gens, m)])
                   for m, c in p.terms() if sum(m) <= self.dim)
        return self.G.reduce(sp.expand(kept))[1]

    def coords(self, expr):
        r = sp.expand(self.reduce(expr))
        out = []
        for m, _ in self.basis:
            if r == 0:
                out.append(sp.Integer(0))
                continue
            p = sp.Poly(r, *self.gens)
            mono = sp.Poly(m, *self.gens).monoms()[0]
            out.append(p.coeff_monomial(mono))
        # sanity: exact reconstruction
        rec = sum(c * m for c, (m, _) in zip(out, self.basis))
        assert sp.expand(rec - r) == 0, (expr, r, rec)
        return out

    def integrate(self, expr):
        c = self.coords(expr)
        top_idx = [i for i, (m, _) in enumerate(self.basis) if m == self.top]
        assert len(top_idx) == 1
        # every degree-dim basis element must be a multiple of the top class
        val = 0
        for i, (m, d) in enumerate(self.basis):
            if d == self.dim:
                assert m == self.top, "top degree must be one-dimensional"
                val += c[i]
        return val


def mono_name(m, names):
    if m == 1:
        return "1"
    p = sp.Poly(m, *names.keys())
    parts = []
    for g, e in zip(names.keys(), p.monoms()[0]):
        if e == 1:
            parts.append(names[g])
        elif e > 1:
            parts.append(f"{names[g]}^{e}")
    return "*".join(parts)


def emit(key, display, ring, names, todd, chi0, ample_gens):
    n = ring.dim
    basis = [{"name": mono_name(m, names), "degree": d} for m, d in ring.basis]
    mult = []
    for i, (mi, di) in enumerate(ring.basis):
        for j, (mj, dj) in enumerate(ring.basis):
            if j < i or di == 0 or dj == 0:
                continue
            c = ring.coords(mi * mj)
            res = [{"basis": basis[k]["name"], "coeff": rat(v)} for k, v in enumerate(c) if v != 0]
            if res:
                mult.append({"left": basis[i]["name"], "right": basis[j]["name"], "result": res})
    integ = [{"basis": basis[k]["name"], "value": rat(ring.integrate(m))}
             for k, (m, d) in enumerate(ring.basis) if d == n]
    tc = ring.coords(todd)
    todd_json = [{"basis": basis[k]["name"], "coeff": rat(v)} for k, v in enumerate(tc) if v != 0]
    point = [{"basis": mono_name(ring.top, names), "coeff": "1"}]
    emb = []
    for g in ring.deg1_names:
        c = ring.coords(g)
        emb.append([{"basis": basis[k]["name"], "coeff": rat(v)} for k, v in enumerate(c) if v != 0])
    chi = ring.integrate(todd)
    assert chi == chi0, (key, chi, chi0)
    model = {
        "name": key,
        "dimension": n,
        "chi_structure_sheaf": rat(chi0),
        "basis": basis,
        "mult": mult,
        "integrate": integ,
        "todd": todd_json,
        "point_class": point,
        "divisor_embedding": emb,
    }
    rho = len(ring.deg1_names)
    form = []
    for idx in itertools.combinations_with_replacement(range(rho), n):
        v = ring.integrate(sp.Mul(*[ring.deg1_names[i] for i in idx]))
        if v != 0:
            form.append({"monomial": list(idx), "value": rat(v)})
    lattice = {
        "name": key,
        "description": display,
        "dimension": n,
        "rank": rho,
        "form": form,
        "ample_generators": [[rat(x) for x in g] for g in ample_gens],
    }
    d = os.path.join(OUT, key)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "lattice.json"), "w") as f:
        json.dump(lattice, f, indent=2)
        f.write("\n")
    with open(os.path.join(d, "model.json"), "w") as f:
        json.dump(model, f, indent=2)
        f.write("\n")


def product_of_projective(key, display, dims):
    gens = sp.symbols(f"x0:{len(dims)}")
    rels = [g ** (d + 1) for g, d in zip(gens, dims)]
    n = sum(dims)
    top = sp.Mul(*[g**d for g, d in zip(gens, dims)])
    ring = Ring(key, gens, rels, top, n, list(gens))
    todd = sp.Integer(1)
    for g, d in zip(gens, dims):
        todd = ring.reduce(todd * todd_factor(g, n) ** (d + 1))
    if len(dims) == 1:
        names = {gens[0]: "H"}
    else:
        names = {g: f"H{i+1}" for i, g in enumerate(gens)}
    gens_dc = [[1 if i == j else 0 for j in range(len(dims))] for i in range(len(dims))]
    emit(key, display, ring, names, todd, 1, gens_dc)


def proj_bundle_p2():
    h, xi = sp.symbols("h xi")
    rels = [h**3, xi**2 - xi * h]
    ring = Ring("proj-bundle-p2", (xi, h), rels, h**2 * xi, 3, [h, xi])
    n = 3
    # toric divisors: three strict transforms of hyperplanes through the centre (class h),
    # the hyperplane missing it (class xi), and the exceptional divisor (xi - h)
    todd = sp.Integer(1)
    for d in [h, h, h, xi, xi - h]:
        todd = ring.reduce(todd * todd_factor(d, n))
    emit("proj-bundle-p2", "P(O+O(1)) over P2 (blow-up of P3 in a point)", ring,
         {xi: "xi", h: "h"}, todd, 1, [[1, 0], [0, 1]])


if __name__ == "__main__":
    product_of_projective("p2", "projective plane", [2])
    product_of_projective("p3", "projective 3-space", [3])
    product_of_projective("p1xp1", "P1 x P1", [1, 1])
    product_of_projective("p1xp2", "P1 x P2", [1, 2])
    product_of_projective("p1cubed", "P1 x P1 x P1", [1, 1, 1])
    proj_bundle_p2()
    print("ok", file=sys.stderr)
