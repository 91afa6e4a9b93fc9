"""Pluggable ambient categories with decidable morphism equality.

Two backends: finite sets with total maps, and matrices over Z/m. Every
check in the library bottoms out in `mor_eq`, which is structural equality
of normalized payloads.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CompositionError, PreconditionError


@dataclass(frozen=True)
class Obj:
    backend: str
    payload: tuple  # finset: point labels; matmod: (dim, modulus)


@dataclass(frozen=True)
class Mor:
    dom: Obj
    cod: Obj
    payload: tuple  # finset: cod indices, position-wise; matmod: row tuples


class FinSetBackend:
    """Finite sets; a morphism stores, for each dom point position, the
    position of its image in cod."""

    name = "finset"

    def obj(self, points) -> Obj:
        pts = tuple(points)
        if len(set(pts)) != len(pts):
            raise PreconditionError("finset carrier has duplicate points")
        return Obj("finset", pts)

    def mor(self, dom: Obj, cod: Obj, mapping) -> Mor:
        m = tuple(mapping)
        if len(m) != len(dom.payload):
            raise PreconditionError("finset map must cover the whole carrier")
        n = len(cod.payload)
        for v in m:
            if not isinstance(v, int) or not 0 <= v < n:
                raise PreconditionError(f"finset map image {v!r} outside cod")
        return Mor(dom, cod, m)

    def identity(self, x: Obj) -> Mor:
        return Mor(x, x, tuple(range(len(x.payload))))

    def pcompose(self, gp: tuple, fp: tuple) -> tuple:
        return tuple(gp[v] for v in fp)

    def compose(self, g: Mor, f: Mor) -> Mor:
        if f.cod != g.dom:
            raise CompositionError("cod(f) != dom(g)")
        return Mor(f.dom, g.cod, self.pcompose(g.payload, f.payload))

    def invert(self, f: Mor):
        """Inverse morphism when f is a bijection, else None."""
        n = len(f.dom.payload)
        if len(f.cod.payload) != n or len(set(f.payload)) != n:
            return None
        inv = [0] * n
        for i, v in enumerate(f.payload):
            inv[v] = i
        return Mor(f.cod, f.dom, tuple(inv))


class MatModBackend:
    """Matrices over Z/m acting on column vectors; composition is the
    matrix product reduced mod m."""

    name = "matmod"

    def obj(self, dim: int, modulus: int) -> Obj:
        if dim < 0:
            raise PreconditionError("dimension must be >= 0")
        if modulus < 2:
            raise PreconditionError("modulus must be >= 2")
        return Obj("matmod", (dim, modulus))

    def mor(self, dom: Obj, cod: Obj, rows) -> Mor:
        if dom.payload[1] != cod.payload[1]:
            raise PreconditionError("modulus mismatch between dom and cod")
        m = dom.payload[1]
        rs = tuple(tuple(v % m for v in row) for row in rows)
        if len(rs) != cod.payload[0] or any(len(r) != dom.payload[0] for r in rs):
            raise PreconditionError("matrix shape must be cod-dim x dom-dim")
        return Mor(dom, cod, rs)

    def identity(self, x: Obj) -> Mor:
        n = x.payload[0]
        return Mor(x, x, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def pcompose(self, gp: tuple, fp: tuple, modulus: int) -> tuple:
        if not fp:
            return tuple(() for _ in gp)
        inner = len(fp)
        cols = len(fp[0])
        return tuple(
            tuple(sum(grow[k] * fp[k][j] for k in range(inner)) % modulus for j in range(cols))
            for grow in gp
        )

    def compose(self, g: Mor, f: Mor) -> Mor:
        if f.cod != g.dom:
            raise CompositionError("cod(f) != dom(g)")
        m = f.dom.payload[1]
        return Mor(f.dom, g.cod, self.pcompose(g.payload, f.payload, m))

    def invert(self, f: Mor):
        """Inverse matrix mod m via Gauss-Jordan, or None when singular."""
        n = f.dom.payload[0]
        if f.cod.payload[0] != n:
            return None
        m = f.dom.payload[1]
        a = [list(row) for row in f.payload]
        inv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = None
            for r in range(col, n):
                try:
                    piv_inv = pow(a[r][col], -1, m)
                except ValueError:
                    continue
                piv = (r, piv_inv)
                break
            if piv is None:
                return None
            r, piv_inv = piv
            a[col], a[r] = a[r], a[col]
            inv[col], inv[r] = inv[r], inv[col]
            a[col] = [(v * piv_inv) % m for v in a[col]]
            inv[col] = [(v * piv_inv) % m for v in inv[col]]
            for rr in range(n):
                if rr != col and a[rr][col]:
                    c = a[rr][col]
                    a[rr] = [(x - c * y) % m for x, y in zip(a[rr], a[col])]
                    inv[rr] = [(x - c * y) % m for x, y in zip(inv[rr], inv[col])]
        return Mor(f.cod, f.dom, tuple(tuple(row) for row in inv))


FINSET = FinSetBackend()
MATMOD = MatModBackend()
BACKENDS = {"finset": FINSET, "matmod": MATMOD}


def get_backend(name: str):
    if name not in BACKENDS:
        raise PreconditionError(f"unknown category backend {name!r}")
    return BACKENDS[name]


def identity(cat, x: Obj) -> Mor:
    return cat.identity(x)


def compose(cat, g: Mor, f: Mor) -> Mor:
    return cat.compose(g, f)


def mor_eq(cat, f: Mor, g: Mor) -> bool:
    """Structural equality: dom, cod and normalized payload coincide."""
    return f == g
