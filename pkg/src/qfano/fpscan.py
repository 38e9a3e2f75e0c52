"""Finite-field grid scans: the numeric hot path.

Everything symbolic in this package is exact; the only numerics are
desk-scale scans over all points of F_p^k, used to hunt for rational singular
points on affine cones (quasismoothness checks) and rank drops of exceptional
divisor models.  The kernel is a graded evaluation of a sparse exponent-form
polynomial over the full grid, variable by variable, so the cost is
O(p^k * deg) rather than O(p^k * terms).

Backends: a numba @njit kernel (default when numba imports) and a pure-numpy
fallback.  Set QFANO_PURE_NUMPY=1 to force the fallback.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .gralg import Poly, PrimeField, PrimeFieldElem

_NUMBA_COMBINE = None


def _load_numba():
    global _NUMBA_COMBINE
    if _NUMBA_COMBINE is not None:
        return _NUMBA_COMBINE
    try:
        from numba import njit
    except ImportError:
        _NUMBA_COMBINE = False
        return False

    @njit(cache=False)
    def combine(powsel, sub, p):  # pragma: no cover - compiled
        P, ne = powsel.shape
        M = sub.shape[1]
        out = np.zeros((P, M), dtype=np.int64)
        for v in range(P):
            for e in range(ne):
                c = powsel[v, e]
                if c == 0:
                    continue
                row = sub[e]
                for j in range(M):
                    out[v, j] += c * row[j]
            for j in range(M):
                out[v, j] %= p
        return out

    _NUMBA_COMBINE = combine
    return combine


def use_pure_numpy() -> bool:
    if os.environ.get("QFANO_PURE_NUMPY", "") not in ("", "0"):
        return True
    return _load_numba() is False


def backend_name() -> str:
    return "numpy" if use_pure_numpy() else "numba"


# ---------------------------------------------------------------------------
# compilation and grid evaluation
# ---------------------------------------------------------------------------

def compile_poly(poly: Poly):
    """Exponent matrix and coefficient vector mod p for a GF(p) polynomial."""
    if not isinstance(poly.ring.field, PrimeField):
        raise ValueError("compile_poly expects a GF(p) polynomial")
    nv = poly.ring.nvars
    if not poly.terms:
        return np.zeros((0, nv), dtype=np.int64), np.zeros(0, dtype=np.int64)
    exps = np.array(list(poly.terms.keys()), dtype=np.int64)
    coeffs = np.array([c.value for c in poly.terms.values()], dtype=np.int64)
    return exps, coeffs


def _pow_table(p: int, maxdeg: int) -> np.ndarray:
    table = np.ones((p, maxdeg + 1), dtype=np.int64)
    for e in range(1, maxdeg + 1):
        table[:, e] = table[:, e - 1] * np.arange(p, dtype=np.int64) % p
    return table


def grid_eval(poly: Poly, p: int) -> np.ndarray:
    """Values of ``poly`` on all of F_p^nvars, flattened with the first
    coordinate major (flat index 0 is the origin)."""
    exps, coeffs = compile_poly(poly)
    nv = poly.ring.nvars
    if len(coeffs) == 0:
        return np.zeros(p ** nv, dtype=np.int64)
    maxdeg = int(exps.max(initial=0))
    pow_table = _pow_table(p, maxdeg)
    pure = use_pure_numpy()
    combine = None if pure else _load_numba()

    def rec(term_idx: np.ndarray, var: int) -> np.ndarray:
        if var == nv:
            return np.array([int(coeffs[term_idx].sum() % p)], dtype=np.int64)
        col = exps[term_idx, var]
        uniq = np.unique(col)
        subs = []
        for e in uniq:
            subs.append(rec(term_idx[col == e], var + 1))
        sub = np.stack(subs)                      # (ne, M)
        powsel = pow_table[:, uniq]               # (p, ne)
        if pure:
            out = (powsel @ sub) % p
        else:
            out = combine(powsel, sub, p)
        return out.reshape(-1)

    return rec(np.arange(len(coeffs)), 0)


def _points_from_flat(flat_idx: np.ndarray, nv: int, p: int) -> list:
    coords = np.unravel_index(flat_idx, (p,) * nv)
    return sorted(tuple(int(c[i]) for c in coords) for i in range(len(flat_idx)))


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def _as_gf(poly: Poly, p: int) -> Poly:
    if isinstance(poly.ring.field, PrimeField):
        if poly.ring.field.p != p:
            raise ValueError("polynomial lives in GF(%d), not GF(%d)" % (poly.ring.field.p, p))
        return poly
    return poly.reduce_mod(p)


def hypersurface_singular_points(poly: Poly, p: int) -> list:
    """Nonzero points of F_p^n with F and all partials vanishing."""
    f = _as_gf(poly, p)
    nv = f.ring.nvars
    mask = grid_eval(f, p) == 0
    for name in f.ring.names:
        mask &= grid_eval(f.partial(name), p) == 0
    mask[0] = False
    return _points_from_flat(np.flatnonzero(mask), nv, p)


def wci_singular_points(f1: Poly, f2: Poly, p: int) -> list:
    """Nonzero points of the affine cone of a codim-2 WCI where the 2 x n
    Jacobian has rank < 2."""
    g1, g2 = _as_gf(f1, p), _as_gf(f2, p)
    if g1.ring != g2.ring:
        raise ValueError("WCI polynomials must share a ring")
    nv = g1.ring.nvars
    on = (grid_eval(g1, p) == 0) & (grid_eval(g2, p) == 0)
    on[0] = False
    idx = np.flatnonzero(on)
    if len(idx) == 0:
        return []
    rows1 = np.stack([grid_eval(g1.partial(n), p)[idx] for n in g1.ring.names])
    rows2 = np.stack([grid_eval(g2.partial(n), p)[idx] for n in g2.ring.names])
    full_rank = np.zeros(len(idx), dtype=bool)
    for a in range(nv):
        for b in range(a + 1, nv):
            full_rank |= (rows1[a] * rows2[b] - rows1[b] * rows2[a]) % p != 0
    return _points_from_flat(idx[~full_rank], nv, p)


def jphi_findings(g: Poly, h: Poly, p: int) -> list:
    """Points of the affine cone of E where all of dg and h vanish."""
    gg, hh = _as_gf(g, p), _as_gf(h, p)
    mask = grid_eval(gg, p) == 0
    for name in gg.ring.names:
        mask &= grid_eval(gg.partial(name), p) == 0
    mask &= grid_eval(hh, p) == 0
    mask[0] = False
    return _points_from_flat(np.flatnonzero(mask), gg.ring.nvars, p)
