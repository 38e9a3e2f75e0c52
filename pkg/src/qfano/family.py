"""Standard-form hypersurface members, their WCI counterparts, and the
germ-level singularity bookkeeping that reproduces the catalog baskets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import fpscan
from .catalog import CatalogError, FamilyRecord
from .gralg import GralgError, Poly, PolyRing, PrimeField, QQ, parse_poly
from .wps import QuotientSing


class FamilyError(Exception):
    pass


class GenerationError(FamilyError):
    pass


WCI_EXTRA_NAMES = ("v4", "v5")


@dataclass
class StandardHypersurface:
    """A member of a family in standard form.

    cA/n: F = w^2*c*c' + w*f + g with f, g in the four non-w coordinates.
    cD/3: F = sum_j w^(P+1-j) * c^(P-j) * f_j + g with the catalog ladder.
    """

    record: FamilyRecord
    ring: PolyRing
    F: Poly
    parts: dict

    def __post_init__(self):
        if self.F.weighted_degree() != self.record.degree:
            raise FamilyError("member of family %d is not homogeneous of degree %d"
                              % (self.record.id, self.record.degree))
        self._scan_cache = {}

    @property
    def f(self) -> Poly:
        return self.parts["f"]

    @property
    def g(self) -> Poly:
        return self.parts["g"]


@dataclass
class WciMember:
    """Codimension-2 counterpart: F1 = x5*x2 + x4*x3 + f, F2 = x5*x4 - g
    (cA/n), or the ladder form at a cD/3 family."""

    record: FamilyRecord
    ring: PolyRing
    F1: Poly
    F2: Poly


# ---------------------------------------------------------------------------
# member construction
# ---------------------------------------------------------------------------

def _random_poly(ring: PolyRing, degree: int, allowed, rng: random.Random) -> Poly:
    """Dense polynomial of the given weighted degree with coefficients drawn
    uniformly from {-3..3} minus 0."""
    terms = {}
    for exps in ring.monomial_basis(degree, allowed):
        c = rng.choice((-3, -2, -1, 1, 2, 3))
        terms[exps] = ring.field(c)
    return Poly(ring, terms)


def member_from_parts(rec: FamilyRecord, parts: dict, fieldobj=QQ) -> StandardHypersurface:
    ring = rec.ring(fieldobj)
    w = ring.gen(rec.coords[4])
    if rec.kind == "cA":
        i, j = rec.germ_pair
        c, c2 = ring.gen(rec.coords[i]), ring.gen(rec.coords[j])
        F = w * w * c * c2 + w * parts["f"] + parts["g"]
    else:
        cd = rec.cd3
        c = ring.gen(rec.coords[cd["c_index"]])
        P = cd["power"]
        F = w ** (P + 1) * c ** P
        for k, fpart in enumerate(parts["fs"], start=1):
            F = F + w ** (P + 1 - k) * c ** (P - k) * fpart
        F = F + parts["g"]
        parts = dict(parts)
        parts["f"] = parts["fs"][-1]
    return StandardHypersurface(rec, ring, F, parts)


def random_member(rec: FamilyRecord, seed: int, fieldobj=QQ,
                  good_reduction_prime: int | None = 7) -> StandardHypersurface:
    """Deterministic random member of the family.

    Coefficients are dense and small; all catalog-required monomials are
    forced nonzero.  When ``good_reduction_prime`` is set, candidates whose
    reduction mod p has an F_p-rational singular cone point (on either the
    hypersurface or its WCI counterpart, or on any exceptional-divisor model)
    are redrawn, so the scans certify the members actually used downstream.
    Generality of members over Q is unaffected; this only discards candidates
    with accidental bad reduction at the desk-scale prime.
    """
    rng = random.Random((seed * 1_000_003 + rec.id) & 0x7FFFFFFF)
    non_w = [i for i in range(4)]
    for attempt in range(400):
        ring = rec.ring(fieldobj)
        if rec.kind == "cA":
            parts = {
                "f": _random_poly(ring, rec.degree - rec.index, non_w, rng),
                "g": _random_poly(ring, rec.degree, non_w, rng),
            }
        else:
            cd = rec.cd3
            parts = {
                "fs": [_random_poly(ring, dg, non_w, rng) for dg in cd["f_degrees"]],
                "g": _random_poly(ring, rec.degree, non_w, rng),
            }
        member = member_from_parts(rec, parts, fieldobj)
        _force_required(member, rng)
        if good_reduction_prime is None or _good_reduction(member, good_reduction_prime):
            return member
    raise GenerationError("family %d: no good-reduction member after 400 draws" % rec.id)


def _force_required(member: StandardHypersurface, rng: random.Random):
    rec = member.record
    ring = member.ring
    for poly_name, mono_text in rec.monomials:
        target = member.parts[poly_name]
        exps = _monomial_exps(ring, mono_text)
        if not target.terms.get(exps):
            target.terms[exps] = ring.field(rng.choice((-3, -2, -1, 1, 2, 3)))
    for group in rec.monomials_any:
        if any(member.parts[p].terms.get(_monomial_exps(ring, m)) for p, m in group):
            continue
        p, m = group[0]
        member.parts[p].terms[_monomial_exps(ring, m)] = ring.field(rng.choice((1, 2, 3)))
    # rebuild F from the (possibly patched) parts
    rebuilt = member_from_parts(rec, member.parts, ring.field)
    member.F = rebuilt.F
    member.parts = rebuilt.parts


def _monomial_exps(ring: PolyRing, text: str):
    p = parse_poly(ring, text)
    if len(p.terms) != 1:
        raise FamilyError("%r is not a monomial" % text)
    return next(iter(p.terms))


def has_monomial(member: StandardHypersurface, poly_name: str, mono_text: str) -> bool:
    target = member.parts[poly_name]
    return bool(target.terms.get(_monomial_exps(member.ring, mono_text)))


def _good_reduction(member: StandardHypersurface, p: int) -> bool:
    from .blowup import exceptional_model  # local import to avoid a cycle

    if quasismooth_scan(member, p):
        return False
    if quasismooth_scan_wci(counterpart_to_wci(member), p):
        return False
    for ext in member.record.extractions:
        model = exceptional_model(member, ext)
        if fpscan.jphi_findings(model.g, model.h, p):
            return False
    return True


# ---------------------------------------------------------------------------
# counterpart construction (both directions)
# ---------------------------------------------------------------------------

def wci_ring(rec: FamilyRecord, fieldobj=QQ) -> PolyRing:
    if rec.kind == "cA":
        e, e2 = rec.germ_weights
        n = rec.index
        weights = (1, n, e, e2, e + n, e2 + n)
        names = (rec.coords[_ordered_cA_indices(rec)[0]],
                 rec.coords[_ordered_cA_indices(rec)[1]],
                 rec.coords[rec.germ_pair[0]],
                 rec.coords[rec.germ_pair[1]]) + WCI_EXTRA_NAMES
    else:
        cd = rec.cd3
        c = cd["c_index"]
        n = rec.index
        cw = rec.weights[c]
        rest = [i for i in range(4) if i != c]
        names = tuple(rec.coords[i] for i in [c] + rest) + WCI_EXTRA_NAMES
        weights = (cw,) + tuple(rec.weights[i] for i in rest) + (cw + n, rec.wci_degrees[1] - cw - n)
    if sorted(weights) != sorted(rec.wci_weights):
        raise FamilyError("family %d: derived WCI weights %r do not match catalog %r"
                          % (rec.id, sorted(weights), sorted(rec.wci_weights)))
    return PolyRing(names, weights, fieldobj)


def _ordered_cA_indices(rec: FamilyRecord):
    """(index of the weight-1 slot, index of the weight-n slot) among the two
    non-germ coordinates."""
    return rec.s34_indices


def counterpart_to_wci(member: StandardHypersurface) -> WciMember:
    """Build the codim-2 counterpart from a standard-form member."""
    rec = member.record
    ring = wci_ring(rec, member.ring.field)
    v4, v5 = (ring.gen(n) for n in WCI_EXTRA_NAMES)
    if rec.kind == "cA":
        mapping = {rec.coords[i]: rec.coords[i] for i in range(4)}
        f = member.parts["f"].rename(ring, mapping)
        g = member.parts["g"].rename(ring, mapping)
        x2 = ring.gen(rec.coords[rec.germ_pair[0]])
        x3 = ring.gen(rec.coords[rec.germ_pair[1]])
        F1 = v5 * x2 + v4 * x3 + f
        F2 = v5 * v4 - g
    else:
        cd = rec.cd3
        mapping = {rec.coords[i]: rec.coords[i] for i in range(4)}
        c = ring.gen(rec.coords[cd["c_index"]])
        s, u = v4, v5
        P = cd["power"]
        F1 = u * c + s ** P
        for k, fpart in enumerate(member.parts["fs"], start=1):
            F1 = F1 + s ** (P - k) * fpart.rename(ring, mapping)
        F2 = u * s - member.parts["g"].rename(ring, mapping)
    if F1.weighted_degree() != rec.wci_degrees[0] or F2.weighted_degree() != rec.wci_degrees[1]:
        raise FamilyError("family %d: counterpart degrees are off" % rec.id)
    return WciMember(rec, ring, F1, F2)


def wci_to_counterpart(member: WciMember) -> Poly:
    """Recover the hypersurface polynomial: w*G1(..., w*c) - G2(..., w*c)."""
    rec = member.record
    ring = rec.ring(member.ring.field)
    v4, v5 = WCI_EXTRA_NAMES
    if rec.kind == "cA":
        c_name = rec.coords[rec.germ_pair[0]]
    else:
        c_name = rec.coords[rec.cd3["c_index"]]
    if member.F1.degree_in(v5) != 1 or \
            member.F1.coefficient_of(v5, 1) != member.ring.gen(c_name):
        raise FamilyError("F1 is not of the shape v5*%s + G1" % c_name)
    if member.F2.degree_in(v5) != 1 or \
            member.F2.coefficient_of(v5, 1) != member.ring.gen(v4):
        raise FamilyError("F2 is not of the shape v5*v4 + G2")
    G1 = member.F1.coefficient_of(v5, 0)
    G2 = member.F2.coefficient_of(v5, 0)
    w = ring.gen(rec.coords[4])
    mapping = {name: ring.gen(name) for name in member.ring.names if name in ring.names}
    mapping[v4] = w * ring.gen(c_name)

    def push(p: Poly) -> Poly:
        out = ring.zero()
        for exps, coeff in p.terms.items():
            term = ring.constant(coeff)
            for name, e in zip(member.ring.names, exps):
                if e:
                    term = term * mapping[name] ** e
            out = out + term
        return out

    return w * push(G1) - push(G2)


def counterpart_roundtrip_ok(member: StandardHypersurface) -> bool:
    return wci_to_counterpart(counterpart_to_wci(member)) == member.F


# ---------------------------------------------------------------------------
# quasismoothness scans (desk scale: F_p-rational points only)
# ---------------------------------------------------------------------------

def quasismooth_scan(member: StandardHypersurface, p: int) -> list:
    """F_p-rational singular points of the affine cone over the hypersurface.
    An empty list certifies absence of F_p-rational singular cone points; it
    never proves quasismoothness over Q."""
    key = ("hyp", p)
    if key not in member._scan_cache:
        member._scan_cache[key] = fpscan.hypersurface_singular_points(member.F, p)
    return member._scan_cache[key]


def quasismooth_scan_wci(member: WciMember, p: int) -> list:
    return fpscan.wci_singular_points(member.F1, member.F2, p)


# ---------------------------------------------------------------------------
# vertex and stratum singularity classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexStatus:
    status: str                       # "not_on" | "quotient" | "distinguished"
    qtype: QuotientSing | None = None

    def __str__(self):
        if self.status == "not_on":
            return "not on X"
        if self.status == "distinguished":
            return "cA/n or cD/3 point"
        return str(self.qtype.normalize())


def vertex_singularity(member: StandardHypersurface, i: int) -> VertexStatus:
    """Classify the vertex p_i of the ambient space on the member."""
    rec = member.record
    if i == rec.w_index:
        return VertexStatus("distinguished")
    r = rec.weights[i]
    if r <= 1:
        raise FamilyError("vertex %d has weight 1; nothing to classify" % i)
    d = rec.degree
    name = rec.coords[i]
    others = [n for n in rec.coords if n != name]
    restricted = member.F.set_zero(others)
    if restricted:
        return VertexStatus("not_on")
    # p_i on X: quasismoothness requires a monomial x_i^e * x_j
    types = set()
    for j, jname in enumerate(rec.coords):
        if j == i:
            continue
        rem = d - rec.weights[j]
        if rem < 0 or rem % r != 0:
            continue
        coeff = member.F.coefficient_of(name, rem // r).coefficient_of(jname, 1)
        coeff = coeff.set_zero([n for n in rec.coords if n not in (name, jname)])
        if coeff:
            rest = tuple(rec.weights[k] for k in range(5) if k not in (i, j))
            types.add(QuotientSing(r, rest).normalize().rep)
    if not types:
        raise FamilyError("vertex %s of family %d member is not quasismooth"
                          % (name, rec.id))
    if len(types) > 1:
        raise FamilyError("inconsistent vertex types at %s" % name)
    return VertexStatus("quotient", types.pop())


@dataclass(frozen=True)
class StratumPoints:
    """Points of the member on a one-dimensional singular stratum."""
    count: int                        # interior points, with multiplicity
    qtype: QuotientSing
    contains_distinguished: bool      # the w-vertex lies on the stratum and on X
    other_vertex_on_member: bool      # a non-w vertex of the stratum lies on X
    reduced: bool                     # interior points are simple
    contained: bool                   # the whole stratum lies inside X


def stratum_singular_points(member: StandardHypersurface, stratum) -> StratumPoints:
    rec = member.record
    i, j = stratum
    r = gcd(rec.weights[i], rec.weights[j])
    if r <= 1:
        raise FamilyError("stratum %r is not singular" % (stratum,))
    others = [rec.coords[k] for k in range(5) if k not in (i, j)]
    restricted = member.F.set_zero(others)
    rest_weights = tuple(rec.weights[k] for k in range(5) if k not in (i, j))
    qtype = QuotientSing(r, rest_weights).normalize().rep
    if restricted.is_zero():
        return StratumPoints(0, qtype, False, False, True, True)
    ai, aj = rec.weights[i], rec.weights[j]
    ni, nj = rec.coords[i], rec.coords[j]
    ring = member.ring
    min_i = min(e[ring.index(ni)] for e in restricted.terms)
    min_j = min(e[ring.index(nj)] for e in restricted.terms)
    # after factoring out the vertex multiplicities, the exponents of n_i run
    # in steps of aj/gcd; the reduced binary form G has one interior root per
    # degree, with multiplicity
    g = gcd(ai, aj)
    step = aj // g
    reduced_exps = sorted(set(e[ring.index(ni)] - min_i for e in restricted.terms))
    degG = reduced_exps[-1] // step if reduced_exps else 0
    coeffs = _binary_form_coeffs(member, restricted, ni, min_i, step, degG)
    count = degG
    reduced = _squarefree(coeffs)
    w_on = False
    other_on = False
    for idx, mult in ((i, min_j), (j, min_i)):
        if mult > 0:
            if idx == rec.w_index:
                w_on = True
            else:
                other_on = True
    return StratumPoints(count, qtype, w_on, other_on, reduced, False)


def _binary_form_coeffs(member, restricted, ni, min_i, step, degG):
    coeffs = [member.ring.field.zero for _ in range(degG + 1)]
    idx_i = member.ring.index(ni)
    for exps, c in restricted.terms.items():
        k = (exps[idx_i] - min_i) // step
        coeffs[k] = coeffs[k] + c
    return coeffs


def _squarefree(coeffs) -> bool:
    """Squarefree test for a univariate polynomial given by coefficients."""

    def normalize(p):
        while p and not p[-1]:
            p.pop()
        return p

    def deriv(p):
        return normalize([c * k for k, c in enumerate(p) if k >= 1])

    def polymod(a, b):
        a = list(a)
        while len(a) >= len(b) and normalize(list(a)):
            if not a[-1]:
                a.pop()
                continue
            q = a[-1] / b[-1]
            shift = len(a) - len(b)
            for k in range(len(b)):
                a[shift + k] = a[shift + k] - q * b[k]
            a.pop()
        return normalize(a)

    p = normalize(list(coeffs))
    if len(p) <= 1:
        return True
    a, b = p, deriv(list(p))
    while b:
        a, b = b, polymod(a, b)
    return len(a) <= 1


def basket_checks(member: StandardHypersurface) -> dict:
    """Classify every marked quotient point of the catalog on this member.

    Returns {label: (ok, computed-description)}.
    """
    rec = member.record
    out = {}
    for mark in rec.quotient_points:
        if mark.is_vertex:
            status = vertex_singularity(member, mark.stratum[0])
            ok = (status.status == "quotient"
                  and status.qtype.equivalent(mark.qtype)
                  and mark.count == 1)
            out[mark.label] = (ok, str(status))
        else:
            pts = stratum_singular_points(member, mark.stratum)
            ok = (not pts.contained and pts.count == mark.count
                  and pts.qtype.equivalent(mark.qtype)
                  and not pts.other_vertex_on_member)
            out[mark.label] = (ok, "%d x %s" % (pts.count, pts.qtype))
    # unmarked singular vertices must be off the member (or the w-vertex)
    marked_vertices = {m.stratum[0] for m in rec.quotient_points if m.is_vertex}
    for i in range(4):
        if rec.weights[i] > 1 and i not in marked_vertices:
            on_marked_stratum = any(i in m.stratum for m in rec.quotient_points)
            status = vertex_singularity(member, i)
            ok = status.status == "not_on" or on_marked_stratum
            out["off:%s" % rec.coords[i]] = (ok, str(status))
    return out
