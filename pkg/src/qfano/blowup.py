"""Divisorial extractions over the distinguished singular point.

Enumeration of the (r1, r2)-blowups over a cA/n point and the fixed-weight
cD/3 blowup, exceptional-divisor models, the Jacobian rank criterion scan,
and the quotient types of the blown-up threefold along the exceptional
divisor read off from orbifold charts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import fpscan
from .catalog import Extraction, ExtractionMark, FamilyRecord
from .gralg import Poly, PolyRing, QQ
from .wps import QuotientSing


class BlowupError(Exception):
    pass


def enumerate_extractions(rec: FamilyRecord) -> list:
    """Complete list of divisorial extractions centered at the distinguished
    point: all (r1, r2) with r1 + r2 = d - n (and r1 = e mod n when n > 1);
    the single fixed blowup at a cD/3 point."""
    if rec.kind == "cD":
        return [Extraction("CD3", None, tuple(rec.cd3["blowup_weights"]),
                           ExtractionMark("unmarked"))]
    d, n = rec.degree, rec.index
    e = rec.germ_weights[0]
    out = []
    for r1 in range(1, d - n):
        r2 = d - n - r1
        if n > 1 and r1 % n != e % n:
            continue
        out.append(Extraction("CAn", (r1, r2), None, ExtractionMark("unmarked")))
    return out


@dataclass
class ExcDivisorModel:
    """Exceptional divisor of a weighted blowup as a hypersurface in a WPS.

    ``g`` is the lowest-weight part of the defining equation in the blowup
    grading, ``h`` the next part (one unit of 1/n higher), ``mu`` the weighted
    order of the equation (a rational; n*mu is the integer order).
    """

    index: int                 # n (cyclic quotient order of the germ)
    ambient_weights: tuple     # (b1, b2, b3, b4)
    ring: PolyRing             # coordinates s1..s4 with the blowup weights
    g: Poly
    h: Poly
    mu: Fraction


def exceptional_model(member, ext: Extraction) -> ExcDivisorModel:
    """Model of the exceptional divisor for one extraction of the member.

    cA/n: the germ is brought to the normal form s1*s2 + h(s3, s4) first
    (cross terms absorbed into the product), so g = s1*s2 + f(s3, s4, 0, 0)
    and the next-weight part is g(s3, s4, 0, 0) - a*b with a, b the pure
    (s3, s4)-coefficients of s1, s2 in f.  cD/3: the blowup weights act on
    the ambient germ coordinates directly, so the graded parts of the
    localized equation are taken as they stand.
    """
    rec = member.record
    if ext.variant == "CAn":
        return _can_model(member, ext)
    if ext.variant == "CD3":
        return _cd3_model(member, ext)
    raise BlowupError("unknown extraction variant %r" % ext.variant)


def _can_model(member, ext: Extraction) -> ExcDivisorModel:
    rec = member.record
    n = rec.index
    r1, r2 = ext.pair
    i2, i3 = rec.germ_pair
    s3i, s4i = rec.s34_indices
    names = ("s1", "s2", "s3", "s4")
    weights = (r1, r2, 1, n)
    ring = PolyRing(names, weights, member.ring.field)
    c2, c3 = rec.coords[i2], rec.coords[i3]
    n3, n4 = rec.coords[s3i], rec.coords[s4i]
    rename = {n3: "s3", n4: "s4"}
    f, g = member.parts["f"], member.parts["g"]
    f0 = f.set_zero((c2, c3)).rename(ring, rename)
    g0 = g.set_zero((c2, c3)).rename(ring, rename)
    a = f.coefficient_of(c2, 1).set_zero((c2, c3)).rename(ring, rename)
    b = f.coefficient_of(c3, 1).set_zero((c2, c3)).rename(ring, rename)
    gpart = ring.gen("s1") * ring.gen("s2") + f0
    hpart = g0 - a * b
    return ExcDivisorModel(n, weights, ring, gpart, hpart,
                           Fraction(rec.degree - n, n))


def _cd3_model(member, ext: Extraction) -> ExcDivisorModel:
    rec = member.record
    n = rec.index
    weights = tuple(ext.cd3_weights)
    names = ("s1", "s2", "s3", "s4")
    ring = PolyRing(names, weights, member.ring.field)
    rename = {rec.coords[i]: names[i] for i in range(4)}
    w = rec.coords[4]
    localized = ring.zero()
    for k in range(member.F.degree_in(w) + 1):
        localized = localized + member.F.coefficient_of(w, k).rename(ring, rename)
    parts = localized.graded_parts()
    order = min(parts)
    gpart = parts[order]
    hpart = parts.get(order + n, ring.zero())
    return ExcDivisorModel(n, weights, ring, gpart, hpart, Fraction(order, n))


def jphi_rank_scan(model: ExcDivisorModel, p: int) -> list:
    """F_p-points of the affine cone of E where all partials of g and h
    vanish (empty list: the rank criterion holds at desk scale)."""
    return fpscan.jphi_findings(model.g, model.h, p)


@dataclass(frozen=True)
class ChartSingularity:
    qtype: QuotientSing
    count: int
    where: str


def chart_singularities(model: ExcDivisorModel) -> tuple:
    """Quotient types of the blown-up threefold along E.

    Assuming the rank criterion, singular points are points of E on singular
    strata of P(b1..b4); the type at each comes from the orbifold chart: the
    chart weights with -n in the radial slot, minus the direction eliminated
    by the hypersurface.  Returns (singularities, findings); findings collect
    non-terminal types and degenerate stratum intersections.
    """
    b = model.ambient_weights
    n = model.index
    ring = model.ring
    sings = []
    findings = []
    # vertices
    for i in range(4):
        if b[i] <= 1:
            continue
        vertex = {name: (1 if k == i else 0) for k, name in enumerate(ring.names)}
        if model.g.evaluate(vertex):
            continue
        grads = [model.g.partial(name).evaluate(vertex) for name in ring.names]
        drop = next((k for k in range(4) if k != i and grads[k]), None)
        if drop is not None:
            local = tuple(b[k] for k in range(4) if k not in (i, drop)) + (-n,)
        elif model.h.evaluate(vertex):
            local = tuple(b[k] for k in range(4) if k != i)
        else:
            findings.append("rank criterion fails at the %s vertex" % ring.names[i])
            continue
        qt = QuotientSing(b[i], tuple(x % b[i] for x in local))
        _record(qt, 1, "vertex %s" % ring.names[i], sings, findings)
    # coordinate lines
    for i in range(4):
        for j in range(i + 1, 4):
            r = gcd(b[i], b[j])
            if r <= 1:
                continue
            other = [ring.names[k] for k in range(4) if k not in (i, j)]
            restricted = model.g.set_zero(other)
            if restricted.is_zero():
                findings.append("line {%s,%s} lies inside E" % (ring.names[i], ring.names[j]))
                continue
            idx_i = ring.index(ring.names[i])
            idx_j = ring.index(ring.names[j])
            min_i = min(e[idx_i] for e in restricted.terms)
            min_j = min(e[idx_j] for e in restricted.terms)
            step = b[j] // gcd(b[i], b[j])
            reduced = sorted(set(e[idx_i] - min_i for e in restricted.terms))
            count = reduced[-1] // step if reduced else 0
            if count == 0:
                continue
            if not _line_form_squarefree(restricted, idx_i, min_i, step, count, ring):
                findings.append("non-reduced intersection with line {%s,%s}"
                                % (ring.names[i], ring.names[j]))
            local = tuple(b[k] for k in range(4) if k not in (i, j)) + (-n,)
            qt = QuotientSing(r, tuple(x % r for x in local))
            _record(qt, count, "line %s%s" % (ring.names[i], ring.names[j]),
                    sings, findings)
    # higher-dimensional strata never occur in the catalog; guard anyway
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                if gcd(gcd(b[i], b[j]), b[k]) > 1:
                    raise BlowupError("unexpected 2-dimensional singular stratum")
    return tuple(sings), tuple(findings)


def _record(qt: QuotientSing, count: int, where: str, sings: list, findings: list):
    norm = qt.normalize()
    if not norm.terminal:
        findings.append("non-terminal type %s at %s" % (qt, where))
        sings.append(ChartSingularity(qt, count, where))
    else:
        sings.append(ChartSingularity(norm.rep, count, where))


def _line_form_squarefree(restricted, idx_i, min_i, step, count, ring) -> bool:
    from .family import _squarefree
    coeffs = [ring.field.zero for _ in range(count + 1)]
    for exps, c in restricted.terms.items():
        coeffs[(exps[idx_i] - min_i) // step] = coeffs[(exps[idx_i] - min_i) // step] + c
    return _squarefree(coeffs)


def kawamata_numbers(q: QuotientSing):
    """(discrepancy, E^3) of the Kawamata blowup of a terminal 1/r(1, a, r-a)
    point: (1/r, r^2 / (a (r-a)))."""
    norm = q.normalize()
    if not norm.terminal:
        raise BlowupError("Kawamata blowup needs a terminal quotient type, got %s" % q)
    r, a = norm.rep.r, norm.a
    return Fraction(1, r), Fraction(r * r, a * (r - a))
