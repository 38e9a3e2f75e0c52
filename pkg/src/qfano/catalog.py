"""The catalog of hypersurface families and their WCI counterparts.

Loads the packaged catalog file (JSON; rationals as "p/q" strings), checks
every structural invariant, and exposes typed records.  Values transcribed
from the source tables are data, not code; the verification driver recomputes
and cross-checks all of them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import gcd

from .gralg import PolyRing, QQ
from .wps import QuotientSing, WeightSystem


class CatalogError(Exception):
    pass


@dataclass(frozen=True)
class SectionInfo:
    """A section used in a nef exclusion certificate: name, degree, and the
    numerator of its vanishing order along the exceptional divisor."""
    name: str
    degree: int
    order_num: int


@dataclass(frozen=True)
class QuotientMark:
    label: str
    stratum: tuple           # coordinate indices spanning the stratum
    r: int
    qtype: QuotientSing
    count: int
    kind: str                # "QI" | "EI" | "excl"
    b3_sign: int | None = None
    sections: tuple = ()
    N: tuple | None = None   # (b, e) for bB + eE
    needs: tuple | None = None   # ("f"|"g", monomial string), EI only

    @property
    def is_vertex(self) -> bool:
        return len(self.stratum) == 1


@dataclass(frozen=True)
class ExtractionMark:
    kind: str                        # "none" | "BI" | "link"
    target: QuotientSing | None = None
    printed_target: QuotientSing | None = None


@dataclass(frozen=True)
class Extraction:
    """Divisorial extraction datum over the distinguished point."""
    variant: str                     # "CAn" | "CD3"
    pair: tuple | None               # (r1, r2) for cA/n
    cd3_weights: tuple | None        # fixed weight quadruple for cD/3
    mark: ExtractionMark

    def key(self) -> str:
        if self.variant == "CAn":
            return "%d,%d" % self.pair
        return "cd3"


@dataclass(frozen=True)
class Table3Row:
    pairs: tuple
    computed: tuple                  # ((QuotientSing, count), ...)
    printed: tuple
    conditional: dict | None


@dataclass(frozen=True)
class FamilyRecord:
    id: int
    coords: tuple
    weights: tuple
    degree: int
    index: int                       # n = weight of w
    kind: str                        # "cA" | "cD"
    A3: Fraction
    germ_pair: tuple | None          # coordinate indices multiplying w^2 (cA)
    cd3: dict | None
    monomials: tuple                 # required monomials ((poly, text), ...)
    monomials_any: tuple             # OR-groups of required monomials
    quotient_points: tuple
    extractions: tuple
    wci_weights: tuple
    wci_degrees: tuple
    isolation: dict
    table3: Table3Row | None

    # -- derived -------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.index

    @property
    def w_index(self) -> int:
        return 4

    def ring(self, fieldobj=QQ) -> PolyRing:
        return PolyRing(self.coords, self.weights, fieldobj)

    @property
    def germ_weights(self) -> tuple:
        """(e, e') = weights of the two coordinates multiplying w^2 (cA only)."""
        if self.germ_pair is None:
            raise CatalogError("family %d has no cA germ pair" % self.id)
        return (self.weights[self.germ_pair[0]], self.weights[self.germ_pair[1]])

    @property
    def s34_indices(self) -> tuple:
        """Indices of the two non-germ, non-w coordinates, weight-1 slot first."""
        if self.germ_pair is None:
            raise CatalogError("family %d has no cA germ pair" % self.id)
        rest = [i for i in range(4) if i not in self.germ_pair]
        rest.sort(key=lambda i: (self.weights[i], i))
        return tuple(rest)

    def ambient(self) -> WeightSystem:
        return WeightSystem(self.weights)

    def extraction(self, key) -> Extraction:
        for ext in self.extractions:
            if ext.variant == "CD3" and key == "cd3":
                return ext
            if ext.variant == "CAn" and tuple(ext.pair) == tuple(key):
                return ext
        raise CatalogError("family %d has no extraction %r" % (self.id, key))


def _frac(text: str, fid, fieldname) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CatalogError("family %s: bad rational in %s: %r (%s)" % (fid, fieldname, text, exc))


def _require(cond: bool, fid, message: str):
    if not cond:
        raise CatalogError("family %s: %s" % (fid, message))


def _parse_family(raw: dict) -> FamilyRecord:
    fid = raw.get("id", "?")
    for key in ("id", "coords", "weights", "degree", "index", "kind", "A3",
                "quotient_points", "extractions", "wci", "isolation"):
        _require(key in raw, fid, "missing field %r" % key)
    coords = tuple(raw["coords"])
    weights = tuple(raw["weights"])
    _require(len(coords) == 5 and len(weights) == 5, fid, "need 5 coordinates")
    _require(raw["kind"] in ("cA", "cD"), fid, "kind must be cA or cD")
    quotient_points = []
    for q in raw["quotient_points"]:
        mark = q["mark"]
        kind = mark["kind"]
        _require(kind in ("QI", "EI", "excl"), fid, "bad quotient mark kind %r" % kind)
        sections = tuple(SectionInfo(*s) for s in mark.get("sections", []))
        needs = None
        if kind == "EI":
            needs = (mark["needs"]["poly"], mark["needs"]["monomial"])
        quotient_points.append(QuotientMark(
            label=q["label"], stratum=tuple(q["stratum"]), r=q["r"],
            qtype=QuotientSing(q["r"], tuple(q["type"])), count=q["count"],
            kind=kind, b3_sign=mark.get("b3_sign"), sections=sections,
            N=tuple(mark["N"]) if "N" in mark else None, needs=needs))
    extractions = []
    for e in raw["extractions"]:
        m = e["mark"]
        target = QuotientSing(m["r"], tuple(m["type"])) if m["kind"] == "link" else None
        printed = None
        if "printed" in m:
            printed = QuotientSing(m["printed"]["r"], tuple(m["printed"]["type"]))
        mark = ExtractionMark(m["kind"], target, printed)
        if e.get("cd3"):
            extractions.append(Extraction("CD3", None, tuple(raw["cd3"]["blowup_weights"]), mark))
        else:
            extractions.append(Extraction("CAn", tuple(e["pair"]), None, mark))
    table3 = None
    if raw.get("table3"):
        t = raw["table3"]
        table3 = Table3Row(
            pairs=tuple(tuple(p) for p in t["pairs"]),
            computed=tuple((QuotientSing(x["r"], tuple(x["type"])), x["count"]) for x in t["computed"]),
            printed=tuple((QuotientSing(x["r"], tuple(x["type"])), x["count"]) for x in t["printed"]),
            conditional=t.get("conditional"))
    rec = FamilyRecord(
        id=raw["id"], coords=coords, weights=weights, degree=raw["degree"],
        index=raw["index"], kind=raw["kind"], A3=_frac(raw["A3"], fid, "A3"),
        germ_pair=tuple(raw["germ_pair"]) if "germ_pair" in raw else None,
        cd3=raw.get("cd3"),
        monomials=tuple((m["poly"], m["monomial"]) for m in raw.get("monomials", [])),
        monomials_any=tuple(tuple((m["poly"], m["monomial"]) for m in group)
                            for group in raw.get("monomials_any", [])),
        quotient_points=tuple(quotient_points),
        extractions=tuple(extractions),
        wci_weights=tuple(raw["wci"]["weights"]),
        wci_degrees=tuple(raw["wci"]["degrees"]),
        isolation=raw["isolation"],
        table3=table3)
    _validate(rec)
    return rec


def _validate(rec: FamilyRecord):
    fid = rec.id
    d, n = rec.degree, rec.index
    _require(rec.weights[rec.w_index] == n, fid, "w must have weight n=%d" % n)
    _require(d == sum(rec.weights) - 1, fid, "degree != sum(weights) - 1")
    _require(rec.ambient().is_well_formed(), fid, "ambient weights not well-formed")
    wd1, wd2 = rec.wci_degrees
    _require(wd1 <= wd2, fid, "WCI degrees out of order")
    _require(wd1 + wd2 == sum(rec.wci_weights) - 1, fid, "WCI degree sum != sum(weights) - 1")
    expected_a3 = Fraction(d)
    for w in rec.weights:
        expected_a3 /= w
    _require(expected_a3 == rec.A3, fid, "A3 does not match d/prod(weights)")
    if rec.kind == "cA":
        _require(rec.germ_pair is not None, fid, "cA family needs germ_pair")
        e, e2 = rec.germ_weights
        _require(e + e2 == d - 2 * n, fid, "germ pair weights must sum to d - 2n")
        if n > 1:
            _require((e + e2) % n == 0, fid, "germ pair sum must be 0 mod n")
        _require(sorted(rec.wci_weights) == sorted([1, n, e, e2, e + n, e2 + n]),
                 fid, "WCI weights do not match (1, n, a2, a3, a2+n, a3+n)")
        _require(rec.wci_degrees == (d - n, d), fid, "WCI degrees must be (d-n, d)")
        for ext in rec.extractions:
            _require(ext.variant == "CAn", fid, "cA family with cD extraction")
            r1, r2 = ext.pair
            _require(r1 > 0 and r2 > 0 and r1 + r2 == d - n, fid,
                     "extraction pair %r must be positive and sum to d-n" % (ext.pair,))
            if n > 1:
                _require(r1 % n == e % n, fid,
                         "extraction pair %r violates r1 = e mod n" % (ext.pair,))
    else:
        _require(rec.cd3 is not None, fid, "cD family needs cd3 data")
        _require(n == 3, fid, "cD/3 family must have index 3")
        _require(len(rec.extractions) == 1 and rec.extractions[0].variant == "CD3",
                 fid, "cD/3 family has a single fixed extraction")
        c = rec.cd3["c_index"]
        _require(len(rec.cd3["blowup_weights"]) == 4, fid, "cd3 weights must be a quadruple")
        _require(rec.weights[c] + n == rec.cd3["f_degrees"][0], fid,
                 "cd3 ladder step must be weight(c) + n")
    for q in rec.quotient_points:
        stratum_r = gcd(*(rec.weights[i] for i in q.stratum)) if len(q.stratum) > 1 \
            else rec.weights[q.stratum[0]]
        _require(stratum_r == q.r, fid,
                 "quotient mark %s: stratum gcd %d != r %d" % (q.label, stratum_r, q.r))
        _require(q.qtype.is_terminal, fid, "quotient mark %s not terminal" % q.label)
        if q.kind == "excl" and q.sections:
            _require(q.N is not None, fid, "exclusion mark %s needs N" % q.label)
    for ext in rec.extractions:
        if ext.mark.kind == "link":
            _require(ext.mark.target is not None, fid, "link mark needs a target type")
            _require(ext.mark.target.is_terminal, fid,
                     "link target %s not terminal" % ext.mark.target)


def load_catalog(source=None) -> list:
    """Load and validate the family catalog.

    ``source`` may be a path, a JSON string, or None for the packaged data.
    """
    if source is None:
        text = resources.files("qfano").joinpath("data/catalog.json").read_text()
    elif hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if "{" not in text:
            with open(text) as fh:
                text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError("catalog is not valid JSON: %s" % exc)
    if "families" not in raw:
        raise CatalogError("catalog missing 'families'")
    records = [_parse_family(f) for f in raw["families"]]
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise CatalogError("duplicate family ids")
    return sorted(records, key=lambda r: r.id)


_CACHE = None


def default_catalog() -> list:
    global _CACHE
    if _CACHE is None:
        _CACHE = load_catalog()
    return _CACHE


def family(fid: int) -> FamilyRecord:
    for rec in default_catalog():
        if rec.id == fid:
            return rec
    raise CatalogError("no family %d in the catalog" % fid)


def anticanonical_degree(weights, degrees) -> Fraction:
    """d/prod(a_i) for a hypersurface, d1*d2/prod(a_i) for a codim-2 WCI."""
    degrees = list(degrees) if isinstance(degrees, (list, tuple)) else [degrees]
    num = Fraction(1)
    for d in degrees:
        num *= d
    for w in weights:
        num /= w
    return num
