"""Weighted projective spaces and terminal cyclic quotient singularities.

Vertices, well-formedness, singular strata, the lcm tables used to isolate
nonsingular points, and the normalizer for 1/r(a,b,c) quotient types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import gcd, lcm


class WpsError(Exception):
    pass


@dataclass(frozen=True)
class WeightSystem:
    weights: tuple

    def __post_init__(self):
        if any(w <= 0 for w in self.weights):
            raise WpsError("weights must be positive")

    def __len__(self):
        return len(self.weights)

    def is_well_formed(self) -> bool:
        n = len(self.weights)
        for drop in range(n):
            sub = [w for i, w in enumerate(self.weights) if i != drop]
            if gcd(*sub) != 1:
                return False
        return True

    def __str__(self):
        return "P(%s)" % ",".join(str(w) for w in self.weights)


def singular_strata(W: WeightSystem) -> list:
    """All coordinate subsets S with r = gcd(weights over S) > 1, as (S, r).

    Vertices are the |S| = 1 entries, coordinate lines the |S| = 2 ones.
    Strata of dimension >= 2 do not occur in the catalog but are reported.
    """
    out = []
    n = len(W.weights)
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            r = gcd(*(W.weights[i] for i in S)) if len(S) > 1 else W.weights[S[0]]
            if r > 1:
                out.append((S, r))
    return out


@dataclass(frozen=True)
class IsolationNumbers:
    a_tilde: int                  # max lcm(a_j, a_k) over all pairs
    a_j: dict                     # j -> max_k lcm(a_j, a_k)
    a_jm: dict                    # (j, m) -> max over k != j, m
    b_m: dict                     # m -> max lcm(a_k, a_l) over k, l != m


def isolation_numbers(W: WeightSystem) -> IsolationNumbers:
    ws = W.weights
    n = len(ws)
    a_j = {}
    for j in range(n):
        a_j[j] = max(lcm(ws[j], ws[k]) for k in range(n) if k != j)
    a_tilde = max(lcm(ws[k], ws[l]) for k, l in combinations(range(n), 2))
    a_jm = {}
    for j in range(n):
        for m in range(n):
            if m == j:
                continue
            vals = [lcm(ws[j], ws[k]) for k in range(n) if k not in (j, m)]
            a_jm[(j, m)] = max(vals)
    b_m = {}
    for m in range(n):
        rest = [k for k in range(n) if k != m]
        b_m[m] = max(lcm(ws[k], ws[l]) for k, l in combinations(rest, 2))
    return IsolationNumbers(a_tilde, a_j, a_jm, b_m)


@dataclass(frozen=True)
class QuotientSing:
    """Cyclic quotient type 1/r(a, b, c).

    Two types are equal iff related by a coordinate permutation, by
    multiplying all three weights by a unit mod r (inversion is the unit -1),
    or a combination.  ``normalize`` returns the canonical representative
    1/r(1, a, r-a) with 1 <= a <= r/2 when the type is terminal.
    """

    r: int
    weights: tuple

    def __post_init__(self):
        if self.r < 2:
            raise WpsError("index r must be >= 2")
        if len(self.weights) != 3:
            raise WpsError("quotient type needs exactly three weights")
        object.__setattr__(self, "weights", tuple(w % self.r for w in self.weights))

    def orbit_key(self):
        r = self.r
        best = None
        for u in range(1, r):
            if gcd(u, r) != 1:
                continue
            cand = tuple(sorted((u * w) % r for w in self.weights))
            if best is None or cand < best:
                best = cand
        return (r, best)

    def equivalent(self, other: "QuotientSing") -> bool:
        return self.orbit_key() == other.orbit_key()

    @property
    def is_isolated(self) -> bool:
        return all(gcd(w, self.r) == 1 for w in self.weights)

    @property
    def is_terminal(self) -> bool:
        """Terminal iff of the form 1/r(1, a, r-a) up to the equivalences."""
        if not self.is_isolated:
            return False
        return self.terminal_pair() is not None

    def terminal_pair(self):
        """(r, a) with the type equivalent to 1/r(1, a, r-a), a <= r/2; else None."""
        r = self.r
        best = None
        for u in range(1, r):
            if gcd(u, r) != 1:
                continue
            scaled = [(u * w) % r for w in self.weights]
            for perm in permutations(scaled):
                if perm[0] == 1 and (perm[1] + perm[2]) % r == 0 and perm[1] != 0:
                    a = min(perm[1], perm[2])
                    if best is None or a < best:
                        best = a
        return None if best is None else (r, best)

    def normalize(self) -> "NormalizedType":
        pair = self.terminal_pair()
        if pair is None:
            return NormalizedType(self, None, False)
        r, a = pair
        return NormalizedType(QuotientSing(r, (1, a, r - a)), a, True)

    def __str__(self):
        return "1/%d(%s)" % (self.r, ",".join(str(w) for w in self.weights))


@dataclass(frozen=True)
class NormalizedType:
    """Result of normalizing a quotient type; non-terminal input is reported
    as a distinct status instead of silently canonicalized."""

    rep: QuotientSing
    a: int | None
    terminal: bool

    def __str__(self):
        tag = "" if self.terminal else " [non-terminal]"
        return str(self.rep) + tag


def normalize(q: QuotientSing) -> NormalizedType:
    return q.normalize()
