"""D(-1) tuples: verification, triple enumeration, and the quadruple filters.

A triple here is always ``{1, 1 + r^2, 1 + s^2}`` with ``r < s``; its third
square root ``t`` satisfies ``t^2 - (1 + r^2) s^2 = r^2``.
"""

from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import gcd

from .arith import exact_sqrt, factor, is_square, isprime, lcm, odd_prime_factors, odd_prime_power
from .forms import Form, compose, equivalent, identity_form, inverse, principal_representation
from .pell import (
    PellSurface, Representation, apply_unit, belongs_to, bounded_solutions,
    equivalent_solutions, has_primitive_solution, inverse_unit,
)


class WitnessError(ValueError):
    """Raised when the coprime-splitting construction cannot be carried out."""


@dataclass(frozen=True, order=True)
class TripleWitness:
    r: int
    s: int
    t: int

    def __post_init__(self):
        if not 0 < self.r < self.s:
            raise ValueError(f"need 0 < r < s, got r={self.r}, s={self.s}")
        if self.t * self.t - self.b * self.s * self.s != self.r * self.r:
            raise ValueError(f"(t, s) = ({self.t}, {self.s}) does not solve t^2 - b s^2 = r^2")
        if self.t * self.t - self.c * self.r * self.r != self.s * self.s:
            raise ValueError("t^2 - c r^2 != s^2")

    @property
    def b(self) -> int:
        return 1 + self.r * self.r

    @property
    def c(self) -> int:
        return 1 + self.s * self.s

    @property
    def surface(self) -> PellSurface:
        return PellSurface(self.r)

    @property
    def rep(self) -> Representation:
        return Representation(self.t, self.s, self.r * self.r)

    @classmethod
    def from_rs(cls, r: int, s: int) -> "TripleWitness":
        t = exact_sqrt((1 + r * r) * (1 + s * s) - 1)
        if t is None:
            raise ValueError(f"{{1, {1 + r * r}, {1 + s * s}}} is not a D(-1) triple")
        return cls(r, s, t)


@dataclass(frozen=True)
class QuadCandidate:
    r: int
    s: int
    t: int
    x: int
    y: int
    z: int

    @property
    def elements(self):
        return (1, 1 + self.r ** 2, 1 + self.s ** 2, 1 + self.x ** 2)


@dataclass(frozen=True)
class WitnessPQ:
    p: int
    q: int
    rep_p4: Representation
    rep_q4: Representation
    I: Form = field(compare=False)
    J: Form = field(compare=False)


@dataclass
class Verdict:
    theorem: str
    r: int
    status: str
    exclusion_fires: bool = False
    triples: int = 0
    coprime_triples: int = 0
    survivors: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def is_dminus1_tuple(elements) -> bool:
    elements = list(elements)
    if len(elements) < 2 or len(set(elements)) != len(elements):
        raise ValueError("need at least two distinct elements")
    return all(is_square(u * v - 1) for u, v in combinations(elements, 2))


def triples_for(r: int, s_max: int) -> list:
    """Every triple {1, 1 + r^2, 1 + s^2} with r < s <= s_max, ordered by s.

    Seeds are the bounded solutions of t^2 - b s^2 = r^2 with t > 0; every
    positive solution is a seed times a non-negative power of the unit.
    """
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    surface = PellSurface(r)
    found = {}
    for seed in bounded_solutions(surface, r * r):
        if seed.x <= 0:
            continue
        rep = seed
        while rep.y <= s_max:
            if rep.y > r:
                found[rep.y] = rep.x
            rep = apply_unit(surface, rep)
    return [TripleWitness(r, s, t) for s, t in sorted(found.items())]


def triples_naive(r: int, s_max: int) -> list:
    b = 1 + r * r
    out = []
    for s in range(r + 1, s_max + 1):
        t = exact_sqrt(b * (1 + s * s) - 1)
        if t is not None:
            out.append(TripleWitness(r, s, t))
    return out


def standard_solutions(r: int) -> list:
    """The solutions (b - r, r - 1), (b - r, -(r - 1)), (r, 0), (-r, 0) of x^2 - b y^2 = r^2."""
    b = 1 + r * r
    n = r * r
    return [Representation(b - r, r - 1, n), Representation(b - r, -(r - 1), n),
            Representation(r, 0, n), Representation(-r, 0, n)]


def lemma41_match(tw: TripleWitness):
    """The first standard solution equivalent to (t, s), or None."""
    surface = tw.surface
    for ref in standard_solutions(tw.r):
        if equivalent_solutions(surface, tw.rep, ref):
            return ref
    return None


def lemma41_prunes(tw: TripleWitness) -> bool:
    """True when (t, s) lies in a standard class, so the triple cannot extend."""
    return lemma41_match(tw) is not None


def lemma42_x_filter(tw: TripleWitness, x: int) -> bool:
    return x % lcm(tw.r, tw.s) ** 2 == 0


def quadruple_scan(tw: TripleWitness, x_max: int) -> list:
    b, c = tw.b, tw.c
    step = lcm(tw.r, tw.s) ** 2
    out = []
    for x in range(step, x_max + 1, step):
        d = 1 + x * x
        y = exact_sqrt(b * d - 1)
        if y is None:
            continue
        z = exact_sqrt(c * d - 1)
        if z is not None:
            out.append(QuadCandidate(tw.r, tw.s, tw.t, x, y, z))
    return out


def gcd_chain(tw: TripleWitness):
    return gcd(tw.t, tw.s), gcd(tw.t, tw.r), gcd(tw.r, tw.s)


def _is_twice_odd_prime_power(n: int) -> bool:
    return n % 2 == 0 and odd_prime_power(n // 2) is not None


TRIPLE_TAGS = ("c=p", "c=2p^k", "s=p^k", "s=2p^k")
QUAD_TAGS = ("d=p", "x<2 odd primes")


def shape_tags(s: int, x: int = None) -> list:
    """Excluded shapes carried by s and c = 1 + s^2, and by x and d = 1 + x^2 if x is given."""
    c = 1 + s * s
    tags = []
    if c % 2 and isprime(c):
        tags.append("c=p")
    if _is_twice_odd_prime_power(c):
        tags.append("c=2p^k")
    if odd_prime_power(s) is not None:
        tags.append("s=p^k")
    if _is_twice_odd_prime_power(s):
        tags.append("s=2p^k")
    if x is not None:
        if isprime(1 + x * x):
            tags.append("d=p")
        if len(odd_prime_factors(x)) < 2:
            tags.append("x<2 odd primes")
    return tags


def theorem11_exclusions(tw: TripleWitness, x: int = None) -> list:
    return shape_tags(tw.s, x)


def theorem12_shape(r: int):
    """(p, q) with p < q when r is a product of two distinct odd primes, else None."""
    f = factor(r)
    if r % 2 == 0 or len(f) != 2 or any(e != 1 for e in f.values()):
        return None
    p, q = sorted(f)
    return p, q


def theorem12_fires(r: int) -> bool:
    """True when r = pq with min(p, q) <= r^(1/4), so {1, r^2 + 1} cannot extend."""
    shape = theorem12_shape(r)
    return shape is not None and shape[0] ** 4 <= r


def theorem15_splits(r: int) -> list:
    """Every (P, phi) with r = P * phi, P prime, 1 < phi and phi^4 < r, for odd r."""
    if r % 2 == 0:
        return []
    return [(P, r // P) for P in sorted(factor(r)) if 1 < r // P and (r // P) ** 4 < r]


def theorem15_prunes(tw: TripleWitness) -> bool:
    return gcd(tw.r, tw.s) == 1 and bool(theorem15_splits(tw.r))


def _smallest_member(surface: PellSurface, rep: Representation) -> Representation:
    inv = inverse_unit(surface)
    for unit in (inv, None):
        while True:
            nxt = apply_unit(surface, rep, unit)
            if (abs(nxt.y), abs(nxt.x)) >= (abs(rep.y), abs(rep.x)):
                break
            rep = nxt
    return rep


def _fourth_power_rep(surface: PellSurface, I: Form, m: int) -> Representation:
    square = compose(I, I)
    if square.a != m ** 4:
        raise WitnessError(f"square of {I} has leading coefficient {square.a}, expected {m ** 4}")
    xy = principal_representation(square)
    if xy is None:
        raise WitnessError(f"square of {I} is not in the principal class")
    rep = _smallest_member(surface, Representation(xy[0], xy[1], m ** 4))
    if surface.norm(rep.x, rep.y) != m ** 4 or not rep.primitive:
        raise WitnessError(f"recovered {rep} does not primitively represent {m}^4")
    return rep


def split_by_labels(k: int, b1: int, b2: int):
    """Split k = p * q so that p^2 | b1 + b2 and q^2 | b1 - b2."""
    p = q = 1
    for ell, e in factor(k).items():
        pe = ell ** e
        plus, minus = (b1 + b2) % (pe * pe) == 0, (b1 - b2) % (pe * pe) == 0
        if plus == minus:
            raise WitnessError(f"prime power {ell}^{e} divides both or neither of b1 +- b2")
        if plus:
            p *= pe
        else:
            q *= pe
    return p, q


def extract_witness(surface: PellSurface, rep1: Representation, rep2: Representation) -> WitnessPQ:
    """Build p, q and explicit representations of p^4 and q^4 from two inequivalent classes."""
    k = surface.k
    n = k * k
    if k % 2 == 0:
        raise WitnessError(f"k must be odd, got {k}")
    for rep in (rep1, rep2):
        if rep.n != n or surface.norm(rep.x, rep.y) != n or not rep.primitive:
            raise WitnessError(f"{rep} is not a primitive solution of x^2 - {surface.d} y^2 = {n}")
    if equivalent_solutions(surface, rep1, rep2) or equivalent_solutions(surface, rep1, rep2.flip()):
        raise WitnessError("hypothesis violated: the two solutions are equivalent up to sign")
    b1 = belongs_to(surface, rep1)
    b2 = belongs_to(surface, rep2)
    p, q = split_by_labels(k, b1, b2)
    if p == 1 or q == 1:
        raise WitnessError(f"degenerate split of {k}: p={p}, q={q}")
    c1 = (b1 * b1 - surface.d) // n
    D = surface.D
    P1 = Form(n, 2 * b1, c1)
    P2 = Form(n, 2 * b2, (b2 * b2 - surface.d) // n)
    I = Form(p * p, 2 * b1, c1 * q * q)
    J = Form(q * q, 2 * b1, c1 * p * p)
    principal = identity_form(D)
    checks = [
        (compose(I, J), P1, "I*J ~ P1"),
        (compose(inverse(I), J), P2, "I^-1*J ~ P2"),
        (P1, principal, "P1 ~ 1"),
        (I, inverse(I), "I ~ I^-1"),
        (I, J, "I ~ J"),
    ]
    for lhs, rhs, what in checks:
        if not equivalent(lhs, rhs):
            raise WitnessError(f"class identity failed: {what}")
    return WitnessPQ(p, q, _fourth_power_rep(surface, I, p), _fourth_power_rep(surface, J, q), I, J)


def _witness_for(tw: TripleWitness):
    """Run the witness construction against (b - r, r - 1); returns (witness, anomaly)."""
    surface = tw.surface
    ref = standard_solutions(tw.r)[0]
    try:
        w = extract_witness(surface, ref, tw.rep)
    except WitnessError as exc:
        return None, {"s": tw.s, "tag": "witness-failed", "detail": str(exc)}
    info = {"s": tw.s, "p": w.p, "q": w.q, "rep_p4": list(w.rep_p4), "rep_q4": list(w.rep_q4)}
    for m in (w.p, w.q):
        # a primitive representation of m^4 with m^4 < r is ruled out
        if m ** 4 < tw.r or not has_primitive_solution(surface, m ** 4):
            return info, {"s": tw.s, "tag": "witness-below-r", "detail": f"{m}^4 vs r={tw.r}"}
    return info, None


def theorem12_check(r: int, s_max: int = 10 ** 4) -> Verdict:
    shape = theorem12_shape(r)
    if shape is None:
        raise ValueError(f"r={r} is not a product of two distinct odd primes")
    triples = triples_for(r, s_max)
    v = Verdict("thm12", r, "vacuous at bound", exclusion_fires=theorem12_fires(r), triples=len(triples))
    for tw in triples:
        if lemma41_prunes(tw):
            continue
        v.survivors.append(tw.s)
        if gcd(tw.t, tw.s) != 1:
            continue
        v.coprime_triples += 1
        info, anomaly = _witness_for(tw)
        if info is not None:
            v.witnesses.append(info)
        if anomaly is not None:
            v.anomalies.append(anomaly)
    if v.anomalies:
        v.status = "anomaly"
    elif v.coprime_triples:
        v.status = "consistent"
    return v


def theorem15_check(r: int, P: int, phi: int, s_max: int) -> Verdict:
    if phi <= 1:
        raise ValueError("phi must exceed 1")
    if P * phi != r or not isprime(P):
        raise ValueError(f"r={r} is not P*phi with P={P} prime and phi={phi}")
    if phi ** 4 >= r:
        raise ValueError(f"phi={phi} is not below r^(1/4)")
    if r % 2 == 0:
        raise ValueError("r must be odd")
    triples = [tw for tw in triples_for(r, s_max) if gcd(r, tw.s) == 1]
    v = Verdict("thm15", r, "vacuous at bound", exclusion_fires=True, triples=len(triples),
                coprime_triples=len(triples))
    for tw in triples:
        if lemma41_prunes(tw):
            continue
        v.survivors.append(tw.s)
        info, anomaly = _witness_for(tw)
        if info is not None:
            v.witnesses.append(info)
        v.anomalies.append(anomaly or {"s": tw.s, "tag": "coprime-survivor"})
    if v.anomalies:
        v.status = "anomaly"
    elif triples:
        v.status = "consistent"
    return v
