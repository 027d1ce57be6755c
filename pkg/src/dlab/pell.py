"""Solutions of x^2 - (k^2 + 1) y^2 = n, their classes and labels."""

from dataclasses import dataclass, field
from math import gcd, isqrt

from .arith import exact_sqrt, xgcd


@dataclass(frozen=True)
class PellSurface:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")

    @property
    def d(self) -> int:
        return self.k * self.k + 1

    @property
    def D(self) -> int:
        return 4 * self.d

    def norm(self, x: int, y: int) -> int:
        return x * x - self.d * y * y

    def rep(self, x: int, y: int) -> "Representation":
        return Representation(x, y, self.norm(x, y))


@dataclass(frozen=True, order=True)
class Representation:
    x: int
    y: int
    n: int = field(compare=False)

    @property
    def primitive(self) -> bool:
        return gcd(self.x, self.y) == 1

    def flip(self) -> "Representation":
        return Representation(self.x, -self.y, self.n)

    def __iter__(self):
        yield from (self.x, self.y)

    def __str__(self):
        return f"({self.x}, {self.y})"


def fundamental_unit(surface: PellSurface):
    """Least solution of X^2 - dY^2 = 1; it is (2k^2 + 1, 2k) since d = k^2 + 1."""
    k = surface.k
    return 2 * k * k + 1, 2 * k


def negative_unit(surface: PellSurface):
    """(k, 1), which solves X^2 - dY^2 = -1."""
    return surface.k, 1


def belongs_to(surface: PellSurface, rep: Representation) -> int:
    """The residue b mod |n| such that (x, y) carries the principal form to (n, 2b, c)."""
    if rep.n == 0:
        raise ValueError("n must be nonzero")
    g, beta, alpha = xgcd(rep.x, -rep.y)
    if g != 1:
        raise ValueError(f"representation {rep} is not primitive")
    # x*beta - y*alpha == 1
    return (rep.x * alpha - surface.d * rep.y * beta) % abs(rep.n)


def equivalent_solutions(surface: PellSurface, r1: Representation, r2: Representation) -> bool:
    if r1.n != r2.n:
        raise ValueError(f"solutions of different norms: {r1.n} vs {r2.n}")
    if surface.norm(*r1) != r1.n or surface.norm(*r2) != r2.n:
        raise ValueError("solution does not lie on this surface")
    n = abs(r1.n)
    x, y = r1
    u, v = r2
    return (x * u - surface.d * y * v) % n == 0 and (x * v - y * u) % n == 0


def _default_bound(n: int) -> int:
    r = isqrt(abs(n))
    return r if r * r == abs(n) else r + 1


def bounded_solutions(surface: PellSurface, n: int, y_bound: int = None) -> list:
    """Every (x, y) with |y| <= y_bound and x^2 - dy^2 = n, all sign variants, sorted."""
    if y_bound is None:
        y_bound = _default_bound(n)
    d = surface.d
    out = set()
    for y in range(y_bound + 1):
        x = exact_sqrt(n + d * y * y)
        if x is None:
            continue
        for sx in (x, -x):
            for sy in (y, -y):
                out.add(Representation(sx, sy, n))
    return sorted(out)


def solve_classes(surface: PellSurface, n: int, y_bound: int = None) -> list:
    """Partition the bounded solutions of x^2 - dy^2 = n into equivalence classes.

    For d = k^2 + 1 every class has a member with |y| <= sqrt(|n|), so the default
    bound yields every class. Classes come back ordered by their smallest member,
    which is also the first element of each class list.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    classes = []
    for rep in bounded_solutions(surface, n, y_bound):
        for cls in classes:
            if equivalent_solutions(surface, cls[0], rep):
                cls.append(rep)
                break
        else:
            classes.append([rep])
    return [sorted(c, key=_rep_key) for c in sorted(classes, key=lambda c: min(map(_rep_key, c)))]


def _rep_key(rep: Representation):
    # smallest |y| first, then non-negative coordinates ahead of negative ones
    return (abs(rep.y), abs(rep.x), rep.x < 0, rep.y < 0)


def has_primitive_solution(surface: PellSurface, n: int) -> bool:
    """Whether x^2 - dy^2 = n has a solution with gcd(x, y) = 1.

    Primitivity is constant on classes, so the bounded scan is conclusive.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    d = surface.d
    for y in range(_default_bound(n) + 1):
        x = exact_sqrt(n + d * y * y)
        if x is not None and gcd(x, y) == 1:
            return True
    return False


def apply_unit(surface: PellSurface, rep: Representation, unit=None) -> Representation:
    u, v = unit if unit is not None else fundamental_unit(surface)
    x, y = rep
    return Representation(x * u + surface.d * y * v, x * v + y * u, rep.n)


def unit_orbit(surface: PellSurface, rep: Representation, steps: int) -> list:
    out = [rep]
    for _ in range(steps):
        out.append(apply_unit(surface, out[-1]))
    return out


def inverse_unit(surface: PellSurface):
    u, v = fundamental_unit(surface)
    return u, -v
