"""Primitive binary quadratic forms of positive non-square discriminant.

Forms are immutable ``(a, b, c)`` triples standing for ``a*x^2 + b*x*y + c*y^2``.
Equivalence is proper (SL2(Z)) equivalence, decided by walking the cycle of
reduced forms.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .arith import is_square, xgcd3


@dataclass(frozen=True)
class Matrix:
    """Integer 2x2 matrix ``[[alpha, beta], [gamma, delta]]`` of determinant 1."""

    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        if self.det() != 1:
            raise ValueError(f"matrix {self} has determinant {self.det()}, expected 1")

    def det(self) -> int:
        return self.alpha * self.delta - self.beta * self.gamma

    def __matmul__(self, other: "Matrix") -> "Matrix":
        a, b, c, d = self.alpha, self.beta, self.gamma, self.delta
        e, f, g, h = other.alpha, other.beta, other.gamma, other.delta
        return Matrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "Matrix":
        return Matrix(self.delta, -self.beta, -self.gamma, self.alpha)

    def __iter__(self):
        yield from (self.alpha, self.beta, self.gamma, self.delta)

    @classmethod
    def identity(cls) -> "Matrix":
        return cls(1, 0, 0, 1)


IDENTITY = Matrix.identity()


@dataclass(frozen=True)
class Form:
    a: int
    b: int
    c: int

    def __post_init__(self):
        D = self.discriminant
        if is_square(D):
            raise ValueError(f"form {tuple(self)} has square discriminant {D}")
        if gcd(gcd(self.a, self.b), self.c) != 1:
            raise ValueError(f"form {tuple(self)} is not primitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __iter__(self):
        yield from (self.a, self.b, self.c)

    def __mul__(self, other: "Form") -> "Form":
        return compose(self, other)

    def __str__(self):
        return f"({self.a}, {self.b}, {self.c})"


def discriminant(f: Form) -> int:
    return f.discriminant


def identity_form(D: int) -> Form:
    if D % 4 == 0:
        return Form(1, 0, -D // 4)
    if D % 4 == 1:
        return Form(1, 1, (1 - D) // 4)
    raise ValueError(f"discriminant {D} is not 0 or 1 mod 4")


def inverse(f: Form) -> Form:
    return Form(f.a, -f.b, f.c)


def transform(f: Form, M: Matrix) -> Form:
    """The form ``f(alpha*x + beta*y, gamma*x + delta*y)``."""
    al, be, ga, de = M
    if al * de - be * ga != 1:
        raise ValueError("transformation matrix must have determinant 1")
    a = f(al, ga)
    b = 2 * (f.a * al * be + f.c * ga * de) + f.b * (al * de + be * ga)
    c = f(be, de)
    return Form(a, b, c)


def compose(f1: Form, f2: Form) -> Form:
    """Gauss composition ``f1 * f2`` with the middle coefficient taken mod 2*a3."""
    D = f1.discriminant
    if f2.discriminant != D:
        raise ValueError(f"discriminant mismatch: {D} vs {f2.discriminant}")
    a1, b1, _ = f1
    a2, b2, c2 = f2
    # b1 and b2 share the parity of D, so both halves below are exact
    assert (b1 + b2) % 2 == 0
    g, _, v2, w = xgcd3(a1, a2, (b1 + b2) // 2)
    a3 = a1 * a2 // (g * g)
    b3 = (b2 + 2 * (a2 // g) * ((b1 - b2) // 2 * v2 - c2 * w)) % (2 * abs(a3))
    num = b3 * b3 - D
    assert num % (4 * a3) == 0
    return Form(a3, b3, num // (4 * a3))


def _normal_b(b: int, a: int, root: int) -> int:
    """Representative of b mod 2|a| in the normal interval for a form with leading a."""
    A = abs(a)
    top = A if A > root else root
    return top - (top - b) % (2 * A)


def is_reduced(f: Form) -> bool:
    a, b, _ = f
    D = f.discriminant
    A2 = 2 * abs(a)
    if not 0 < b or b * b > D:
        return False
    lower = (A2 + b) ** 2 > D
    upper = A2 <= b or (A2 - b) ** 2 < D
    return lower and upper


def _rho(f: Form, root: int):
    """One reduction step: returns the next form and its transformation matrix."""
    a, b, c = f
    nb = _normal_b(-b, c, root)
    t = (nb + b) // (2 * c)
    M = Matrix(0, -1, 1, t)
    return Form(c, nb, (nb * nb - f.discriminant) // (4 * c)), M


def _check_indefinite(D: int):
    if D <= 0:
        raise ValueError(f"reduction needs a positive discriminant, got {D}")


def reduce(f: Form):
    """Reduce an indefinite form.

    Returns ``(g, M)`` with ``g`` reduced and ``transform(f, M) == g``.
    """
    D = f.discriminant
    _check_indefinite(D)
    root = isqrt(D)
    nb = _normal_b(f.b, f.a, root)
    t = (nb - f.b) // (2 * f.a)
    M = Matrix(1, t, 0, 1)
    g = transform(f, M)
    while not is_reduced(g):
        g, step = _rho(g, root)
        M = M @ step
    return g, M


def reduced(f: Form) -> Form:
    return reduce(f)[0]


@lru_cache(maxsize=4096)
def _cycle(g: Form):
    root = isqrt(g.discriminant)
    out = [(g, IDENTITY)]
    h, M = _rho(g, root)
    while h != g:
        out.append((h, M))
        h, step = _rho(h, root)
        M = M @ step
    return tuple(out)


def cycle(f: Form) -> list:
    """The cycle of reduced forms properly equivalent to f."""
    return [h for h, _ in _cycle(reduced(f))]


def _same_disc(f1: Form, f2: Form):
    if f1.discriminant != f2.discriminant:
        raise ValueError(f"discriminant mismatch: {f1.discriminant} vs {f2.discriminant}")


def equivalent(f1: Form, f2: Form) -> bool:
    _same_disc(f1, f2)
    g2 = reduced(f2)
    return any(h == g2 for h, _ in _cycle(reduced(f1)))


def equivalence_matrix(f1: Form, f2: Form):
    """A matrix M with ``transform(f1, M) == f2``, or None if the forms are inequivalent."""
    _same_disc(f1, f2)
    g1, M1 = reduce(f1)
    g2, M2 = reduce(f2)
    for h, C in _cycle(g1):
        if h == g2:
            return M1 @ C @ M2.inverse()
    return None


def principal_representation(f: Form):
    """Explicit (x, y) with ``identity_form(D)(x, y) == f.a``, via a tracked equivalence.

    Returns None when f is not in the principal class.
    """
    M = equivalence_matrix(identity_form(f.discriminant), f)
    if M is None:
        return None
    return M.alpha, M.gamma


def leading_coefficient_roots(n: int, D: int) -> list:
    """All b in [1, 2n] with b^2 = D mod 4n, i.e. every form (n, b, (b^2 - D)/4n)."""
    if n <= 0 or n % 2 == 0 or gcd(n, 2 * D) != 1:
        raise ValueError(f"need odd n > 0 with gcd(n, 2D) = 1, got n={n}, D={D}")
    m = 4 * n
    target = D % m
    return [b for b in range(1, 2 * n + 1) if b * b % m == target]


def leading_coefficient_forms(n: int, D: int) -> list:
    return [Form(n, b, (b * b - D) // (4 * n)) for b in leading_coefficient_roots(n, D)]


def root_pairs(n: int, D: int) -> list:
    """Roots grouped as inverse pairs {b, 2n - b}; the count of forms up to inversion."""
    roots = leading_coefficient_roots(n, D)
    return sorted({tuple(sorted((b, 2 * n - b))) for b in roots})
