"""Small exact-integer helpers shared by the rest of the package."""

from math import gcd, isqrt

from sympy import factorint, isprime


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def exact_sqrt(n: int):
    """Return the integer square root of n if n is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def xgcd(a: int, b: int):
    """Extended Euclid: returns (g, u, v) with u*a + v*b == g >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        a, u0, v0 = -a, -u0, -v0
    return a, u0, v0


def xgcd3(a: int, b: int, c: int):
    """Returns (g, u, v, w) with u*a + v*b + w*c == g == gcd(a, b, c)."""
    g1, u1, v1 = xgcd(a, b)
    g, s, w = xgcd(g1, c)
    return g, s * u1, s * v1, w


def lcm(a: int, b: int) -> int:
    return abs(a * b) // gcd(a, b) if a and b else 0


def factor(n: int) -> dict:
    return factorint(abs(n)) if n else {}


def odd_prime_factors(n: int) -> list:
    return sorted(p for p in factor(n) if p != 2)


def omega(n: int) -> int:
    """Number of distinct prime divisors."""
    return len(factor(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(n).values())


def odd_prime_power(n: int):
    """Return (p, k) when n == p**k for an odd prime p and k >= 1, else None."""
    if n < 3:
        return None
    f = factor(n)
    if len(f) != 1:
        return None
    (p, k), = f.items()
    return (p, k) if p != 2 else None


__all__ = [
    "exact_sqrt", "factor", "gcd", "is_square", "is_squarefree", "isprime",
    "isqrt", "lcm", "odd_prime_factors", "odd_prime_power", "omega", "xgcd", "xgcd3",
]
