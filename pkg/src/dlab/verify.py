"""Exhaustive and randomized property runs, shared by the CLI and the test suite.

Every function returns a plain dict with at least ``checked`` and ``failures``.
"""

import random
from math import gcd, isqrt

from sympy import divisors

from .arith import is_squarefree, odd_prime_power, omega
from .forms import (
    Form, Matrix, compose, equivalent, identity_form, inverse, leading_coefficient_roots,
    transform,
)
from .pell import (
    PellSurface, belongs_to, bounded_solutions, equivalent_solutions, has_primitive_solution,
    solve_classes,
)


def lemma32(k_max: int = 200) -> dict:
    """No primitive solution of x^2 - (k^2+1) y^2 = n for 1 < |n| < k."""
    checked, failures = 0, []
    for k in range(1, k_max + 1):
        surface = PellSurface(k)
        for m in range(2, k):
            for n in (m, -m):
                checked += 1
                if has_primitive_solution(surface, n):
                    failures.append({"k": k, "n": n})
    return {"property": "lemma32", "k_max": k_max, "checked": checked, "failures": failures}


def lemma33(k_max: int = 301) -> dict:
    """For odd k = f f' with 1 < f < k and f' a prime power, f'^2 is not primitively represented."""
    checked, failures = 0, []
    for k in range(3, k_max + 1, 2):
        surface = PellSurface(k)
        for f in range(2, k):
            if k % f:
                continue
            fp = k // f
            if odd_prime_power(fp) is None:
                continue
            checked += 1
            if has_primitive_solution(surface, fp * fp):
                failures.append({"k": k, "f": f, "f_prime": fp})
    return {"property": "lemma33", "k_max": k_max, "checked": checked, "failures": failures}


def lemma21c(k_max: int = 15, n_max: int = 500) -> dict:
    """Root counts for squarefree n coprime to 2d: 2^w(n) roots in [1, 2n], closed under b -> 2n - b.

    The inverse-pair count 2^(w(n) - 1) is reported alongside for n > 1.
    """
    checked, failures, rows = 0, [], []
    for k in range(1, k_max + 1, 2):
        d = k * k + 1
        D = 4 * d
        for n in range(1, n_max):
            if n % 2 == 0 or gcd(n, d) != 1 or not is_squarefree(n):
                continue
            roots = leading_coefficient_roots(n, D)
            if not roots:
                continue
            checked += 1
            w = omega(n)
            paired = {b: (2 * n - b) % (2 * n) or 2 * n for b in roots}
            ok = len(roots) == 2 ** w and all(p in paired for p in paired.values())
            if n > 1:
                ok = ok and len(roots) % 2 == 0 and all(p != b for b, p in paired.items())
            rows.append({"k": k, "n": n, "roots": len(roots), "pairs": len(roots) // 2 if n > 1 else None,
                         "w": w})
            if not ok:
                failures.append({"k": k, "n": n, "roots": roots})
    return {"property": "lemma21c", "k_max": k_max, "n_max": n_max, "checked": checked,
            "failures": failures, "rows": rows}


def random_unimodular(rng: random.Random, steps: int = 6, spread: int = 4) -> Matrix:
    M = Matrix.identity()
    for _ in range(steps):
        t = rng.randint(-spread, spread)
        M = M @ (Matrix(1, t, 0, 1) if rng.random() < 0.5 else Matrix(1, 0, t, 1))
    return M


def random_form(D: int, rng: random.Random, scramble: bool = True) -> Form:
    """A random primitive form of discriminant D (D even), optionally moved within its class."""
    bound = 2 * isqrt(D) + 40
    while True:
        b = 2 * rng.randint(-bound // 2, bound // 2)
        N = (b * b - D) // 4
        a = rng.choice(divisors(abs(N))) * rng.choice((1, -1))
        c = N // a
        if gcd(gcd(a, b), c) != 1:
            continue
        f = Form(a, b, c)
        return transform(f, random_unimodular(rng)) if scramble else f


def group_laws(ks=range(3, 22, 2), forms: int = 500, seed: int = 0) -> dict:
    """Identity, inverse and associativity of composition up to equivalence."""
    rng = random.Random(seed)
    checked, failures = 0, []
    for k in ks:
        D = 4 * (k * k + 1)
        e = identity_form(D)
        for _ in range(forms):
            f, g, h = (random_form(D, rng) for _ in range(3))
            checked += 1
            laws = {
                "identity": equivalent(compose(f, e), f) and equivalent(compose(e, f), f),
                "inverse": equivalent(compose(f, inverse(f)), e),
                "associativity": equivalent(compose(compose(f, g), h), compose(f, compose(g, h))),
                "commutativity": equivalent(compose(f, g), compose(g, f)),
            }
            for law, ok in laws.items():
                if not ok:
                    failures.append({"k": k, "law": law, "forms": [list(f), list(g), list(h)]})
    return {"property": "group_laws", "seed": seed, "forms_per_discriminant": forms,
            "ks": list(ks), "checked": checked, "failures": failures}


def _class_signature(classes):
    return [tuple(sorted((r.x, r.y) for r in c)) for c in classes]


def class_parity(k_max: int = 25) -> dict:
    """Bounded class enumeration agrees with a doubled over-scan, and labels agree with the congruence criterion."""
    checked, failures = 0, []
    for k in range(1, k_max + 1):
        surface = PellSurface(k)
        for n in range(-k * k, k * k + 1):
            if n == 0:
                continue
            classes = solve_classes(surface, n)
            reps = [c[0] for c in classes]
            r = isqrt(abs(n))
            wide = bounded_solutions(surface, n, 2 * (r if r * r == abs(n) else r + 1))
            checked += 1
            for sol in wide:
                if sum(equivalent_solutions(surface, sol, rep) for rep in reps) != 1:
                    failures.append({"k": k, "n": n, "solution": list(sol), "issue": "class coverage"})
                    break
            prim = [rep for rep in reps if rep.primitive]
            labels = [belongs_to(surface, rep) for rep in prim]
            for i, p1 in enumerate(prim):
                for j, p2 in enumerate(prim):
                    if (labels[i] == labels[j]) != equivalent_solutions(surface, p1, p2):
                        failures.append({"k": k, "n": n, "pair": [list(p1), list(p2)],
                                         "issue": "label mismatch"})
                    if belongs_to(surface, p1.flip()) != (-labels[i]) % abs(n):
                        failures.append({"k": k, "n": n, "rep": list(p1), "issue": "flip label"})
    return {"property": "class_parity", "k_max": k_max, "checked": checked, "failures": failures}


PROPERTIES = {
    "lemma32": lemma32,
    "lemma33": lemma33,
    "lemma21c": lemma21c,
    "group-laws": group_laws,
    "class-parity": class_parity,
}
