import itertools
import random
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from dlab.forms import (
    Form, Matrix, compose, cycle, discriminant, equivalence_matrix, equivalent, identity_form,
    inverse, is_reduced, leading_coefficient_roots, principal_representation, reduce, root_pairs,
    transform,
)
from dlab.verify import random_form, random_unimodular


def brute_equivalent(f1, f2, bound=8):
    """Search SL2(Z) matrices with small entries carrying f1 to f2 (evaluated directly)."""
    a, b, c = f1
    F = lambda x, y: a * x * x + b * x * y + c * y * y
    for al, be, ga, de in itertools.product(range(-bound, bound + 1), repeat=4):
        if al * de - be * ga != 1:
            continue
        if (F(al, ga), 2 * (a * al * be + c * ga * de) + b * (al * de + be * ga), F(be, de)) == tuple(f2):
            return True
    return False


@pytest.mark.parametrize("f,D", [((1, 0, -26), 104), ((7, 6, 1), 8), ((9, 398, 4375), 904)])
def test_discriminant(f, D):
    assert discriminant(Form(*f)) == D


@pytest.mark.parametrize("D,expected", [(104, (1, 0, -26)), (8, (1, 0, -2)), (5, (1, 1, -1))])
def test_identity_form(D, expected):
    assert tuple(identity_form(D)) == expected


def test_identity_form_rejects_bad_discriminant():
    with pytest.raises(ValueError):
        identity_form(6)


@pytest.mark.parametrize("f,expected", [
    ((7, 6, 1), (7, -6, 1)),
    ((1, 0, -26), (1, 0, -26)),
    ((9, 398, 4375), (9, -398, 4375)),
])
def test_inverse(f, expected):
    assert tuple(inverse(Form(*f))) == expected


def test_form_rejects_square_discriminant_and_imprimitive():
    with pytest.raises(ValueError):
        Form(1, 2, 1)
    with pytest.raises(ValueError):
        Form(2, 0, -4)
    with pytest.raises(ValueError):
        Form(1, 0, 0)


def test_transform_examples():
    f = Form(7, 6, 1)
    assert transform(f, Matrix.identity()) == f
    assert tuple(transform(f, Matrix(0, -1, 1, 0))) == (1, -6, 7)
    # f(21, 4) = 441 - 26*16 = 25; middle 2*(21*26 - 26*4*5) = 52; f(26, 5) = 26
    assert tuple(transform(Form(1, 0, -26), Matrix(21, 26, 4, 5))) == (25, 52, 26)


def test_matrix_rejects_bad_determinant():
    with pytest.raises(ValueError):
        Matrix(2, 0, 0, 1)


def test_compose_with_identity():
    f = Form(7, 6, 1)
    out = compose(identity_form(8), f)
    assert equivalent(out, f)
    assert brute_equivalent(out, f)


def test_compose_square_of_I():
    I = Form(9, 398, 4375)
    sq = compose(I, I)
    assert sq.a == 81
    assert sq.discriminant == 904
    assert 0 <= sq.b < 2 * sq.a


def test_compose_with_inverse():
    f = Form(7, 6, 1)
    assert equivalent(compose(f, inverse(f)), identity_form(8))


def test_compose_discriminant_mismatch():
    with pytest.raises(ValueError):
        compose(Form(7, 6, 1), Form(1, 0, -26))


def test_reduce_principal():
    g, M = reduce(Form(1, 0, -26))
    assert is_reduced(g)
    assert transform(Form(1, 0, -26), M) == g
    # b = 10 is the largest even b below sqrt(104)
    assert g.b == 10


def test_reduce_fixed_point():
    g, _ = reduce(Form(1, 0, -26))
    g2, M = reduce(g)
    assert g2 == g and M == Matrix.identity()


def test_reduce_other_form():
    f = Form(25, 52, 18)
    g, M = reduce(f)
    assert is_reduced(g) and g.discriminant == 904
    assert transform(f, M) == g


def test_reduce_rejects_negative_discriminant():
    with pytest.raises(ValueError):
        reduce(Form(1, 1, 1))


def test_reduced_inequalities_hold_exactly():
    from math import sqrt
    for f in cycle(Form(1, 0, -226)):
        D = f.discriminant
        assert 0 < f.b < sqrt(D)
        assert sqrt(D) - f.b < 2 * abs(f.a) < sqrt(D) + f.b


def test_equivalent_lemma21_part2():
    n, b = 7, 6
    f = Form(n, b, 1)
    b2 = b + 2 * n
    g = Form(n, b2, (b2 * b2 - 8) // (4 * n))
    assert equivalent(f, g)


def test_equivalent_regression_7_6_1_vs_7_8_2():
    # oracle: direct search over small SL2(Z) matrices
    assert brute_equivalent(Form(7, 6, 1), Form(7, 8, 2))
    assert equivalent(Form(7, 6, 1), Form(7, 8, 2))


def test_equivalent_reflexive_and_mismatch():
    f = Form(9, 398, 4375)
    assert equivalent(f, f)
    with pytest.raises(ValueError):
        equivalent(f, Form(1, 0, -26))


def test_inequivalent_forms_detected():
    # if (81, 146, 63) were principal, x^2 - 226 y^2 = 81 would have a primitive solution,
    # and such a solution has |y| <= 9
    from math import isqrt
    prim = [(y, isqrt(81 + 226 * y * y)) for y in range(10)
            if isqrt(81 + 226 * y * y) ** 2 == 81 + 226 * y * y]
    assert all(gcd(x, y) > 1 for y, x in prim)
    assert not equivalent(Form(81, 146, 63), identity_form(904))
    assert equivalence_matrix(Form(81, 146, 63), identity_form(904)) is None
    assert principal_representation(Form(81, 146, 63)) is None


def test_equivalence_matrix_is_explicit():
    f1, f2 = Form(7, 6, 1), Form(7, 8, 2)
    M = equivalence_matrix(f1, f2)
    assert transform(f1, M) == f2


def test_principal_representation():
    f = transform(Form(1, 0, -26), Matrix(21, 26, 4, 5))
    x, y = principal_representation(f)
    assert x * x - 26 * y * y == f.a == 25
    assert gcd(x, y) == 1


def test_leading_coefficient_roots_examples():
    assert leading_coefficient_roots(7, 8) == [6, 8]
    assert leading_coefficient_roots(1, 104) == [2]
    assert leading_coefficient_roots(1, 5) == [1]


def test_leading_coefficient_roots_n15():
    # brute force b = 1..30 for b^2 = 104 mod 60: 26 is a non-residue mod 3, so nothing
    assert [b for b in range(1, 31) if (b * b - 104) % 60 == 0] == []
    assert leading_coefficient_roots(15, 104) == []
    # D = 904 (d = 226): 226 = 1 mod 3 and mod 5, so 2^2 = 4 roots
    brute = [b for b in range(1, 31) if (b * b - 904) % 60 == 0]
    assert brute == [2, 8, 22, 28]
    assert leading_coefficient_roots(15, 904) == brute
    assert root_pairs(15, 904) == [(2, 28), (8, 22)]


def test_leading_coefficient_roots_guard():
    with pytest.raises(ValueError):
        leading_coefficient_roots(13, 104)
    with pytest.raises(ValueError):
        leading_coefficient_roots(4, 5)


ODD_K = st.sampled_from([3, 5, 7, 9, 11, 13, 15, 17, 19, 21])


@settings(max_examples=200, deadline=None)
@given(ODD_K, st.integers(0, 2 ** 32))
def test_transform_preserves_discriminant_and_class(k, seed):
    rng = random.Random(seed)
    D = 4 * (k * k + 1)
    f = random_form(D, rng)
    M = random_unimodular(rng)
    g = transform(f, M)
    assert g.discriminant == D
    assert gcd(gcd(g.a, g.b), g.c) == 1
    assert equivalent(f, g)
    assert transform(f, equivalence_matrix(f, g)) == g


@settings(max_examples=100, deadline=None)
@given(ODD_K, st.integers(0, 2 ** 32))
def test_group_laws(k, seed):
    rng = random.Random(seed)
    D = 4 * (k * k + 1)
    e = identity_form(D)
    f, g, h = (random_form(D, rng) for _ in range(3))
    assert equivalent(compose(f, e), f)
    assert equivalent(compose(f, inverse(f)), e)
    assert equivalent(compose(compose(f, g), h), compose(f, compose(g, h)))


@settings(max_examples=60, deadline=None)
@given(ODD_K, st.integers(0, 2 ** 32))
def test_equivalence_relation(k, seed):
    rng = random.Random(seed)
    D = 4 * (k * k + 1)
    fs = [random_form(D, rng) for _ in range(4)]
    for f in fs:
        assert equivalent(f, f)
    for f, g in itertools.permutations(fs, 2):
        assert equivalent(f, g) == equivalent(g, f)
    for f, g, h in itertools.permutations(fs, 3):
        if equivalent(f, g) and equivalent(g, h):
            assert equivalent(f, h)


def _class_number(D):
    """Distinct cycles among all reduced forms of discriminant D (by enumeration)."""
    from math import isqrt
    R = isqrt(D)
    reduced_forms = set()
    for b in range(1, R + 1):
        if (b * b - D) % 4:
            continue
        N = (b * b - D) // 4
        for a in range(1, abs(N) + 1):
            if N % a:
                continue
            for sa in (a, -a):
                try:
                    f = Form(sa, b, N // sa)
                except ValueError:
                    continue
                if is_reduced(f):
                    reduced_forms.add(f)
    classes = []
    for f in reduced_forms:
        if not any(f in c for c in classes):
            classes.append(set(cycle(f)))
    assert set().union(*classes) == reduced_forms
    return len(classes)


@pytest.mark.parametrize("k", [3, 7, 15, 21])
def test_class_order_divides_class_number(k):
    # Lagrange in the class group: f^h is principal, with h counted independently by cycles
    D = 4 * (k * k + 1)
    h = _class_number(D)
    rng = random.Random(k)
    for _ in range(20):
        f = random_form(D, rng)
        acc = identity_form(D)
        for _ in range(h):
            acc = compose(acc, f)
        assert equivalent(acc, identity_form(D))
