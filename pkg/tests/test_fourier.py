import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quotdist.cyclotomic import Cyclotomic
from quotdist.errors import DimensionMismatchError, DomainError, ResourceError
from quotdist.field import field_of_order, make_field
from quotdist.forms import StandardForm
from quotdist.fourier import (
    PointSet,
    RatioSpec,
    all_points,
    closed_H_table,
    closed_sphere0_table,
    closed_VQr_table,
    diagonal_variety,
    dual_diagonal_variety,
    dual_product_variety,
    fourier_bruteforce,
    fourier_closed_H,
    fourier_closed_sphere0,
    fourier_closed_VQr,
    fourier_set_table,
    mismatches,
    product_variety,
    read_point_set,
    sphere,
    write_point_set,
)
from quotdist.harness import random_subset

from oracles import fourier_counts, reduce_cyclotomic


def test_point_indexing_is_lexicographic():
    pts = all_points(3, 2)
    assert pts[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]
    assert not pts.flags.writeable


def test_point_set_basics(tmp_path):
    F = make_field(5)
    S = PointSet.from_points(F, 2, [[0, 0], [1, 0], [1, 0]])
    assert len(S) == 2 and S.cardinality == 2
    assert (1, 0) in S and (0, 1) not in S
    assert list(S) == [(0, 0), (1, 0)]
    path = tmp_path / "s.txt"
    write_point_set(path, S)
    assert path.read_text() == "2 5\n0 0\n1 0\n"
    assert read_point_set(path, F) == S
    with pytest.raises(DimensionMismatchError):
        read_point_set(path, make_field(3))
    with pytest.raises(DimensionMismatchError):
        PointSet.from_points(F, 2, [[1, 2, 3]])


def test_sphere_examples():
    F = make_field(3)
    assert len(sphere(StandardForm.make(F, 2, 1), 0)) == 5
    assert len(sphere(StandardForm.make(F, 3, 1), 0)) == 9


@pytest.mark.parametrize("q,d", [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2), (9, 2), (3, 4)])
def test_spheres_nonempty_and_partition(q, d):
    F = field_of_order(q)
    for eps in (F.one, F.smallest_nonsquare):
        f = StandardForm.make(F, d, eps)
        sizes = [len(sphere(f, t)) for t in range(q)]
        assert min(sizes) >= 1
        assert sum(sizes) == q**d


def test_diagonal_variety_examples():
    F5 = make_field(5)
    assert len(diagonal_variety(F5, [1, F5.integer(-1)])) == 9
    F3 = make_field(3)
    H = diagonal_variety(F3, [1, 1])
    assert H.indices.tolist() == [0]
    with pytest.raises(DomainError):
        diagonal_variety(F3, [1, 0])
    for a in itertools.product(range(1, 5), repeat=3):
        assert (0, 0, 0) in diagonal_variety(F5, a)
    assert dual_diagonal_variety(F5, [2, 3]) == diagonal_variety(F5, [3, 2])


def test_product_variety_examples():
    F = make_field(3)
    spec = RatioSpec(F.one, StandardForm.make(F, 2, 1))
    V = product_variety(spec)
    assert len(V) == 33
    assert (0, 0, 0, 0) in V
    with pytest.raises(DomainError):
        RatioSpec(F.zero, StandardForm.make(F, 2, 1))
    f = StandardForm.make(F, 2, 1)
    for r in F.nonzero():
        V = product_variety(RatioSpec(r, f))
        for x in itertools.product(range(3), repeat=2):
            if f(list(x)):
                assert ((*x, *x) in V) == (r == F.one)


def test_product_variety_coefficients():
    F = make_field(5)
    r = F(2)
    even = RatioSpec(r, StandardForm.make(F, 2, 3))
    assert [c.index for c in even.coeffs] == [1, (-F(3)).index, (-r).index, (r * F(3)).index]
    odd = RatioSpec(r, StandardForm.make(F, 3, 3))
    assert [c.index for c in odd.coeffs][3:] == [(-r).index, r.index, (-(r * F(3))).index]
    assert dual_product_variety(even) == diagonal_variety(F, even.dual_coeffs)


def test_bruteforce_examples():
    F = make_field(5)
    rng = np.random.default_rng(0)
    S = random_subset(F, 2, 7, rng)
    assert fourier_bruteforce(S, [0, 0]).value == 7
    full = PointSet.full(F, 2)
    assert all(fourier_bruteforce(full, m).value == 0 for m in all_points(5, 2)[1:])
    origin = PointSet.origin(F, 2)
    assert all(fourier_bruteforce(origin, m).value == 1 for m in all_points(5, 2))


@pytest.mark.parametrize("q,n", [(3, 2), (5, 2), (7, 2), (3, 3)])
def test_table_matches_independent_oracle(q, n):
    F = field_of_order(q)
    rng = np.random.default_rng(q + n)
    S = random_subset(F, n, q**n // 2, rng)
    table = fourier_set_table(S)
    pts = [tuple(int(v) for v in x) for x in S.points]
    for i, m in enumerate(all_points(q, n)):
        expect = reduce_cyclotomic(fourier_counts(pts, m, q), q)
        assert table.value(i).value.coeffs == expect


def test_table_identities():
    F = make_field(3, 2)
    rng = np.random.default_rng(3)
    S = random_subset(F, 2, 30, rng)
    table = fourier_set_table(S)
    # Plancherel and Hermitian symmetry
    assert table.plancherel_sum() == 81 * 30
    neg = F.tables.neg
    for i, m in enumerate(all_points(9, 2)):
        assert table.value([int(v) for v in neg[m]]).value == table.value(i).value.conj()
    full = fourier_set_table(PointSet.full(F, 2))
    assert full.value(0).value == 81 and all(v == 0 for v in full.values()[1:])
    assert all(v == 1 for v in fourier_set_table(PointSet.origin(F, 2)).values())


def test_budget_guard():
    F = make_field(5)
    with pytest.raises(ResourceError, match="390625"):
        fourier_set_table(PointSet.full(F, 4), budget=1000)


def test_product_factorization():
    F = make_field(3)
    rng = np.random.default_rng(5)
    E = random_subset(F, 2, 4, rng)
    t1 = fourier_set_table(E)
    t2 = fourier_set_table(E.product(E))
    for i, M in enumerate(all_points(3, 4)):
        assert t2.value(i).value == t1.value(list(M[:2])).value * t1.value(list(M[2:])).value


@pytest.mark.parametrize("q,n", [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2), (9, 2), (9, 3)])
def test_closed_H_examples(q, n):
    F = field_of_order(q)
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = [int(v) for v in rng.integers(1, q, n)]
        H = diagonal_variety(F, a)
        closed = closed_H_table(F, a)
        assert closed[0] == len(H)
        assert not mismatches(fourier_set_table(H), closed)
        # the single-frequency form agrees with the table
        for i in rng.integers(0, q**n, 5):
            assert fourier_closed_H(F, a, all_points(q, n)[i]).value == int(closed[i])
        if n % 2 == 1:
            dual = dual_diagonal_variety(F, a)
            assert all(closed[i] == 0 for i in dual.indices if i)


def test_closed_H_even_zero_frequency():
    F = make_field(5)
    a = [1, 2, 3, 4]
    prod = F.integer(24)
    sign = F.eta(prod)  # (-1)^(n/2) = 1 for n = 4
    assert fourier_closed_H(F, a, [0] * 4).value == 5**3 + 4 * 5 * sign


def test_closed_VQr_examples():
    for q, d in [(3, 2), (5, 2), (3, 3)]:
        F = field_of_order(q)
        for eps in (F.one, F.smallest_nonsquare):
            form = StandardForm.make(F, d, eps)
            for r in F.nonzero():
                spec = RatioSpec(r, form)
                closed = closed_VQr_table(spec)
                assert closed[0] == len(product_variety(spec))
                if d % 2 == 0:
                    assert closed[0] == q ** (2 * d - 1) + q**d - q ** (d - 1)
                dual = dual_product_variety(spec).mask
                if d % 2 == 1 and F.eta(r) == -1:
                    outside = np.flatnonzero(~dual)
                    assert all(closed[i] == q ** (d - 1) for i in outside if i)
                M = all_points(q, 2 * d)[7]
                assert fourier_closed_VQr(spec, M).value == int(closed[7])


def test_closed_sphere0_examples():
    for q in (3, 5, 7):
        F = field_of_order(q)
        for d in (2, 3, 4):
            for eps in (F.one, F.smallest_nonsquare):
                f = StandardForm.make(F, d, eps)
                closed = closed_sphere0_table(f)
                assert closed[0] == len(sphere(f, 0))
                if d % 2:
                    assert closed[0] == q ** (d - 1)
                elif f.eta_epsilon() == 1:
                    assert closed[0] == q ** (d - 1) + q ** (d // 2) - q ** ((d - 2) // 2)
                assert fourier_closed_sphere0(f, [1] + [0] * (d - 1)).value == int(closed[q ** (d - 1)])


@given(st.sampled_from([3, 5, 7, 9]), st.integers(2, 3), st.data())
@settings(max_examples=25, deadline=None)
def test_closed_H_property(q, n, data):
    F = field_of_order(q)
    a = [data.draw(st.integers(1, q - 1)) for _ in range(n)]
    assert not mismatches(fourier_set_table(diagonal_variety(F, a)), closed_H_table(F, a))


def test_fault_injection_is_detected():
    F = make_field(5)
    a = [1, 2]
    assert mismatches(fourier_set_table(diagonal_variety(F, a)), closed_H_table(F, a, _sign=-1))
