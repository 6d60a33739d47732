"""Acceptance criteria 1-14.  Every comparison is exact; runtimes are asserted.

A one-line PASS/FAIL per criterion is printed in the terminal summary.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from quotdist.cli import main
from quotdist.counting import distance_histogram, quotient_set, verify_counting_lemma, w_from_histogram, w_zero
from quotdist.field import (
    completed_square_sum,
    completed_square_sum_bruteforce,
    eta_weighted_inverse_sum,
    eta_weighted_inverse_sum_bruteforce,
    field_of_order,
    gauss_sum,
)
from quotdist.forms import QuadraticForm, StandardForm
from quotdist.fourier import (
    RatioSpec,
    closed_H_table,
    closed_sphere0_table,
    closed_VQr_table,
    diagonal_variety,
    fourier_set_table,
    mismatches,
    product_variety,
    sphere,
)
from quotdist.harness import (
    SpectralData,
    build_sharpness_even,
    build_sharpness_odd_iii,
    case_rhs,
    quotient_corollary_check,
    random_subset,
    reduced_rhs,
    theorem_check,
    w0_bound_check,
)

from oracles import QUADRUPLE_CAP, quadruple_counts


def forms_both_classes(F, d):
    return [StandardForm.make(F, d, F.one), StandardForm.make(F, d, F.smallest_nonsquare)]


@pytest.mark.acceptance(1, "Gauss sum identities")
def test_criterion_01_gauss(stopwatch):
    for q in (3, 5, 7, 9, 11, 13, 25, 27, 49):
        F = field_of_order(q)
        G = gauss_sum(F)
        assert G * G == F.eta(F.integer(-1)) * q
        assert G * G.conj() == q
    assert stopwatch() < 1


@pytest.mark.acceptance(2, "completed-square and eta-weighted sums, all admissible (a, b)")
def test_criterion_02_completed_square(stopwatch):
    for q in (3, 5, 7, 9, 11):
        F = field_of_order(q)
        for a, b in itertools.product(F.nonzero(), F.elements()):
            assert completed_square_sum(a, b) == completed_square_sum_bruteforce(a, b)
        for b in F.nonzero():
            assert eta_weighted_inverse_sum(b) == eta_weighted_inverse_sum_bruteforce(b)
    assert stopwatch() < 10


@pytest.mark.acceptance(3, "diagonal variety transform, closed form vs brute force")
def test_criterion_03_diagonal_variety(stopwatch):
    rng = np.random.default_rng(3)
    checked = 0
    for q in (3, 5, 7, 9):
        F = field_of_order(q)
        for n in (2, 3, 4):
            if q == 3:
                vectors = list(itertools.product(range(1, q), repeat=n))
            else:
                vectors = [tuple(int(v) for v in rng.integers(1, q, n)) for _ in range(20)]
            for a in vectors:
                table = fourier_set_table(diagonal_variety(F, a))
                assert mismatches(table, closed_H_table(F, a)) == [], (q, n, a)
                checked += 1
    assert checked >= 20 * 9 + 2**2 + 2**3 + 2**4
    assert stopwatch() < 120


@pytest.mark.acceptance(4, "ratio-variety transform at every M, all r")
def test_criterion_04_ratio_variety(stopwatch):
    for q, d in [(3, 2), (3, 3), (5, 2)]:
        F = field_of_order(q)
        for form in forms_both_classes(F, d):
            for r in F.nonzero():
                spec = RatioSpec(r, form)
                table = fourier_set_table(product_variety(spec))
                assert mismatches(table, closed_VQr_table(spec)) == [], (q, d, r.index)
    assert stopwatch() < 300


@pytest.mark.acceptance(5, "zero-sphere transform, both square classes of eps")
def test_criterion_05_zero_sphere(stopwatch):
    for q in (3, 5, 7):
        F = field_of_order(q)
        for d in (2, 3, 4):
            for form in forms_both_classes(F, d):
                table = fourier_set_table(sphere(form, 0))
                assert mismatches(table, closed_sphere0_table(form)) == [], (q, d, form.epsilon.index)
    assert stopwatch() < 120


@pytest.mark.acceptance(6, "counting lemma on random sets, spheres and diagonal varieties")
def test_criterion_06_counting_lemma(stopwatch):
    rng = np.random.default_rng(6)
    for q in (3, 5):
        F = field_of_order(q)
        for n in (2, 3):
            forms = forms_both_classes(F, n)
            varieties = [sphere(f, t) for f in forms for t in (0, 1)]
            varieties += [diagonal_variety(F, tuple(int(v) for v in rng.integers(1, q, n))) for _ in range(2)]
            for _ in range(50):
                S = random_subset(F, n, int(rng.integers(0, q**n + 1)), rng)
                for V in varieties:
                    assert verify_counting_lemma(S, V).holds
                for f in forms:
                    assert verify_counting_lemma(S, sphere(f, 0)).lhs == w_zero(S, f)
    assert stopwatch() < 120


@pytest.mark.acceptance(7, "0 <= w(0) <= bound, all three cases")
def test_criterion_07_w0_bounds(stopwatch):
    rng = np.random.default_rng(7)
    cases = set()
    for q in (3, 5):
        F = field_of_order(q)
        for d in (2, 3, 4):
            for form in forms_both_classes(F, d):
                for _ in range(200):
                    E = random_subset(F, d, int(rng.integers(1, q**d + 1)), rng)
                    rep = w0_bound_check(E, form)
                    assert 0 <= rep.w0 <= rep.bound, (q, d, rep)
                    assert rep.holds
                    cases.add(rep.case)
    assert cases == {"i", "ii", "iii"}
    assert stopwatch() < 120


@pytest.mark.acceptance(8, "case inequalities W(r) >= case RHS")
def test_criterion_08_case_inequalities(stopwatch):
    rng = np.random.default_rng(8)
    labels = set()
    for q in (3, 5):
        F = field_of_order(q)
        for d in (2, 3, 4):
            for form in forms_both_classes(F, d):
                for _ in range(50):
                    E = random_subset(F, d, int(rng.integers(1, q**d + 1)), rng)
                    sd = SpectralData(E, form)
                    hist = distance_histogram(E, form)
                    for r in F.nonzero():
                        label, rhs = case_rhs(E, form, r, sd)
                        W = w_from_histogram(hist, r).W
                        assert W >= rhs, (q, d, r.index, W, rhs)
                        assert rhs >= reduced_rhs(label, len(E), q, d, F.eta(r) == 1)
                        labels.add(label)
    assert labels == {"A", "B", "C"}
    assert stopwatch() < 600


def _theorem_sweep(q, d, sizes, part, forms, rng, trials=50):
    F = field_of_order(q)
    for form in forms:
        for _ in range(trials):
            E = random_subset(F, d, int(rng.integers(sizes[0], sizes[1] + 1)), rng)
            for r in F.nonzero():
                if part == "ii" and F.eta(r) != 1:
                    continue
                reps = [b for b in theorem_check(E, form, r) if b.part == part]
                assert len(reps) == 1
                rep = reps[0]
                assert rep.size_condition_met and rep.hypothesis_met
                assert rep.theorem_bound == {"i": Fraction(5, 48), "ii": Fraction(2, 45),
                                             "iii": Fraction(2, 363)}[part] * Fraction(len(E) ** 4, q)
                assert rep.W >= rep.theorem_bound, (q, d, r.index, rep)
                assert rep.passed


@pytest.mark.acceptance(9, "theorem part (i): W(r) >= 5|E|^4/(48q)")
def test_criterion_09_theorem_i(stopwatch):
    rng = np.random.default_rng(9)
    F5, F3 = field_of_order(5), field_of_order(3)
    _theorem_sweep(5, 2, (20, 25), "i", [QuadraticForm.euclidean(F5, 2), *forms_both_classes(F5, 2)], rng)
    _theorem_sweep(3, 4, (36, 50), "i", [QuadraticForm.euclidean(F3, 4), *forms_both_classes(F3, 4)], rng)
    assert stopwatch() < 600


@pytest.mark.acceptance(10, "theorem part (ii): W(r) >= 2|E|^4/(45q) for square r")
def test_criterion_10_theorem_ii(stopwatch):
    rng = np.random.default_rng(10)
    F = field_of_order(5)
    _theorem_sweep(5, 3, (34, 60), "ii", [QuadraticForm.euclidean(F, 3), *forms_both_classes(F, 3)], rng)
    assert stopwatch() < 300


@pytest.mark.acceptance(11, "theorem part (iii) and full quotient set")
def test_criterion_11_theorem_iii(stopwatch):
    rng = np.random.default_rng(11)
    F = field_of_order(3)
    forms = [QuadraticForm.euclidean(F, 3), *forms_both_classes(F, 3)]
    _theorem_sweep(3, 3, (17, 27), "iii", forms, rng)
    for form in forms:
        for _ in range(50):
            E = random_subset(F, 3, int(rng.integers(17, 28)), rng)
            assert quotient_set(E, form) == {0, 1, 2}
            cor = quotient_corollary_check(E, form)
            assert cor.assertions["iii"] and cor.passed
    assert stopwatch() < 60


@pytest.mark.acceptance(12, "sharpness constructions")
def test_criterion_12_sharpness(stopwatch):
    for q, d in [(5, 2), (7, 2), (3, 4)]:
        F = field_of_order(q)
        spec = build_sharpness_even(F, d)
        assert len(spec.points) == q ** (d // 2)
        quot = quotient_set(spec.points, spec.form)
        assert quot == F.squares() and len(quot) == (q + 1) // 2
        hist = distance_histogram(spec.points, spec.form)
        for r in F.nonzero():
            if F.eta(r) == -1:
                assert w_from_histogram(hist, r).W == 0
    for q in (3, 5):
        F = field_of_order(q)
        spec = build_sharpness_odd_iii(F, 3)
        assert len(spec.points) == q**2
        assert quotient_set(spec.points, spec.form) == F.squares()
    assert stopwatch() < 60


@pytest.mark.acceptance(13, "histogram counts equal quadruple enumeration")
def test_criterion_13_oracle(stopwatch):
    rng = np.random.default_rng(13)
    for q, d in [(3, 2), (5, 2), (3, 3)]:
        F = field_of_order(q)
        forms = forms_both_classes(F, d)
        for i in range(100):
            form = forms[i % 2]
            E = random_subset(F, d, int(rng.integers(0, min(QUADRUPLE_CAP, q**d) + 1)), rng)
            pts = [tuple(int(v) for v in x) for x in E.points]
            hist = distance_histogram(E, form)
            for r in F.nonzero():
                rep = w_from_histogram(hist, r)
                assert (rep.M, rep.W) == quadruple_counts(pts, form.coeff_indices, q, r.index)
    assert stopwatch() < 300


@pytest.mark.acceptance(14, "byte-identical reports across thread counts")
def test_criterion_14_determinism(tmp_path, capsys):
    runs = {
        "bounds": ["bounds", "--field", "5", "--dim", "3", "--trials", "8", "--sizes", "10:60", "--seed", "77"],
        "count": ["count", "--field", "9", "--dim", "2", "--set", "random:30", "--seed", "5"],
        "verify": ["verify", "--max-q", "5", "--max-n", "2", "--seed", "3"],
    }
    for name, args in runs.items():
        outputs = []
        for threads in (1, 2, 4):
            path = tmp_path / f"{name}-{threads}.json"
            assert main([*args, "--threads", str(threads), "--out", str(path)]) == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2], name
    capsys.readouterr()
