"""Exact identity suites over a grid of fields and dimensions.

Each suite returns a list of :class:`Failure` records; an empty list means every
identity held exactly.  Failures carry the offending (q, n, a, m) witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .counting import distance_histogram, verify_counting_lemma
from .field import (
    FiniteField,
    completed_square_sum,
    completed_square_sum_bruteforce,
    eta_weighted_inverse_sum,
    eta_weighted_inverse_sum_bruteforce,
    field_of_order,
    gauss_sum,
    is_prime,
)
from .forms import StandardForm
from .fourier import (
    PointSet,
    RatioSpec,
    all_points,
    check_budget,
    closed_H_table,
    closed_sphere0_table,
    closed_VQr_table,
    diagonal_variety,
    fourier_set_table,
    mismatches,
    product_variety,
    sphere,
)


@dataclass(frozen=True)
class Failure:
    suite: str
    q: int
    n: int
    a: tuple = ()
    m: tuple = ()
    detail: str = ""

    def __str__(self):
        return f"FAIL {self.suite}: q={self.q} n={self.n} a={self.a} m={self.m} {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return {"suite": self.suite, "q": self.q, "n": self.n, "a": list(self.a),
                "m": list(self.m), "detail": self.detail}


@dataclass
class SuiteResult:
    suite: str
    q: int
    n: int
    checks: int = 0
    failures: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"suite": self.suite, "q": self.q, "n": self.n, "checks": self.checks,
                "passed": self.passed, "failures": [f.to_dict() for f in self.failures]}


def odd_prime_powers(max_q: int) -> list[int]:
    out = []
    for q in range(3, max_q + 1, 2):
        for p in range(3, q + 1, 2):
            if is_prime(p) and q % p == 0:
                k = q
                while k % p == 0:
                    k //= p
                if k == 1:
                    out.append(q)
                break
    return out


def _point(q: int, n: int, index: int) -> tuple:
    return tuple(int(c) for c in all_points(q, n)[index])


# -- field-level identities ---------------------------------------------------------

def suite_gauss(field: FiniteField) -> SuiteResult:
    res = SuiteResult("gauss", field.q, 1)
    G = gauss_sum(field)
    q, eta_m1 = field.q, field.eta(field.integer(-1))
    res.checks = 2
    if G * G != eta_m1 * q:
        res.failures.append(Failure("gauss", q, 1, detail=f"G^2 = {G * G!r}, expected {eta_m1 * q}"))
    if G * G.conj() != q:
        res.failures.append(Failure("gauss", q, 1, detail=f"G conj(G) = {G * G.conj()!r}"))
    return res


def suite_character_orthogonality(field: FiniteField, n: int, budget: int | None = None) -> SuiteResult:
    """sum_x chi(m.x) = q^n [m = 0], and sum_{t != 0} eta(a t) = 0."""
    res = SuiteResult("orthogonality", field.q, n)
    table = fourier_set_table(PointSet.full(field, n), budget)
    expected = np.zeros(field.q**n, dtype=np.int64)
    expected[0] = field.q**n
    for i in mismatches(table, expected):
        res.failures.append(Failure("orthogonality", field.q, n, m=_point(field.q, n, i)))
    res.checks = len(expected)
    if n == 1:
        eta = field.eta_table
        for a in range(1, field.q):
            res.checks += 1
            total = sum(int(eta[field.mul_index(a, t)]) for t in range(1, field.q))
            if total:
                res.failures.append(Failure("orthogonality", field.q, 1, a=(a,), detail=f"sum eta(at) = {total}"))
    return res


def suite_completed_square(field: FiniteField) -> SuiteResult:
    res = SuiteResult("completed-square", field.q, 1)
    for a, b in itertools.product(field.nonzero(), field.elements()):
        res.checks += 1
        if completed_square_sum(a, b) != completed_square_sum_bruteforce(a, b):
            res.failures.append(Failure("completed-square", field.q, 1, a=(a.index, b.index)))
    for b in field.nonzero():
        res.checks += 1
        if eta_weighted_inverse_sum(b) != eta_weighted_inverse_sum_bruteforce(b):
            res.failures.append(Failure("eta-inverse-sum", field.q, 1, a=(b.index,)))
    return res


# -- closed-form Fourier transforms -------------------------------------------------------

def coefficient_vectors(field: FiniteField, n: int, samples: int, rng: np.random.Generator) -> list[tuple]:
    """All of (F_q^*)^n when there are at most ``samples`` of them, else a seeded sample."""
    total = (field.q - 1) ** n
    if total <= samples:
        return [tuple(c) for c in itertools.product(range(1, field.q), repeat=n)]
    return [tuple(int(v) for v in rng.integers(1, field.q, size=n)) for _ in range(samples)]


def suite_diagonal_variety(field: FiniteField, n: int, coeffs: list[tuple], budget: int | None = None,
                           inject_fault: bool = False) -> SuiteResult:
    res = SuiteResult("diagonal-variety", field.q, n)
    for a in coeffs:
        table = fourier_set_table(diagonal_variety(field, a), budget)
        closed = closed_H_table(field, a, _sign=-1 if inject_fault else 1)
        res.checks += len(closed)
        bad = mismatches(table, closed)
        if bad:
            m = _point(field.q, n, bad[0])
            got = table.value(bad[0]).value
            res.failures.append(Failure("diagonal-variety", field.q, n, a=a, m=m,
                                        detail=f"brute force {got!r} != closed form {int(closed[bad[0]])}"))
    return res


def epsilon_classes(field: FiniteField) -> list:
    return [field.one, field.smallest_nonsquare]


def suite_ratio_variety(field: FiniteField, d: int, budget: int | None = None) -> SuiteResult:
    res = SuiteResult("ratio-variety", field.q, 2 * d)
    for eps in epsilon_classes(field):
        form = StandardForm.make(field, d, eps)
        for r in field.nonzero():
            spec = RatioSpec(r, form)
            table = fourier_set_table(product_variety(spec), budget)
            closed = closed_VQr_table(spec)
            res.checks += len(closed)
            bad = mismatches(table, closed)
            if bad:
                res.failures.append(Failure("ratio-variety", field.q, 2 * d, a=tuple(c.index for c in spec.coeffs),
                                            m=_point(field.q, 2 * d, bad[0]), detail=f"r={r.index}"))
    return res


def suite_zero_sphere(field: FiniteField, d: int, budget: int | None = None) -> SuiteResult:
    res = SuiteResult("zero-sphere", field.q, d)
    for eps in epsilon_classes(field):
        form = StandardForm.make(field, d, eps)
        table = fourier_set_table(sphere(form, 0), budget)
        closed = closed_sphere0_table(form)
        res.checks += len(closed)
        bad = mismatches(table, closed)
        if bad:
            res.failures.append(Failure("zero-sphere", field.q, d, a=form.coeff_indices,
                                        m=_point(field.q, d, bad[0]), detail=f"eps={eps.index}"))
    return res


def suite_plancherel(field: FiniteField, n: int, sets: list[PointSet], budget: int | None = None) -> SuiteResult:
    res = SuiteResult("plancherel", field.q, n)
    for S in sets:
        res.checks += 1
        total = fourier_set_table(S, budget).plancherel_sum()
        if total != field.q**n * len(S):
            res.failures.append(Failure("plancherel", field.q, n, detail=f"|S|={len(S)} sum={total!r}"))
    return res


def suite_counting_lemma(field: FiniteField, n: int, sets: list[PointSet], coeffs: list[tuple],
                         budget: int | None = None) -> SuiteResult:
    """Pair counts against the Fourier side for H_a varieties and zero spheres."""
    res = SuiteResult("counting-lemma", field.q, n)
    varieties = [(a, diagonal_variety(field, a)) for a in coeffs]
    forms = [StandardForm.make(field, n, eps) for eps in epsilon_classes(field)]
    for S in sets:
        for a, V in varieties:
            res.checks += 1
            rep = verify_counting_lemma(S, V, budget)
            if not rep.holds:
                res.failures.append(Failure("counting-lemma", field.q, n, a=tuple(a),
                                            detail=f"|S|={len(S)} pairs={rep.lhs} fourier={rep.rhs}"))
        for f in forms:
            res.checks += 1
            rep = verify_counting_lemma(S, sphere(f, 0), budget)
            if not rep.holds or rep.lhs != distance_histogram(S, f)[0]:
                res.failures.append(Failure("counting-lemma", field.q, n, a=f.coeff_indices,
                                            detail=f"w(0) specialization: pairs={rep.lhs} fourier={rep.rhs}"))
    return res


def random_set(field: FiniteField, n: int, rng: np.random.Generator, max_size: int) -> PointSet:
    total = field.q**n
    size = int(rng.integers(0, min(total, max_size) + 1))
    return PointSet.from_indices(field, n, rng.choice(total, size=size, replace=False).tolist())


# -- grid driver ----------------------------------------------------------------------

@dataclass(frozen=True)
class VerifyGrid:
    max_q: int = 9
    max_n: int = 4
    samples: int = 20
    sets: int = 5
    seed: int = 0
    max_set_size: int = 300

    def fields(self) -> list[FiniteField]:
        return [field_of_order(q) for q in odd_prime_powers(self.max_q)]


def run_grid(grid: VerifyGrid, budget: int | None = None, inject_fault: bool = False, progress=None,
             fields: list[FiniteField] | None = None) -> list[SuiteResult]:
    """Every suite on every (q, n) of the grid; the budget is checked before any work starts."""
    fields = grid.fields() if fields is None else fields
    for F in fields:
        check_budget(F.q, grid.max_n, budget, f"verify grid at q={F.q}, n={grid.max_n}")
    results = []

    def record(res: SuiteResult):
        results.append(res)
        if progress:
            progress(res)

    for F in fields:
        rng = np.random.default_rng([grid.seed, F.q])
        record(suite_gauss(F))
        record(suite_completed_square(F))
        for n in range(1, min(grid.max_n, 3) + 1):
            record(suite_character_orthogonality(F, n, budget))
        for n in range(2, grid.max_n + 1):
            coeffs = coefficient_vectors(F, n, grid.samples, rng)
            record(suite_diagonal_variety(F, n, coeffs, budget, inject_fault))
            record(suite_zero_sphere(F, n, budget))
            sets = [random_set(F, n, rng, grid.max_set_size) for _ in range(grid.sets)]
            record(suite_plancherel(F, n, sets, budget))
            record(suite_counting_lemma(F, n, sets, coeffs[:3], budget))
        for d in range(1, grid.max_n // 2 + 1):
            record(suite_ratio_variety(F, d, budget))
    return results
