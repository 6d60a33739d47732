"""Lower bounds for W(r), the null-distance bounds on w(0), and sharpness examples.

All comparisons are exact: Fourier-side sums are reduced to integers in
Z[zeta_p] and combined as :class:`fractions.Fraction`.  Thresholds involving
q^(d/2) with d odd are compared after squaring.

Fourier-side quantities, with F(m) = q^d E^(m) and Q* the dual standard form:

    dual_zero_sum   = sum_{m : Q*(m) = 0} |F(m)|^2
    ratio_sum(r)    = sum_{(m, m') : Q*(m') = r Q*(m)} |F(m)|^2 |F(m')|^2

Both sums run over sets closed under scaling by F_p^*, hence are Galois
invariant and reduce to rational integers.  Individual |F(m)|^2 need not.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import __version__
from .counting import CountReport, distance_histogram, quotient_set, w_from_histogram
from .cyclotomic import Cyclotomic
from .errors import DomainError, InternalConsistencyError
from .field import FieldElement, FiniteField
from .forms import QuadraticForm, StandardForm, as_standard, matrix_inverse, require_theorem_dimension
from .fourier import PointSet, all_points, closed_sphere0_table, fourier_set_table, reduce_to_integer

THEOREM_CONSTANTS = {"i": Fraction(5, 48), "ii": Fraction(2, 45), "iii": Fraction(2, 363)}


def to_standard(E: PointSet, form) -> tuple[PointSet, StandardForm]:
    """Move (E, Q) to (C^-1 E, Q') with Q' the standard model; distances are preserved."""
    if isinstance(form, StandardForm):
        return E, form
    std = as_standard(form)
    return E.image(matrix_inverse(std.basis_change)), std


class SpectralData:
    """Fourier-side sums of a set E against a standard form."""

    def __init__(self, E: PointSet, form: StandardForm, budget: int | None = None):
        self.field = E.field
        self.form = form
        self.size = len(E)
        table = fourier_set_table(E, budget)
        self.norms = table.norms()
        p, q = self.field.p, self.field.q
        dual_vals = form.dual().values(all_points(q, form.dim))
        sums = np.zeros((q, p), dtype=object)
        for t in range(q):
            sel = dual_vals == t
            if sel.any():
                sums[t] = self.norms[sel].astype(object).sum(axis=0)
        self.sphere_sums = [Cyclotomic.from_exponent_counts(p, [int(v) for v in row]) for row in sums]

    def dual_zero_sum(self) -> int:
        s = self.sphere_sums[0]
        if not s.is_integer():
            raise InternalConsistencyError(f"dual zero-sphere sum is not rational: {s!r}")
        return s.to_int()

    def ratio_sum(self, r) -> int:
        field = self.field
        r = field(r)
        total = Cyclotomic.zero(field.p)
        for t in range(field.q):
            total = total + self.sphere_sums[t] * self.sphere_sums[field.mul_index(r.index, t)]
        if not total.is_integer():
            raise InternalConsistencyError(f"ratio-variety sum is not rational: {total!r}")
        return total.to_int()

    def fourier_m(self, r) -> int:
        """M(r) = |E|^4/q + tw (q^-d ratio_sum(r) - q^(d-1) |E|^2), tw = 1 (d even) or eta(r) (d odd)."""
        field, q, d, s = self.field, self.field.q, self.form.dim, self.size
        r = field(r)
        twist = 1 if d % 2 == 0 else field.eta(r)
        value = Fraction(s**4, q) + twist * (Fraction(self.ratio_sum(r), q**d) - q ** (d - 1) * s * s)
        if value.denominator != 1:
            raise InternalConsistencyError(f"Fourier-side M({r.index}) = {value} is not an integer")
        return int(value)

    def fourier_w0(self) -> int:
        """w(0) recomputed from the closed form of the zero sphere's transform."""
        closed = closed_sphere0_table(self.form).astype(object)
        counts = (self.norms.astype(object) * closed[:, None]).sum(axis=0)
        value = reduce_to_integer(counts, self.field.p, "w(0) Fourier side")
        q_d = self.field.q**self.form.dim
        if value % q_d:
            raise InternalConsistencyError("w(0) Fourier side not divisible by q^d")
        return value // q_d


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- w(0) bounds --------------------------------------------------------------------

@dataclass(frozen=True)
class W0BoundReport:
    case: str
    w0: int
    bound: Fraction
    fourier_w0: int

    @property
    def holds(self) -> bool:
        return 0 <= self.w0 <= self.bound and self.fourier_w0 == self.w0

    def to_dict(self) -> dict:
        return {"case": self.case, "w0": self.w0, "bound": _fmt(self.bound),
                "fourier_w0": self.fourier_w0, "holds": self.holds}


def w0_bound(size: int, form: StandardForm, spectral: SpectralData | None) -> tuple[str, Fraction]:
    q, d = form.field.q, form.dim
    base = Fraction(size * size, q)
    if d % 2 == 0 and form.eta_epsilon() == 1:
        return "i", base + Fraction(spectral.dual_zero_sum(), q ** (d // 2))
    if d % 2 == 0:
        return "ii", base + _qpow(q, d - 2, 2) * size
    return "iii", base + _qpow(q, d - 1, 2) * size


def _qpow(q: int, num: int, den: int) -> Fraction:
    """q^(num/den) for num/den an integer or a negative integer (exact)."""
    e = Fraction(num, den)
    if e.denominator != 1:
        raise ValueError(f"q^{e} is irrational")
    k = int(e)
    return Fraction(q**k) if k >= 0 else Fraction(1, q**-k)


def w0_bound_check(E: PointSet, form, spectral: SpectralData | None = None) -> W0BoundReport:
    E, form = to_standard(E, form)
    spectral = spectral or SpectralData(E, form)
    w0 = distance_histogram(E, form)[0]
    case, bound = w0_bound(len(E), form, spectral)
    return W0BoundReport(case, w0, bound, spectral.fourier_w0())


# -- case inequalities and the theorem --------------------------------------------

def case_label(form: StandardForm) -> str:
    if form.dim % 2:
        return "C"
    return "A" if form.eta_epsilon() == 1 else "B"


def case_rhs(E: PointSet, form, r, spectral: SpectralData | None = None) -> tuple[str, Fraction]:
    """Exact right-hand side of the case inequality W(r) >= ... applicable to (E, Q)."""
    E, form = to_standard(E, form)
    field = form.field
    r = field(r)
    if not r:
        raise DomainError("r must be nonzero")
    spectral = spectral or SpectralData(E, form)
    q, d, s = field.q, form.dim, len(E)
    label = case_label(form)
    twist = 1 if label != "C" else field.eta(r)
    main = Fraction(s**4, q) + twist * Fraction(spectral.ratio_sum(r), q**d) - twist * q ** (d - 1) * s * s
    if label == "A":
        w0_term = Fraction(s * s, q) + Fraction(spectral.dual_zero_sum(), q ** (d // 2))
    elif label == "B":
        w0_term = Fraction(s * s, q) + _qpow(q, d - 2, 2) * s
    else:
        w0_term = Fraction(s * s, q) + _qpow(q, d - 1, 2) * s
    return label, main - w0_term**2


def reduced_rhs(label: str, size: int, q: int, d: int, r_is_square: bool) -> Fraction:
    """The Fourier-free lower bounds obtained from the case inequalities before splitting the constant."""
    s = Fraction(size)
    base = s**4 / q - s**4 / q**2
    if label == "A":
        return base - q ** (d - 1) * s**2 - 2 * _qpow(q, d - 2, 2) * s**3
    if label == "B":
        return base - q ** (d - 1) * s**2 - q ** (d - 2) * s**2 - 2 * _qpow(q, d - 4, 2) * s**3
    if r_is_square:
        return base + s**4 / q**d - 2 * q ** (d - 1) * s**2 - 2 * _qpow(q, d - 3, 2) * s**3
    return base - q**d * s**2 - 2 * _qpow(q, d - 3, 2) * s**3


def size_condition(part: str, size: int, q: int, d: int) -> bool:
    """|E| >= 4 q^(d/2), 3 q^(d/2), or (11/6) q^((d+1)/2), compared in integers."""
    if part == "i":
        return size * size >= 16 * q**d
    if part == "ii":
        return size * size >= 9 * q**d
    if part == "iii":
        return 36 * size * size >= 121 * q ** (d + 1)
    raise ValueError(f"unknown theorem part {part!r}")


def minimum_size(part: str, q: int, d: int) -> int:
    """Smallest |E| meeting the size condition of ``part`` (may exceed q^d)."""
    start = {"i": 16 * q**d, "ii": 9 * q**d, "iii": 121 * q ** (d + 1) // 36}[part]
    size = max(math.isqrt(start) - 2, 0)
    while not size_condition(part, size, q, d):
        size += 1
    return size


def theorem_bound(part: str, size: int, q: int) -> Fraction:
    return THEOREM_CONSTANTS[part] * Fraction(size**4, q)


@dataclass(frozen=True)
class BoundReport:
    part: str
    case: str
    r: int
    W: int
    theorem_bound: Fraction
    case_rhs: Fraction
    reduced_rhs: Fraction
    size_condition_met: bool
    hypothesis_met: bool

    @property
    def case_holds(self) -> bool:
        return self.W >= self.case_rhs

    @property
    def reduced_holds(self) -> bool:
        return self.case_rhs >= self.reduced_rhs

    @property
    def bound_holds(self) -> bool:
        return self.W >= self.theorem_bound

    @property
    def applies(self) -> bool:
        return self.size_condition_met and self.hypothesis_met

    @property
    def passed(self) -> bool:
        return self.case_holds and self.reduced_holds and (self.bound_holds or not self.applies)

    def to_dict(self) -> dict:
        return {
            "part": self.part, "case": self.case, "r": self.r, "W": self.W,
            "theorem_bound": _fmt(self.theorem_bound), "case_rhs": _fmt(self.case_rhs),
            "reduced_rhs": _fmt(self.reduced_rhs),
            "size_condition_met": self.size_condition_met, "hypothesis_met": self.hypothesis_met,
            "case_holds": self.case_holds, "bound_holds": self.bound_holds, "passed": self.passed,
        }


def theorem_parts(form) -> list[str]:
    return ["i"] if form.dim % 2 == 0 else ["ii", "iii"]


def theorem_check(E: PointSet, form, r, spectral: SpectralData | None = None,
                  report: CountReport | None = None) -> list[BoundReport]:
    """Evaluate every applicable part of the theorem at one nonzero r."""
    require_theorem_dimension(form)
    E, form = to_standard(E, form)
    field = form.field
    r = field(r)
    if not r:
        raise DomainError("r must be nonzero")
    spectral = spectral or SpectralData(E, form)
    if report is None:
        report = w_from_histogram(distance_histogram(E, form), r)
    q, d, s = field.q, form.dim, len(E)
    label, rhs = case_rhs(E, form, r, spectral)
    square = field.eta(r) == 1
    reduced = reduced_rhs(label, s, q, d, square)
    out = []
    for part in theorem_parts(form):
        out.append(BoundReport(
            part=part, case=label, r=r.index, W=report.W,
            theorem_bound=theorem_bound(part, s, q), case_rhs=rhs, reduced_rhs=reduced,
            size_condition_met=size_condition(part, s, q, d),
            hypothesis_met=square if part == "ii" else True,
        ))
    return out


# -- quotient-set corollary -------------------------------------------------------

@dataclass(frozen=True)
class CorollaryReport:
    quotient: frozenset
    conditions: dict
    assertions: dict

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def to_dict(self) -> dict:
        return {"quotient": sorted(self.quotient), "conditions": self.conditions,
                "assertions": self.assertions, "passed": self.passed}


def quotient_corollary_check(E: PointSet, form) -> CorollaryReport:
    require_theorem_dimension(form)
    field, q, d, s = form.field, form.field.q, form.dim, len(E)
    quot = quotient_set(E, form)
    everything = frozenset(range(q))
    conditions, assertions = {}, {}
    for part in theorem_parts(form):
        met = size_condition(part, s, q, d)
        conditions[part] = met
        if met:
            if part == "ii":
                assertions[part] = field.squares() <= quot
            else:
                assertions[part] = quot == everything
    return CorollaryReport(quot, conditions, assertions)


# -- sharpness constructions --------------------------------------------------------

def paired_points(field: FiniteField, k: int) -> np.ndarray:
    """All (t_1, t_1, ..., t_k, t_k) in F_q^(2k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    base = all_points(field.q, k)
    return np.repeat(base, 2, axis=1)


def _cartesian(field: FiniteField, head: np.ndarray, tails: list[np.ndarray]) -> PointSet:
    rows = head
    for tail in tails:
        rows = np.concatenate([np.repeat(rows, len(tail), axis=0),
                               np.tile(tail.reshape(len(tail), -1), (len(rows), 1))], axis=1)
    n = rows.shape[1]
    return PointSet.from_indices(field, n, (rows @ field.q ** np.arange(n - 1, -1, -1)).tolist())


@dataclass(frozen=True)
class SharpnessSpec:
    kind: str
    form: StandardForm
    points: PointSet
    delta: float | None = None
    params: dict = dc_field(default_factory=dict)

    def verify(self) -> dict:
        """Direct computation of the quotient set and the vanishing W(r)."""
        field, E, form = self.form.field, self.points, self.form
        q, d = field.q, form.dim
        hist = distance_histogram(E, form)
        quot = quotient_set(E, form)
        squares = field.squares()
        dist = frozenset(t for t, c in enumerate(hist.counts) if c)
        zero_ratios = [r.index for r in field.nonzero() if w_from_histogram(hist, r).W == 0]
        out = {
            "kind": self.kind, "q": q, "d": d, "epsilon": form.epsilon.index,
            "size": len(E), "distance_set_size": len(dist),
            "quotient": sorted(quot), "squares": sorted(squares),
            "quotient_size": len(quot), "squares_size": len(squares),
            "quotient_is_squares": quot == squares,
            "quotient_within_squares": quot <= squares,
            "zero_W_ratios": zero_ratios,
            "nonsquares_have_zero_W": all(r in zero_ratios for r in range(1, q) if r not in squares),
        }
        out.update(self.params)
        if self.kind == "even":
            out["expected_size"] = q ** (d // 2)
        elif self.kind == "odd-iii":
            out["expected_size"] = q ** ((d + 1) // 2)
        else:
            out["expected_size"] = self.params["H_size"] * self.params["A_size"]
            out["strict_inclusion"] = quot < squares
        return out


def _standard(field: FiniteField, d: int, epsilon) -> StandardForm:
    return StandardForm.make(field, d, epsilon if isinstance(epsilon, FieldElement) else field(epsilon))


def build_sharpness_even(field: FiniteField, d: int, epsilon=1) -> SharpnessSpec:
    """E = E_1 x F_q x {0} (d >= 4) or F_q x {0} (d = 2)."""
    if d < 2 or d % 2:
        raise DomainError("the even-dimensional construction needs even d >= 2")
    form = _standard(field, d, epsilon)
    E1 = paired_points(field, (d - 2) // 2)
    Fq = np.arange(field.q, dtype=np.int64)[:, None]
    E = _cartesian(field, E1, [Fq, np.zeros((1, 1), dtype=np.int64)])
    return SharpnessSpec("even", form, E)


def build_sharpness_odd_iii(field: FiniteField, d: int, epsilon=1) -> SharpnessSpec:
    """E = H x F_q with H the paired-coordinate set in F_q^(d-1)."""
    if d < 3 or d % 2 == 0:
        raise DomainError("the odd-dimensional construction needs odd d >= 3")
    form = _standard(field, d, epsilon)
    H = paired_points(field, (d - 1) // 2)
    E = _cartesian(field, H, [np.arange(field.q, dtype=np.int64)[:, None]])
    return SharpnessSpec("odd-iii", form, E, params={"H_size": len(H)})


def progression_length(p: int, delta: float) -> int:
    return math.ceil(p ** (0.5 - delta))


def build_sharpness_odd_ii(field: FiniteField, d: int, delta: float, epsilon=1) -> SharpnessSpec:
    """E_delta = H x A_delta, A_delta = {sum b_i theta^i : b_i in B_delta}, B_delta = {0, ..., L-1}."""
    if d < 3 or d % 2 == 0:
        raise DomainError("the odd-dimensional construction needs odd d >= 3")
    if not 0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
    form = _standard(field, d, epsilon)
    L = progression_length(field.p, delta)
    B = list(range(L))
    digits = all_points(L, field.ell)[:, ::-1]  # column i holds b_i
    A = np.unique(digits @ (field.p ** np.arange(field.ell, dtype=np.int64)))
    H = paired_points(field, (d - 1) // 2)
    E = _cartesian(field, H, [A[:, None]])
    diff_B = {(a - b) % field.p for a in B for b in B}
    params = {"delta": delta, "B_size": L, "B_difference_size": len(diff_B),
              "A_size": int(len(A)), "H_size": len(H)}
    return SharpnessSpec("odd-ii", form, E, delta=delta, params=params)


# -- seeded sweeps ---------------------------------------------------------------------

def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def random_subset(field: FiniteField, n: int, size: int, rng: np.random.Generator) -> PointSet:
    total = field.q**n
    if not 0 <= size <= total:
        raise ValueError(f"cannot draw {size} points from F_{field.q}^{n}")
    idx = rng.choice(total, size=size, replace=False)
    return PointSet.from_indices(field, n, np.sort(idx).tolist())


def evaluate_set(E: PointSet, form, ratios=None) -> dict:
    """Every bound check for one set: w(0), each r's case/theorem report, the corollary."""
    E, form = to_standard(E, form)
    spectral = SpectralData(E, form)
    hist = distance_histogram(E, form)
    field = form.field
    ratios = field.nonzero() if ratios is None else [field(r) for r in ratios]
    bounds = []
    for r in ratios:
        rep = w_from_histogram(hist, r)
        bounds.extend(theorem_check(E, form, r, spectral, rep))
    w0 = w0_bound_check(E, form, spectral)
    cor = quotient_corollary_check(E, form)
    return {"size": len(E), "w0": w0, "bounds": bounds, "corollary": cor}


def evaluation_report(res: dict) -> dict:
    return {
        "size": res["size"],
        "w0": res["w0"].to_dict(),
        "bounds": [b.to_dict() for b in res["bounds"]],
        "corollary": res["corollary"].to_dict(),
        "passed": res["w0"].holds and res["corollary"].passed and all(b.passed for b in res["bounds"]),
    }


def bounds_sweep(field: FiniteField, form, sizes: tuple[int, int], trials: int, seed: int,
                 threads: int = 1) -> dict:
    """Random sets of size in [lo, hi]; trial i draws from the stream (seed, i).

    Points are drawn and reported in the coordinates of ``form``.
    """
    require_theorem_dimension(form)
    std = as_standard(form)
    lo, hi = sizes
    if not 0 <= lo <= hi <= field.q**std.dim:
        raise ValueError(f"size range {lo}:{hi} must satisfy 0 <= lo <= hi <= q^d = {field.q**std.dim}")

    def run(i: int) -> dict:
        rng = trial_rng(seed, i)
        size = int(rng.integers(lo, hi + 1))
        E = random_subset(field, std.dim, size, rng)
        res = evaluate_set(E, form)
        return {"trial": i, "points": E.indices.tolist(), **evaluation_report(res)}

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(run, range(trials)))
    return {
        "field": field.spec_string(), "form": std.describe(), "seed": seed,
        "sizes": [lo, hi], "trials": results,
        "aggregate_pass": all(t["passed"] for t in results), "version": __version__,
    }
