"""Distance histograms, the quadruple counts M(r) and W(r), and quotient sets.

w(t) counts ordered pairs (x, y) in E^2 with Q(x - y) = t.  Every quadruple count
used by the theorems reduces to one histogram:

    M(r) = #{(x, y, z, w) : Q(x - y) = r Q(z - w)} = sum_t w(r t) w(t)
    W(r) = M(r) - w(0)^2          (quadruples with ratio exactly r)
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cyclotomic import Cyclotomic
from .errors import DimensionMismatchError, DomainError, InternalConsistencyError
from .field import FieldElement, FiniteField
from .fourier import PointSet, all_points, character_counts, check_budget


@dataclass(frozen=True)
class DistanceHistogram:
    field: FiniteField
    counts: tuple[int, ...]

    def __getitem__(self, t) -> int:
        return self.counts[t.index if isinstance(t, FieldElement) else int(t)]

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class CountReport:
    r: int
    W: int
    M: int
    w0: int

    def __post_init__(self):
        if self.W != self.M - self.w0**2:
            raise InternalConsistencyError("W must equal M - w0^2")

    def to_dict(self) -> dict:
        return {"r": self.r, "W": self.W, "M": self.M, "w0": self.w0}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_dims(E: PointSet, form) -> None:
    if E.n != form.dim:
        raise DimensionMismatchError(f"set lives in dimension {E.n}, form has dimension {form.dim}")
    if E.field is not form.field:
        raise DimensionMismatchError("set and form are over different fields")


def pair_differences(E: PointSet) -> np.ndarray:
    """(|E|, |E|, n) array of x - y over ordered pairs."""
    sub = E.field.tables.sub
    pts = E.points
    return sub[pts[:, None, :], pts[None, :, :]]


def distance_histogram(E: PointSet, form) -> DistanceHistogram:
    _check_dims(E, form)
    q = E.field.q
    if len(E) == 0:
        return DistanceHistogram(E.field, (0,) * q)
    values = form.values(pair_differences(E))
    counts = np.bincount(values.ravel(), minlength=q)
    return DistanceHistogram(E.field, tuple(int(c) for c in counts))


def w_zero(E: PointSet, form) -> int:
    return distance_histogram(E, form)[0]


def _ratio(field: FiniteField, r) -> FieldElement:
    r = field(r)
    if not r:
        raise DomainError("r must be nonzero: W(r) counts Q(x-y)/Q(z-w) = r with Q(z-w) != 0")
    return r


def m_from_histogram(hist: DistanceHistogram, r) -> int:
    field = hist.field
    r = _ratio(field, r)
    mul = field.mul_index
    c = hist.counts
    return sum(c[mul(r.index, t)] * c[t] for t in range(field.q) if c[t])


def m_of_r(E: PointSet, form, r) -> int:
    return m_from_histogram(distance_histogram(E, form), r)


def w_from_histogram(hist: DistanceHistogram, r) -> CountReport:
    r = _ratio(hist.field, r)
    M = m_from_histogram(hist, r)
    w0 = hist.counts[0]
    return CountReport(r.index, M - w0 * w0, M, w0)


def w_of_r(E: PointSet, form, r) -> CountReport:
    return w_from_histogram(distance_histogram(E, form), r)


def all_ratio_reports(E: PointSet, form) -> list[CountReport]:
    hist = distance_histogram(E, form)
    return [w_from_histogram(hist, r) for r in hist.field.nonzero()]


def distance_set(E: PointSet, form) -> frozenset[int]:
    """Delta_Q(E) as canonical indices."""
    hist = distance_histogram(E, form)
    return frozenset(t for t, c in enumerate(hist.counts) if c)


def quotient_set(E: PointSet, form) -> frozenset[int]:
    """Delta_Q(E) / Delta_Q(E) as canonical indices.

    Nonzero r belongs iff W(r) > 0; 0 belongs iff some nonzero denominator exists,
    since then 0 = Q(x - x) / Q(z - w).
    """
    hist = distance_histogram(E, form)
    out = {r.index for r in hist.field.nonzero() if w_from_histogram(hist, r).W > 0}
    if any(hist.counts[1:]):
        out.add(0)
    return frozenset(out)


def ratio_sum_identity(hist: DistanceHistogram) -> tuple[int, int]:
    """(sum_{r != 0} sum_{t != 0} w(r t) w(t), (sum_{t != 0} w(t))^2); always equal."""
    field = hist.field
    c = hist.counts
    lhs = 0
    for r in range(1, field.q):
        lhs += sum(c[field.mul_index(r, t)] * c[t] for t in range(1, field.q))
    off = sum(c[1:])
    return lhs, off * off


# -- general counting lemma ------------------------------------------------------

@dataclass(frozen=True)
class CountingLemmaReport:
    lhs: int
    rhs: int
    n: int
    q: int

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def _cyclic_product_sum(a: np.ndarray, b: np.ndarray, p: int) -> list[int]:
    """sum_M a[M] * b[M] with a, b length-p exponent vectors; returns exponent vector."""
    out = [0] * p
    a_obj = a.astype(object)
    b_obj = b.astype(object)
    for i in range(p):
        for j in range(p):
            out[(i + j) % p] += int((a_obj[:, i] * b_obj[:, j]).sum())
    return out


def verify_counting_lemma(S: PointSet, V: PointSet, budget: int | None = None) -> CountingLemmaReport:
    """Pair count #{(x, y) in S^2 : x - y in V} against q^-n sum_M (q^n V^)(M) |(q^n S^)(M)|^2."""
    if S.n != V.n or S.field is not V.field:
        raise DimensionMismatchError("set and variety must share the ambient space")
    field, n, q, p = S.field, S.n, S.field.q, S.field.p
    check_budget(q, n, budget, "counting lemma")
    if len(S):
        diffs = pair_differences(S)
        weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
        lhs = int(V.mask[diffs @ weights].sum())
    else:
        lhs = 0

    freqs = all_points(q, n)
    v_counts = character_counts(field, V.points, freqs)
    s_counts = character_counts(field, S.points, freqs)
    # |(q^n S^)(M)|^2 as exponent vectors: autocorrelation of the counts.
    norms = np.stack([(np.roll(s_counts, -s, axis=1) * s_counts).sum(axis=1) for s in range(p)], axis=1)
    total = Cyclotomic.from_exponent_counts(p, _cyclic_product_sum(v_counts, norms, p))
    if not total.is_integer():
        raise InternalConsistencyError(f"Fourier side is not rational: {total!r}")
    value = total.to_int()
    if value % q**n:
        raise InternalConsistencyError(f"Fourier side {value} not divisible by q^n = {q**n}")
    return CountingLemmaReport(lhs, value // q**n, n, q)
