"""Field-level Morse quantities over sampled Hermitian pencils.

A PencilField is a finite weighted sample of pencil data (R_x, L_x); the
operations here aggregate per-sample chamber integrals into spectral
density coefficients, weak and strong bound prefactors, the asymptotic
Riemann-Roch-Hirzebruch total, the X(q) distance certificate, and the
positivity / bigness verdicts.

All reductions over sample points run in input order with math.fsum, so
reports are byte-reproducible regardless of the thread count used for
the per-point chamber work.
"""

from __future__ import annotations

import math
import numbers
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

from .errors import DegeneratePencilError, InputError
from .pencil import HermitianMatrix, _decompose, inertia

__all__ = [
    "REASON_INCONCLUSIVE",
    "REASON_POSITIVE",
    "REASON_SEMIPOSITIVE",
    "Bigness",
    "MorseReport",
    "PencilField",
    "PencilPoint",
    "Positivity",
    "XqResult",
    "bigness_verdict",
    "build_morse_report",
    "check_Xq",
    "classify_bundle",
    "density_q",
    "rrh_total",
    "strong_sums",
    "weak_bound",
]

_T = TypeVar("_T")

TWO_PI = 2.0 * math.pi

REASON_POSITIVE = "curvature positive definite at every sample point"
REASON_SEMIPOSITIVE = (
    "curvature semi-positive across the pencil window and positive definite "
    "at some sample (Grauert-Riemenschneider criterion)"
)
REASON_INCONCLUSIVE = "criteria inconclusive"


@dataclass(frozen=True)
class PencilPoint:
    """One sample: curvature R, Levi form L, and its volume mass."""

    label: str
    r: HermitianMatrix
    el: HermitianMatrix
    weight: float = 1.0

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise InputError("sample label must be a nonempty string")
        if self.r.dim != self.el.dim:
            raise InputError(
                "sample %r: R has dim %d but L has dim %d"
                % (self.label, self.r.dim, self.el.dim)
            )
        w = float(self.weight)
        if not (math.isfinite(w) and w > 0.0):
            raise InputError("sample %r: weight must be a positive real, got %r" % (self.label, self.weight))
        object.__setattr__(self, "weight", w)


@dataclass(frozen=True)
class PencilField:
    """Weighted sample field with shared fiber dimension d = n - 1."""

    n: int
    delta: float
    points: List[PencilPoint]

    def __post_init__(self):
        if not isinstance(self.n, numbers.Integral) or self.n < 2:
            raise InputError("n must be an integer >= 2, got %r" % (self.n,))
        object.__setattr__(self, "n", int(self.n))
        dlt = float(self.delta)
        if not (math.isfinite(dlt) and dlt > 0.0):
            raise InputError("field delta must be a positive real, got %r" % (self.delta,))
        object.__setattr__(self, "delta", dlt)
        pts = list(self.points)
        if not pts:
            raise InputError("field needs at least one sample point")
        d = self.n - 1
        for p in pts:
            if p.r.dim != d:
                raise InputError(
                    "sample %r has pencil dim %d, expected n-1 = %d" % (p.label, p.r.dim, d)
                )
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.n - 1


@dataclass(frozen=True)
class XqResult:
    holds: bool
    max_delta: float


@dataclass(frozen=True)
class Positivity:
    positive_everywhere: bool
    semi_positive_delta: Optional[float]
    positive_somewhere: bool


@dataclass(frozen=True)
class Bigness:
    big: bool
    reason: str


@dataclass(frozen=True)
class MorseReport:
    n: int
    delta: float
    densities: List[float]
    strong_sums: List[float]
    rrh_total: float
    xq: List[XqResult]
    positivity: Positivity
    bigness: Bigness


def _map_points(fn: Callable[[PencilPoint], _T], points: Sequence[PencilPoint], threads: Optional[int]) -> List[_T]:
    if threads is None or threads <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, points))


def _analyze(point: PencilPoint, delta: float, tol: Optional[float] = None):
    try:
        return _decompose(point.r, point.el, delta, tol)
    except DegeneratePencilError as exc:
        raise DegeneratePencilError("sample %r: %s" % (point.label, exc)) from exc


def _check_delta(field: PencilField, delta: float) -> float:
    delta = float(delta)
    if not (math.isfinite(delta) and 0.0 < delta <= field.delta):
        raise InputError(
            "delta must lie in (0, %g] for this field, got %g" % (field.delta, delta)
        )
    return delta


def _check_q(field: PencilField, q: int) -> int:
    if not isinstance(q, numbers.Integral) or not 0 <= q <= field.dim:
        raise InputError("q must be an integer in 0..%d, got %r" % (field.dim, q))
    return int(q)


def _point_mass(point: PencilPoint, q: int, delta: float) -> float:
    dec, p = _analyze(point, delta)
    anti = p.antiderivative()
    return math.fsum(
        abs(float(anti(ch.hi)) - float(anti(ch.lo)))
        for ch in dec.chambers
        if ch.inertia.neg == q
    )


def _point_masses(point: PencilPoint, delta: float) -> List[float]:
    dec, p = _analyze(point, delta)
    anti = p.antiderivative()
    out = []
    for q in range(point.r.dim + 1):
        out.append(
            math.fsum(
                abs(float(anti(ch.hi)) - float(anti(ch.lo)))
                for ch in dec.chambers
                if ch.inertia.neg == q
            )
        )
    return out


def density_q(field: PencilField, q: int, delta: float, threads: Optional[int] = None) -> float:
    """Leading spectral density coefficient c_q(delta).

    (2pi)^{-n} times the weighted sum over samples of the |det| integral
    over each sample's q-signature chambers.
    """
    q = _check_q(field, q)
    delta = _check_delta(field, delta)
    terms = _map_points(lambda p: p.weight * _point_mass(p, q, delta), field.points, threads)
    return math.fsum(terms) / TWO_PI**field.n


def weak_bound(field: PencilField, q: int, delta: float, k: int, threads: Optional[int] = None) -> float:
    """k^n * c_q(delta), the weak Morse bound prefactor at level k."""
    if not isinstance(k, numbers.Integral) or k < 1:
        raise InputError("k must be a positive integer, got %r" % (k,))
    return float(k) ** field.n * density_q(field, q, delta, threads)


def _densities(field: PencilField, delta: float, threads: Optional[int]) -> List[float]:
    per_point = _map_points(lambda p: (p.weight, _point_masses(p, delta)), field.points, threads)
    d = field.dim
    return [
        math.fsum(w * masses[q] for w, masses in per_point) / TWO_PI**field.n
        for q in range(d + 1)
    ]


def _strong_from(densities: Sequence[float], total: float) -> List[float]:
    d = len(densities) - 1
    out = [
        math.fsum((-1.0) ** (q - j) * densities[j] for j in range(q + 1))
        for q in range(d)
    ]
    out.append(total)
    return out


def rrh_total(field: PencilField, delta: float, threads: Optional[int] = None) -> float:
    """Alternating density sum, computed through the signed integral.

    On each chamber det = (-1)^neg |det|, so the alternating sum of
    unsigned chamber integrals telescopes to the plain signed integral of
    det(R+2sL) over [-delta, delta]; this route avoids cancellation
    between separately rounded chamber masses.
    """
    delta = _check_delta(field, delta)

    def signed(point: PencilPoint) -> float:
        _, p = _analyze(point, delta)
        anti = p.antiderivative()
        return point.weight * (float(anti(delta)) - float(anti(-delta)))

    terms = _map_points(signed, field.points, threads)
    return math.fsum(terms) / TWO_PI**field.n


def strong_sums(field: PencilField, delta: float, threads: Optional[int] = None) -> List[float]:
    """Strong Morse alternating partial sums; entry d is the RRH total."""
    delta = _check_delta(field, delta)
    return _strong_from(
        _densities(field, delta, threads), rrh_total(field, delta, threads)
    )


def _dist0(lo: float, hi: float) -> float:
    return 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))


def check_Xq(field: PencilField, q: int, threads: Optional[int] = None) -> XqResult:
    """Distance certificate for condition X(q) on the sampled field.

    max_delta is the smallest distance, over samples, from s=0 to the
    closure of that sample's q-signature set in [-field.delta, field.delta];
    samples with empty q-set contribute nothing, and a field where every
    sample is empty certifies the full window field.delta.  The
    certificate speaks only for the sample set, not the continuum.
    """
    q = _check_q(field, q)

    def nearest(point: PencilPoint) -> float:
        dec, _ = _analyze(point, field.delta)
        dists = [_dist0(ch.lo, ch.hi) for ch in dec.chambers if ch.inertia.neg == q]
        return min(dists) if dists else math.inf

    best = min(_map_points(nearest, field.points, threads))
    if best == math.inf:
        best = field.delta
    return XqResult(holds=bool(best > 0.0), max_delta=float(best))


def classify_bundle(field: PencilField, threads: Optional[int] = None) -> Positivity:
    """Pointwise positivity plus the semidefiniteness guard radius.

    semi_positive_delta is the largest delta' <= field.delta with
    R + 2sL positive semidefinite for every sample and every |s| <= delta'
    (the distance from 0 to the nearest chamber carrying a negative
    eigenvalue), or None when no positive radius exists.
    """
    d = field.dim

    def guard(point: PencilPoint) -> Tuple[bool, float]:
        dec, _ = _analyze(point, field.delta)
        pd = inertia(point.r).signature == (0, 0, d)
        bad = [_dist0(ch.lo, ch.hi) for ch in dec.chambers if ch.inertia.neg > 0]
        return pd, (min(bad) if bad else field.delta)

    results = _map_points(guard, field.points, threads)
    everywhere = all(pd for pd, _ in results)
    somewhere = any(pd for pd, _ in results)
    radius = min(g for _, g in results)
    semi = float(radius) if radius > 0.0 else None
    return Positivity(
        positive_everywhere=everywhere,
        semi_positive_delta=semi,
        positive_somewhere=somewhere,
    )


def _bigness_from(positivity: Positivity) -> Bigness:
    if positivity.positive_everywhere:
        return Bigness(big=True, reason=REASON_POSITIVE)
    if positivity.semi_positive_delta is not None and positivity.positive_somewhere:
        return Bigness(big=True, reason=REASON_SEMIPOSITIVE)
    return Bigness(big=False, reason=REASON_INCONCLUSIVE)


def bigness_verdict(field: PencilField, threads: Optional[int] = None) -> Bigness:
    """Sufficient-criteria bigness check; False means inconclusive, not refuted."""
    return _bigness_from(classify_bundle(field, threads))


def build_morse_report(
    field: PencilField,
    delta: Optional[float] = None,
    threads: Optional[int] = None,
) -> MorseReport:
    """Assemble every field-level quantity into one deterministic record.

    Densities and sums are evaluated at ``delta`` (default: the field
    window); X(q) and positivity always use the full field window, as
    their definitions fix it.
    """
    delta = field.delta if delta is None else _check_delta(field, delta)
    densities = _densities(field, delta, threads)
    total = rrh_total(field, delta, threads)
    positivity = classify_bundle(field, threads)
    return MorseReport(
        n=field.n,
        delta=delta,
        densities=densities,
        strong_sums=_strong_from(densities, total),
        rrh_total=total,
        xq=[check_Xq(field, q, threads) for q in range(field.dim + 1)],
        positivity=positivity,
        bigness=_bigness_from(positivity),
    )
