"""The nonunitary action on functions over the triangular chart.

For a pair q = (s0, n) the operator is

    (T(q) F)(s) = exp(i tr(m_k s n s*)) * F(s s0),

a unit-modulus multiplier times a right translation.  The vacuum
f(s) = exp(-|s|/2) is not square integrable against the |s|^-4 measure
(its norm integral log-diverges at small radius), yet every difference
b(q) = T(q) f - f is; that membership gap is what ``specialness_report``
verifies.  Functions are closed-form evaluators on point batches, never
grids, so algebraic identities can be tested pointwise with no
discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import orbits
from .groups import PElement, QElement, SkewHermitian2, TriangularS, as_generator, p_to_q, q_to_p
from .measures import (
    BATCH_SIZE,
    DivergenceVerdict,
    IntegralEstimate,
    MCAccumulator,
    MeasureSpec,
    NonFinite,
    PolarShellSampler,
    divergence_probe,
    integrate_mc,
)
from .orbits import OrbitLabel
from .points import SPoints

__all__ = [
    "GroupFunction",
    "vacuum",
    "constant",
    "inverse_norm",
    "translate",
    "character_factor",
    "character_product",
    "linear_combination",
    "difference",
    "apply_T",
    "CocycleVector",
    "coboundary",
    "l2_norm",
    "inner_product",
    "gram_matrix",
    "SpecialnessReport",
    "specialness_report",
    "default_test_set",
]

# Near-duplicate merge cutoff for formal combinations of basis vectors.
CANONICAL_TOL = 1e-12


class GroupFunction:
    """A complex-valued closed-form function on the chart, batch evaluated."""

    __slots__ = ("_evaluate",)

    def __init__(self, evaluate):
        self._evaluate = evaluate

    def __call__(self, pts: SPoints) -> np.ndarray:
        return np.asarray(self._evaluate(pts), dtype=complex)

    def __add__(self, other: "GroupFunction") -> "GroupFunction":
        return GroupFunction(lambda pts: self(pts) + other(pts))

    def __sub__(self, other: "GroupFunction") -> "GroupFunction":
        return GroupFunction(lambda pts: self(pts) - other(pts))

    def __mul__(self, scalar) -> "GroupFunction":
        c = complex(scalar)
        return GroupFunction(lambda pts: c * self(pts))

    __rmul__ = __mul__

    def __neg__(self) -> "GroupFunction":
        return self * (-1.0)


def vacuum() -> GroupFunction:
    """f(s) = exp(-|s|/2); values in (0, 1], tending to 1 at small radius."""
    return GroupFunction(lambda pts: np.exp(-pts.norms() / 2.0))


def constant(c: complex) -> GroupFunction:
    c = complex(c)
    return GroupFunction(lambda pts: np.full(pts.size, c, dtype=complex))


def inverse_norm() -> GroupFunction:
    """|s|^-1, the synthetic power-divergence control."""
    return GroupFunction(lambda pts: 1.0 / pts.norms())


def translate(fn: GroupFunction, s0: TriangularS) -> GroupFunction:
    """Right translation (F -> F(. s0))."""
    return GroupFunction(lambda pts: fn(pts.right_translate(s0)))


def character_factor(label: OrbitLabel, n) -> GroupFunction:
    """The unit-modulus multiplier s -> exp(i tr(m_k s n s*))."""
    return GroupFunction(
        lambda pts: np.exp(1j * orbits.character_phase(label, n, pts.r1, pts.r2, pts.r))
    )


def character_product(label: OrbitLabel, n, fn: GroupFunction) -> GroupFunction:
    factor = character_factor(label, n)
    return GroupFunction(lambda pts: factor(pts) * fn(pts))


def linear_combination(coeffs: Sequence[complex], fns: Sequence[GroupFunction]) -> GroupFunction:
    if len(coeffs) != len(fns):
        raise ValueError("coefficient/function length mismatch")
    pairs = [(complex(c), f) for c, f in zip(coeffs, fns)]

    def evaluate(pts: SPoints) -> np.ndarray:
        out = np.zeros(pts.size, dtype=complex)
        for c, f in pairs:
            out += c * f(pts)
        return out

    return GroupFunction(evaluate)


def difference(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    return f - g


def apply_T(q: QElement, label: OrbitLabel, fn: GroupFunction) -> GroupFunction:
    """(T(q) F)(s) = multiplier(s, n) * F(s s0) for q = (s0, n).

    The translation part preserves the vacuum family; the multiplier part
    has unit modulus, so it never changes |F| pointwise.
    """
    return character_product(label, q.n, translate(fn, q.s))


# ---------------------------------------------------------------------------
# cocycle vectors: formal combinations of b(p) with a derived evaluator


def _coboundary_values(p: PElement, label: OrbitLabel, pts: SPoints) -> np.ndarray:
    q = p_to_q(p)
    translated = pts.right_translate(q.s)
    phase = orbits.character_phase(label, q.n, pts.r1, pts.r2, pts.r)
    return np.exp(1j * phase) * np.exp(-translated.norms() / 2.0) - np.exp(-pts.norms() / 2.0)


@dataclass(frozen=True)
class CocycleVector:
    """Formal combination sum_i c_i b(p_i) with a consistent pointwise evaluator.

    b(p) = T(p) f - f with f the vacuum; the evaluator is always derived
    from the stored terms, so the two views cannot drift apart.
    """

    label: OrbitLabel
    terms: tuple  # tuple of (complex coefficient, PElement)

    @classmethod
    def zero(cls, label: OrbitLabel) -> "CocycleVector":
        return cls(label, ())

    @classmethod
    def basis(cls, p: PElement, label: OrbitLabel) -> "CocycleVector":
        if p.is_identity():
            return cls.zero(label)
        return cls(label, ((1.0 + 0.0j, p),))

    def evaluate(self, pts: SPoints) -> np.ndarray:
        out = np.zeros(pts.size, dtype=complex)
        for c, p in self.terms:
            out += c * _coboundary_values(p, self.label, pts)
        return out

    def as_group_function(self) -> GroupFunction:
        return GroupFunction(self.evaluate)

    def scale(self, c: complex) -> "CocycleVector":
        c = complex(c)
        return CocycleVector(self.label, tuple((c * ci, p) for ci, p in self.terms))

    def __add__(self, other: "CocycleVector") -> "CocycleVector":
        if other.label is not self.label:
            raise ValueError("cannot mix orbit labels in one combination")
        return CocycleVector(self.label, self.terms + other.terms).canonical()

    def __sub__(self, other: "CocycleVector") -> "CocycleVector":
        return self + other.scale(-1.0)

    def __neg__(self) -> "CocycleVector":
        return self.scale(-1.0)

    @property
    def is_zero(self) -> bool:
        return len(self.terms) == 0

    def canonical(self, tol: float = CANONICAL_TOL) -> "CocycleVector":
        """Merge coincident basis labels, drop identities and zero coefficients."""
        kept: list[list] = []
        for c, p in self.terms:
            if p.is_identity():
                continue
            scale = max(1.0, p.s.norm())
            for entry in kept:
                if entry[1].distance(p) <= tol * scale:
                    entry[0] += c
                    break
            else:
                kept.append([complex(c), p])
        terms = tuple((c, p) for c, p in kept if abs(c) > tol)
        return CocycleVector(self.label, terms)


def coboundary(q, label: OrbitLabel) -> CocycleVector:
    """b(q) = T(q) f - f as a basis cocycle vector."""
    if isinstance(q, QElement):
        p = q_to_p(q)
    elif isinstance(q, PElement):
        p = q
    else:
        raise TypeError("coboundary expects a P or Q element")
    return CocycleVector.basis(p, label)


# ---------------------------------------------------------------------------
# norms, inner products, Gram matrices


def l2_norm(
    fn: GroupFunction,
    measure: MeasureSpec,
    sampler: PolarShellSampler,
    n: int,
    rng,
) -> IntegralEstimate:
    """Estimate of the squared-norm integral over the sampler's support."""
    return integrate_mc(fn, measure, sampler, n, rng, mode="square")


def inner_product(
    fn: GroupFunction,
    gn: GroupFunction,
    measure: MeasureSpec,
    sampler: PolarShellSampler,
    n: int,
    rng,
) -> IntegralEstimate:
    """Estimate of the sesquilinear pairing; conjugate symmetric by design."""
    product = GroupFunction(lambda pts: fn(pts) * np.conj(gn(pts)))
    return integrate_mc(product, measure, sampler, n, rng, mode="plain")


def gram_matrix(
    p_list: Sequence[PElement],
    label: OrbitLabel,
    measure: MeasureSpec,
    sampler: PolarShellSampler,
    n: int,
    rng,
) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrix of the coboundaries b(p_i) plus per-entry standard errors.

    All entries share one sample stream, which keeps the estimated matrix
    exactly positive semidefinite.  Requires pairwise-distinct, nonidentity
    basis labels.
    """
    k = len(p_list)
    if k == 0:
        raise ValueError("need at least one basis element")
    for i, p in enumerate(p_list):
        if p.is_identity():
            raise ValueError("identity element has a zero coboundary")
        for other in p_list[i + 1 :]:
            if p.distance(other) <= CANONICAL_TOL * max(1.0, p.s.norm()):
                raise ValueError("basis elements must be pairwise distinct")
    rng = as_generator(rng)
    accs = [[MCAccumulator() for _ in range(k)] for _ in range(k)]
    remaining = n
    while remaining > 0:
        batch = min(remaining, BATCH_SIZE)
        pts = sampler.sample(batch, rng)
        weights = measure.density(pts) / sampler.density(pts)
        values = [_coboundary_values(p, label, pts) for p in p_list]
        if not all(np.all(np.isfinite(v.view(float))) for v in values):
            raise NonFinite("coboundary evaluation produced a non-finite sample")
        for i in range(k):
            for j in range(i, k):
                accs[i][j].add(weights * values[i] * np.conj(values[j]))
        remaining -= batch
    gram = np.zeros((k, k), dtype=complex)
    stderr = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            est = accs[i][j].estimate()
            gram[i, j] = est.value
            gram[j, i] = np.conj(est.value)
            stderr[i, j] = stderr[j, i] = est.std_error
    return gram, stderr


# ---------------------------------------------------------------------------
# the specialness verdict


@dataclass(frozen=True)
class SpecialnessReport:
    """Outcome of the witness check for one measure and orbit label."""

    measure_name: str
    label: OrbitLabel
    vacuum_verdict: DivergenceVerdict
    element_verdicts: tuple  # (description, DivergenceVerdict) per test element
    confirmed: bool
    verdict: str


def default_test_set() -> list[QElement]:
    """Four pure translations and four pure character directions."""
    translations = [
        TriangularS(2.0, 1.0, 0.0),
        TriangularS(1.0, 2.0, 0.0),
        TriangularS(0.5, 1.0, 0.0),
        TriangularS(1.0, 1.0, 1.0),
    ]
    characters = [
        SkewHermitian2(1.0, 0.0, 0.0),
        SkewHermitian2(0.0, 1.0, 0.0),
        SkewHermitian2(0.0, 0.0, 1.0),
        SkewHermitian2(0.0, 0.0, 1j),
    ]
    out = [QElement(s, SkewHermitian2.zero()) for s in translations]
    out += [QElement(TriangularS.identity(), n) for n in characters]
    return out


def _describe(q: QElement) -> str:
    if q.is_translation():
        s = q.s
        return f"translate(r1={s.r1:g}, r2={s.r2:g}, r={s.r:g})"
    if q.is_character_direction():
        n = q.n
        return f"character(a={n.a:g}, b={n.b:g}, z={n.z:g})"
    return "mixed"


def specialness_report(
    test_set: Sequence[QElement],
    label: OrbitLabel,
    measure: MeasureSpec,
    eps_ladder,
    r_max: float = 30.0,
    samples: int = 200_000,
    rng=0,
) -> SpecialnessReport:
    """Check that the vacuum escapes the square-integrable space while its
    coboundaries stay inside it.

    The verdict is confirmed when the vacuum's norm integral diverges and
    the probe classifies b(q) as convergent for every element of the test
    set.  The set must contain at least one pure translation and one pure
    character direction.
    """
    if not test_set:
        raise ValueError("test set must be nonempty")
    if not any(q.is_translation() for q in test_set):
        raise ValueError("test set needs at least one pure translation")
    if not any(q.is_character_direction() for q in test_set):
        raise ValueError("test set needs at least one pure character direction")
    rng = as_generator(rng)
    vacuum_verdict = divergence_probe(vacuum(), measure, eps_ladder, r_max, samples, rng)
    element_verdicts = []
    all_convergent = True
    for q in test_set:
        b = coboundary(q, label).as_group_function()
        verdict = divergence_probe(b, measure, eps_ladder, r_max, samples, rng)
        element_verdicts.append((_describe(q), verdict))
        all_convergent &= verdict.classification == "convergent"
    confirmed = vacuum_verdict.is_divergent and all_convergent
    if confirmed:
        verdict = "special witness confirmed"
    elif not vacuum_verdict.is_divergent:
        verdict = "not special (vacuum square-integrable)"
    else:
        verdict = "not special (a coboundary failed to converge)"
    return SpecialnessReport(
        measure.name, label, vacuum_verdict, tuple(element_verdicts), confirmed, verdict
    )
