"""Extending the triangular-group action and its cocycle to the whole group.

On the span of the basis vectors b(p) the remaining generators act by

* compact elements:   T(k) b(p) = b(p') where k p = p' k';
* the block swap:     T(sigma) b(p) = b(p^) with p^ p^* = sigma p p* sigma;
* triangular factors: T(p0) b(p) = b(p0 p) - b(p0), the pointwise identity.

A general element acts through its unique factorization g = p k, and the
extended cocycle is b(g) = b(p), constant on right cosets of the compact
part.  The swap operator exists only on this span; it is never applied to
general functions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .groups import (
    KElement,
    PElement,
    TriangularS,
    U22Element,
    as_generator,
    iwasawa_decompose,
    sigma_hat,
)
from .measures import MeasureSpec, PolarShellSampler
from .orbits import OrbitLabel
from .representation import CocycleVector, l2_norm

__all__ = [
    "act_k",
    "act_sigma_on_basis",
    "extend_cocycle",
    "apply_extended",
    "apply_k_on_vector",
    "apply_p_on_vector",
    "apply_sigma_on_vector",
    "ExtendedOperator",
    "unboundedness_experiment",
]


def act_k(k: KElement, p: PElement) -> PElement:
    """The triangular part p' of k p = p' k'."""
    product = U22Element(k.m @ p.matrix(), tol=max(k.tol, 1e-9))
    p_prime, _ = iwasawa_decompose(product)
    return p_prime


def act_sigma_on_basis(p: PElement) -> PElement:
    """Basis-label action of the block swap; an involution."""
    return sigma_hat(p)


def extend_cocycle(g: U22Element, label: OrbitLabel) -> CocycleVector:
    """b(g) = b(p) for g = p k; zero when g lies in the compact part."""
    p, _ = iwasawa_decompose(g)
    return CocycleVector.basis(p, label)


def apply_k_on_vector(k: KElement, v: CocycleVector) -> CocycleVector:
    terms = tuple((c, act_k(k, p)) for c, p in v.terms)
    return CocycleVector(v.label, terms).canonical()


def apply_p_on_vector(p0: PElement, v: CocycleVector) -> CocycleVector:
    """T(p0) sum c_i b(p_i) = sum c_i b(p0 p_i) - (sum c_i) b(p0)."""
    terms = [(c, p0.multiply(p)) for c, p in v.terms]
    total = sum(c for c, _ in v.terms)
    terms.append((-total, p0))
    return CocycleVector(v.label, tuple(terms)).canonical()


def apply_sigma_on_vector(v: CocycleVector) -> CocycleVector:
    terms = tuple((c, act_sigma_on_basis(p)) for c, p in v.terms)
    return CocycleVector(v.label, terms).canonical()


def apply_extended(g: U22Element, v: CocycleVector) -> CocycleVector:
    """T(g) = T(p) T(k) through the factorization g = p k."""
    p, k = iwasawa_decompose(g)
    return apply_p_on_vector(p, apply_k_on_vector(k, v))


@dataclass(frozen=True)
class ExtendedOperator:
    """A word in the extension generators, applied basis-element-wise.

    Each letter is ("p", PElement), ("k", KElement), or ("sigma", None);
    words act right to left, matching operator composition.
    """

    word: tuple

    @classmethod
    def from_p(cls, p: PElement) -> "ExtendedOperator":
        return cls((("p", p),))

    @classmethod
    def from_k(cls, k: KElement) -> "ExtendedOperator":
        return cls((("k", k),))

    @classmethod
    def swap(cls) -> "ExtendedOperator":
        return cls((("sigma", None),))

    @classmethod
    def from_group_element(cls, g: U22Element) -> "ExtendedOperator":
        p, k = iwasawa_decompose(g)
        return cls((("p", p), ("k", k)))

    def compose(self, other: "ExtendedOperator") -> "ExtendedOperator":
        return ExtendedOperator(self.word + other.word)

    def apply(self, v: CocycleVector) -> CocycleVector:
        out = v
        for tag, payload in reversed(self.word):
            if tag == "p":
                out = apply_p_on_vector(payload, out)
            elif tag == "k":
                out = apply_k_on_vector(payload, out)
            elif tag == "sigma":
                out = apply_sigma_on_vector(out)
            else:
                raise ValueError(f"unknown generator tag {tag!r}")
        return out


def unboundedness_experiment(
    scales,
    label: OrbitLabel,
    measure: MeasureSpec,
    sampler: PolarShellSampler,
    samples: int,
    rng,
    out_path=None,
) -> list[dict]:
    """Norm ratios |b(p^)| / |b(p)| along a ladder of diagonal translations.

    Exploratory: emits (|s(p)|, ratio, stderr) rows, optionally as CSV, for
    the swap-operator growth probe.  No verdict is attached.
    """
    rng = as_generator(rng)
    rows = []
    for c in scales:
        p = PElement(TriangularS(float(c), 1.0, 0.0), np.zeros((2, 2)))
        p_hat = act_sigma_on_basis(p)
        num = l2_norm(CocycleVector.basis(p_hat, label).as_group_function(), measure, sampler, samples, rng)
        den = l2_norm(CocycleVector.basis(p, label).as_group_function(), measure, sampler, samples, rng)
        ratio = math.sqrt(num.real / den.real)
        # first-order error propagation for sqrt(a/b)
        rel = 0.5 * math.sqrt(
            (num.std_error / num.real) ** 2 + (den.std_error / den.real) ** 2
        )
        rows.append(
            {
                "s_norm": p.s.norm(),
                "ratio": ratio,
                "stderr": ratio * rel,
                "numerator": num.real,
                "denominator": den.real,
            }
        )
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    return rows
