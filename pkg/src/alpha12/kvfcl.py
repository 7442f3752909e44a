"""Sampling tests for Killing vector fields of constant length.

A pair ``(left, right)`` with ``left`` in the Lie algebra and ``right`` in a subalgebra
acting isometrically by right translations gives a Killing field whose
length at ``g`` is ``F(Ad(g) left - Ad(g') right)`` up to relabelling of the
group variables.  Constant length is probed by sampling ``g`` and ``g'``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lie import ad, numerical_kernel, random_group_element
from .scurvature import HomogeneousDatum

ACCEPT_SPREAD = 1e-8
REJECT_SPREAD = 1e-3


class IsometryError(ValueError):
    """The declared subalgebra does not act by isometries of the datum."""


@dataclass(frozen=True, eq=False)
class KillingCandidate:
    left: np.ndarray
    right: np.ndarray
    isometric: np.ndarray

    def __post_init__(self):
        left = np.asarray(self.left, dtype=float)
        right = np.asarray(self.right, dtype=float)
        basis = np.atleast_2d(np.asarray(self.isometric, dtype=float))
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "isometric", basis)
        if left.shape != right.shape or basis.shape[1] != left.size:
            raise ValueError("candidate vectors and subalgebra basis must share the algebra dimension")
        if not (np.any(left) or np.any(right)):
            raise ValueError("(left, right) must not both vanish")
        coef, *_ = np.linalg.lstsq(basis.T, right, rcond=None)
        if np.abs(basis.T @ coef - right).max() > 1e-12 * max(1.0, np.abs(right).max()):
            raise ValueError("right does not lie in the declared isometric subalgebra")


@dataclass
class DeviationReport:
    samples: int
    seed: int
    min: float
    max: float
    spread: float

    @property
    def verdict(self) -> str:
        if self.spread < ACCEPT_SPREAD:
            return "accepted"
        if self.spread > REJECT_SPREAD:
            return "rejected"
        return "inconclusive"

    def to_dict(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "min": self.min, "max": self.max,
                "spread": self.spread, "verdict": self.verdict}


def validate_isometric(datum: HomogeneousDatum, basis: np.ndarray, tol: float = 1e-10) -> None:
    """Each ad(Y) must preserve V1 and V2 and be skew for the alpha form."""
    inv = np.linalg.inv(datum.frame)
    n1 = datum.n1
    for Y in np.atleast_2d(basis):
        A = inv @ ad(datum.algebra, Y) @ datum.frame  # ad(Y) in the orthonormal frame
        scale = max(1.0, float(np.abs(A).max()))
        if np.abs(A[n1:, :n1]).max() > tol * scale or np.abs(A[:n1, n1:]).max() > tol * scale:
            raise IsometryError("ad-action does not preserve the splitting")
        if np.abs(A + A.T).max() > tol * scale:
            raise IsometryError("ad-action is not skew for the alpha form")


def length_deviation(datum: HomogeneousDatum, cand: KillingCandidate, samples: int = 1000, seed: int = 0,
                     word_length: int = 3) -> DeviationReport:
    """Spread ``(max - min) / min`` of ``F(Ad(g) left - Ad(g') right)`` over seeded samples."""
    validate_isometric(datum, cand.isometric)
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    for k in range(samples):
        left = random_group_element(datum.algebra, word_length, rng) @ cand.left
        right = random_group_element(datum.algebra, word_length, rng, cand.isometric) @ cand.right
        vals[k] = datum.norm(left - right)
    lo, hi = float(vals.min()), float(vals.max())
    return DeviationReport(samples, seed, lo, hi, (hi - lo) / lo)


def center(datum: HomogeneousDatum, basis: np.ndarray) -> np.ndarray:
    """Basis (rows) of the center of the subalgebra spanned by ``basis``."""
    basis = np.atleast_2d(basis)
    # Z = c @ basis commutes with every basis vector: stack ad(b) @ basis.T
    M = np.vstack([ad(datum.algebra, b) @ basis.T for b in basis])
    if np.abs(M).max() < 1e-13:
        return basis.copy()
    return numerical_kernel(M) @ basis


def classify_candidate(datum: HomogeneousDatum, cand: KillingCandidate, report: DeviationReport) -> str:
    """``class-1``, ``class-2``, ``rejected``, ``inconclusive`` or ``inconsistent``."""
    verdict = report.verdict
    if verdict != "accepted":
        return verdict
    if not np.any(cand.left):
        return "class-2"
    Z = center(datum, cand.isometric)
    if not np.any(cand.right):
        return "class-1"
    if Z.shape[0]:
        coef, *_ = np.linalg.lstsq(Z.T, cand.right, rcond=None)
        if np.abs(Z.T @ coef - cand.right).max() <= 1e-10 * max(1.0, np.abs(cand.right).max()):
            return "class-1"
    return "inconsistent"


def kvfcl_run(datum: HomogeneousDatum, left, right, isometric: Optional[np.ndarray] = None,
              samples: int = 1000, seed: int = 0) -> dict:
    basis = datum.isometric if isometric is None else isometric
    if basis is None:
        raise IsometryError("the datum declares no isometric subalgebra")
    cand = KillingCandidate(left, right, basis)
    rep = length_deviation(datum, cand, samples, seed)
    return {**rep.to_dict(), "class": classify_candidate(datum, cand, rep)}
