"""S-curvature of left-invariant (alpha1, alpha2)-metrics on compact Lie groups.

Two independent evaluations are provided:

* ``s_curvature_closed``: ``Phi(y) * (L1 * c + L2 * d)`` with
  ``c = <[y2, y1], y1>``, ``d = <[y2, y1], y2>`` and the scalar
  ``Phi = I_1 * L / (a * a2**2 * (L1 * L2 - 2 * L * L12))``, where ``I_1`` is
  the mean torsion along ``y1 / a``;
* ``s_curvature_oracle``: ``<[y, grad], y>_y`` with ``grad`` the
  ``g``-gradient of ``ln sqrt(det g)`` taken by finite differences.

Here ``y1``, ``y2`` are the V1 and V2 components of ``y``, ``a = alpha1(y)``
and ``a2 = alpha2(y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .families import GeneratingFamily
from .lie import CompactLieAlgebra, bracket, real_root_spaces, subspace_tools
from .norm import (
    BoundaryDirection,
    DatumDecomposition,
    cartan_tensor,
    eval_norm,
    fundamental_tensor,
    log_det_gradient_fd,
    normalize_datum,
)

# S values below this are treated as numerically zero when forming relative deviations
S_FLOOR = 1e-3


@dataclass(frozen=True, eq=False)
class HomogeneousDatum:
    """A left-invariant metric ``F`` on a compact group, given on its Lie algebra.

    ``frame`` columns are an alpha-orthonormal basis in algebra coordinates,
    the first ``n1`` spanning V1.  ``family`` is normalised for that frame.
    ``isometric`` holds (as rows) a basis of a subalgebra acting by
    isometries through right translations.
    """

    algebra: CompactLieAlgebra
    family: GeneratingFamily
    norm_datum: DatumDecomposition
    kind: str = "custom"
    isometric: Optional[np.ndarray] = None
    bracket_projection: Optional[np.ndarray] = None
    scalars: tuple = field(default=(), compare=False)

    @property
    def frame(self) -> np.ndarray:
        return self.norm_datum.frame

    @property
    def n1(self) -> int:
        return self.norm_datum.n1

    @property
    def n2(self) -> int:
        return self.norm_datum.n2

    @property
    def V1(self) -> np.ndarray:
        return self.frame[:, : self.n1].T

    @property
    def V2(self) -> np.ndarray:
        return self.frame[:, self.n1 :].T

    @property
    def alpha_gram(self) -> np.ndarray:
        """Gram matrix of the alpha inner product in algebra coordinates."""
        inv = np.linalg.inv(self.frame)
        return inv.T @ inv

    def to_frame(self, x) -> np.ndarray:
        return np.linalg.solve(self.frame, np.asarray(x, dtype=float))

    def bracket_frame(self, z, w) -> np.ndarray:
        """Bracket of two frame-coordinate vectors, in frame coordinates."""
        br = bracket(self.algebra, self.frame @ z, self.frame @ w)
        if self.bracket_projection is not None:
            br = self.bracket_projection @ br
        return self.to_frame(br)

    def norm(self, x) -> float:
        return eval_norm(self.family, self.norm_datum, x)


def _assemble(algebra, family, V1_cols, V2_cols, kind, isometric, scalars) -> HomogeneousDatum:
    frame = np.hstack([V1_cols, V2_cols])
    base = DatumDecomposition(V1_cols.shape[1], V2_cols.shape[1], frame)
    fam, nd = normalize_datum(family, base)
    return HomogeneousDatum(algebra, fam, nd, kind, isometric, None, tuple(scalars))


def _bi_orthonormal(algebra: CompactLieAlgebra, rows: np.ndarray) -> np.ndarray:
    return subspace_tools(algebra, rows).basis


def build_cartan_datum(algebra: CompactLieAlgebra, family: GeneratingFamily,
                       scalars: Optional[Sequence[float]] = None) -> HomogeneousDatum:
    """V2 = Cartan subalgebra, V1 = sum of the real root spaces.

    The inner product on V1 is ``scalars[k]`` times the bi-invariant one on
    the k-th root space (all ones by default); on V2 it is the bi-invariant
    form.
    """
    if algebra.rank < 2:
        raise ValueError("the Cartan datum needs rank >= 2")
    spaces, _ = real_root_spaces(algebra)
    if scalars is None:
        scalars = [1.0] * len(spaces)
    scalars = [float(c) for c in scalars]
    if len(scalars) != len(spaces):
        raise ValueError(f"expected {len(spaces)} scalars, one per root space")
    if min(scalars) <= 0:
        raise ValueError("scalars must be positive")
    V1 = np.hstack([sp.T / np.sqrt(c) for sp, c in zip(spaces, scalars)])
    V2 = _bi_orthonormal(algebra, algebra.cartan).T
    return _assemble(algebra, family, V1, V2, "cartan", V2.T.copy(), scalars)


def build_root_space_datum(algebra: CompactLieAlgebra, family: GeneratingFamily, root_index: int = 0,
                           cartan_scale: float = 2.0, scalars: Optional[Sequence[float]] = None) -> HomogeneousDatum:
    """V2 = one real root space, V1 = Cartan plus the other root spaces.

    The V1 form is ``cartan_scale`` times the bi-invariant one on the
    Cartan block and ``scalars[k]`` times it on the k-th remaining root
    space.  Unequal scalars on root spaces meeting V2 break vanishing.
    """
    spaces, _ = real_root_spaces(algebra)
    if not 0 <= root_index < len(spaces):
        raise ValueError("root_index out of range")
    rest = [sp for k, sp in enumerate(spaces) if k != root_index]
    if scalars is None:
        scalars = [1.0] * len(rest)
    scalars = [float(c) for c in scalars]
    if len(scalars) != len(rest) or min(scalars + [cartan_scale]) <= 0:
        raise ValueError(f"expected {len(rest)} positive scalars")
    cartan = _bi_orthonormal(algebra, algebra.cartan)
    V1 = np.hstack([cartan.T / np.sqrt(cartan_scale)] + [sp.T / np.sqrt(c) for sp, c in zip(rest, scalars)])
    V2 = spaces[root_index].T
    return _assemble(algebra, family, V1, V2, "root-space", None, [cartan_scale] + scalars)


def perturbed_datum(algebra: CompactLieAlgebra, family: GeneratingFamily) -> HomogeneousDatum:
    """Shipped non-vanishing datum: V2 a root space, Cartan and one other root space scaled by 2."""
    n_rest = len(real_root_spaces(algebra)[0]) - 1
    return build_root_space_datum(algebra, family, 0, 2.0, [2.0] + [1.0] * (n_rest - 1))


# ---------------------------------------------------------- pieces of S
def _interior(datum: HomogeneousDatum, y) -> tuple[np.ndarray, float, float]:
    z = datum.to_frame(y)
    a = float(np.linalg.norm(z[: datum.n1]))
    a2 = float(np.linalg.norm(z[datum.n1 :]))
    if min(a, a2) <= 1e-12 * max(a, a2, 1e-300):
        raise BoundaryDirection("y lies in V1 or V2")
    return z, a, a2


def bracket_pairings(datum: HomogeneousDatum, y) -> tuple[float, float]:
    """``(c, d) = (<[y2, y1], y1>, <[y2, y1], y2>)`` for the alpha form."""
    z, _, _ = _interior(datum, y)
    z1, z2 = z.copy(), z.copy()
    z1[datum.n1 :] = 0.0
    z2[: datum.n1] = 0.0
    w = datum.bracket_frame(z2, z1)
    return float(w @ z1), float(w @ z2)


def phi_coefficient(datum: HomogeneousDatum, y) -> float:
    z, a, a2 = _interior(datum, y)
    bundle = cartan_tensor(datum.family, datum.norm_datum, datum.frame @ z)
    I1 = float(bundle.I[: datum.n1] @ z[: datum.n1]) / a
    d = datum.family.L_derivs(a * a, a2 * a2)
    L, L1, L2, L12 = (float(d[k]) for k in ("L", "L1", "L2", "L12"))
    return I1 * L / (a * a2 * a2 * (L1 * L2 - 2 * L * L12))


def s_curvature_closed(datum: HomogeneousDatum, y) -> float:
    z, a, a2 = _interior(datum, y)
    if datum.family.is_linear:
        return 0.0
    c, d = bracket_pairings(datum, y)
    derivs = datum.family.L_derivs(a * a, a2 * a2)
    return phi_coefficient(datum, y) * (float(derivs["L1"]) * c + float(derivs["L2"]) * d)


def s_curvature_oracle(datum: HomogeneousDatum, y, step: float = 1e-5) -> float:
    z, a, a2 = _interior(datum, y)
    if not 0 < step <= min(a, a2) / 100:
        raise ValueError("step too large for this direction")
    y_amb = datum.frame @ z
    tb = fundamental_tensor(datum.family, datum.norm_datum, y_amb)
    grad = tb.g_inv @ log_det_gradient_fd(datum.family, datum.norm_datum, y_amb, step)
    w = datum.bracket_frame(z, grad)
    return float(w @ tb.g @ z)


@dataclass
class SCurvatureReport:
    y: np.ndarray
    a: float
    a2: float
    phi: Optional[float]
    S_closed: Optional[float]
    S_oracle: Optional[float]
    deviation: Optional[float]
    boundary: bool = False


def evaluate_direction(datum: HomogeneousDatum, y, step: float = 1e-5) -> SCurvatureReport:
    z = datum.to_frame(y)
    a, a2 = float(np.linalg.norm(z[: datum.n1])), float(np.linalg.norm(z[datum.n1 :]))
    try:
        phi = phi_coefficient(datum, y)
    except BoundaryDirection:
        return SCurvatureReport(np.asarray(y, float), a, a2, None, None, None, None, boundary=True)
    closed = s_curvature_closed(datum, y)
    oracle = s_curvature_oracle(datum, y, step)
    return SCurvatureReport(np.asarray(y, float), a, a2, phi, closed, oracle, abs(closed - oracle))


def boundary_limit(datum: HomogeneousDatum, y_boundary, transverse, eps=(1e-1, 1e-2, 1e-3)) -> list[tuple[float, float]]:
    """``(eps, S_closed(y(eps)))`` along ``y(eps) = (1 - eps) * y_boundary + eps * transverse``."""
    yb = np.asarray(y_boundary, dtype=float)
    tv = np.asarray(transverse, dtype=float)
    return [(float(e), s_curvature_closed(datum, (1 - e) * yb + e * tv)) for e in eps]


def random_interior_directions(datum: HomogeneousDatum, samples: int, seed: int) -> np.ndarray:
    """Seeded alpha-unit directions in algebra coordinates (rows)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((samples, datum.algebra.dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z @ datum.frame.T


# ---------------------------------------------------------------- criterion
@dataclass
class CriterionResult:
    holds: bool
    witness: Optional[dict] = None
    max_violation: float = 0.0

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness}


def vanishing_criterion(datum: HomogeneousDatum, tol: float = 1e-10) -> CriterionResult:
    """Basis test of <[y1, y2], y1> = <[y1, y2], y2> = 0 for all y1 in V1, y2 in V2.

    A witness ``(y1, y2, pairing)`` in algebra coordinates is returned for
    the first violated condition; diagonal conditions are scanned first so
    that the polarised witness is a genuine counterexample.
    """
    n, n1 = datum.algebra.dim, datum.n1
    E = np.eye(n)
    # T[i, j, k] = <[e_i, e_j], e_k> in frame coordinates
    T = np.array([[datum.bracket_frame(E[i], E[j]) for j in range(n)] for i in range(n)])
    scale = max(1.0, float(np.abs(T).max()))
    V1, V2 = range(n1), range(n1, n)
    # diagonal conditions: <[e_i, f_a], e_i> and <[e_i, f_a], f_a>
    checks = [(2 * T[i, a, i], "c", E[i], E[a]) for i in V1 for a in V2]
    checks += [(2 * T[i, a, a], "d", E[i], E[a]) for i in V1 for a in V2]
    # polarised conditions (i) and (ii)
    checks += [(T[i, a, j] + T[j, a, i], "c", E[i] + E[j], E[a]) for i in V1 for j in V1 if i < j for a in V2]
    checks += [(T[i, a, b] + T[i, b, a], "d", E[i], E[a] + E[b]) for i in V1 for a in V2 for b in V2 if a < b]
    worst = max(abs(c[0]) for c in checks)
    for val, pairing, z1, z2 in checks:
        if abs(val) > tol * scale:
            y1, y2 = datum.frame @ z1, datum.frame @ z2
            w = datum.bracket_frame(z1, z2)
            value = float(w @ (z1 if pairing == "c" else z2))
            return CriterionResult(
                False,
                {"y1": [float(x) for x in y1], "y2": [float(x) for x in y2], "pairing": pairing, "value": value},
                float(worst),
            )
    return CriterionResult(True, None, float(worst))


# ------------------------------------------------------------------- runs
def scurvature_run(datum: HomogeneousDatum, samples: int = 100, seed: int = 0, step: float = 1e-5) -> dict:
    """Closed form against the oracle at seeded interior directions."""
    ys = random_interior_directions(datum, samples, seed)
    closed, oracle = [], []
    for y in ys:
        rep = evaluate_direction(datum, y, step)
        if rep.boundary:
            continue
        closed.append(rep.S_closed)
        oracle.append(rep.S_oracle)
    closed, oracle = np.array(closed), np.array(oracle)
    scale = max(float(np.abs(oracle).max(initial=0.0)), S_FLOOR)
    return {
        "algebra": datum.algebra.name,
        "family": str(datum.family.label or datum.family),
        "datum_kind": datum.kind,
        "samples": int(samples),
        "seed": int(seed),
        "max_abs_S_closed": float(np.abs(closed).max(initial=0.0)),
        "max_abs_S_oracle": float(np.abs(oracle).max(initial=0.0)),
        "max_rel_deviation": float(np.abs(closed - oracle).max(initial=0.0) / scale),
        "criterion": vanishing_criterion(datum).to_dict(),
    }
