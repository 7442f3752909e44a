"""(alpha1, alpha2)-Minkowski norms: validity, normalisation and tensors.

All tensors are expressed in the coordinates of the datum's frame: an
alpha-orthonormal basis whose first ``n1`` vectors span V1 and whose
remaining ``n2`` vectors span V2.  Closed forms are evaluated with ``y``
rotated into the adapted position ``(a, 0, ..., 0, a2)`` and conjugated
back.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import mpmath
import numpy as np
import sympy as sp

from .families import U_VAR, V_VAR, GeneratingFamily, NonPositiveProfile


class BoundaryDirection(ValueError):
    """The direction lies in V1 or V2 where a closed form divides by zero."""


class IndefiniteTensor(ValueError):
    """The fundamental tensor is not positive definite (invalid family)."""


@dataclass(frozen=True)
class DatumDecomposition:
    """Dimension split ``(n1, n2)`` and an alpha-orthonormal adapted frame.

    ``frame`` holds the frame vectors as columns, written in ambient
    coordinates; ``None`` means the standard basis.
    """

    n1: int
    n2: int
    frame: Optional[np.ndarray] = field(default=None, compare=False)
    normalized: bool = False

    def __post_init__(self):
        if self.n2 < 2 or self.n1 < self.n2:
            raise ValueError(f"need n1 >= n2 >= 2, got ({self.n1}, {self.n2})")
        if self.frame is not None:
            fr = np.asarray(self.frame, dtype=float)
            if fr.shape != (self.n, self.n):
                raise ValueError("frame must be an n x n matrix")
            object.__setattr__(self, "frame", fr)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    def coords(self, y) -> np.ndarray:
        """Frame coordinates of the ambient vector ``y``."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}")
        if self.frame is None:
            return y.copy()
        return np.linalg.solve(self.frame, y)

    def split(self, y) -> tuple[float, float]:
        """``(alpha1(y), alpha2(y))``."""
        z = self.coords(y)
        return float(np.linalg.norm(z[: self.n1])), float(np.linalg.norm(z[self.n1 :]))


@dataclass
class TensorBundleAtPoint:
    y: np.ndarray
    a: float
    a2: float
    g: Optional[np.ndarray] = None
    g_inv: Optional[np.ndarray] = None
    C: Optional[np.ndarray] = None
    I: Optional[np.ndarray] = None
    boundary: bool = False


@dataclass
class ValidityReport:
    valid: bool
    min_margin: float
    argmin: tuple[float, float]
    argmin_form: str
    positive: bool
    identity_residual: float
    grid_size: int

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "min_margin": self.min_margin,
            "argmin": list(self.argmin),
            "argmin_form": self.argmin_form,
            "positive": self.positive,
            "identity_residual": self.identity_residual,
            "grid_size": self.grid_size,
        }


# ------------------------------------------------------------------ validity
def _convexity(profile, s, b):
    f, f1, f2 = profile(s), profile(s, 1), profile(s, 2)
    with np.errstate(invalid="ignore"):
        return f - s * f1 + (b * b - s * s) * f2


def validate_generating(family: GeneratingFamily, grid_size: int = 201) -> ValidityReport:
    """Scan the strong-convexity inequalities on the grid 0 <= s <= b <= 1.

    Both the phi-form and the psi-form are checked; the reported margin is
    the grid minimum over both, which is not a certified bound.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    t = np.linspace(0.0, 1.0, grid_size)
    s, b = np.meshgrid(t, t, indexing="ij")
    mask = s <= b

    phi_vals = family.phi(t)
    psi_vals = family.psi(t)
    positive = bool(np.all(np.isfinite(phi_vals)) and np.all(phi_vals > 0) and np.all(psi_vals > 0))
    if not positive:
        raise NonPositiveProfile(f"{family} is not positive on [0, 1]")

    best = (np.inf, (np.nan, np.nan), "")
    for form, prof in (("phi", family.phi), ("psi", family.psi)):
        vals = np.where(mask, _convexity(prof, s, b), np.inf)
        if np.any(np.isnan(vals[mask])):
            raise NonPositiveProfile(f"{form} derivatives of {family} are not finite on [0, 1]")
        k = np.unravel_index(np.argmin(vals), vals.shape)
        if vals[k] < best[0] - 1e-12:
            best = (float(vals[k]), (float(s[k]), float(b[k])), form)

    # the two convexity expressions agree at s and sqrt(1 - s^2)
    sbar = np.sqrt(np.clip(1.0 - t * t, 0.0, 1.0))
    lhs = _convexity(family.phi, t, 1.0)
    rhs = _convexity(family.psi, sbar, 1.0)
    residual = float(np.max(np.abs(lhs - rhs)))

    return ValidityReport(
        valid=positive and best[0] > 0,
        min_margin=best[0],
        argmin=best[1],
        argmin_form=best[2],
        positive=positive,
        identity_residual=residual,
        grid_size=grid_size,
    )


def principal_curvatures(family: GeneratingFamily, datum: DatumDecomposition, s: float) -> tuple[float, float, float]:
    """Principal curvatures of the indicatrix at parameter ``s = alpha2/alpha``.

    Returns ``(k_s, k_u, k_v)``; ``k_u`` has multiplicity ``n1 - 1`` and
    ``k_v`` multiplicity ``n2 - 1``.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    p, p1, p2 = (float(family.phi(s, k)) for k in range(3))
    w = (1 - s * s) * p1 * p1 / (p * p) + 1
    k_s = (p - s * p1 + (1 - s * s) * p2) / w**1.5
    k_u = (p - s * p1) / np.sqrt(w)
    sb = np.sqrt(max(1 - s * s, 0.0))
    q, q1 = float(family.psi(sb)), float(family.psi(sb, 1))
    k_v = (q - sb * q1) / np.sqrt((1 - sb * sb) * q1 * q1 / (q * q) + 1)
    return float(k_s), float(k_u), float(k_v)


# ------------------------------------------------------------ normalisation
def normalize_datum(family: GeneratingFamily, datum: DatumDecomposition) -> tuple[GeneratingFamily, DatumDecomposition]:
    """Rescale alpha1, alpha2 so that phi(0) = phi(1) = 1, keeping F fixed."""
    report = validate_generating(family, 51)
    if not report.valid:
        raise ValueError(f"{family} does not define a Minkowski norm (margin {report.min_margin:.3g})")
    k1 = sp.nsimplify(family.L_expr.subs({U_VAR: 1, V_VAR: 0}, simultaneous=True))
    k2 = sp.nsimplify(family.L_expr.subs({U_VAR: 0, V_VAR: 1}, simultaneous=True))
    if k1 == 1 and k2 == 1:
        return family, replace(datum, normalized=True)
    new_family = GeneratingFamily(
        family.kind,
        family.profile,
        family.params,
        scale=(sp.simplify(family.scale[0] * k1), sp.simplify(family.scale[1] * k2)),
        label=f"{family} (normalized)",
    )
    frame = np.eye(datum.n) if datum.frame is None else datum.frame
    frame = frame.copy()
    frame[:, : datum.n1] /= float(sp.sqrt(k1))
    frame[:, datum.n1 :] /= float(sp.sqrt(k2))
    return new_family, DatumDecomposition(datum.n1, datum.n2, frame, normalized=True)


# ------------------------------------------------------------- evaluation
def _uv(datum, y):
    z = datum.coords(y)
    u = float(z[: datum.n1] @ z[: datum.n1])
    v = float(z[datum.n1 :] @ z[datum.n1 :])
    if u + v == 0.0:
        raise ValueError("zero vector")
    return z, u, v


def eval_norm(family: GeneratingFamily, datum: DatumDecomposition, y) -> float:
    _, u, v = _uv(datum, y)
    return float(np.sqrt(family.L(u, v)))


def _completion(w: np.ndarray, first: bool) -> np.ndarray:
    """Orthogonal matrix sending e_1 (or e_last) to the unit vector ``w``."""
    k = w.size
    e = np.zeros(k)
    e[0 if first else -1] = 1.0
    x = e - w
    nx = np.linalg.norm(x)
    if nx < 1e-15:
        return np.eye(k)
    x /= nx
    return np.eye(k) - 2.0 * np.outer(x, x)


def adapted_rotation(datum: DatumDecomposition, z: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Block-orthogonal ``Q`` with ``z = Q @ (a, 0, ..., 0, a2)``."""
    n1 = datum.n1
    z1, z2 = z[:n1], z[n1:]
    a, a2 = float(np.linalg.norm(z1)), float(np.linalg.norm(z2))
    Q = np.zeros((datum.n, datum.n))
    Q[:n1, :n1] = _completion(z1 / a, True) if a > 0 else np.eye(n1)
    Q[n1:, n1:] = _completion(z2 / a2, False) if a2 > 0 else np.eye(datum.n2)
    return Q, a, a2


def _adapted_blocks(family, datum, a, a2):
    d = {k: float(x) for k, x in family.L_derivs(a * a, a2 * a2).items()}
    if not all(np.isfinite(list(d.values()))):
        raise BoundaryDirection("L derivatives are not finite at this direction")
    return d


def fundamental_tensor(family: GeneratingFamily, datum: DatumDecomposition, y) -> TensorBundleAtPoint:
    """Hessian of F**2 / 2 and its inverse, in frame coordinates."""
    z, _, _ = _uv(datum, y)
    Q, a, a2 = adapted_rotation(datum, z)
    d = _adapted_blocks(family, datum, a, a2)
    n, n1 = datum.n, datum.n1
    L, L1, L2, L11, L12, L22 = d["L"], d["L1"], d["L2"], d["L11"], d["L12"], d["L22"]

    g = np.zeros((n, n))
    g[np.arange(n1), np.arange(n1)] = L1
    g[np.arange(n1, n), np.arange(n1, n)] = L2
    g[0, 0] = L1 + 2 * a * a * L11
    g[-1, -1] = L2 + 2 * a2 * a2 * L22
    g[0, -1] = g[-1, 0] = 2 * a * a2 * L12

    D = L1 * L2 - 2 * L * L12
    if not (L1 > 0 and L2 > 0 and D > 0 and g[0, 0] > 0):
        raise IndefiniteTensor(f"fundamental tensor of {family} is not positive definite at y")
    g_inv = np.zeros((n, n))
    g_inv[np.arange(n1), np.arange(n1)] = 1.0 / L1
    g_inv[np.arange(n1, n), np.arange(n1, n)] = 1.0 / L2
    g_inv[0, 0] = (L2 + 2 * a2 * a2 * L22) / D
    g_inv[-1, -1] = (L1 + 2 * a * a * L11) / D
    g_inv[0, -1] = g_inv[-1, 0] = -2 * a * a2 * L12 / D

    return TensorBundleAtPoint(
        y=np.asarray(y, dtype=float),
        a=a,
        a2=a2,
        g=Q @ g @ Q.T,
        g_inv=Q @ g_inv @ Q.T,
        boundary=(a == 0.0 or a2 == 0.0),
    )


def _sym3(C, i, j, k, val):
    for p in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
        C[p] = val


def cartan_tensor(family: GeneratingFamily, datum: DatumDecomposition, y) -> TensorBundleAtPoint:
    """Cartan tensor ``C_ijk = (1/2) d_k g_ij`` and mean torsion ``I_k = g^ij C_ijk``.

    ``I`` is left as ``None`` (with ``boundary`` set) for y in V1 or V2.
    """
    z, _, _ = _uv(datum, y)
    Q, a, a2 = adapted_rotation(datum, z)
    d = _adapted_blocks(family, datum, a, a2)
    n, n1 = datum.n, datum.n1
    L, L1, L2 = d["L"], d["L1"], d["L2"]
    L11, L12, L22 = d["L11"], d["L12"], d["L22"]
    L111, L112, L122, L222 = d["L111"], d["L112"], d["L122"], d["L222"]
    f, l = 0, n - 1

    C = np.zeros((n, n, n))
    _sym3(C, f, f, f, 3 * a * L11 + 2 * a**3 * L111)
    _sym3(C, l, l, f, a * L12 + 2 * a * a2 * a2 * L122)
    _sym3(C, l, f, f, a2 * L12 + 2 * a * a * a2 * L112)
    _sym3(C, l, l, l, 3 * a2 * L22 + 2 * a2**3 * L222)
    for i in range(1, n1):
        _sym3(C, i, i, f, a * L11)
        _sym3(C, i, i, l, a2 * L12)
    for i in range(n1, n - 1):
        _sym3(C, i, i, f, a * L12)
        _sym3(C, i, i, l, a2 * L22)
    C = np.einsum("ia,jb,kc,abc->ijk", Q, Q, Q, C)

    bundle = TensorBundleAtPoint(y=np.asarray(y, dtype=float), a=a, a2=a2, C=C, boundary=(a == 0.0 or a2 == 0.0))
    if bundle.boundary:
        return bundle
    D = L1 * L2 - 2 * L * L12
    I_ad = np.zeros(n)
    I_ad[f] = (-L * L12 - 2 * a * a * L * L112) / (a * D) + (n1 - 1) * a * L11 / L1 + (datum.n2 - 1) * a * L12 / L2
    I_ad[l] = (-L * L12 - 2 * a2 * a2 * L * L122) / (a2 * D) + (n1 - 1) * a2 * L12 / L1 + (datum.n2 - 1) * a2 * L22 / L2
    bundle.I = Q @ I_ad
    return bundle


def log_det_hessian(family: GeneratingFamily, datum: DatumDecomposition, y) -> float:
    """``ln sqrt(det g(y))``: the distortion up to its per-space constant."""
    z, _, _ = _uv(datum, y)
    a = float(np.linalg.norm(z[: datum.n1]))
    a2 = float(np.linalg.norm(z[datum.n1 :]))
    d = _adapted_blocks(family, datum, a, a2)
    D = d["L1"] * d["L2"] - 2 * d["L"] * d["L12"]
    if not (d["L1"] > 0 and d["L2"] > 0 and D > 0):
        raise IndefiniteTensor(f"fundamental tensor of {family} is not positive definite at y")
    return 0.5 * ((datum.n1 - 1) * np.log(d["L1"]) + (datum.n2 - 1) * np.log(d["L2"]) + np.log(D))


# ---------------------------------------------------------------- oracles
class FDHessian(NamedTuple):
    hessian: np.ndarray
    one_sided: bool


def hessian_fd_oracle(family: GeneratingFamily, datum: DatumDecomposition, y, step: float = 1e-5) -> FDHessian:
    """Second differences of F**2 / 2 in frame coordinates.

    Function values are taken in 40-digit arithmetic so the result is
    limited by the O(step**2) truncation error, not by cancellation.
    Central differences are used unless the stencil would come within
    ``2 * step`` of V1 or V2; then forward differences are taken and
    ``one_sided`` is set.
    """
    z, u, v = _uv(datum, y)
    alpha = np.sqrt(u + v)
    if not 0 < step <= alpha / 100:
        raise ValueError(f"step must lie in (0, alpha(y)/100] = (0, {alpha / 100:.3g}]")
    n1, n = datum.n1, datum.n
    one_sided = min(np.sqrt(u), np.sqrt(v)) < 2 * step
    H = np.zeros((n, n))
    with mpmath.workdps(40):
        zm = [mpmath.mpf(float(x)) for x in z]
        h = mpmath.mpf(step)

        def half_sq(i=None, si=0, j=None, sj=0):
            w = list(zm)
            if i is not None:
                w[i] += si * h
            if j is not None:
                w[j] += sj * h
            return family.L_mp(mpmath.fsum(x * x for x in w[:n1]), mpmath.fsum(x * x for x in w[n1:])) / 2

        if not one_sided:
            for i in range(n):
                for j in range(i, n):
                    val = (half_sq(i, 1, j, 1) - half_sq(i, 1, j, -1) - half_sq(i, -1, j, 1) + half_sq(i, -1, j, -1))
                    H[i, j] = H[j, i] = float(val / (4 * h * h))
        else:
            f0 = half_sq()
            fi = [half_sq(i, 1) for i in range(n)]
            for i in range(n):
                for j in range(i, n):
                    val = half_sq(i, 1, j, 1) - fi[i] - fi[j] + f0
                    H[i, j] = H[j, i] = float(val / (h * h))
    return FDHessian(H, bool(one_sided))


def log_det_gradient_fd(family: GeneratingFamily, datum: DatumDecomposition, y, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of ``log_det_hessian`` in frame coordinates.

    The log-determinant is re-evaluated in 40-digit arithmetic so that the
    only error left is the O(step**2) truncation.
    """
    z = datum.coords(y)
    n1 = datum.n1
    derivs = family.L_derivs_mp

    def log_det(w):
        u = mpmath.fsum(x * x for x in w[:n1])
        v = mpmath.fsum(x * x for x in w[n1:])
        L, L1, L2, L12 = (derivs[k](u, v) for k in ("L", "L1", "L2", "L12"))
        D = L1 * L2 - 2 * L * L12
        if not (L1 > 0 and L2 > 0 and D > 0):
            raise IndefiniteTensor(f"fundamental tensor of {family} is not positive definite at y")
        return ((n1 - 1) * mpmath.log(L1) + (datum.n2 - 1) * mpmath.log(L2) + mpmath.log(D)) / 2

    grad = np.zeros(datum.n)
    with mpmath.workdps(40):
        base = [mpmath.mpf(float(x)) for x in z]
        h = mpmath.mpf(step)
        for k in range(datum.n):
            plus, minus = list(base), list(base)
            plus[k] += h
            minus[k] -= h
            grad[k] = float((log_det(plus) - log_det(minus)) / (2 * h))
    return grad


def is_riemannian(family: GeneratingFamily, datum: DatumDecomposition, samples: int = 64, seed: int = 0) -> bool:
    """True iff the mean torsion vanishes (below 1e-9) at sampled interior directions."""
    rng = np.random.default_rng(seed)
    frame = np.eye(datum.n) if datum.frame is None else datum.frame
    worst = 0.0
    for _ in range(samples):
        z = rng.standard_normal(datum.n)
        I = cartan_tensor(family, datum, frame @ z).I
        if I is not None:
            worst = max(worst, float(np.linalg.norm(I)))
    return worst < 1e-9


def random_block_rotation(datum: DatumDecomposition, rng: np.random.Generator) -> np.ndarray:
    """Random element of SO(n1) x SO(n2) acting on frame coordinates."""
    R = np.zeros((datum.n, datum.n))
    for lo, hi in ((0, datum.n1), (datum.n1, datum.n)):
        q, r = np.linalg.qr(rng.standard_normal((hi - lo, hi - lo)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        R[lo:hi, lo:hi] = q
    return R
