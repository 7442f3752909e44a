"""Generating profiles of (alpha1, alpha2)-norms.

A norm is described by any one of three scalar profiles

* ``phi`` on [0, 1] with ``F = alpha * phi(alpha2 / alpha)``
* ``psi`` on [0, 1] with ``F = alpha * psi(alpha1 / alpha)``
* ``L`` on the closed quadrant with ``F = sqrt(L(alpha1**2, alpha2**2))``

related by ``phi(s) = psi(sqrt(1 - s**2))`` and
``L(u, v) = (u + v) * phi(sqrt(v / (u + v)))**2``.  Derivatives are
obtained by symbolic differentiation; finite differences are kept out of
this path so that they remain usable as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import sympy as sp

U_VAR, V_VAR = sp.symbols("u v", nonnegative=True)
S_VAR = sp.symbols("s", nonnegative=True)
_T = sp.symbols("t", positive=True)

# index tuples of the L-derivatives used by the tensor formulas
L_KEYS = ("L", "L1", "L2", "L11", "L12", "L22", "L111", "L112", "L122", "L222")
_L_ORDERS = {
    "L": (),
    "L1": (U_VAR,),
    "L2": (V_VAR,),
    "L11": (U_VAR, U_VAR),
    "L12": (U_VAR, V_VAR),
    "L22": (V_VAR, V_VAR),
    "L111": (U_VAR, U_VAR, U_VAR),
    "L112": (U_VAR, U_VAR, V_VAR),
    "L122": (U_VAR, V_VAR, V_VAR),
    "L222": (V_VAR, V_VAR, V_VAR),
}

KINDS = ("riemannian", "mroot", "phi", "psi", "L")


class FamilyError(ValueError):
    """Malformed family specification or unsupported conversion."""


class NonPositiveProfile(FamilyError):
    """A profile takes a non-positive value on its domain."""


def _parse_expr(text: str, symbols: dict[str, sp.Symbol]) -> sp.Expr:
    text = text.strip().replace("^", "**")
    try:
        expr = sp.sympify(text, locals=dict(symbols, sqrt=sp.sqrt, exp=sp.exp, log=sp.log))
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise FamilyError(f"cannot parse expression {text!r}: {exc}") from None
    extra = expr.free_symbols - set(symbols.values())
    if extra:
        raise FamilyError(f"unexpected symbols {sorted(map(str, extra))} in {text!r}")
    return expr


def _lambdify1(expr: sp.Expr, var: sp.Symbol) -> Callable[[np.ndarray], np.ndarray]:
    f = sp.lambdify(var, expr, "numpy")

    def call(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()

    return call


def _lambdify2(expr: sp.Expr) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    f = sp.lambdify((U_VAR, V_VAR), expr, "numpy")

    def call(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(u.shape, v.shape)
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(f(u, v), dtype=float), shape).copy()

    return call


@dataclass(frozen=True)
class GeneratingFamily:
    """One norm profile together with its symbolic derivatives.

    ``kind`` is one of ``riemannian``, ``mroot``, ``phi``, ``psi``, ``L``.
    ``profile`` is the defining expression: in ``s`` for ``phi``/``psi``,
    in ``u, v`` otherwise.  ``scale`` = (k1, k2) reparametrises the
    arguments, ``L~(u, v) = L(u / k1, v / k2)``; it is how normalisation
    is carried without re-deriving expressions.
    """

    kind: str
    profile: sp.Expr
    params: tuple = ()
    scale: tuple = (sp.Integer(1), sp.Integer(1))
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}")

    @property
    def _unscaled(self) -> bool:
        return self.scale[0] == 1 and self.scale[1] == 1

    # ------------------------------------------------------------------ forms
    @cached_property
    def L_expr(self) -> sp.Expr:
        if self.kind in ("riemannian", "mroot", "L"):
            base = self.profile
        elif self.kind == "phi":
            sq = sp.expand(self.profile.subs(S_VAR, sp.sqrt(_T)) ** 2)
            base = (U_VAR + V_VAR) * sq.subs(_T, V_VAR / (U_VAR + V_VAR))
        else:  # psi
            sq = sp.expand(self.profile.subs(S_VAR, sp.sqrt(_T)) ** 2)
            base = (U_VAR + V_VAR) * sq.subs(_T, U_VAR / (U_VAR + V_VAR))
        k1, k2 = self.scale
        if not self._unscaled:
            base = base.subs({U_VAR: U_VAR / k1, V_VAR: V_VAR / k2}, simultaneous=True)
        return base

    @cached_property
    def phi_expr(self) -> sp.Expr:
        if self.kind == "phi" and self._unscaled:
            return self.profile
        if self.kind == "psi" and self._unscaled:
            return self.profile.subs(S_VAR, sp.sqrt(1 - S_VAR**2))
        return sp.sqrt(self.L_expr.subs({U_VAR: 1 - S_VAR**2, V_VAR: S_VAR**2}, simultaneous=True))

    @cached_property
    def psi_expr(self) -> sp.Expr:
        if self.kind == "psi" and self._unscaled:
            return self.profile
        if self.kind == "phi" and self._unscaled:
            return self.profile.subs(S_VAR, sp.sqrt(1 - S_VAR**2))
        return sp.sqrt(self.L_expr.subs({U_VAR: S_VAR**2, V_VAR: 1 - S_VAR**2}, simultaneous=True))

    # ------------------------------------------------------------- numerics
    @cached_property
    def _L_funcs(self) -> dict[str, Callable]:
        return {k: _lambdify2(sp.diff(self.L_expr, *o) if o else self.L_expr) for k, o in _L_ORDERS.items()}

    @cached_property
    def _phi_funcs(self) -> tuple[Callable, Callable, Callable]:
        e = self.phi_expr
        return tuple(_lambdify1(sp.diff(e, S_VAR, k) if k else e, S_VAR) for k in range(3))

    @cached_property
    def _psi_funcs(self) -> tuple[Callable, Callable, Callable]:
        e = self.psi_expr
        return tuple(_lambdify1(sp.diff(e, S_VAR, k) if k else e, S_VAR) for k in range(3))

    @cached_property
    def L_mp(self) -> Callable:
        """L in mpmath arithmetic, for high-precision oracles."""
        return sp.lambdify((U_VAR, V_VAR), self.L_expr, "mpmath")

    @cached_property
    def L_derivs_mp(self) -> dict[str, Callable]:
        """First-order data ``L, L1, L2, L12`` in mpmath arithmetic."""
        return {k: sp.lambdify((U_VAR, V_VAR), sp.diff(self.L_expr, *_L_ORDERS[k]) if _L_ORDERS[k] else self.L_expr, "mpmath")
                for k in ("L", "L1", "L2", "L12")}

    def L(self, u, v):
        return self._L_funcs["L"](u, v)

    def L_derivs(self, u, v) -> dict[str, np.ndarray]:
        """L and its partial derivatives up to order three at (u, v)."""
        return {k: f(u, v) for k, f in self._L_funcs.items()}

    def phi(self, s, order: int = 0):
        return self._phi_funcs[order](s)

    def psi(self, s, order: int = 0):
        return self._psi_funcs[order](s)

    @cached_property
    def is_linear(self) -> bool:
        """True when L is linear in (u, v), i.e. the norm is Euclidean."""
        e = self.L_expr
        return all(sp.simplify(sp.diff(e, *o)) == 0 for o in ((U_VAR, U_VAR), (U_VAR, V_VAR), (V_VAR, V_VAR)))

    def __str__(self) -> str:
        return self.label or f"{self.kind}:{self.profile}"


# ---------------------------------------------------------------- factories
def riemannian(c1: float = 1.0, c2: float = 1.0) -> GeneratingFamily:
    if c1 <= 0 or c2 <= 0:
        raise NonPositiveProfile("riemannian family needs c1, c2 > 0")
    expr = sp.nsimplify(c1) * U_VAR + sp.nsimplify(c2) * V_VAR
    return GeneratingFamily("riemannian", expr, (c1, c2), label=f"riemannian:{c1:g},{c2:g}")


def mroot(m: int = 2) -> GeneratingFamily:
    """F**2 = alpha**2 + (alpha1**(2m) + alpha2**(2m))**(1/m), m >= 2 an integer."""
    if int(m) != m or m < 2:
        raise FamilyError("mroot family needs an integer m >= 2")
    m = int(m)
    expr = U_VAR + V_VAR + (U_VAR**m + V_VAR**m) ** sp.Rational(1, m)
    return GeneratingFamily("mroot", expr, (m,), label=f"mroot:{m}")


def from_phi(text_or_expr) -> GeneratingFamily:
    expr = _parse_expr(text_or_expr, {"s": S_VAR}) if isinstance(text_or_expr, str) else sp.sympify(text_or_expr)
    return GeneratingFamily("phi", expr, label=f"phi:{text_or_expr}")


def from_psi(text_or_expr) -> GeneratingFamily:
    expr = _parse_expr(text_or_expr, {"s": S_VAR}) if isinstance(text_or_expr, str) else sp.sympify(text_or_expr)
    return GeneratingFamily("psi", expr, label=f"psi:{text_or_expr}")


def from_L(text_or_expr) -> GeneratingFamily:
    expr = _parse_expr(text_or_expr, {"u": U_VAR, "v": V_VAR}) if isinstance(text_or_expr, str) else sp.sympify(text_or_expr)
    return GeneratingFamily("L", expr, label=f"L:{text_or_expr}")


def parse_family(spec: str) -> GeneratingFamily:
    """Parse ``riemannian:c1,c2``, ``mroot:m``, ``phi:<expr in s>``, ``psi:<expr in s>`` or ``L:<expr in u,v>``."""
    kind, sep, rest = spec.partition(":")
    kind = kind.strip()
    if not sep:
        raise FamilyError(f"family spec {spec!r} lacks ':'")
    try:
        if kind == "riemannian":
            parts = [p for p in rest.split(",") if p.strip()]
            if len(parts) != 2:
                raise FamilyError("riemannian spec is riemannian:c1,c2")
            return riemannian(float(parts[0]), float(parts[1]))
        if kind == "mroot":
            return mroot(int(rest))
    except ValueError as exc:
        if isinstance(exc, FamilyError):
            raise
        raise FamilyError(f"bad parameters in {spec!r}") from None
    if kind == "phi":
        return from_phi(rest)
    if kind == "psi":
        return from_psi(rest)
    if kind == "L":
        return from_L(rest)
    raise FamilyError(f"unknown family kind {kind!r}")


def convert_generating(family: GeneratingFamily, target: str, grid_size: int = 101) -> GeneratingFamily:
    """Express the same norm through the ``phi``, ``psi`` or ``L`` profile."""
    if target not in ("phi", "psi", "L"):
        raise FamilyError(f"unsupported conversion target {target!r}")
    if target == "phi":
        out = GeneratingFamily("phi", family.phi_expr, label=f"phi:{family.phi_expr}")
    elif target == "psi":
        out = GeneratingFamily("psi", family.psi_expr, label=f"psi:{family.psi_expr}")
    else:
        out = GeneratingFamily("L", family.L_expr, label=f"L:{family.L_expr}")
    s = np.linspace(0.0, 1.0, grid_size)
    vals = out.phi(s)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise NonPositiveProfile(f"profile of {family} is not positive on [0, 1]")
    return out
