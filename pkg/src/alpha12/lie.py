"""Compact Lie algebras in coordinates: su(n), brackets, centralizers, Ad-orbits."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import expm, null_space


class GapError(ValueError):
    """No clear singular-value gap separates the numerical kernel."""


@dataclass(frozen=True, eq=False)
class CompactLieAlgebra:
    """Real Lie algebra given by structure constants.

    ``structure[k, i, j]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
    ``bi_form`` is the Gram matrix of the bi-invariant inner product and
    ``cartan`` holds a basis of a Cartan subalgebra as rows.
    """

    name: str
    labels: tuple[str, ...]
    structure: np.ndarray
    bi_form: np.ndarray
    cartan: np.ndarray
    matrices: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def rank(self) -> int:
        return self.cartan.shape[0]

    def to_matrix(self, elem) -> np.ndarray:
        if self.matrices is None:
            raise ValueError(f"{self.name} has no matrix model")
        return np.tensordot(np.asarray(elem, dtype=float), self.matrices, axes=1)

    def from_matrix(self, mat) -> np.ndarray:
        """Coordinates of a matrix in the span of the basis (orthonormal basis assumed)."""
        mat = np.asarray(mat)
        coords = np.array([-np.trace(mat @ B).real for B in self.matrices])
        return np.linalg.solve(self.bi_form, coords)


def _check(algebra: CompactLieAlgebra, elem) -> np.ndarray:
    elem = np.asarray(elem, dtype=float)
    if elem.shape != (algebra.dim,):
        raise ValueError(f"expected a vector of length {algebra.dim}, got shape {elem.shape}")
    return elem


@lru_cache(maxsize=None)
def build_su(n: int) -> CompactLieAlgebra:
    """su(n) with a basis orthonormal for <a, b> = -trace(ab).

    The first ``n - 1`` basis vectors span the diagonal Cartan subalgebra,
    followed by the pairs ``(E_jk - E_kj)/sqrt2`` and ``i(E_jk + E_kj)/sqrt2``.
    """
    if n < 2:
        raise ValueError("su(n) needs n >= 2")
    mats, labels = [], []
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        d /= np.sqrt(k * (k + 1))
        mats.append(np.diag(1j * d))
        labels.append(f"H{k}")
    for j in range(n):
        for k in range(j + 1, n):
            A = np.zeros((n, n), dtype=complex)
            A[j, k], A[k, j] = 1.0, -1.0
            S = np.zeros((n, n), dtype=complex)
            S[j, k] = S[k, j] = 1j
            mats += [A / np.sqrt(2), S / np.sqrt(2)]
            labels += [f"A{j + 1}{k + 1}", f"S{j + 1}{k + 1}"]
    mats = np.array(mats)
    dim = len(mats)
    gram = np.array([[-np.trace(x @ y).real for y in mats] for x in mats])
    structure = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(i + 1, dim):
            br = mats[i] @ mats[j] - mats[j] @ mats[i]
            c = np.linalg.solve(gram, [-np.trace(br @ b).real for b in mats])
            structure[:, i, j] = c
            structure[:, j, i] = -c
    structure[np.abs(structure) < 1e-15] = 0.0
    cartan = np.eye(dim)[: n - 1]
    for arr in (structure, gram, cartan, mats):
        arr.setflags(write=False)
    return CompactLieAlgebra(f"su{n}", tuple(labels), structure, gram, cartan, mats)


def parse_algebra(spec: str) -> CompactLieAlgebra:
    """``su2``, ``su3``, ``su(4)``, ..."""
    m = re.fullmatch(r"\s*su\(?(\d+)\)?\s*", spec)
    if not m:
        raise ValueError(f"unknown algebra spec {spec!r}; expected suN")
    return build_su(int(m.group(1)))


# -------------------------------------------------------------- brackets
def ad(algebra: CompactLieAlgebra, elem) -> np.ndarray:
    """Matrix of ``[elem, .]``."""
    elem = _check(algebra, elem)
    return np.einsum("kij,i->kj", algebra.structure, elem)


def bracket(algebra: CompactLieAlgebra, elem, other) -> np.ndarray:
    return ad(algebra, elem) @ _check(algebra, other)


def bracket_and_ad(algebra: CompactLieAlgebra, elem) -> tuple:
    """``(bracket closure other -> [elem, other], ad(elem))``."""
    A = ad(algebra, elem)
    return (lambda other: A @ _check(algebra, other)), A


def jacobi_residual(algebra: CompactLieAlgebra) -> float:
    c = algebra.structure
    # [e_i,[e_j,e_k]] + cyclic, contracted over the intermediate index
    t = np.einsum("mil,ljk->mijk", c, c)
    return float(np.abs(t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)).max())


def antisymmetry_residual(algebra: CompactLieAlgebra) -> float:
    return float(np.abs(algebra.structure + algebra.structure.transpose(0, 2, 1)).max())


def ad_invariance_residual(algebra: CompactLieAlgebra) -> float:
    """max |<[e_i,e_j],e_k> + <e_j,[e_i,e_k]>| over basis triples."""
    B = algebra.bi_form
    t = np.einsum("mij,mk->ijk", algebra.structure, B)
    return float(np.abs(t + t.transpose(0, 2, 1)).max())


# ------------------------------------------------------------ centralizers
def numerical_kernel(mat: np.ndarray, tol: float = 1e-9, gap: float = 1e3) -> np.ndarray:
    """Orthonormal kernel basis (rows) of ``mat`` with a checked singular-value gap."""
    _, sv, Vt = np.linalg.svd(mat)
    n = mat.shape[1]
    sv = np.concatenate([sv, np.zeros(n - sv.size)])
    top = sv[0] if sv[0] > 0 else 1.0
    small = sv <= tol * top
    k = int(small.sum())
    if k and k < n:
        if sv[n - k - 1] < gap * tol * top:
            raise GapError("no clear singular-value gap at the kernel threshold")
    if 0 < k < n:
        smallest_kept = sv[n - k - 1]
        largest_dropped = sv[n - k]
        if largest_dropped > 0 and smallest_kept / largest_dropped < gap:
            raise GapError("kernel threshold falls inside a cluster of singular values")
    return Vt[n - k :] if k else np.zeros((0, n))


def centralizer(algebra: CompactLieAlgebra, elem, tol: float = 1e-9) -> np.ndarray:
    """Basis (rows) of the kernel of ad(elem); the whole algebra for elem = 0."""
    elem = _check(algebra, elem)
    if not np.any(elem):
        return np.eye(algebra.dim)
    return numerical_kernel(ad(algebra, elem), tol)


# ------------------------------------------------------------- Ad-transport
def adjoint_transport(algebra: CompactLieAlgebra, other, t: float, elem) -> np.ndarray:
    """``Ad(exp(t other)) elem = exp(t ad other) elem``."""
    return expm(t * ad(algebra, other)) @ _check(algebra, elem)


def random_group_element(algebra: CompactLieAlgebra, word_length: int, rng: np.random.Generator,
                         generators: Optional[np.ndarray] = None) -> np.ndarray:
    """Matrix of Ad(g) for g a product of ``word_length`` random exponentials.

    ``generators`` (rows) restricts the exponents to a subalgebra.
    """
    if word_length < 1:
        raise ValueError("word_length must be >= 1")
    mat = np.eye(algebra.dim)
    for _ in range(word_length):
        if generators is None:
            other = rng.standard_normal(algebra.dim)
        else:
            other = rng.standard_normal(generators.shape[0]) @ generators
        t = rng.uniform(-np.pi, np.pi)
        mat = expm(t * ad(algebra, other)) @ mat
    return mat


def random_orbit_sample(algebra: CompactLieAlgebra, elem, word_length: int = 3, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return random_group_element(algebra, word_length, rng) @ _check(algebra, elem)


# ------------------------------------------------------------- subspaces
@dataclass
class SubspaceInfo:
    is_commutative: bool
    basis: np.ndarray
    orthogonal_complement: np.ndarray
    pr1: np.ndarray
    pr2: np.ndarray


def subspace_tools(algebra: CompactLieAlgebra, vectors, form: Optional[np.ndarray] = None) -> SubspaceInfo:
    """Commutativity test, ``form``-orthogonal complement and projections.

    ``vectors`` holds basis vectors as rows; ``pr2`` projects onto span(vectors) and
    ``pr1`` onto its complement.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.shape[1] != algebra.dim:
        raise ValueError("basis vectors have the wrong length")
    if np.linalg.matrix_rank(vectors, tol=1e-10) < vectors.shape[0]:
        raise ValueError("dependent input basis")
    A = algebra.bi_form if form is None else np.asarray(form, dtype=float)
    comm = all(
        np.abs(bracket(algebra, vectors[i], vectors[j])).max() < 1e-12 for i in range(len(vectors)) for j in range(i + 1, len(vectors))
    )
    comp = null_space(vectors @ A).T
    # orthonormalise both pieces for the form
    def _orth(B):
        if B.shape[0] == 0:
            return B
        G = B @ A @ B.T
        w, P = np.linalg.eigh(G)
        return (P / np.sqrt(w)).T @ B

    Vo, Co = _orth(vectors), _orth(comp)
    pr2 = Vo.T @ Vo @ A
    pr1 = Co.T @ Co @ A
    return SubspaceInfo(comm, Vo, Co, pr1, pr2)


def real_root_spaces(algebra: CompactLieAlgebra, seed: int = 12345) -> tuple[list[np.ndarray], np.ndarray]:
    """Real root spaces for the algebra's Cartan subalgebra.

    Returns the list of 2-dimensional spaces (rows orthonormal for the
    bi-invariant form) and the matching root values on the Cartan basis,
    one positive root per space.
    """
    rng = np.random.default_rng(seed)
    H = rng.standard_normal(algebra.rank) @ algebra.cartan
    comp = subspace_tools(algebra, algebra.cartan).orthogonal_complement
    A = comp @ ad(algebra, H) @ comp.T  # skew in an orthonormal basis
    w, P = np.linalg.eigh(A @ A)
    spaces, roots = [], []
    order = np.argsort(w)
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and abs(w[order[j]] - w[order[i]]) < 1e-8 * max(1.0, abs(w[order[i]])):
            j += 1
        if j - i != 2:
            raise GapError("random Cartan element is not regular enough to separate root spaces")
        block = P[:, order[i:j]].T @ comp
        spaces.append(block)
        # root value on each Cartan basis vector: eigenvalue of ad(h) on the block
        vals = []
        for h in algebra.cartan:
            mat = block @ ad(algebra, h) @ block.T @ np.linalg.inv(block @ block.T)
            vals.append(mat[1, 0])
        roots.append(vals)
        i = j
    roots = np.array(roots)
    # fix orientation so the root pairs are positive on the random element
    for k in range(len(spaces)):
        if roots[k] @ (H @ algebra.cartan.T) < 0:
            spaces[k] = spaces[k][::-1].copy()
            roots[k] = -roots[k]
    return spaces, roots
