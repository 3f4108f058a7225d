"""Dense reference numerics: rendering, Hermitian spectra, Schmidt coefficients,
and alternating minimization over product states."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .pauli import check_dense
from .stabilizer import StabilizerGroup
from .witness import Witness, apply_witness

HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-8


class NonHermitian(ValueError):
    pass


@dataclass(frozen=True)
class Bipartition:
    """Q as 1-based sites; the complement is implied."""

    n: int
    subset: tuple[int, ...]

    def __post_init__(self):
        q = tuple(sorted(set(int(s) for s in self.subset)))
        if not q or len(q) >= self.n or q[0] < 1 or q[-1] > self.n:
            raise ValueError(f"bipartition needs a nonempty proper subset of 1..{self.n}, got {self.subset}")
        object.__setattr__(self, "subset", q)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(s for s in range(1, self.n + 1) if s not in self.subset)

    def __str__(self) -> str:
        return "".join(map(str, self.subset)) + "|" + "".join(map(str, self.complement))


def all_bipartitions(n: int) -> list[Bipartition]:
    """Each unordered split once, with site 1 always in Q."""
    out = []
    rest = range(2, n + 1)
    for size in range(0, n - 1):
        for extra in itertools.combinations(rest, size):
            out.append(Bipartition(n, (1,) + extra))
    return out


def dense_witness(w: Witness, cap: int | None = None) -> np.ndarray:
    dim = check_dense(w.d, w.n, cap)
    return apply_witness(w, np.eye(dim, dtype=complex))


def _hermitize(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > HERMITIAN_TOL:
        raise NonHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    h = (m + m.conj().T) / 2
    # real symmetric problems are several times faster in LAPACK
    if np.iscomplexobj(h) and (not h.size or np.max(np.abs(h.imag)) < 1e-14):
        h = h.real
    return h


def hermitian_spectrum(m: np.ndarray, vectors: bool = False):
    """Sorted real eigenvalues; each eigenpair has residual at most 1e-8."""
    h = _hermitize(m)
    vals, vecs = np.linalg.eigh(h)
    if h.size:
        res = np.linalg.norm(h @ vecs - vecs * vals, axis=0)
        if res.max() > RESIDUAL_TOL * max(1.0, np.abs(vals).max()):
            raise ArithmeticError(f"eigenpair residual {res.max():.3e} above tolerance")
    return (vals, vecs) if vectors else vals


def min_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_hermitize(m))[0])


def _split(arr: np.ndarray, bp: Bipartition, d: int) -> np.ndarray:
    n = bp.n
    if arr.shape[0] != d**n:
        raise ValueError(f"dimension {arr.shape[0]} does not factor as {d}^{n}")
    order = [s - 1 for s in bp.subset] + [s - 1 for s in bp.complement]
    return arr.reshape([d] * n).transpose(order).reshape(d ** len(bp.subset), -1)


def schmidt_coefficients(state: np.ndarray, bp: Bipartition, d: int = 2) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.linalg.svd(_split(state, bp, d), compute_uv=False)


def _operator_blocks(m: np.ndarray, bp: Bipartition, d: int) -> np.ndarray:
    """m as a tensor T[a, b, a', b'] with a on Q and b on the complement."""
    n = bp.n
    dq, dr = d ** len(bp.subset), d ** (n - len(bp.subset))
    order = [s - 1 for s in bp.subset] + [s - 1 for s in bp.complement]
    t = np.asarray(m, dtype=complex).reshape([d] * (2 * n))
    t = t.transpose(order + [n + o for o in order])
    return t.reshape(dq, dr, dq, dr)


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _min_vec(h: np.ndarray) -> tuple[float, np.ndarray]:
    h = (h + h.conj().T) / 2
    vals, vecs = np.linalg.eigh(h)
    return float(vals[0]), vecs[:, 0]


def min_product_expectation(
    m: np.ndarray,
    bp: Bipartition,
    d: int = 2,
    restarts: int = 20,
    seed: int = 0,
    max_iter: int = 500,
    tol: float = 1e-12,
) -> float:
    """Smallest <a (x) b| m |a (x) b> found by alternating minimum-eigenvector updates.

    Each restart fixes a random complement vector and alternates until the
    value changes by less than ``tol``.  The result is an upper bound on the
    true minimum; it is nonincreasing in ``restarts`` for a fixed seed.
    """
    _hermitize(m)
    t = _operator_blocks(m, bp, d)
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(max(restarts, 1)):
        b = _random_unit(rng, t.shape[1])
        prev = np.inf
        for _ in range(max_iter):
            val, a = _min_vec(np.einsum("j,ijkl,l->ik", b.conj(), t, b))
            val, b = _min_vec(np.einsum("i,ijkl,k->jl", a.conj(), t, a))
            if prev - val < tol:
                break
            prev = val
        best = min(best, val)
    return float(best)


def min_product_over_bipartitions(m: np.ndarray, n: int, d: int = 2, restarts: int = 20, seed: int = 0) -> dict:
    """Per-bipartition minima plus the overall minimum."""
    out = {str(bp): min_product_expectation(m, bp, d, restarts, seed) for bp in all_bipartitions(n)}
    return {"per_bipartition": out, "minimum": min(out.values())}


def subspace_product_overlap(projector: np.ndarray, n: int, d: int = 2, restarts: int = 20, seed: int = 0) -> float:
    """max over bipartitions and product states of <phi|P|phi>."""
    return -min_product_over_bipartitions(-np.asarray(projector), n, d, restarts, seed)["minimum"]


def ggm_spot_check(group: StabilizerGroup, restarts: int = 20, seed: int = 0, cap: int | None = None) -> float:
    """1 - max product overlap with the stabilized subspace."""
    p = group.projector(cap)
    return 1.0 - subspace_product_overlap(p, group.n, group.d, restarts, seed)


def psd_margin(a: np.ndarray, b: np.ndarray | None = None, alpha: float = 1.0) -> float:
    """Minimum eigenvalue of a - alpha b (of a alone when b is None)."""
    return min_eigenvalue(a if b is None else a - alpha * b)
