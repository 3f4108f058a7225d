"""Qubit operators given as sums of Pauli strings: W-state unitaries, their non-local
stabilizers, and witnesses for the W, W/W-bar and GHZ/W constructions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from .graphs import ghz_state_vector, w_state_vector, wbar_state_vector
from .oracle import Bipartition, all_bipartitions, schmidt_coefficients
from .pauli import PauliWord, check_dense, monomial, multiply, to_dense
from .witness import RobustnessReport, Witness, expectation, normalized_trace, p_limit_from

PUBLISHED_WWBAR_PROJECTOR_PLIMIT = Fraction(8, 21)
WWBAR_STABILIZER_CONSTANT = Fraction(5, 3)
TOL = 1e-10

_LETTERS = {(0, 0): "1", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


class OperatorSum:
    """Complex-weighted sum of qubit words X^x Z^z; word phases are folded into the weights."""

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms: dict[tuple[tuple[int, ...], tuple[int, ...]], complex] = {}
        for key, w in (terms or {}).items():
            self._add(key, w)

    def _add(self, key, w) -> None:
        self.terms[key] = self.terms.get(key, 0) + complex(w)

    @classmethod
    def identity(cls, n: int, weight: complex = 1.0) -> OperatorSum:
        return cls(n, {((0,) * n, (0,) * n): weight})

    @classmethod
    def from_word(cls, word: PauliWord, weight: complex = 1.0) -> OperatorSum:
        if word.d != 2:
            raise ValueError("operator sums are qubit-only")
        return cls(word.n, {(word.x, word.z): weight * (-1) ** word.phase})

    @classmethod
    def from_strings(cls, strings, weight: complex = 1.0) -> OperatorSum:
        """Sum of per-site letter strings over 1/I, X, Z, Y (Y = i X Z)."""
        strings = list(strings)
        out = cls(len(strings[0]))
        for s in strings:
            out = out + cls.from_label(s, weight)
        return out

    @classmethod
    def from_label(cls, label: str, weight: complex = 1.0) -> OperatorSum:
        x, z = [], []
        ys = 0
        for ch in label:
            if ch not in "1IXZY":
                raise ValueError(f"unsupported letter {ch!r}")
            x.append(int(ch in "XY"))
            z.append(int(ch in "ZY"))
            ys += ch == "Y"
        return cls(len(label), {(tuple(x), tuple(z)): weight * 1j**ys})

    @classmethod
    def from_labels(cls, mapping: dict) -> OperatorSum:
        out = None
        for label, w in mapping.items():
            term = cls.from_label(label, w)
            out = term if out is None else out + term
        return out

    @classmethod
    def from_dense(cls, mat: np.ndarray, tol: float = 1e-12) -> OperatorSum:
        """Pauli decomposition via coefficient Tr(P^dagger M) / 2^N for every word P."""
        mat = np.asarray(mat, dtype=complex)
        dim = mat.shape[0]
        n = int(round(math.log2(dim)))
        if 2**n != dim or mat.shape != (dim, dim):
            raise ValueError("expected a 2^N x 2^N matrix")
        out = cls(n)
        cols = np.arange(dim)
        for code in range(4**n):
            x = tuple((code >> (2 * n - 1 - i)) & 1 for i in range(n))
            z = tuple((code >> (n - 1 - i)) & 1 for i in range(n))
            rows, values = monomial(PauliWord(2, 0, x, z))
            coeff = np.sum(values.conj() * mat[rows, cols]) / dim
            if abs(coeff) > tol:
                out.terms[(x, z)] = complex(coeff)
        return out

    def words(self):
        for (x, z), w in self.terms.items():
            yield w, PauliWord(2, 0, x, z)

    def __add__(self, other: OperatorSum) -> OperatorSum:
        self._check(other)
        out = OperatorSum(self.n, self.terms)
        for key, w in other.terms.items():
            out._add(key, w)
        return out.simplify()

    def __sub__(self, other: OperatorSum) -> OperatorSum:
        return self + other.scale(-1)

    def scale(self, c: complex) -> OperatorSum:
        return OperatorSum(self.n, {k: c * w for k, w in self.terms.items()})

    def __rmul__(self, c) -> OperatorSum:
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, OperatorSum):
            return self.scale(other)
        self._check(other)
        out = OperatorSum(self.n)
        for wa, a in self.words():
            for wb, b in other.words():
                p = multiply(a, b)
                out._add((p.x, p.z), wa * wb * (-1) ** p.phase)
        return out.simplify()

    def dagger(self) -> OperatorSum:
        out = OperatorSum(self.n)
        for w, word in self.words():
            dg = word.dagger()
            out._add((dg.x, dg.z), np.conj(w) * (-1) ** dg.phase)
        return out

    def simplify(self, tol: float = 1e-13) -> OperatorSum:
        self.terms = {k: w for k, w in self.terms.items() if abs(w) > tol}
        return self

    def _check(self, other: OperatorSum) -> None:
        if self.n != other.n:
            raise ValueError("operator sums on different numbers of qubits")

    def to_dense(self, cap: int | None = None) -> np.ndarray:
        dim = check_dense(2, self.n, cap)
        mat = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for w, word in self.words():
            rows, values = monomial(word)
            mat[rows, cols] += w * values
        return mat

    def trace_normalized(self) -> complex:
        return self.terms.get(((0,) * self.n, (0,) * self.n), 0.0)

    def label_terms(self) -> dict[str, complex]:
        """Weights on per-site Pauli strings with Y in place of XZ (XZ = -i Y)."""
        out = {}
        for (x, z), w in sorted(self.terms.items()):
            label = "".join(_LETTERS[(a, b)] for a, b in zip(x, z))
            out[label] = w * (-1j) ** label.count("Y")
        return out

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        diff = self - self.dagger()
        return all(abs(w) < tol for w in diff.terms.values())

    def as_witness_terms(self) -> tuple[tuple[complex, PauliWord], ...]:
        return tuple(self.words())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"pauli": k, "weight": [v.real, v.imag]} for k, v in self.label_terms().items()],
        }


def _string_sum(strings: list[str], weight: float) -> OperatorSum:
    return OperatorSum.from_strings(strings, weight)


def _rotate(base: list[str], s: int) -> list[str]:
    """Apply the cyclic site map i -> i+1 s times."""
    m = len(base)
    return [base[(i - s) % m] for i in range(m)]


def w_unitary_candidates(n: int) -> list[tuple[str, list[str]]]:
    """(name, strings) in preference order; the first is the printed rule."""
    if n < 3:
        raise ValueError("W unitary needs N >= 3")
    if n % 2:
        j = (n - 1) // 2
        base = ["X"] + ["Z"] * j + ["1"] * j
        return [("odd", ["".join(_rotate(base, s)) for s in range(n)])]
    j = n // 2
    out = []
    for name, base in (
        ("even-printed", ["X"] + ["Z"] * (j - 1) + ["1"] * j + ["Z"]),
        ("even-j-z", ["X"] + ["Z"] * j + ["1"] * (j - 1) + ["1"]),
    ):
        out.append((name, ["".join(_rotate(base, s)[:n]) for s in range(n)]))
    return out


@dataclass
class WUnitary:
    n: int
    operator: OperatorSum
    variant: str
    strings: list[str]
    rejected: list[str] = field(default_factory=list)


def w_unitary(n: int) -> WUnitary:
    """U with U|0...0> = |W_N>, from the first candidate string rule that is unitary and maps correctly."""
    target = w_state_vector(n)
    rejected = []
    for name, strings in w_unitary_candidates(n):
        op = _string_sum(strings, 1 / math.sqrt(n))
        u = op.to_dense()
        unitary = np.allclose(u @ u.conj().T, np.eye(2**n), atol=TOL)
        maps = np.allclose(u[:, 0], target, atol=TOL)
        if unitary and maps:
            return WUnitary(n, op, name, strings, rejected)
        rejected.append(name)
    raise AssertionError(f"no candidate W unitary for N={n} passed the unitarity and mapping checks")


def w_nonlocal_stabilizer(n: int, u: WUnitary | None = None) -> list[OperatorSum]:
    """S_k = U Z_k U^dagger expanded symbolically, each checked against dense conjugation."""
    u = u or w_unitary(n)
    ud = u.operator.dagger()
    dense_u = u.operator.to_dense()
    target = w_state_vector(n)
    out = []
    for k in range(n):
        zk = OperatorSum.from_word(PauliWord.single(2, n, k, z=1))
        s = u.operator * zk * ud
        dense = s.to_dense()
        ref = dense_u @ to_dense(PauliWord.single(2, n, k, z=1)) @ dense_u.conj().T
        if not np.allclose(dense, ref, atol=TOL):
            raise AssertionError(f"symbolic S_{k + 1} disagrees with dense conjugation")
        if not np.allclose(dense @ target, target, atol=TOL):
            raise AssertionError(f"S_{k + 1} does not stabilize |W_{n}>")
        out.append(s)
    return out


def printed_s1(n: int) -> OperatorSum:
    """The odd-N S_1 term pattern with N = 2j + 1 (0-based sites below).

    For m = 1..j: Y on sites 0 and m with Z between them and Z on sites
    j+1..j+m; X on sites 0 and j+m with Z on sites m..j and j+m+1..N-1.
    Each carries weight 2/N, plus (N-2)/N on Z_1.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError("printed S_1 pattern is for odd N >= 3")
    j = (n - 1) // 2
    labels: dict[str, complex] = {}
    for m in range(1, j + 1):
        y = ["1"] * n
        for i in list(range(1, m)) + list(range(j + 1, j + m + 1)):
            y[i] = "Z"
        y[0] = y[m] = "Y"
        x = ["1"] * n
        for i in list(range(m, j + 1)) + list(range(j + m + 1, n)):
            x[i] = "Z"
        x[0] = x[j + m] = "X"
        for label in ("".join(y), "".join(x)):
            labels[label] = labels.get(label, 0) + 2 / n
    labels["Z" + "1" * (n - 1)] = (n - 2) / n
    return OperatorSum.from_labels(labels)


def _custom_witness(constant: float, op: OperatorSum, kind: str = "custom", **metadata) -> Witness:
    return Witness(kind=kind, d=2, n=op.n, constant=float(constant), terms=op.as_witness_terms(), metadata=metadata)


def _report(w: Witness, state) -> RobustnessReport:
    e = expectation(w, state)
    t = normalized_trace(w)
    return RobustnessReport(p_limit_from(e, t), e, t)


def w_witness(n: int, stabilizers: list[OperatorSum] | None = None) -> tuple[Witness, RobustnessReport]:
    """((N^2 - 1)/N) 1 - sum_k S_k for odd N."""
    if n % 2 == 0:
        raise ValueError("the W-state stabilizer witness is stated for odd N only")
    stabilizers = stabilizers or w_nonlocal_stabilizer(n)
    total = stabilizers[0]
    for s in stabilizers[1:]:
        total = total + s
    w = _custom_witness((n * n - 1) / n, total.scale(-1), n_generators=n)
    return w, _report(w, w_state_vector(n))


def w_projector_witness_dense(n: int) -> np.ndarray:
    """((N-1)/N) 1 - |W><W|."""
    v = w_state_vector(n)
    return (n - 1) / n * np.eye(2**n) - np.outer(v, v.conj())


@dataclass
class SubspaceWitnesses:
    projector: Witness
    stabilizer: Witness
    generators: list[OperatorSum]
    projector_report: RobustnessReport
    stabilizer_report: RobustnessReport
    basis: np.ndarray
    extras: dict = field(default_factory=dict)

    def projector_dense(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def _maximally_mixed(basis: np.ndarray) -> np.ndarray:
    return basis @ basis.conj().T / basis.shape[1]


def wwbar_witnesses() -> SubspaceWitnesses:
    """Projector and stabilizer witnesses for span{W_3, W-bar_3} with generators S1 S2 and S1 S3."""
    s = w_nonlocal_stabilizer(3)
    gens = [s[0] * s[1], s[0] * s[2]]
    basis = np.stack([w_state_vector(3), wbar_state_vector(3)], axis=1)
    ident = OperatorSum.identity(3)
    p_v = (ident + gens[0]) * (ident + gens[1]) * 0.25
    if not np.allclose(p_v.to_dense(), basis @ basis.conj().T, atol=TOL):
        raise AssertionError("generated projector differs from |W><W| + |W-bar><W-bar|")
    for g in gens:
        if not np.allclose(g.to_dense() @ basis, basis, atol=TOL):
            raise AssertionError("generator fails to stabilize the W/W-bar subspace")
    proj = _custom_witness(2 / 3, p_v.scale(-1), kind="custom")
    stab = _custom_witness(float(WWBAR_STABILIZER_CONSTANT), (gens[0] + gens[1]).scale(-1))
    rho = _maximally_mixed(basis)
    proj_report = _report(proj, rho)
    stab_report = _report(stab, rho)
    extras = {
        "projector_p_limit_published": float(PUBLISHED_WWBAR_PROJECTOR_PLIMIT),
        "projector_p_limit_published_text": str(PUBLISHED_WWBAR_PROJECTOR_PLIMIT),
        "projector_p_limit_matches_published": bool(abs(proj_report.p_limit - float(PUBLISHED_WWBAR_PROJECTOR_PLIMIT)) < 1e-12),
        "projector_p_limit_difference": proj_report.p_limit - float(PUBLISHED_WWBAR_PROJECTOR_PLIMIT),
        "stabilizer_constant": str(WWBAR_STABILIZER_CONSTANT),
    }
    return SubspaceWitnesses(proj, stab, gens, proj_report, stab_report, basis, extras)


def _orthonormal_basis(subspace: np.ndarray) -> np.ndarray:
    """Columns spanning the range of a projector, or the given basis orthonormalized."""
    subspace = np.asarray(subspace, dtype=complex)
    if subspace.ndim == 1:
        return (subspace / np.linalg.norm(subspace)).reshape(-1, 1)
    if subspace.shape[0] == subspace.shape[1]:
        vals, vecs = np.linalg.eigh((subspace + subspace.conj().T) / 2)
        return vecs[:, vals > 0.5]
    q, _ = np.linalg.qr(subspace)
    return q


def _largest_schmidt_sq(psi: np.ndarray, bp: Bipartition) -> float:
    return float(schmidt_coefficients(psi, bp, 2)[0] ** 2)


def max_product_overlap(subspace, n: int, bipartitions=None, grid: int = 61, seed: int = 0) -> dict:
    """max over bipartitions of min over normalized psi in V of the largest squared Schmidt coefficient.

    For two-dimensional V, psi = cos(t) v1 + e^{i f} sin(t) v2 is scanned on a
    grid and the best points refined with Nelder-Mead; larger V use random
    complex starting points.  Returns the value with the per-bipartition
    minima and the final optimizer step size as a precision indicator.
    """
    basis = _orthonormal_basis(subspace)
    if basis.shape[0] != 2**n:
        raise ValueError("subspace dimension does not match N qubits")
    bps = list(bipartitions) if bipartitions is not None else all_bipartitions(n)
    k = basis.shape[1]
    per = {}
    precision = 0.0
    for bp in bps:
        if k == 1:
            per[str(bp)] = _largest_schmidt_sq(basis[:, 0], bp)
            continue
        if k == 2:
            def vec(p):
                return np.cos(p[0]) * basis[:, 0] + np.exp(1j * p[1]) * np.sin(p[0]) * basis[:, 1]

            ts = np.linspace(0, np.pi / 2, grid)
            fs = np.linspace(0, 2 * np.pi, 2 * grid, endpoint=False)
            vals = np.array([[_largest_schmidt_sq(vec((t, f)), bp) for f in fs] for t in ts])
            flat = np.argsort(vals, axis=None)[:5]
            starts = [(ts[i // len(fs)], fs[i % len(fs)]) for i in flat]
        else:
            rng = np.random.default_rng(seed)

            def vec(p):
                c = p[:k] + 1j * p[k:]
                c = c / np.linalg.norm(c)
                return basis @ c

            starts = [rng.normal(size=2 * k) for _ in range(20)]
        best = np.inf
        for x0 in starts:
            res = minimize(lambda p: _largest_schmidt_sq(vec(p), bp), np.asarray(x0, dtype=float),
                           method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
            if res.fun < best:
                best = float(res.fun)
                precision = max(precision, float(np.ptp(res.final_simplex[1])))
        if k == 2:
            best = min(best, float(vals.min()))
        per[str(bp)] = best
    return {"value": max(per.values()), "per_bipartition": per, "precision": precision}


_S = 1 / math.sqrt(2)
_T = 1 / math.sqrt(3)
_SIX = 1 / math.sqrt(6)

GHZW_U = np.array(
    [
        [0, _S, 0, 0, 0, 0, 0, _S],
        [_T, 0, _S, 0, _SIX, 0, 0, 0],
        [_T, 0, -_S, 0, _SIX, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [_T, 0, 0, 0, -2 * _SIX, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, _S, 0, 0, 0, 0, 0, -_S],
    ]
)

GHZW_S1 = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 2 / 3, -1 / 3, 0, 2 / 3, 0, 0, 0],
        [0, -1 / 3, 2 / 3, 0, 2 / 3, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 2 / 3, 2 / 3, 0, -1 / 3, 0, 0, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
    ]
)

GHZW_S2 = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, -1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
    ]
)


@dataclass
class GhzWFixture:
    u: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    projector: Witness
    stabilizer: Witness
    projector_report: RobustnessReport
    stabilizer_report: RobustnessReport
    basis: np.ndarray
    checks: dict


def ghzw_fixture() -> GhzWFixture:
    """The transcribed U, S_1, S_2 for span{GHZ_3, W_3}, self-checked, with both witnesses."""
    u, s1, s2 = GHZW_U.astype(complex), GHZW_S1.astype(complex), GHZW_S2.astype(complex)
    basis = np.stack([w_state_vector(3), ghz_state_vector(3, 2)], axis=1)
    z1 = to_dense(PauliWord.single(2, 3, 0, z=1))
    z2 = to_dense(PauliWord.single(2, 3, 1, z=1))
    eye = np.eye(8)
    checks = {
        "u_unitary": bool(np.allclose(u @ u.conj().T, eye, atol=TOL)),
        "u_maps_000_to_w": bool(np.allclose(u[:, 0], basis[:, 0], atol=TOL)),
        "u_maps_001_to_ghz": bool(np.allclose(u[:, 1], basis[:, 1], atol=TOL)),
        "s1_is_u_z1_udag": bool(np.allclose(u @ z1 @ u.conj().T, s1, atol=TOL)),
        "s2_is_u_z2_udag": bool(np.allclose(u @ z2 @ u.conj().T, s2, atol=TOL)),
        "s1_squared_identity": bool(np.allclose(s1 @ s1, eye, atol=TOL)),
        "s2_squared_identity": bool(np.allclose(s2 @ s2, eye, atol=TOL)),
        "s1_stabilizes": bool(np.allclose(s1 @ basis, basis, atol=TOL)),
        "s2_stabilizes": bool(np.allclose(s2 @ basis, basis, atol=TOL)),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise AssertionError(f"GHZ/W fixture self-check failed: {failed}")
    p_v = OperatorSum.from_dense(basis @ basis.conj().T)
    proj = _custom_witness(0.5, p_v.scale(-1))
    stab = _custom_witness(2 / 3, (OperatorSum.from_dense(s1) + OperatorSum.from_dense(s2)).scale(-1))
    rho = _maximally_mixed(basis)
    return GhzWFixture(u, s1, s2, proj, stab, _report(proj, rho), _report(stab, rho), basis, checks)
