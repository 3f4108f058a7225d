"""Multigraphs, graph-state generators and vectors, and named generator families."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliWord, basis_digits, check_dense, is_prime
from .stabilizer import GeneratorSet, validate


@dataclass(frozen=True)
class Multigraph:
    """Undirected multigraph; ``adjacency[i][j]`` is the edge multiplicity (0-based vertices)."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        adj = tuple(tuple(int(v) for v in row) for row in self.adjacency)
        if self.n < 1 or len(adj) != self.n or any(len(r) != self.n for r in adj):
            raise ValueError("adjacency must be an n x n matrix with n >= 1")
        for i in range(self.n):
            if adj[i][i]:
                raise ValueError(f"self-loop at vertex {i + 1}")
            for j in range(self.n):
                if adj[i][j] < 0:
                    raise ValueError(f"negative multiplicity between {i + 1} and {j + 1}")
                if adj[i][j] != adj[j][i]:
                    raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges) -> Multigraph:
        """Edges as (i, j) or (i, j, multiplicity) with 1-based vertices."""
        adj = [[0] * n for _ in range(n)]
        for edge in edges:
            i, j = int(edge[0]) - 1, int(edge[1]) - 1
            mult = int(edge[2]) if len(edge) > 2 else 1
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge {tuple(edge)} references a vertex outside 1..{n}")
            if i == j:
                raise ValueError(f"self-loop at vertex {i + 1}")
            if mult < 0:
                raise ValueError(f"negative multiplicity in edge {tuple(edge)}")
            adj[i][j] += mult
            adj[j][i] += mult
        return cls(n, tuple(map(tuple, adj)))

    def edges(self) -> list[tuple[int, int, int]]:
        return [
            (i + 1, j + 1, self.adjacency[i][j])
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.adjacency[i][j]
        ]

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: dict | str) -> Multigraph:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_edges(int(data["n"]), data.get("edges", []))

    def as_array(self) -> np.ndarray:
        return np.array(self.adjacency, dtype=np.int64)


def star_graph(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(1, j) for j in range(2, n + 1)])


def path_graph(n: int) -> Multigraph:
    return Multigraph.from_edges(n, [(j, j + 1) for j in range(1, n)])


def random_multigraph(n: int, max_multiplicity: int, rng: np.random.Generator) -> Multigraph:
    adj = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, 1)
    adj[iu] = rng.integers(0, max_multiplicity + 1, size=len(iu[0]))
    adj = adj + adj.T
    return Multigraph(n, tuple(map(tuple, adj.tolist())))


def _word(d: int, n: int, x, z) -> PauliWord:
    return PauliWord(d, 0, tuple(x), tuple(z))


def graph_generators(g: Multigraph, d: int) -> GeneratorSet:
    """G_i = X_i prod_j Z_j^{Gamma_ij mod d}."""
    gens = []
    for i in range(g.n):
        x = [0] * g.n
        x[i] = 1
        gens.append(_word(d, g.n, x, g.adjacency[i]))
    out = GeneratorSet(d, g.n, tuple(gens), tuple(f"G{i + 1}" for i in range(g.n)))
    validate(out)
    return out


def graph_state_vector(g: Multigraph, d: int, cap: int | None = None) -> np.ndarray:
    """Amplitudes w^{tau(j)} / sqrt(d^N) with tau summed once per unordered vertex pair.

    Counting each pair once is what makes X_i prod_j Z_j^{Gamma_ij} stabilize
    the vector; summing over ordered pairs doubles every phase.
    """
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    dim = check_dense(d, g.n, cap)
    digits = basis_digits(d, g.n)
    upper = np.triu(g.as_array(), 1)
    tau = np.einsum("mr,rs,ms->m", digits, upper, digits) % d
    return np.exp(2j * np.pi * tau / d) / math.sqrt(dim)


def _require_n(n: int, minimum: int = 2) -> None:
    if n < minimum:
        raise ValueError(f"need N >= {minimum}, got {n}")


def ghz_generators(n: int, d: int) -> GeneratorSet:
    """prod_i X_i together with Z_{k-1} Z_k^dagger for k = 2..N."""
    _require_n(n)
    gens = [_word(d, n, [1] * n, [0] * n)]
    for k in range(1, n):
        z = [0] * n
        z[k - 1] = 1
        z[k] = d - 1
        gens.append(_word(d, n, [0] * n, z))
    return GeneratorSet(d, n, tuple(gens), tuple(f"G{i + 1}" for i in range(n)))


def cluster_generators(n: int, d: int) -> GeneratorSet:
    """Linear cluster: X on site k with Z on its chain neighbours."""
    _require_n(n)
    gens = []
    for k in range(n):
        x = [0] * n
        z = [0] * n
        x[k] = 1
        if k > 0:
            z[k - 1] = 1
        if k < n - 1:
            z[k + 1] = 1
        gens.append(_word(d, n, x, z))
    return GeneratorSet(d, n, tuple(gens), tuple(f"G{i + 1}" for i in range(n)))


def nd_subspace_generators(d: int) -> GeneratorSet:
    """prod X_i and prod Z_i on N = d qudits."""
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    return GeneratorSet(d, d, (_word(d, d, [1] * d, [0] * d), _word(d, d, [0] * d, [1] * d)), ("G1", "G2"))


def opt_subspace_parameters(n: int, d: int) -> tuple[int, int]:
    """(m, r): the number of Z-type generators ceil((N-1)/(d-1)) and the last Z power."""
    _require_n(n)
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    m = -(-(n - 1) // (d - 1))
    r = d - 1 - ((n - 2) % (d - 1))
    return m, r


def opt_subspace_generators(n: int, d: int) -> GeneratorSet:
    """prod X_i plus Z windows of width d overlapping on one site.

    Window j (j = 2..m) covers sites (d-1)(j-2)+1 .. (d-1)(j-1)+1; the last
    generator (index m+1) runs from (d-1)(m-1)+1 to N-1 and ends in Z_N^r.
    """
    m, r = opt_subspace_parameters(n, d)
    gens = [_word(d, n, [1] * n, [0] * n)]
    for j in range(2, m + 1):
        z = [0] * n
        for i in range((d - 1) * (j - 2) + 1, (d - 1) * (j - 1) + 2):
            z[i - 1] = 1
        gens.append(_word(d, n, [0] * n, z))
    z = [0] * n
    start = (d - 1) * (m - 1) + 1
    if not 1 <= start <= n - 1:
        raise ValueError(f"ill-formed last window for N={n}, d={d}")
    for i in range(start, n):
        z[i - 1] = 1
    z[n - 1] = r
    gens.append(_word(d, n, [0] * n, z))
    if any(sum(g.z) % d for g in gens[1:]):
        raise ValueError(f"window construction for N={n}, d={d} does not commute with prod X")
    return GeneratorSet(d, n, tuple(gens), tuple(f"G{i + 1}" for i in range(len(gens))))


def ghz_state_vector(n: int, d: int, cap: int | None = None) -> np.ndarray:
    dim = check_dense(d, n, cap)
    v = np.zeros(dim, dtype=complex)
    step = sum(d**p for p in range(n))
    v[[j * step for j in range(d)]] = 1 / math.sqrt(d)
    return v


def w_state_vector(n: int) -> np.ndarray:
    _require_n(n)
    dim = check_dense(2, n)
    v = np.zeros(dim, dtype=complex)
    v[[1 << (n - 1 - i) for i in range(n)]] = 1 / math.sqrt(n)
    return v


def wbar_state_vector(n: int) -> np.ndarray:
    """W with every bit flipped."""
    _require_n(n)
    dim = check_dense(2, n)
    v = np.zeros(dim, dtype=complex)
    v[[(dim - 1) ^ (1 << (n - 1 - i)) for i in range(n)]] = 1 / math.sqrt(n)
    return v


def five_qubit_code_generators() -> GeneratorSet:
    """X1 Z2 Z3 X4 and its three cyclic relatives (k = 4, N = 5)."""
    rows = ["XZZX1", "1XZZX", "X1XZZ", "ZX1XZ"]
    gens = tuple(PauliWord.from_label(r, 2) for r in rows)
    return GeneratorSet(2, 5, gens, tuple(f"G{i + 1}" for i in range(4)))
