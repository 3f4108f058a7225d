"""Commutation matrices, the LMS conflict graph, and exact graph coloring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliWord, site_commutation_exponents
from .stabilizer import GeneratorSet

MAX_COLORING_VERTICES = 32


@dataclass(frozen=True)
class CommutationProfile:
    site_matrices: np.ndarray  # (N, k, k), entries in Z_d
    total: np.ndarray  # (k, k) integer sum over sites, not reduced mod d
    conflict: np.ndarray  # (k, k) 0/1 adjacency

    def to_json(self) -> dict:
        return {
            "site_matrices": self.site_matrices.tolist(),
            "total": self.total.tolist(),
            "conflict": self.conflict.tolist(),
        }


@dataclass(frozen=True)
class Coloring:
    K: int
    classes: tuple[tuple[int, ...], ...]

    def colors(self) -> list[int]:
        n = sum(len(c) for c in self.classes)
        out = [-1] * n
        for color, members in enumerate(self.classes):
            for v in members:
                out[v] = color
        return out

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @classmethod
    def from_colors(cls, colors) -> Coloring:
        K = max(colors) + 1 if len(colors) else 0
        classes = tuple(tuple(v for v, c in enumerate(colors) if c == color) for color in range(K))
        if any(not c for c in classes):
            raise ValueError("color labels must be 0..K-1 with no empty class")
        return cls(K, classes)

    def is_proper(self, adjacency) -> bool:
        adj = np.asarray(adjacency)
        members = sorted(v for c in self.classes for v in c)
        if members != list(range(adj.shape[0])):
            return False
        return all(not adj[u, v] for c in self.classes for u in c for v in c if u != v)


def commutation_profile(gens: GeneratorSet) -> CommutationProfile:
    k, n = gens.k, gens.n
    site = np.zeros((n, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            if i != j:
                site[:, i, j] = site_commutation_exponents(gens.generators[i], gens.generators[j])
    total = site.sum(axis=0)
    return CommutationProfile(site, total, (total != 0).astype(np.int64))


def locally_commute(a: PauliWord, b: PauliWord) -> bool:
    return not any(site_commutation_exponents(a, b))


def greedy_coloring(adjacency) -> list[int]:
    adj = np.asarray(adjacency, dtype=bool)
    colors: list[int] = []
    for v in range(adj.shape[0]):
        taken = {colors[u] for u in range(v) if adj[v, u]}
        c = 0
        while c in taken:
            c += 1
        colors.append(c)
    return colors


def max_clique_size(adjacency) -> int:
    adj = np.asarray(adjacency, dtype=bool)
    nbrs = [set(np.nonzero(adj[v])[0]) - {v} for v in range(adj.shape[0])]
    best = 0

    def expand(size: int, candidates: set[int], excluded: set[int]) -> None:
        nonlocal best
        if not candidates and not excluded:
            best = max(best, size)
            return
        if size + len(candidates) <= best:
            return
        pivot = max(candidates | excluded, key=lambda u: len(nbrs[u] & candidates))
        for v in list(candidates - nbrs[pivot]):
            expand(size + 1, candidates & nbrs[v], excluded & nbrs[v])
            candidates = candidates - {v}
            excluded = excluded | {v}

    expand(0, set(range(adj.shape[0])), set())
    return best


def _first_coloring(adj: np.ndarray, K: int) -> list[int] | None:
    """Lexicographically smallest proper K-coloring (vertex order 0..k-1), or None."""
    n = adj.shape[0]
    colors = [-1] * n

    def place(v: int, used: int) -> bool:
        if v == n:
            return True
        taken = {colors[u] for u in range(v) if adj[v, u]}
        # new colors are opened in order, so only one fresh label needs trying
        for c in range(min(used + 1, K)):
            if c not in taken:
                colors[v] = c
                if place(v + 1, max(used, c + 1)):
                    return True
        colors[v] = -1
        return False

    return colors if place(0, 0) else None


def chromatic_number(adjacency) -> tuple[int, Coloring]:
    """Exact chromatic number and the lexicographically first optimal coloring."""
    adj = np.asarray(adjacency, dtype=bool)
    n = adj.shape[0]
    if n > MAX_COLORING_VERTICES:
        raise ValueError(f"exact coloring limited to {MAX_COLORING_VERTICES} vertices, got {n}")
    if n == 0:
        return 0, Coloring(0, ())
    upper = max(greedy_coloring(adj)) + 1
    lower = max(max_clique_size(adj), 1)
    for K in range(lower, upper + 1):
        colors = _first_coloring(adj, K)
        if colors is not None:
            return K, Coloring.from_colors(colors)
    raise AssertionError("greedy bound not reproduced by exact search")


def lms_count(gens: GeneratorSet) -> tuple[int, Coloring]:
    return chromatic_number(commutation_profile(gens).conflict)
