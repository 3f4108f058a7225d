"""Stabilizer groups built from commuting, independent generator words."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _modp
from .pauli import (
    PauliWord,
    check_dense,
    commutation_exponent,
    is_prime,
    monomial,
    multiply,
    parse_word,
    power,
    root_of_unity,
)

ENUMERATION_CAP = 10**6


class StabilizerError(ValueError):
    pass


class NonCommutingGenerators(StabilizerError):
    def __init__(self, i: int, j: int, tau: int):
        super().__init__(f"generators {i + 1} and {j + 1} do not commute (exponent {tau})")
        self.pair = (i, j)
        self.exponent = tau


class DependentGenerators(StabilizerError):
    def __init__(self, combination: tuple[int, ...], phase: int):
        super().__init__(
            f"generator powers {combination} multiply to w^{phase} times the identity"
        )
        self.combination = combination
        self.phase = phase


@dataclass(frozen=True)
class GeneratorSet:
    d: int
    n: int
    generators: tuple[PauliWord, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"d must be prime, got {self.d}")
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.d != self.d or g.n != self.n:
                raise ValueError(f"generator {g} is not a word on (d={self.d}, N={self.n})")
        if self.labels is not None and len(self.labels) != len(self.generators):
            raise ValueError("labels must match generators one to one")

    @property
    def k(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    @classmethod
    def from_text(cls, d: int, n: int, texts) -> GeneratorSet:
        return cls(d, n, tuple(parse_word(t, d, n) for t in texts))

    def to_json(self) -> dict:
        return {"d": self.d, "n": self.n, "generators": [str(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict | str) -> GeneratorSet:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_text(int(data["d"]), int(data["n"]), data["generators"])


def _symplectic_rows(gens: GeneratorSet) -> np.ndarray:
    if gens.k == 0:
        return np.zeros((0, 2 * gens.n), dtype=np.int64)
    return np.array([list(g.x) + list(g.z) for g in gens.generators], dtype=np.int64)


def product_of_powers(gens, exponents) -> PauliWord:
    """G_1^{e_1} ... G_k^{e_k} in generator order."""
    out = PauliWord.identity(gens.d, gens.n)
    for g, e in zip(gens.generators, exponents):
        if e:
            out = multiply(out, power(g, int(e)))
    return out


class StabilizerGroup:
    """A validated stabilizer; build it with :func:`validate`."""

    def __init__(self, gens: GeneratorSet):
        self.gens = gens
        self._rows = _symplectic_rows(gens)

    d = property(lambda self: self.gens.d)
    n = property(lambda self: self.gens.n)
    k = property(lambda self: self.gens.k)
    generators = property(lambda self: self.gens.generators)

    def __len__(self) -> int:
        return self.d**self.k

    def __repr__(self) -> str:
        words = ", ".join(str(g) for g in self.generators)
        return f"StabilizerGroup(d={self.d}, n={self.n}, <{words}>)"

    @cached_property
    def _table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        d, k = self.d, self.k
        size = d**k
        if size > ENUMERATION_CAP:
            raise StabilizerError(f"group has {d}^{k} = {size} elements, above the enumeration cap")
        exps = np.array(list(itertools.product(range(d), repeat=k)), dtype=np.int64).reshape(size, k)
        if k == 0:
            zeros = np.zeros((1, self.n), dtype=np.int64)
            return exps, np.zeros(1, dtype=np.int64), zeros, zeros.copy()
        xg = self._rows[:, : self.n]
        zg = self._rows[:, self.n :]
        a = np.array([g.phase for g in self.generators], dtype=np.int64)
        zx = np.einsum("ij,ij->i", zg, xg)
        # left-to-right product: w^{e a + C(e,2) z.x} per factor, plus z_i.x_j for i < j
        cross = np.triu(zg @ xg.T, 1)
        phase = exps @ a + (exps * (exps - 1) // 2) @ zx + np.einsum("mi,ij,mj->m", exps, cross, exps)
        return exps, phase % d, (exps @ xg) % d, (exps @ zg) % d

    def element_exponents(self) -> np.ndarray:
        return self._table[0]

    def elements(self) -> list[PauliWord]:
        _, phases, xs, zs = self._table
        return [PauliWord(self.d, int(p), tuple(x), tuple(z)) for p, x, z in zip(phases, xs, zs)]

    def decompose(self, word: PauliWord) -> np.ndarray | None:
        """Exponents e with word equal to prod G_j^{e_j} up to a phase, or None."""
        if word.d != self.d or word.n != self.n:
            raise ValueError("word and group live on different systems")
        if self.k == 0:
            return np.zeros(0, dtype=np.int64) if word.is_identity() else None
        target = np.array(list(word.x) + list(word.z), dtype=np.int64)
        return _modp.solve(self._rows.T, target, self.d)

    def subspace_value(self, word: PauliWord) -> complex:
        """Tr(word P_V) / dim V: the scalar by which ``word`` acts on V, or 0 if it is off-group."""
        exps = self.decompose(word)
        if exps is None:
            return 0.0
        ref = product_of_powers(self.gens, exps)
        delta = (word.phase - ref.phase) % self.d
        return 1.0 if delta == 0 else root_of_unity(self.d) ** delta

    def subspace_dimension(self) -> int:
        return self.d ** (self.n - self.k)

    def projector(self, cap: int | None = None) -> np.ndarray:
        return projector(self, cap)


def validate(gens: GeneratorSet) -> StabilizerGroup:
    """Check commutation and independence, returning the stabilizer group.

    Independence is decided by the rank of the (x|z) rows over GF(d): a nonzero
    combination of generator powers with trivial x and z parts is exactly a
    product that collapses to a multiple of the identity.
    """
    if gens.k > gens.n:
        raise StabilizerError(f"{gens.k} generators on {gens.n} sites: need k <= N")
    for i, j in itertools.combinations(range(gens.k), 2):
        tau = commutation_exponent(gens.generators[i], gens.generators[j])
        if tau:
            raise NonCommutingGenerators(i, j, tau)
    rows = _symplectic_rows(gens)
    if gens.k:
        null = _modp.nullspace(rows.T, gens.d)
        if null:
            combo = tuple(int(v) for v in null[0])
            word = product_of_powers(gens, combo)
            raise DependentGenerators(combo, word.phase)
    return StabilizerGroup(gens)


def subspace_dimension(group: StabilizerGroup) -> int:
    return group.subspace_dimension()


def projector(group: StabilizerGroup, cap: int | None = None) -> np.ndarray:
    """Dense projector (1/d^k) sum_S S onto the stabilized subspace."""
    dim = check_dense(group.d, group.n, cap)
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for word in group.elements():
        rows, values = monomial(word)
        mat[rows, cols] += values
    return mat / group.d**group.k
