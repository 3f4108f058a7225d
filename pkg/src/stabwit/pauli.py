"""Exact algebra of N-qudit Weyl-Heisenberg operators.

A word ``w^a X^x Z^z`` is stored as a phase exponent ``a`` of ``w = exp(2 pi i/d)``
and two exponent vectors over Z_d.  Per site the X power stands to the left
of the Z power, so ``X_i^{x_i} Z_i^{z_i}`` acts on a basis ket as::

    X^x Z^z |j> = w^{z j} |j + x>

Site 1 is the most significant tensor factor (numpy ``kron`` order).
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_DENSE_CAP = 4096
DENSE_CAP_ENV = "STABWIT_DENSE_CAP"


class DimensionMismatch(ValueError):
    """Operands live on different (d, N)."""


class DenseCapExceeded(ValueError):
    """A dense rendering would exceed the configured d^N cap."""


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for the d < 10^6 we accept."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def dense_cap() -> int:
    value = os.environ.get(DENSE_CAP_ENV)
    return int(value) if value else DEFAULT_DENSE_CAP


def check_dense(d: int, n: int, cap: int | None = None) -> int:
    """Return d**n, raising if it exceeds the dense cap."""
    cap = dense_cap() if cap is None else cap
    dim = d**n
    if dim > cap:
        raise DenseCapExceeded(f"dense dimension {d}^{n} = {dim} exceeds cap {cap}")
    return dim


def root_of_unity(d: int) -> complex:
    return complex(np.exp(2j * np.pi / d))


@lru_cache(maxsize=64)
def basis_digits(d: int, n: int) -> np.ndarray:
    """(d^n, n) array of computational-basis digits, site 1 most significant."""
    dim = d**n
    idx = np.arange(dim)
    digits = np.empty((dim, n), dtype=np.int64)
    for site in range(n - 1, -1, -1):
        digits[:, site] = idx % d
        idx = idx // d
    digits.setflags(write=False)
    return digits


def _digits_to_index(digits: np.ndarray, d: int) -> np.ndarray:
    n = digits.shape[1]
    weights = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return digits @ weights


@dataclass(frozen=True)
class PauliWord:
    d: int
    phase: int
    x: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.d):
            raise ValueError(f"d must be prime, got {self.d}")
        if len(self.x) != len(self.z) or len(self.x) == 0:
            raise ValueError("x and z exponent vectors must have the same positive length")
        d = self.d
        object.__setattr__(self, "phase", int(self.phase) % d)
        object.__setattr__(self, "x", tuple(int(v) % d for v in self.x))
        object.__setattr__(self, "z", tuple(int(v) % d for v in self.z))

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def identity(cls, d: int, n: int) -> PauliWord:
        return cls(d, 0, (0,) * n, (0,) * n)

    @classmethod
    def single(cls, d: int, n: int, site: int, x: int = 0, z: int = 0) -> PauliWord:
        """X^x Z^z on ``site`` (0-based), identity elsewhere."""
        xs = [0] * n
        zs = [0] * n
        xs[site] = x
        zs[site] = z
        return cls(d, 0, tuple(xs), tuple(zs))

    @classmethod
    def from_label(cls, label: str, d: int = 2) -> PauliWord:
        """Per-site letters ``1``/``I``, ``X``, ``Z`` (e.g. ``"XZ1"``)."""
        xs, zs = [], []
        for ch in label:
            if ch in "1I":
                xs.append(0)
                zs.append(0)
            elif ch == "X":
                xs.append(1)
                zs.append(0)
            elif ch == "Z":
                xs.append(0)
                zs.append(1)
            else:
                raise ValueError(f"unsupported letter {ch!r} in label {label!r}")
        return cls(d, 0, tuple(xs), tuple(zs))

    @classmethod
    def parse(cls, text: str, d: int, n: int) -> PauliWord:
        return parse_word(text, d, n)

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    def with_phase(self, phase: int) -> PauliWord:
        return PauliWord(self.d, phase, self.x, self.z)

    def __mul__(self, other: PauliWord) -> PauliWord:
        return multiply(self, other)

    def __pow__(self, e: int) -> PauliWord:
        return power(self, e)

    def dagger(self) -> PauliWord:
        return dagger(self)

    def to_dense(self, cap: int | None = None) -> np.ndarray:
        return to_dense(self, cap)

    def __str__(self) -> str:
        return format_word(self)


def _check_pair(a: PauliWord, b: PauliWord) -> None:
    if a.d != b.d or a.n != b.n:
        raise DimensionMismatch(f"cannot combine words on (d={a.d}, N={a.n}) and (d={b.d}, N={b.n})")


def multiply(a: PauliWord, b: PauliWord) -> PauliWord:
    # Z^{z_a} X^{x_b} = w^{z_a . x_b} X^{x_b} Z^{z_a}
    _check_pair(a, b)
    shift = sum(za * xb for za, xb in zip(a.z, b.x))
    return PauliWord(
        a.d,
        a.phase + b.phase + shift,
        tuple(p + q for p, q in zip(a.x, b.x)),
        tuple(p + q for p, q in zip(a.z, b.z)),
    )


def commutation_exponent(a: PauliWord, b: PauliWord) -> int:
    """tau with ``a b = w^tau b a``."""
    _check_pair(a, b)
    za_xb = sum(p * q for p, q in zip(a.z, b.x))
    xa_zb = sum(p * q for p, q in zip(a.x, b.z))
    return (za_xb - xa_zb) % a.d


def site_commutation_exponents(a: PauliWord, b: PauliWord) -> tuple[int, ...]:
    _check_pair(a, b)
    return tuple((za * xb - xa * zb) % a.d for xa, za, xb, zb in zip(a.x, a.z, b.x, b.z))


def power(a: PauliWord, e: int) -> PauliWord:
    """``a`` raised to a nonnegative integer power.

    Uses (X^x Z^z)^e = w^{(z.x) e(e-1)/2} X^{ex} Z^{ez}; note that for d = 2 the
    d-th power may carry a sign, e.g. (XZ)^2 = -1.
    """
    if e < 0:
        raise ValueError("power expects a nonnegative exponent; use dagger for inverses")
    zx = sum(p * q for p, q in zip(a.z, a.x))
    return PauliWord(
        a.d,
        e * a.phase + zx * (e * (e - 1) // 2),
        tuple(e * v for v in a.x),
        tuple(e * v for v in a.z),
    )


def dagger(a: PauliWord) -> PauliWord:
    # (w^a X^x Z^z)^+ = w^{-a} Z^{-z} X^{-x} = w^{-a + z.x} X^{-x} Z^{-z}
    zx = sum(p * q for p, q in zip(a.z, a.x))
    return PauliWord(a.d, -a.phase + zx, tuple(-v for v in a.x), tuple(-v for v in a.z))


def monomial(word: PauliWord) -> tuple[np.ndarray, np.ndarray]:
    """Row targets and values: column j of the matrix has ``values[j]`` at row ``rows[j]``."""
    d, n = word.d, word.n
    digits = basis_digits(d, n)
    x = np.asarray(word.x, dtype=np.int64)
    z = np.asarray(word.z, dtype=np.int64)
    rows = _digits_to_index((digits + x) % d, d)
    exps = (word.phase + digits @ z) % d
    values = np.exp(2j * np.pi * exps / d)
    return rows, values


def apply_word(word: PauliWord, arr: np.ndarray) -> np.ndarray:
    """Multiply ``arr`` (vector or matrix, first axis of size d^N) by the word from the left."""
    rows, values = monomial(word)
    out = np.empty(arr.shape, dtype=complex)
    shape = (-1,) + (1,) * (arr.ndim - 1)
    out[rows] = values.reshape(shape) * arr
    return out


def to_dense(word: PauliWord, cap: int | None = None) -> np.ndarray:
    dim = check_dense(word.d, word.n, cap)
    rows, values = monomial(word)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[rows, np.arange(dim)] = values
    return mat


def _factor(letter: str, site: int, exp: int) -> str:
    return f"{letter}{site}" if exp == 1 else f"{letter}{site}^{exp}"


def format_word(word: PauliWord) -> str:
    """Text form such as ``w^2 X1 Z1^2 Z3``; the identity prints as ``I``."""
    parts = []
    if word.phase:
        parts.append("w" if word.phase == 1 else f"w^{word.phase}")
    for i, (xv, zv) in enumerate(zip(word.x, word.z), start=1):
        if xv:
            parts.append(_factor("X", i, xv))
        if zv:
            parts.append(_factor("Z", i, zv))
    return " ".join(parts) if parts else "I"


_TOKEN = re.compile(r"^(w|X|Z)(\d*)(?:\^(\d+))?$")


def parse_word(text: str, d: int, n: int) -> PauliWord:
    """Parse the text form; factors are multiplied left to right, so ``Z1 X1`` is ``w X1 Z1``."""
    result = PauliWord.identity(d, n)
    tokens = text.split()
    if tokens in (["I"], ["1"]):
        return result
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad Pauli token {tok!r} in {text!r}")
        letter, site, exp = m.group(1), m.group(2), m.group(3)
        e = int(exp) if exp else 1
        if letter == "w":
            if site:
                raise ValueError(f"phase token takes no site index: {tok!r}")
            result = result.with_phase(result.phase + e)
            continue
        if not site:
            raise ValueError(f"missing site index in {tok!r}")
        s = int(site)
        if not 1 <= s <= n:
            raise ValueError(f"site {s} out of range 1..{n} in {tok!r}")
        factor = PauliWord.single(d, n, s - 1, x=e if letter == "X" else 0, z=e if letter == "Z" else 0)
        result = multiply(result, factor)
    return result
