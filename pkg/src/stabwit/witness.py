"""GME witnesses built from stabilizer generators, their spectra and noise thresholds.

A :class:`Witness` represents the operator::

    c 1 + sum_t w_t t - b sum_i prod_{G in C_i} Pi_G - P_S

where ``t`` runs over Pauli words, ``Pi_G = (1/d) sum_n G^n`` projects onto the
+1 eigenspace of ``G``, ``C_i`` are the color blocks with common weight ``b``,
and ``P_S`` (optional) is the projector onto a stabilized subspace.  Traces and
expectation values on stabilizer targets are evaluated from this structure
without dense matrices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .coloring import Coloring, commutation_profile, lms_count, locally_commute
from .graphs import opt_subspace_parameters
from .pauli import PauliWord, apply_word, dagger, is_prime, parse_word, power, root_of_unity
from .stabilizer import ENUMERATION_CAP, GeneratorSet, StabilizerGroup, product_of_powers, validate

IMAG_TOL = 1e-10


class NotDetected(ValueError):
    """The witness has a nonnegative expectation on the target, so no threshold exists."""


@dataclass(frozen=True, eq=False)
class Witness:
    kind: str
    d: int
    n: int
    constant: float
    terms: tuple[tuple[complex, PauliWord], ...] = ()
    blocks: tuple[tuple[PauliWord, ...], ...] = ()
    block_weight: float = 0.0
    projector_group: StabilizerGroup | None = None
    target: StabilizerGroup | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def K(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def to_dict(self) -> dict:
        def gens(group):
            return None if group is None else [str(g) for g in group.generators]

        return {
            "kind": self.kind,
            "d": self.d,
            "n": self.n,
            "constant": self.constant,
            "terms": [{"weight": [w.real, w.imag], "word": str(t)} for w, t in self.terms],
            "blocks": [[str(g) for g in b] for b in self.blocks],
            "block_weight": self.block_weight,
            "projector_generators": gens(self.projector_group),
            "target_generators": gens(self.target),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Witness:
        d, n = int(data["d"]), int(data["n"])

        def group(texts):
            if texts is None:
                return None
            return validate(GeneratorSet.from_text(d, n, texts))

        blocks = tuple(tuple(parse_word(t, d, n) for t in b) for b in data.get("blocks", []))
        if blocks:
            validate(GeneratorSet(d, n, tuple(g for b in blocks for g in b)))
        terms = tuple(
            (complex(t["weight"][0], t["weight"][1]), parse_word(t["word"], d, n)) for t in data.get("terms", [])
        )
        return cls(
            kind=data["kind"],
            d=d,
            n=n,
            constant=float(data["constant"]),
            terms=terms,
            blocks=blocks,
            block_weight=float(data.get("block_weight", 0.0)),
            projector_group=group(data.get("projector_generators")),
            target=group(data.get("target_generators")),
            metadata=dict(data.get("metadata", {})),
        )


@dataclass(frozen=True)
class RobustnessReport:
    p_limit: float
    expectation: float
    normalized_trace: float
    closed_form_used: str | None = None

    def to_dict(self) -> dict:
        return {
            "p_limit": self.p_limit,
            "expectation": self.expectation,
            "normalized_trace": self.normalized_trace,
            "closed_form": self.closed_form_used,
        }


def collect_terms(terms) -> tuple[tuple[complex, PauliWord], ...]:
    """Absorb phases into weights and merge equal words, dropping zeros."""
    acc: dict[tuple, complex] = {}
    d = None
    for weight, word in terms:
        d = word.d
        key = (word.x, word.z)
        acc[key] = acc.get(key, 0) + complex(weight) * root_of_unity(word.d) ** word.phase
    out = []
    for (x, z), w in acc.items():
        if abs(w) > 1e-14:
            out.append((w, PauliWord(d, 0, x, z)))
    return tuple(out)


def _as_group(gens) -> StabilizerGroup:
    return gens if isinstance(gens, StabilizerGroup) else validate(gens)


def projector_witness(group) -> Witness:
    """(1/d) 1 - P_V for the stabilized subspace V."""
    group = _as_group(group)
    return Witness(
        kind="projector",
        d=group.d,
        n=group.n,
        constant=1.0 / group.d,
        projector_group=group,
        target=group,
        metadata={"k": group.k},
    )


def generator_constant(n: int, d: int) -> float:
    return n - (d - 1) / d * (1 - math.cos(2 * math.pi / d))


def generator_witness(gens) -> Witness:
    """c 1 - (1/2) sum_k (G_k + G_k^dagger) for a graph-state-type stabilizer (k = N)."""
    group = _as_group(gens)
    if group.k != group.n:
        raise ValueError(f"generator witness needs a one-dimensional stabilizer (k = N); got k={group.k}, N={group.n}")
    terms = []
    for g in group.generators:
        terms.append((-0.5, g))
        terms.append((-0.5, dagger(g)))
    return Witness(
        kind="generator",
        d=group.d,
        n=group.n,
        constant=generator_constant(group.n, group.d),
        terms=collect_terms(terms),
        target=group,
        metadata={"k": group.k},
    )


def colored_witness(gens, coloring: Coloring | None = None) -> Witness:
    """[(K-1)d + 1] 1 - d sum_i prod_{j in C_i} Pi_{G_j}.

    Without an explicit coloring the exact chromatic coloring of the
    generators' conflict graph is used.
    """
    group = _as_group(gens)
    if coloring is None:
        _, coloring = lms_count(group.gens)
    conflict = commutation_profile(group.gens).conflict
    if not coloring.is_proper(conflict):
        raise ValueError("coloring is not a proper coloring of the generator conflict graph")
    for members in coloring.classes:
        for i, j in itertools.combinations(members, 2):
            if not locally_commute(group.generators[i], group.generators[j]):
                raise ValueError(f"generators {i + 1} and {j + 1} share a color but do not commute locally")
    d, K = group.d, coloring.K
    blocks = tuple(tuple(group.generators[j] for j in members) for members in coloring.classes)
    return Witness(
        kind="colored",
        d=d,
        n=group.n,
        constant=float((K - 1) * d + 1),
        blocks=blocks,
        block_weight=float(d),
        target=group,
        metadata={"k": group.k, "K": K, "class_sizes": list(coloring.sizes()),
                  "classes": [list(c) for c in coloring.classes]},
    )


def normalized_trace(w: Witness) -> float:
    """Tr(W) / d^N from the term structure; non-identity words are traceless."""
    val = complex(w.constant)
    for weight, word in w.terms:
        if word.is_identity():
            val += weight * root_of_unity(w.d) ** word.phase
    val -= w.block_weight * sum(float(w.d) ** -len(b) for b in w.blocks)
    if w.projector_group is not None:
        val -= float(w.d) ** -w.projector_group.k
    return _real(val, "normalized trace")


def _real(val: complex, what: str) -> float:
    if abs(complex(val).imag) > IMAG_TOL:
        raise ValueError(f"{what} has imaginary part {complex(val).imag:.3e}; witness is not Hermitian")
    return float(complex(val).real)


def _apply_pi(word: PauliWord, arr: np.ndarray) -> np.ndarray:
    acc = arr.astype(complex)
    cur = acc
    for _ in range(word.d - 1):
        cur = apply_word(word, cur)
        acc = acc + cur
    return acc / word.d


def apply_witness(w: Witness, arr: np.ndarray) -> np.ndarray:
    """W @ arr for a vector or matrix whose first axis has size d^N."""
    if arr.shape[0] != w.d**w.n:
        raise ValueError(f"state dimension {arr.shape[0]} does not match d^N = {w.d ** w.n}")
    out = w.constant * arr.astype(complex)
    for weight, word in w.terms:
        out = out + weight * apply_word(word, arr)
    for block in w.blocks:
        v = arr
        for g in block:
            v = _apply_pi(g, v)
        out = out - w.block_weight * v
    if w.projector_group is not None:
        v = arr
        for g in w.projector_group.generators:
            v = _apply_pi(g, v)
        out = out - v
    return out


def _block_value(words, group: StabilizerGroup) -> complex:
    """Tr(P_V prod Pi_G) / dim V."""
    values = [group.subspace_value(g) for g in words]
    if all(abs(v) > 0.5 for v in values):
        return 1.0 if all(abs(v - 1) < 1e-12 for v in values) else 0.0
    d = group.d
    if d ** len(words) > ENUMERATION_CAP:
        raise ValueError("block not contained in the target stabilizer and too large to enumerate")
    gens = GeneratorSet(d, group.n, tuple(words))
    total = 0.0
    for exps in itertools.product(range(d), repeat=len(words)):
        total += group.subspace_value(product_of_powers(gens, exps))
    return total / d ** len(words)


def _group_expectation(w: Witness, group: StabilizerGroup) -> complex:
    if (group.d, group.n) != (w.d, w.n):
        raise ValueError("target and witness live on different systems")
    val = complex(w.constant)
    for weight, word in w.terms:
        val += weight * group.subspace_value(word)
    for block in w.blocks:
        val -= w.block_weight * _block_value(block, group)
    if w.projector_group is not None:
        val -= _block_value(w.projector_group.generators, group)
    return val


def expectation(w: Witness, state) -> float:
    """Tr(W rho) for a state vector, a density matrix, or the maximally mixed state P_V / dim V of a stabilizer."""
    if isinstance(state, StabilizerGroup):
        return _real(_group_expectation(w, state), "expectation")
    state = np.asarray(state)
    if state.ndim == 1:
        if abs(np.linalg.norm(state) - 1) > 1e-8:
            raise ValueError("state vector is not normalized")
        val = np.vdot(state, apply_witness(w, state))
    elif state.ndim == 2:
        val = np.trace(apply_witness(w, state))
    else:
        raise ValueError("state must be a vector, a density matrix, or a StabilizerGroup")
    return _real(val, "expectation")


def p_limit_from(expect: float, trace: float) -> float:
    if expect >= 0:
        raise NotDetected(f"expectation {expect:.12g} on the target is nonnegative")
    p = -expect / (trace - expect)
    if not 0 < p <= 1 + 1e-12:
        raise NotDetected(f"threshold {p:.12g} outside (0, 1]")
    return min(p, 1.0)


def p_limit_generic(w: Witness, target=None) -> RobustnessReport:
    """White-noise threshold -<W> / (Tr W / d^N - <W>) on the target.

    ``target`` defaults to the witness's own stabilizer, in which case <W> is
    taken on the maximally mixed state of the stabilized subspace.
    """
    if target is None:
        target = w.target
    if target is None:
        raise ValueError("witness carries no target; pass a state or stabilizer")
    e = expectation(w, target)
    t = normalized_trace(w)
    return RobustnessReport(p_limit_from(e, t), e, t)


CLOSED_FORM_FAMILIES = (
    "projector",
    "generator",
    "generator_qubit",
    "colored_general",
    "ghz",
    "cluster",
    "cluster_even",
    "cluster_odd",
    "gens_opt",
    "nd_subspace",
)


def p_limit_closed_form(family: str, n: int, d: int, sizes=None, k: int | None = None) -> float:
    """Closed-form thresholds for the named witness families.

    ``sizes`` are the color-class sizes for ``colored_general``; ``k`` is the
    generator count for ``projector`` (defaults to N, a stabilizer state).
    """
    if not is_prime(d):
        raise ValueError(f"d must be prime, got {d}")
    if family == "projector":
        # Tr P_V / d^N = d^{-k} for k generators, so the subspace form is 1 / (1 - d^{-k})
        k = n if k is None else k
        if k < 1 or k > n:
            raise ValueError("projector family needs 1 <= k <= N")
        return (d - 1) / d / (1 - float(d) ** -k)
    if family == "generator":
        return (d - 1) * (1 - math.cos(2 * math.pi / d)) / (d * n)
    if family == "generator_qubit":
        if d != 2:
            raise ValueError("generator_qubit is the d = 2 form 1/N")
        return 1 / n
    if family == "colored_general":
        if not sizes:
            raise ValueError("colored_general needs the color-class sizes")
        K = len(sizes)
        return (d - 1) / d / (K - sum(float(d) ** -s for s in sizes))
    if family == "ghz":
        if n < 2:
            raise ValueError("GHZ needs N >= 2")
        return (d - 1) / (2 * d - 1 - float(d) ** (2 - n))
    if family == "cluster":
        family = "cluster_even" if n % 2 == 0 else "cluster_odd"
    if family == "cluster_even":
        if n % 2 or n < 2:
            raise ValueError("cluster_even needs even N >= 2")
        return (d - 1) / (2 * d - 2 * float(d) ** (-n / 2 + 1))
    if family == "cluster_odd":
        if n % 2 == 0 or n < 3:
            raise ValueError("cluster_odd needs odd N >= 3")
        return (d - 1) / (2 * d - float(d) ** (-n / 2 + 1.5) - float(d) ** (-n / 2 + 0.5))
    if family == "gens_opt":
        m, _ = opt_subspace_parameters(n, d)
        return (d - 1) / (2 * d - 1 - float(d) ** (1 - m))
    if family == "nd_subspace":
        if n != d:
            raise ValueError("nd_subspace lives on N = d qudits")
        return 0.5
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(CLOSED_FORM_FAMILIES)}")


def _accumulate(spec: dict, value: float, mult: int) -> None:
    key = round(value, 12) + 0.0
    spec[key] = spec.get(key, 0) + mult


def witness_spectrum(w: Witness, alpha: float = 0.0) -> list[tuple[float, int]]:
    """Eigenvalues with multiplicities of W - alpha * ((1/d) 1 - P_S), from syndromes alone.

    S is the witness's target stabilizer; its joint eigenspaces for each
    syndrome g in Z_d^k all have dimension d^{N-k}.
    """
    d, n = w.d, w.n
    spec: dict[float, int] = {}
    if w.kind == "colored":
        k = sum(w.block_sizes())
        if w.target is not None and w.target.k != k:
            raise ValueError("color blocks must partition the target's generators")
        base = d ** (n - k)
        K = w.K
        sizes = w.block_sizes()
        for pattern in itertools.product((0, 1), repeat=K):
            # pattern[i] = 1: every generator of block i has syndrome 0
            count = 1
            for on, s in zip(pattern, sizes):
                count *= 1 if on else d**s - 1
            if count == 0:
                continue
            lam = w.constant - alpha / d - w.block_weight * sum(pattern)
            if all(pattern):
                lam += alpha
            _accumulate(spec, lam, count * base)
    elif w.kind == "projector":
        k = w.projector_group.k
        lam0 = w.constant - 1 - alpha / d + alpha
        _accumulate(spec, lam0, d ** (n - k))
        _accumulate(spec, w.constant - alpha / d, d**n - d ** (n - k))
    elif w.kind == "generator":
        k = w.target.k
        cosines = [math.cos(2 * math.pi * g / d) for g in range(d)]
        # state: (sum of cosines, all syndromes zero so far) -> count
        dist = {(0.0, True): 1}
        for _ in range(k):
            nxt: dict[tuple[float, bool], int] = {}
            for (s, zero), c in dist.items():
                for g in range(d):
                    key = (round(s + cosines[g], 12), zero and g == 0)
                    nxt[key] = nxt.get(key, 0) + c
            dist = nxt
        for (s, zero), c in dist.items():
            lam = w.constant - s - alpha / d + (alpha if zero else 0.0)
            _accumulate(spec, lam, c * d ** (n - k))
    else:
        raise ValueError(f"no combinatorial spectrum for witness kind {w.kind!r}")
    return sorted(spec.items())


def syndrome_spectrum(w: Witness, alpha: float = 0.0) -> list[tuple[float, int]]:
    """Same multiset as :func:`witness_spectrum` by walking every syndrome vector (small k only)."""
    if w.kind != "colored":
        raise ValueError("syndrome enumeration implemented for colored witnesses")
    d, n = w.d, w.n
    k = sum(w.block_sizes())
    spec: dict[float, int] = {}
    bounds = np.cumsum((0,) + w.block_sizes())
    for g in itertools.product(range(d), repeat=k):
        lam = w.constant - alpha / d + (alpha if not any(g) else 0.0)
        for i in range(w.K):
            if not any(g[bounds[i] : bounds[i + 1]]):
                lam -= w.block_weight
        _accumulate(spec, lam, d ** (n - k))
    return sorted(spec.items())


def expand_spectrum(spectrum) -> np.ndarray:
    return np.concatenate([np.full(m, v) for v, m in spectrum]) if spectrum else np.zeros(0)


CURVE_FAMILIES = ("ghz", "cluster", "gens_opt", "projector", "generator", "nd_subspace")


def curve_emit(families, ds, ns) -> list[dict]:
    """Rows (family, d, N, K, p_limit) from the closed forms, in input order."""
    rows = []
    for family in families:
        if family not in CURVE_FAMILIES:
            raise ValueError(f"unknown curve family {family!r}")
        for d in ds:
            for n in ns:
                if family == "nd_subspace" and n != d:
                    continue
                K = 2 if family in ("ghz", "cluster", "gens_opt", "nd_subspace") else None
                rows.append({"family": family, "d": d, "N": n, "K": K,
                             "p_limit": p_limit_closed_form(family, n, d)})
    return rows
