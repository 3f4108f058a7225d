from __future__ import annotations

import math

import numpy as np
import pytest

from stabwit.coloring import Coloring
from stabwit.graphs import (
    Multigraph,
    cluster_generators,
    five_qubit_code_generators,
    ghz_generators,
    ghz_state_vector,
    graph_generators,
    graph_state_vector,
    nd_subspace_generators,
    opt_subspace_generators,
    random_multigraph,
)
from stabwit.oracle import all_bipartitions, dense_witness, hermitian_spectrum, min_eigenvalue, min_product_expectation
from stabwit.stabilizer import GeneratorSet, validate
from stabwit.witness import (
    NotDetected,
    Witness,
    colored_witness,
    curve_emit,
    expand_spectrum,
    expectation,
    generator_witness,
    normalized_trace,
    p_limit_closed_form,
    p_limit_generic,
    projector_witness,
    syndrome_spectrum,
    witness_spectrum,
)


def dense_p_limit(w, rho):
    m = dense_witness(w)
    e = np.trace(m @ rho).real
    t = np.trace(m).real / m.shape[0]
    return -e / (t - e)


def mixed_state(group):
    p = group.projector()
    return p / group.subspace_dimension()


def fixtures():
    rng = np.random.default_rng(2024)
    out = []
    for d in (2, 3, 5):
        for n in (2, 3, 4, 5):
            if d**n > 729:
                continue
            out.append((f"ghz-{n}-{d}", ghz_generators(n, d)))
            out.append((f"cluster-{n}-{d}", cluster_generators(n, d)))
            out.append((f"rand-{n}-{d}", graph_generators(random_multigraph(n, d - 1, rng), d)))
    out.append(("nd-3", nd_subspace_generators(3)))
    out.append(("opt-5-3", opt_subspace_generators(5, 3)))
    out.append(("five-qubit", five_qubit_code_generators()))
    return out


FIXTURES = fixtures()


class TestProjectorWitness:
    def test_ghz3(self):
        g = validate(ghz_generators(3, 2))
        w = projector_witness(g)
        assert w.constant == 0.5
        assert abs(expectation(w, ghz_state_vector(3, 2)) + 0.5) < 1e-12

    def test_qutrit_graph(self):
        gr = Multigraph.from_edges(3, [(1, 2), (2, 3, 2)])
        g = validate(graph_generators(gr, 3))
        assert abs(expectation(projector_witness(g), graph_state_vector(gr, 3)) + 2 / 3) < 1e-12

    def test_five_qubit_code(self):
        g = validate(five_qubit_code_generators())
        w = projector_witness(g)
        rep = p_limit_generic(w)
        assert abs(rep.p_limit - dense_p_limit(w, mixed_state(g))) < 1e-12
        assert abs(rep.p_limit - p_limit_closed_form("projector", 5, 2, k=4)) < 1e-12
        assert abs(rep.p_limit - 8 / 15) < 1e-12

    @pytest.mark.parametrize("n,d", [(3, 2), (4, 3), (10, 7)])
    def test_graph_state_formula(self, n, d):
        rep = p_limit_generic(projector_witness(validate(ghz_generators(n, d))))
        assert abs(rep.p_limit - (d - 1) / d / (1 - d ** (-n))) < 1e-12


class TestGeneratorWitness:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_qubit_constant(self, n):
        w = generator_witness(validate(ghz_generators(n, 2)))
        assert abs(w.constant - (n - 1)) < 1e-12
        assert abs(p_limit_generic(w).p_limit - 1 / n) < 1e-12

    @pytest.mark.parametrize("n,d", [(3, 3), (4, 5), (3, 7)])
    def test_general_d(self, n, d):
        g = validate(cluster_generators(n, d))
        w = generator_witness(g)
        expect = (d - 1) * (1 - math.cos(2 * math.pi / d)) / (d * n)
        assert abs(p_limit_generic(w).p_limit - expect) < 1e-12
        assert abs(dense_p_limit(w, mixed_state(g)) - expect) < 1e-12

    @pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (2, 3), (3, 3), (2, 5), (3, 5)])
    def test_psd_certificate(self, n, d):
        g = validate(ghz_generators(n, d))
        w = generator_witness(g)
        alpha = 1 - math.cos(2 * math.pi / d)
        margin = min_eigenvalue(dense_witness(w) - alpha * dense_witness(projector_witness(g)))
        assert margin >= -1e-10
        assert min(v for v, _ in witness_spectrum(w, alpha)) >= -1e-12

    def test_subspace_rejected(self):
        with pytest.raises(ValueError, match="k = N"):
            generator_witness(validate(nd_subspace_generators(3)))


class TestColoredWitness:
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_ghz_constant(self, d):
        w = colored_witness(validate(ghz_generators(4, d)))
        assert w.K == 2 and w.constant == d + 1
        assert sorted(w.block_sizes()) == [1, 3]

    def test_cluster_blocks_alternate(self):
        w = colored_witness(validate(cluster_generators(5, 3)))
        assert [list(c) for c in w.metadata["classes"]] == [[0, 2, 4], [1, 3]]

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_nd_subspace(self, d):
        w = colored_witness(validate(nd_subspace_generators(d)))
        assert w.K == 2 and w.constant == d + 1
        assert abs(p_limit_generic(w).p_limit - 0.5) < 1e-12

    def test_improper_coloring(self):
        g = validate(ghz_generators(3, 2))
        with pytest.raises(ValueError, match="proper"):
            colored_witness(g, Coloring(1, ((0, 1, 2),)))

    def test_explicit_coloring(self):
        g = validate(ghz_generators(3, 2))
        w = colored_witness(g, Coloring(3, ((0,), (1,), (2,))))
        assert w.constant == 5

    def test_hermitian_dense(self):
        for _, gens in FIXTURES[:12]:
            m = dense_witness(colored_witness(validate(gens)))
            assert np.max(np.abs(m - m.conj().T)) < 1e-12


class TestSpectrum:
    def test_ghz3_qubit(self):
        spec = witness_spectrum(colored_witness(validate(ghz_generators(3, 2))))
        assert spec[0] == (-1.0, 1)
        assert spec[-1][0] == 3.0

    def test_all_nonzero_syndrome_gives_c(self):
        w = colored_witness(validate(cluster_generators(4, 3)))
        assert max(v for v, _ in witness_spectrum(w)) == w.constant

    @pytest.mark.parametrize("name,gens", FIXTURES, ids=[f[0] for f in FIXTURES])
    def test_matches_dense(self, name, gens):
        g = validate(gens)
        w = colored_witness(g)
        combo = expand_spectrum(witness_spectrum(w))
        dense = hermitian_spectrum(dense_witness(w))
        assert np.allclose(np.sort(combo), dense, atol=1e-9)
        assert witness_spectrum(w) == syndrome_spectrum(w) or g.k > 8

    @pytest.mark.parametrize("name,gens", FIXTURES, ids=[f[0] for f in FIXTURES])
    def test_shift_by_d_is_psd(self, name, gens):
        g = validate(gens)
        w = colored_witness(g)
        assert min(v for v, _ in witness_spectrum(w, alpha=w.d)) == 0.0
        margin = min_eigenvalue(dense_witness(w) - w.d * dense_witness(projector_witness(g)))
        assert margin >= -1e-10

    def test_projector_and_generator_kinds(self):
        g = validate(ghz_generators(3, 3))
        for w in (projector_witness(g), generator_witness(g)):
            assert np.allclose(np.sort(expand_spectrum(witness_spectrum(w))), hermitian_spectrum(dense_witness(w)), atol=1e-9)

    def test_unsupported_kind(self):
        with pytest.raises(ValueError):
            witness_spectrum(Witness("custom", 2, 2, 1.0))


class TestThresholds:
    def test_ghz3_colored(self):
        rep = p_limit_generic(colored_witness(validate(ghz_generators(3, 2))))
        assert abs(rep.p_limit - 0.4) < 1e-12
        assert abs(rep.p_limit - (-rep.expectation) / (rep.normalized_trace - rep.expectation)) < 1e-12

    def test_cluster_even(self):
        assert abs(p_limit_closed_form("cluster_even", 4, 2) - 1 / 3) < 1e-12
        rep = p_limit_generic(colored_witness(validate(cluster_generators(4, 2))))
        assert abs(rep.p_limit - 1 / 3) < 1e-12

    @pytest.mark.parametrize("n,d", [(3, 2), (6, 3), (9, 5)])
    def test_colored_general_star_is_ghz(self, n, d):
        a = p_limit_closed_form("colored_general", n, d, sizes=(1, n - 1))
        assert abs(a - p_limit_closed_form("ghz", n, d)) < 1e-12

    def test_nd_closed(self):
        for d in (2, 3, 5, 7):
            assert p_limit_closed_form("nd_subspace", d, d) == 0.5

    def test_errors(self):
        with pytest.raises(ValueError):
            p_limit_closed_form("nope", 3, 2)
        with pytest.raises(ValueError):
            p_limit_closed_form("cluster_even", 3, 2)
        with pytest.raises(ValueError):
            p_limit_closed_form("ghz", 3, 4)
        with pytest.raises(ValueError):
            p_limit_closed_form("colored_general", 3, 2)

    def test_not_detected(self):
        w = projector_witness(validate(ghz_generators(3, 2)))
        with pytest.raises(NotDetected):
            p_limit_generic(w, validate(GeneratorSet(2, 3, ())))

    def test_gens_opt(self):
        for d in (3, 5):
            for n in (3, 6, 8):
                g = validate(opt_subspace_generators(n, d))
                m = -(-(n - 1) // (d - 1))
                expect = (d - 1) / (2 * d - 1 - d ** (1 - m))
                assert abs(p_limit_generic(colored_witness(g)).p_limit - expect) < 1e-12

    def test_state_independence_in_subspace(self):
        rng = np.random.default_rng(1)
        for gens in (nd_subspace_generators(3), opt_subspace_generators(4, 3)):
            g = validate(gens)
            w = colored_witness(g)
            ref = p_limit_generic(w).p_limit
            vals, vecs = np.linalg.eigh(g.projector())
            basis = vecs[:, vals > 0.5]
            m = dense_witness(w)
            t = np.trace(m).real / m.shape[0]
            for _ in range(5):
                c = rng.normal(size=basis.shape[1]) + 1j * rng.normal(size=basis.shape[1])
                psi = basis @ (c / np.linalg.norm(c))
                e = expectation(w, psi)
                assert abs(-e / (t - e) - ref) < 1e-12


class TestExpectation:
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_ghz_vector(self, d):
        w = colored_witness(validate(ghz_generators(3, d)))
        assert abs(expectation(w, ghz_state_vector(3, d)) + (d - 1)) < 1e-10

    def test_maximally_mixed(self):
        w = colored_witness(validate(cluster_generators(3, 3)))
        rho = np.eye(27) / 27
        assert abs(expectation(w, rho) - normalized_trace(w)) < 1e-12
        assert normalized_trace(w) > 0

    def test_white_noise_at_threshold(self):
        g = validate(ghz_generators(4, 3))
        w = colored_witness(g)
        p = p_limit_generic(w).p_limit
        v = ghz_state_vector(4, 3)
        rho = p * np.eye(81) / 81 + (1 - p) * np.outer(v, v.conj())
        assert abs(expectation(w, rho)) < 1e-10

    def test_dim_mismatch(self):
        w = colored_witness(validate(ghz_generators(3, 2)))
        with pytest.raises(ValueError):
            expectation(w, ghz_state_vector(3, 3))

    def test_symbolic_matches_dense_off_target(self):
        g = validate(ghz_generators(3, 3))
        other = validate(cluster_generators(3, 3))
        w = colored_witness(g)
        assert abs(expectation(w, other) - expectation(w, mixed_state(other))) < 1e-12


class TestCurves:
    def test_ghz_beats_cluster(self):
        rows = curve_emit(["ghz", "cluster"], [2, 3, 5, 7], range(3, 13))
        ghz = {(r["d"], r["N"]): r["p_limit"] for r in rows if r["family"] == "ghz"}
        for r in rows:
            if r["family"] == "cluster":
                assert ghz[(r["d"], r["N"])] >= r["p_limit"] - 1e-15

    def test_gens_opt_beats_ghz(self):
        rows = curve_emit(["ghz", "gens_opt"], [2, 3, 5, 7], range(3, 13))
        ghz = {(r["d"], r["N"]): r["p_limit"] for r in rows if r["family"] == "ghz"}
        for r in rows:
            if r["family"] == "gens_opt":
                if r["d"] == 2:
                    assert abs(r["p_limit"] - ghz[(2, r["N"])]) < 1e-15
                else:
                    assert r["p_limit"] >= ghz[(r["d"], r["N"])] - 1e-15

    def test_monotone_and_bounded(self):
        for d in (2, 3, 5, 7):
            vals = [p_limit_closed_form("ghz", n, d) for n in range(2, 30)]
            assert all(a >= b for a, b in zip(vals, vals[1:]))
            assert all(v >= (d - 1) / (2 * d - 1) for v in vals)
        assert abs(p_limit_closed_form("ghz", 200, 1009) - 0.5) < 1e-3

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            curve_emit(["bogus"], [2], [3])


class TestJson:
    def test_round_trip(self):
        for w in (
            colored_witness(validate(cluster_generators(4, 3))),
            generator_witness(validate(ghz_generators(3, 5))),
            projector_witness(validate(five_qubit_code_generators())),
        ):
            back = Witness.from_dict(w.to_dict())
            assert np.allclose(dense_witness(back), dense_witness(w), atol=1e-12)
            assert abs(p_limit_generic(back).p_limit - p_limit_generic(w).p_limit) < 1e-15


class TestBiseparable:
    @pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (3, 3), (4, 3)])
    def test_product_states_nonnegative(self, n, d):
        for gens in (ghz_generators(n, d), cluster_generators(n, d)):
            g = validate(gens)
            for w in (colored_witness(g), projector_witness(g), generator_witness(g)):
                m = dense_witness(w)
                for bp in all_bipartitions(n):
                    assert min_product_expectation(m, bp, d, restarts=20, seed=0) >= -1e-8
