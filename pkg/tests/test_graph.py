import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_cluster.errors import InvalidArgumentError, NotBipartiteError
from casimir_cluster.gaussian_core import (
    CovarianceState,
    apply_symplectic,
    partial_trace,
    phase_shift,
    two_mode_squeezer,
    vacuum,
)
from casimir_cluster.graph import (
    ClusterAdjacency,
    HGraph,
    accumulate_drive,
    bipartition,
    cluster_adjacency,
    effective_hamiltonian,
    materialize_Z,
    nullifier_csv,
    nullifier_variances,
    rotated_class,
    to_cluster,
)


def squeezed(nodes, edges):
    """Exact state and H-graph for a list of (j, k, r) applied in order."""
    state, graph = vacuum(len(nodes)), HGraph.empty(nodes)
    for j, k, r in edges:
        a, b = nodes.index(j), nodes.index(k)
        phi = 0.0 if r >= 0 else math.pi / 2
        state = apply_symplectic(state, two_mode_squeezer(len(nodes), a, b, abs(r), phi))
        graph = accumulate_drive(graph, (j, k), r)
    return state, graph


class TestAccumulate:
    def test_zero_beta(self):
        g = HGraph.empty([1, 2])
        assert accumulate_drive(g, (1, 2), 0.0) is g

    def test_linear(self):
        g = accumulate_drive(accumulate_drive(HGraph.empty([1, 2]), (1, 2), 0.1), (2, 1), 0.25)
        assert g.weight(1, 2) == pytest.approx(0.35)
        assert g.B_matrix[0, 1] == g.B_matrix[1, 0]

    def test_pump_rotation(self):
        g = accumulate_drive(HGraph.empty([4, 5]), (4, 5), 0.2, math.pi / 2)
        assert g.weight(4, 5) == pytest.approx(-0.2)

    def test_functional_update(self):
        g0 = HGraph.empty([1, 2])
        accumulate_drive(g0, (1, 2), 0.3)
        assert g0.weight(1, 2) == 0.0

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            accumulate_drive(HGraph.empty([1, 2]), (1, 1), 0.1)
        with pytest.raises(InvalidArgumentError):
            accumulate_drive(HGraph.empty([1, 2]), (1, 3), 0.1)
        with pytest.raises(InvalidArgumentError):
            HGraph((1, 1))


class TestMaterializeZ:
    def test_zero(self):
        np.testing.assert_array_equal(materialize_Z(HGraph.empty([1, 2, 3]), "exact"), 1j * np.eye(3))

    def test_single_pair_exact(self):
        b = 0.3
        z = materialize_Z(accumulate_drive(HGraph.empty([0, 1]), (0, 1), b), "exact")
        assert z[0, 1] == pytest.approx(-1j * math.sinh(2 * b))
        assert z[0, 0] == pytest.approx(1j * math.cosh(2 * b))

    @pytest.mark.parametrize("b", [0.005, 0.01, 0.02, 0.05])
    def test_first_order_error_is_quadratic(self, b):
        g = accumulate_drive(accumulate_drive(HGraph.empty([0, 1, 2]), (0, 1), b), (1, 2), b)
        err = np.max(np.abs(materialize_Z(g, "exact") - materialize_Z(g, "first")))
        assert err <= 5 * b * b

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-0.5, 0.5), min_size=6, max_size=6))
    def test_exact_symmetric_and_positive(self, w):
        g = HGraph.empty([0, 1, 2, 3])
        for (j, k), b in zip([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], w):
            g = accumulate_drive(g, (j, k), b)
        z = materialize_Z(g, "exact")
        np.testing.assert_allclose(z, z.T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh((z / 1j).real) > 0)

    def test_bad_order(self):
        with pytest.raises(InvalidArgumentError):
            materialize_Z(HGraph.empty([0]), "second")


class TestBipartition:
    def test_ladder(self):
        g = HGraph.empty(range(1, 7))
        for pair in [(1, 6), (2, 5), (3, 4), (1, 4), (2, 3), (2, 7 - 2 + 0)]:
            if pair[0] != pair[1]:
                g = accumulate_drive(g, pair, 0.1)
        colors = bipartition(g)
        assert colors[1] == 0
        assert all(colors[j] != colors[k] for j, k, _ in g.edges())

    def test_triangle(self):
        g = HGraph.empty([0, 1, 2])
        for pair in [(0, 1), (1, 2), (0, 2)]:
            g = accumulate_drive(g, pair, 0.1)
        with pytest.raises(NotBipartiteError) as info:
            bipartition(g)
        cycle = info.value.cycle
        assert len(cycle) % 2 == 1 and set(cycle) == {0, 1, 2}

    def test_odd_cycle_is_a_real_cycle(self):
        g = HGraph.empty(range(7))
        for pair in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5), (5, 6)]:
            g = accumulate_drive(g, pair, 0.1)
        with pytest.raises(NotBipartiteError) as info:
            bipartition(g)
        cycle = info.value.cycle
        assert len(cycle) == 5
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            assert g.weight(a, b) != 0

    def test_square_of_four_modes(self):
        g = HGraph.empty([2, 3, 4, 5])
        for pair in [(2, 5), (3, 4), (2, 3), (4, 5)]:
            g = accumulate_drive(g, pair, 0.1)
        colors = bipartition(g)
        assert {m for m, c in colors.items() if c == 0} == {2, 4}
        assert rotated_class(colors) == [3, 5]


class TestToCluster:
    def test_empty_graph(self):
        st0 = vacuum(3)
        out, adj = to_cluster(st0, HGraph.empty([0, 1, 2]))
        np.testing.assert_array_equal(out.sigma, st0.sigma)
        assert not adj.A_matrix.any()

    def test_two_mode_cluster_below_vacuum(self):
        state, graph = squeezed([0, 1], [(0, 1, 0.3)])
        out, adj = to_cluster(state, graph)
        assert np.all(nullifier_variances(out, adj) < 0.5)

    def test_twice_negates_rotated_class(self):
        state, graph = squeezed([0, 1, 2], [(0, 1, 0.3), (1, 2, 0.2)])
        once, _ = to_cluster(state, graph)
        twice, _ = to_cluster(once, graph)
        d = np.diag([1, 1, -1, -1, 1, 1])
        np.testing.assert_allclose(twice.sigma, d @ state.sigma @ d, atol=1e-12)

    def test_size_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            to_cluster(vacuum(2), HGraph.empty([0, 1, 2]))

    def test_non_bipartite(self):
        state, graph = squeezed([0, 1, 2], [(0, 1, 0.1), (1, 2, 0.1), (0, 2, 0.1)])
        with pytest.raises(NotBipartiteError):
            to_cluster(state, graph)


class TestNullifiers:
    def test_vacuum(self):
        adj = ClusterAdjacency((0, 1, 2), np.zeros((3, 3)))
        np.testing.assert_allclose(nullifier_variances(vacuum(3), adj), [0.5] * 3)

    @pytest.mark.parametrize("r", [0.1, 0.3, 0.8])
    def test_unit_weight_tms(self, r):
        state, graph = squeezed([0, 1], [(0, 1, r)])
        out, _ = to_cluster(state, graph)
        unit = ClusterAdjacency((0, 1), [[0, 1], [1, 0]])
        np.testing.assert_allclose(nullifier_variances(out, unit), [math.exp(-2 * r)] * 2, rtol=1e-12)

    def test_exact_adjacency_is_optimal_weight(self):
        r = 0.3
        state, graph = squeezed([0, 1], [(0, 1, r)])
        out, adj = to_cluster(state, graph, "exact")
        assert adj.A_matrix[0, 1] == pytest.approx(math.tanh(2 * r))
        # mpmath: 1 / (2 cosh 0.6)
        np.testing.assert_allclose(nullifier_variances(out, adj), [0.421775343810903320788749365546] * 2)

    def test_first_order_adjacency(self):
        r = 0.05
        state, graph = squeezed([0, 1], [(0, 1, r)])
        out, adj = to_cluster(state, graph)
        assert adj.A_matrix[0, 1] == pytest.approx(2 * r)
        v = nullifier_variances(out, adj)
        assert v[0] == pytest.approx(0.5 - r * r, abs=2 * r ** 3)

    def test_decrease_with_repetitions(self):
        prev = None
        for n in range(1, 11):
            state, graph = squeezed([0, 1, 2, 3], [(0, 1, 0.03 * n), (1, 2, 0.03 * n), (2, 3, 0.03 * n)])
            v = nullifier_variances(*to_cluster(state, graph))
            if prev is not None:
                assert np.all(v < prev)
            prev = v

    def test_mean_contributes(self):
        st0 = CovarianceState(np.eye(2), [0.0, 0.3])
        adj = ClusterAdjacency((0,), np.zeros((1, 1)))
        assert nullifier_variances(st0, adj)[0] == pytest.approx(0.5 + 0.09)

    def test_csv(self):
        state, graph = squeezed([0, 1], [(0, 1, 0.2)])
        text = nullifier_csv(*to_cluster(state, graph))
        lines = text.splitlines()
        assert lines[0] == "node,mean,variance" and len(lines) == 3
        assert float(lines[1].split(",")[1]) == 0.0

    def test_locality(self):
        state, graph = squeezed([0, 1, 2, 3], [(0, 1, 0.2), (2, 3, 0.3)])
        full = nullifier_variances(*to_cluster(state, graph))
        sub_state = partial_trace(state, [2, 3])
        sub_graph = HGraph((2, 3), graph.B_matrix[2:, 2:])
        part = nullifier_variances(*to_cluster(sub_state, sub_graph))
        np.testing.assert_allclose(full[2:], part, atol=1e-14)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 7), st.data())
def test_bipartite_equal_weight_graphs_beat_vacuum(n, data):
    colors = [0] + data.draw(st.lists(st.integers(0, 1), min_size=n - 1, max_size=n - 1))
    candidates = [(i, j) for i in range(n) for j in range(i + 1, n) if colors[i] != colors[j]]
    chosen = data.draw(st.lists(st.sampled_from(candidates), unique=True, max_size=len(candidates))
                       if candidates else st.just([]))
    b = data.draw(st.floats(0.001, 0.2))
    state, graph = squeezed(list(range(n)), [(i, j, b) for i, j in chosen])
    v = nullifier_variances(*to_cluster(state, graph))
    touched = {m for e in chosen for m in e}
    for m in range(n):
        if m in touched:
            assert v[m] < 0.5
        else:
            assert v[m] == pytest.approx(0.5, abs=1e-12)


class TestEffectiveHamiltonian:
    def test_vacuum(self):
        np.testing.assert_array_equal(effective_hamiltonian(vacuum(3), (0, 2)), np.eye(4))

    def test_tms_blocks(self):
        r = 1e-3
        state, _ = squeezed([0, 1], [(0, 1, r)])
        h = effective_hamiltonian(state, (0, 1))
        np.testing.assert_allclose(h[:2, 2:], -2 * r * np.diag([1, -1]), atol=r * r)
        np.testing.assert_array_equal(h, h.T)

    def test_same_mode(self):
        with pytest.raises(InvalidArgumentError):
            effective_hamiltonian(vacuum(2), (1, 1))


def test_graph_exports():
    g = accumulate_drive(HGraph.empty([2, 3]), (2, 3), 0.125)
    data = json.loads(g.to_json())
    assert data["edges"] == [[2, 3, 0.125]]
    assert "2 -- 3" in g.to_dot()


def test_cluster_adjacency_validation():
    with pytest.raises(InvalidArgumentError):
        ClusterAdjacency((0, 1), [[1, 0], [0, 0]])
    with pytest.raises(InvalidArgumentError):
        cluster_adjacency(HGraph.empty([0]), "nope")


def test_phase_shift_keeps_nullifier_of_unrotated_vacuum():
    out = phase_shift(vacuum(1), 0, 0.4)
    adj = ClusterAdjacency((0,), np.zeros((1, 1)))
    assert nullifier_variances(out, adj)[0] == pytest.approx(0.5)
