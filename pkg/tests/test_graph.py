import json

import pytest
from hypothesis import given

from orderdag import Dag, GraphError, InterventionSet, Pdag
from orderdag.graph import (bits_to_set, dag_from_edge_list, dag_from_json, intervened_dag,
                            iter_bits, pdag_from_edge_list, pdag_from_json, set_to_bits, skeleton,
                            to_edge_list, to_json, topological_order, v_structures)

from conftest import dags


def test_bit_helpers():
    assert list(iter_bits(0b101001)) == [0, 3, 5]
    assert bits_to_set(0b110) == {1, 2}
    assert set_to_bits([4, 0]) == 0b10001


def test_cycle_rejected():
    with pytest.raises(GraphError):
        Dag.from_edges(3, [(0, 1), (1, 2), (2, 0)])


def test_self_loop_rejected():
    with pytest.raises(GraphError):
        Dag.from_edges(2, [(1, 1)])


def test_order_must_be_respected():
    with pytest.raises(GraphError):
        Dag(2, (0b10, 0), (0, 1))  # 1 -> 0 against order (0, 1)


def test_basic_queries(v_structure):
    g = v_structure
    assert g.edges == [(0, 2), (1, 2), (2, 3)]
    assert g.num_edges == 3
    assert g.parent_set(2) == {0, 1}
    assert g.has_edge(0, 2) and not g.has_edge(2, 0)
    assert g.adjacent(2, 0) and not g.adjacent(0, 1)
    assert v_structures(g) == {(0, 1, 2)}  # (parent, parent, collider)
    assert skeleton(g) == {frozenset(e) for e in [(0, 2), (1, 2), (2, 3)]}


def test_induced_relabels(v_structure):
    sub, labels = v_structure.induced([1, 2, 3])
    assert labels == [1, 2, 3]
    assert sub.edges == [(0, 1), (1, 2)]


def test_intervened_dag_drops_parents(v_structure):
    h = intervened_dag(v_structure, 2)
    assert h.edges == [(2, 3)]


def test_pdag_validation():
    with pytest.raises(GraphError):
        Pdag(2, (0b10, 0), (0b10, 0b01))  # edge both directed and undirected
    with pytest.raises(GraphError):
        Pdag(2, (0, 0), (0b10, 0))  # asymmetric undirected edge


def test_pdag_views():
    p = Pdag.from_edges(4, directed=[(0, 1)], undirected=[(2, 1), (3, 2)])
    assert p.directed == {(0, 1)}
    assert p.undirected == {(1, 2), (2, 3)}
    assert p.num_undirected == 2
    assert p.undirected_components() == [[1, 2, 3]]
    assert p.directed_is_acyclic()


def test_intervention_set_validation():
    InterventionSet([0, 2]).validate(3)
    with pytest.raises(GraphError):
        InterventionSet([3]).validate(3)
    assert InterventionSet([0, 2]).mask == 0b101
    assert len(InterventionSet([1, 1])) == 1


@given(dags())
def test_topological_order_is_valid(g):
    order = topological_order(g.n, g.parents)
    pos = {v: k for k, v in enumerate(order)}
    assert sorted(order) == list(range(g.n))
    assert all(pos[i] < pos[j] for i, j in g.edges)


@given(dags())
def test_json_round_trip(g):
    assert dag_from_json(to_json(g)) == g
    p = g.to_pdag()
    assert pdag_from_json(json.loads(to_json(p))) == p


@given(dags())
def test_edge_list_round_trip(g):
    text = to_edge_list(g)
    assert text.startswith(f"# n = {g.n}\n")
    assert dag_from_edge_list(text).edges == g.edges


def test_edge_list_undirected():
    p = Pdag.from_edges(3, directed=[(0, 1)], undirected=[(1, 2)])
    assert pdag_from_edge_list(to_edge_list(p)) == p
