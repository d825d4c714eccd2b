"""Shared brute-force oracles.

These helpers enumerate vectors explicitly and never call the elimination
routines under test, so they can serve as independent references on tiny
spaces.
"""

import itertools

import numpy as np
import pytest

from pdecomp.field import PrimeField


def all_vectors(p, n):
    return [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n)]


def span_set(columns, p, n):
    """Every vector in the column span, as a set of tuples (enumerates coefficients)."""
    columns = np.asarray(columns, dtype=np.int64).reshape(n, -1)
    out = set()
    for coeffs in itertools.product(range(p), repeat=columns.shape[1]):
        out.add(tuple(int(c) for c in (columns @ np.array(coeffs, dtype=np.int64)) % p) if coeffs else (0,) * n)
    if not out:
        out.add((0,) * n)
    return out


def subspace_set(U):
    return span_set(U.basis, U.p, U.ambient)


def component_count(G, lo, hi, levels):
    """Components of the preimage of ``(lo, hi)`` by dense sampling, via networkx.

    Each edge is sampled at its endpoints, at every level inside its range, and
    at quarter points between consecutive samples; a sample is kept when its
    value lies in the open interval.
    """
    import networkx as nx

    g = nx.Graph()
    value = {}
    for i, v in enumerate(G.values):
        g.add_node(("v", i))
        value[("v", i)] = v
    for e, (u, w) in enumerate(G.edges):
        a, b = G.values[u], G.values[w]
        if a > b:
            u, w, a, b = w, u, b, a
        if a == b:
            g.add_edge(("v", u), ("v", w))
            continue
        cuts = sorted({a, b} | {c for c in levels if a < c < b})
        samples = []
        for s, t in zip(cuts, cuts[1:]):
            samples += [s, (3 * s + t) / 4, (s + t) / 2, (s + 3 * t) / 4]
        samples.append(b)
        nodes = [("v", u)] + [("e", e, k) for k in range(1, len(samples) - 1)] + [("v", w)]
        for node, val in zip(nodes, samples):
            g.add_node(node)
            value[node] = val
        g.add_edges_from(zip(nodes, nodes[1:]))
    keep = [node for node in g if lo < value[node] < hi]
    return nx.number_connected_components(g.subgraph(keep))


@pytest.fixture(params=[2, 3, 101], ids=lambda p: f"GF{p}")
def F(request):
    return PrimeField(request.param)


@pytest.fixture
def F2():
    return PrimeField(2)


# one PASS/FAIL line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
