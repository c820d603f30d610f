"""Backend equivalence: the jitted path must reproduce the numpy path."""

import numpy as np
import pytest

from biascube._kernels import (
    HAS_NUMBA,
    _resolve_backend,
    batch_influences,
    connected_batch,
)
from biascube.booleans import BooleanFunction
from biascube.measure import influences, weights

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")


def brute_connected(bits, m, edge_u, edge_v):
    adj = [set() for _ in range(m)]
    for e, present in enumerate(bits):
        if present:
            adj[edge_u[e]].add(edge_v[e])
            adj[edge_v[e]].add(edge_u[e])
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return int(len(seen) == m)


class TestBatchInfluences:
    def test_numpy_matches_reference_implementation(self):
        rng = np.random.default_rng(0)
        for n in (3, 6, 9):
            tables = (rng.random((20, 1 << n)) < 0.5).astype(np.uint8)
            p = 0.35
            got = batch_influences(tables, n, weights(n - 1, p), backend="numpy")
            for row in range(20):
                expected = influences(BooleanFunction(n, tables[row]), p)
                assert np.allclose(got[row], expected, atol=1e-14)

    @needs_numba
    def test_backends_agree(self):
        rng = np.random.default_rng(1)
        for n in (3, 7, 10):
            tables = (rng.random((40, 1 << n)) < 0.5).astype(np.uint8)
            base = weights(n - 1, 0.2)
            a = batch_influences(tables, n, base, backend="numpy")
            b = batch_influences(tables, n, base, backend="numba")
            assert np.max(np.abs(a - b)) <= 1e-14


class TestConnectedBatch:
    def edges(self, m):
        u, v = np.triu_indices(m, k=1)
        return u.astype(np.int32), v.astype(np.int32)

    def test_numpy_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for m in (4, 6, 9):
            edge_u, edge_v = self.edges(m)
            present = (rng.random((200, edge_u.size)) < 0.4).astype(np.uint8)
            got = connected_batch(present, m, edge_u, edge_v, backend="numpy")
            for row in range(200):
                assert got[row] == brute_connected(present[row], m, edge_u, edge_v)

    @needs_numba
    def test_backends_agree(self):
        rng = np.random.default_rng(3)
        for m in (5, 12):
            edge_u, edge_v = self.edges(m)
            for p in (0.05, 0.3, 0.9):
                present = (rng.random((500, edge_u.size)) < p).astype(np.uint8)
                a = connected_batch(present, m, edge_u, edge_v, backend="numpy")
                b = connected_batch(present, m, edge_u, edge_v, backend="numba")
                assert (a == b).all()


class TestBackendSelection:
    def test_explicit_choices(self):
        assert _resolve_backend("numpy") == "numpy"
        if HAS_NUMBA:
            assert _resolve_backend("numba") == "numba"
            assert _resolve_backend("auto") == "numba"

    def test_env_fallback(self, monkeypatch):
        monkeypatch.setenv("BIASCUBE_BACKEND", "numpy")
        assert _resolve_backend() == "numpy"

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            _resolve_backend("fortran")
