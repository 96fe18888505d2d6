import math

import numpy as np
import pytest

import smm


@pytest.fixture(scope="module")
def setup2():
    return smm.simulate("setup2", seed=3)


@pytest.fixture(scope="module")
def chain(setup2):
    X, _, _ = setup2
    return smm.fit(X, K=6, L=2, burnin=40, iterations=60, seed=2)


def test_simulate_shapes(setup2):
    X, component, cluster = setup2
    assert X.shape == (300, 2)
    assert set(component) == {1, 2, 3}
    assert set(cluster) == {1, 2}
    X1, _, _ = smm.simulate("setup1", seed=1)
    assert X1.shape == (800, 2)
    Xs, _, cs = smm.simulate("sal", seed=1, n=50)
    assert Xs.shape == (50, 2) and set(cs) <= {1, 2}


def test_simulate_is_deterministic():
    a = smm.simulate("setup2", seed=9)[0]
    b = smm.simulate("setup2", seed=9)[0]
    np.testing.assert_array_equal(a, b)


def test_fit_chain(chain):
    assert len(chain) == 60
    assert chain.K == 6 and chain.L == 2
    trace = chain.K0_trace
    assert len(trace) == 60
    assert all(1 <= k <= 6 for k in trace)
    eta = chain.eta(0)
    assert eta.shape == (6,)
    assert math.isclose(eta.sum(), 1.0, rel_tol=1e-12)
    labels = chain.labels(0)
    assert len(labels) == 300 and min(labels) >= 1 and max(labels) <= 6
    assert len(set(labels)) == trace[0]


def test_fit_is_deterministic(setup2):
    X = setup2[0]
    a = smm.fit(X, K=4, L=2, burnin=5, iterations=10, seed=7)
    b = smm.fit(X, K=4, L=2, burnin=5, iterations=10, seed=7)
    assert a.K0_trace == b.K0_trace
    assert a.labels(9) == b.labels(9)


def test_identify(chain, setup2):
    X, _, truth = setup2
    res = smm.identify(chain, X, seed=1)
    k = res["K0_hat"]
    assert k == smm.estimate_K0(chain.K0_trace)
    assert 0.0 <= res["M0_rho"] <= 1.0
    t = np.asarray(res["t"])
    assert t.shape == (300, k)
    np.testing.assert_allclose(t.sum(axis=1), 1.0, atol=1e-10)
    assert len(res["S_hat"]) == 300
    assert min(res["S_hat"]) >= 1 and max(res["S_hat"]) <= k
    assert res["entropy"] >= 0.0
    assert len(res["cluster_eta"]) == k
    etas = res["cluster_eta"]
    assert all(etas[i] >= etas[i + 1] for i in range(k - 1))
    assert -1.0 <= smm.adjusted_rand(res["S_hat"], truth) <= 1.0


def test_similarity(chain):
    s = np.asarray(smm.similarity_matrix(chain))
    assert s.shape == (300, 300)
    np.testing.assert_array_equal(np.diag(s), 1.0)
    np.testing.assert_array_equal(s, s.T)


def test_chain_round_trip(chain, tmp_path):
    path = str(tmp_path / "chain.ndjson")
    chain.save(path)
    back = smm.Chain.load(path)
    assert back.K0_trace == chain.K0_trace
    assert back.labels(5) == chain.labels(5)


def test_metrics():
    assert smm.adjusted_rand([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(-0.5)
    assert smm.misclassification_rate([1, 1, 2, 2], [1, 2, 2, 2]) == pytest.approx(0.25)
    assert smm.adjusted_rand([1, 1, 2, 2], [2, 2, 1, 1]) == 1.0


def test_partition_prior():
    # Two observations, K = 2, e0 = 1: P(S = (1, 1)) = 1/3.
    assert math.exp(smm.log_partition_prior([1, 1], 2, 1.0)) == pytest.approx(1 / 3)


def test_errors(setup2):
    X = setup2[0]
    with pytest.raises(smm.Error):
        smm.fit(X, K=0)
    with pytest.raises(smm.Error):
        smm.simulate("nope")
    with pytest.raises(smm.Error):
        smm.fit(np.ones((5, 2)), K=2, L=1, burnin=1, iterations=1)
    assert issubclass(smm.Error, RuntimeError)
