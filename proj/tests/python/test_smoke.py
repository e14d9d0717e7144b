"""Smoke tests for the python bindings: the main operations round-trip
through numpy and a tiny training run behaves deterministically."""

import math

import numpy as np
import pytest

import cgclab


def make_spec(seed=3):
    spec = cgclab.DatasetSpec()
    spec.num_identities = 5
    spec.samples_per_identity = 8
    spec.dim = 12
    spec.noise_sigma = 0.06
    spec.boundary_fraction = 0.1
    spec.boundary_sigma = 0.2
    spec.num_cameras = 2
    spec.camera_bias_sigma = 0.02
    spec.seed = seed
    return spec


def test_cosine_ops():
    assert cgclab.cosine_similarity([1.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)
    assert cgclab.cosine_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
    rows = cgclab.l2_normalize_rows(np.array([[3.0, 4.0]]))
    assert rows[0, 0] == pytest.approx(0.6)
    assert rows[0, 1] == pytest.approx(0.8)
    with pytest.raises(cgclab.ZeroVectorError):
        cgclab.cosine_similarity([0.0, 0.0], [1.0, 0.0])


def test_generate_and_cluster():
    data = cgclab.generate(make_spec())
    obs = data["observations"]
    assert obs.shape == (40, 12)
    norms = np.linalg.norm(obs, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-12)

    params = cgclab.DbscanParams()
    params.eps = 0.4
    params.min_pts = 3
    assign = cgclab.dbscan(obs, params)
    assert assign.num_clusters >= 1
    members = cgclab.cluster_members(assign)
    assert sum(len(m) for m in members) + assign.num_outliers() == 40

    scores, valid = cgclab.silhouette_scores(assign, obs)
    assert len(scores) == 40
    assert all(-1.0 <= s <= 1.0 for s, v in zip(scores, valid) if v)


def test_labels_and_losses():
    data = cgclab.generate(make_spec())
    obs = data["observations"]
    params = cgclab.DbscanParams()
    params.eps = 0.4
    params.min_pts = 3
    assign = cgclab.dbscan(obs, params)
    scores, _ = cgclab.silhouette_scores(assign, obs)
    bank = cgclab.confidence_guided_centroids(assign, obs, scores, delta=-0.1)
    assert bank.size() == assign.num_clusters

    dist = cgclab.distance_matrix(obs, bank)
    conf = cgclab.confidence_matrix(dist)
    assert np.allclose(conf.sum(axis=1), 1.0, atol=1e-9)

    labels, valid = cgclab.confidence_guided_labels(assign, conf, 0.8)
    sums = labels.sum(axis=1)
    for i, v in enumerate(valid):
        if v:
            assert sums[i] == pytest.approx(1.0, abs=1e-9)

    i = next(i for i, v in enumerate(valid) if v)
    loss, grads = cgclab.batch_loss_and_grad(
        obs[i : i + 1], bank, labels[i : i + 1], 0.05
    )
    assert math.isfinite(loss)
    assert grads.shape == (1, 12)
    # Gradient is orthogonal to the parameter row (normalization Jacobian).
    assert abs(float(grads[0] @ obs[i])) < 1e-9


def test_threshold_schedule():
    sched = cgclab.ThresholdSchedule()
    sched.kind = cgclab.ScheduleKind.LINEAR
    sched.delta0 = 0.2
    sched.epsilon = -0.1
    sched.total_epochs = 50
    assert cgclab.threshold_at(sched, 0) == -0.1
    assert cgclab.threshold_at(sched, 50) == 0.1


def test_train_determinism_and_metrics():
    data = cgclab.generate(make_spec())
    config = cgclab.TrainConfig()
    config.epochs = 3
    config.batch_identities = 4
    config.batch_instances = 4
    config.dbscan.eps = 0.4
    config.dbscan.min_pts = 3
    config.seed = 11

    first = cgclab.train(
        data["observations"], data["identities"], data["camera_ids"], config
    )
    second = cgclab.train(
        data["observations"], data["identities"], data["camera_ids"], config
    )
    assert np.array_equal(first["features"], second["features"])
    assert len(first["metrics"]) == 3
    for record in first["metrics"]:
        assert 0.0 <= record["mAP"] <= 1.0
        assert record["cmc"][1] <= record["cmc"][5] <= record["cmc"][10]

    final = first["features"]
    m = cgclab.mean_average_precision(
        final, first["query"], first["gallery"], data["identities"], data["camera_ids"]
    )
    assert m == pytest.approx(first["metrics"][-1]["mAP"])
