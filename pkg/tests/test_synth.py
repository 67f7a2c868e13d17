import numpy as np
import pytest

from sparsesense.errors import BoundsError, ValidationError
from sparsesense.synth import (
    GroundTruthSpec,
    Scenario,
    ScenarioSpec,
    apply_scenario,
    generate_ground_truth,
)


def test_ground_truth_rank_one_columns_proportional():
    X = generate_ground_truth(GroundTruthSpec(m=40, n=30, rank=1, seed=3))
    ref = X[:, np.argmax(np.linalg.norm(X, axis=0))]
    for j in range(X.shape[1]):
        coeff = (ref @ X[:, j]) / (ref @ ref)
        np.testing.assert_allclose(X[:, j], coeff * ref, atol=1e-10)


@pytest.mark.parametrize("rank", [1, 3, 7])
def test_ground_truth_numerical_rank(rank):
    X = generate_ground_truth(GroundTruthSpec(m=80, n=60, rank=rank, seed=rank))
    sv = np.linalg.svd(X, compute_uv=False)
    assert int(np.sum(sv > 1e-8 * sv[0])) == rank


def test_ground_truth_deterministic():
    spec = GroundTruthSpec(m=50, n=40, rank=4, seed=11)
    np.testing.assert_array_equal(generate_ground_truth(spec),
                                  generate_ground_truth(spec))


def test_ground_truth_rank_bounds():
    with pytest.raises(BoundsError):
        generate_ground_truth(GroundTruthSpec(m=5, n=4, rank=5, seed=0))


# ----------------------------------------------------------------------
# scenarios


@pytest.fixture(scope="module")
def truth():
    return generate_ground_truth(GroundTruthSpec(m=500, n=60, rank=4, seed=0))


def test_scenario_outliers_count_and_range(truth):
    spec = ScenarioSpec(scenario=Scenario.OUTLIERS, seed=21)
    out, mask = apply_scenario(truth, spec)
    for j in range(truth.shape[1]):
        changed = np.nonzero(out[:, j] != truth[:, j])[0]
        assert len(changed) == spec.n_outliers
        assert np.array_equal(np.nonzero(mask[:, j])[0], changed)
        vals = out[changed, j]
        assert np.all(((vals >= 30) & (vals <= 40)) | ((vals >= -40) & (vals <= -30)))


def test_scenario_noise_moments(truth):
    out, mask = apply_scenario(truth, ScenarioSpec(scenario=Scenario.NOISE, seed=5))
    noise = (out - truth).ravel()
    assert not mask.any()
    assert abs(noise.mean()) < 0.1
    assert abs(noise.std() - 4.0) < 0.1


def test_scenario_corruptions_mask_and_interval(truth):
    spec = ScenarioSpec(scenario=Scenario.CORRUPTIONS, seed=13)
    out, mask = apply_scenario(truth, spec)
    m, n = truth.shape
    assert mask.sum() == round(0.10 * m) * n == round(0.10 * m * n)
    add = (out - truth)[mask]
    assert np.all((add >= -15.0) & (add <= 30.0))
    # off-mask entries untouched, bit for bit
    np.testing.assert_array_equal(out[~mask], truth[~mask])


def test_scenario_superposition_composes(truth):
    spec = ScenarioSpec(scenario=Scenario.SUPERPOSITION, seed=99)
    out, mask = apply_scenario(truth, spec)
    # component masks reuse the same substreams, so they match the union
    _, mask_out = apply_scenario(truth, ScenarioSpec(scenario=Scenario.OUTLIERS, seed=99))
    _, mask_cor = apply_scenario(truth, ScenarioSpec(scenario=Scenario.CORRUPTIONS, seed=99))
    np.testing.assert_array_equal(mask, mask_out | mask_cor)
    # everything differs in general because of the dense noise component
    assert np.mean(out != truth) > 0.99


def test_scenario_deterministic(truth):
    spec = ScenarioSpec(scenario=Scenario.SUPERPOSITION, seed=31)
    out1, mask1 = apply_scenario(truth, spec)
    out2, mask2 = apply_scenario(truth, spec)
    np.testing.assert_array_equal(out1, out2)
    np.testing.assert_array_equal(mask1, mask2)


def test_scenario_whole_matrix_mode(truth):
    spec = ScenarioSpec(scenario=Scenario.OUTLIERS, seed=2, per_frame=False)
    out, mask = apply_scenario(truth, spec)
    assert mask.sum() == spec.n_outliers


def test_scenario_validation():
    X = np.zeros((10, 5)) + 1.0
    with pytest.raises(ValidationError):
        apply_scenario(X, ScenarioSpec(scenario=Scenario.OUTLIERS, n_outliers=11))
    with pytest.raises(ValidationError):
        apply_scenario(X, ScenarioSpec(corruption_fraction=1.5))
    with pytest.raises(ValidationError):
        apply_scenario(X, ScenarioSpec(noise_std=-1.0))
