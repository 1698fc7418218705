import numpy as np
import pytest

from sorsvd.core import singular_values
from sorsvd.errors import ParameterError
from sorsvd.matrixgen import (
    GenSpec,
    gen_noisy_lowrank,
    gen_polydecay,
    gen_rpca_instance,
    generate,
    geometric_spectrum,
    random_orthonormal,
)


def test_geometric_spectrum_endpoints():
    s = geometric_spectrum(20)
    assert s[0] == 1.0
    assert s[-1] == pytest.approx(1e-9, rel=1e-12)
    np.testing.assert_allclose(s[1:] / s[:-1], 10 ** (-9 / 19))


def test_random_orthonormal():
    q = random_orthonormal(50, 1)
    np.testing.assert_allclose(q.T @ q, np.eye(50), atol=1e-13)
    np.testing.assert_array_equal(q, random_orthonormal(50, 1))


def test_noisy_lowrank_structure(stewart300):
    a, svd_a = stewart300
    s = svd_a.sigma
    np.testing.assert_allclose(s[:20], geometric_spectrum(20), atol=2e-10)
    # noise has spectral norm 0.1 * sigma_k = 1e-10
    assert s[20] <= 1.05e-10
    assert s[20] >= 5e-11


def test_noisy_lowrank_frobenius_variant():
    a = gen_noisy_lowrank(60, 5, 3, normalization="frobenius")
    b = gen_noisy_lowrank(60, 5, 3, noise=0.0)
    assert np.linalg.norm(a - b) == pytest.approx(0.1 * 1e-9, rel=1e-9)


def test_polydecay_spectrum():
    s = singular_values(gen_polydecay(80, 2))
    np.testing.assert_allclose(s, 1.0 / np.arange(1, 81), rtol=1e-10)


def test_rpca_instance():
    x, low, sparse = gen_rpca_instance(60, 3, 200, 9)
    np.testing.assert_array_equal(x, low + sparse)
    assert np.count_nonzero(sparse) == 200
    assert set(np.unique(sparse[sparse != 0])) <= {-50.0, 50.0}
    assert np.linalg.matrix_rank(low) == 3


def test_rpca_instance_deterministic():
    a = gen_rpca_instance(30, 2, 40, 1)
    b = gen_rpca_instance(30, 2, 40, 1)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


@pytest.mark.parametrize("args", [(10, 10, 5, 0), (10, 2, 101, 0), (10, 0, 1, 0)])
def test_rpca_instance_validation(args):
    with pytest.raises(ParameterError):
        gen_rpca_instance(*args)


def test_genspec_dispatch():
    out = generate(GenSpec("rpca_instance", 20, 2, 10, 4))
    assert set(out) == {"a", "l", "s"}
    assert generate(GenSpec("polydecay", 10, seed=1))["a"].shape == (10, 10)
    assert GenSpec("polydecay", 10).to_dict()["family"] == "polydecay"
    with pytest.raises(ParameterError):
        GenSpec("cauchy", 10)
    with pytest.raises(ParameterError):
        GenSpec("noisy_lowrank", 10, 10)
