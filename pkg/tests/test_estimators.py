import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from phistab.cube import dictator
from phistab.enumerate import all_tables
from phistab.estimators import DegreeWeightTransformer, FourierTransformer, StabilityTransformer
from phistab.phi import PhiSpec, dictator_stability, stability_many

X = all_tables(3, 4)


def test_fourier_roundtrip():
    ft = FourierTransformer().fit(X)
    C = ft.transform(X)
    assert C.shape == X.shape
    np.testing.assert_array_equal(ft.inverse_transform(C), X)


def test_degree_weights_sum_to_mean():
    W = DegreeWeightTransformer().fit_transform(X)
    assert W.shape == (len(X), 4)
    np.testing.assert_allclose(W.sum(axis=1), X.mean(axis=1), atol=1e-14)


def test_stability_features():
    st = StabilityTransformer(rho=0.4, alpha=1.0, symmetric=True,
                              features=("stability", "mutual_information", "mean"))
    out = st.fit_transform(X)
    spec = PhiSpec(1.0, symmetric=True)
    np.testing.assert_allclose(out[:, 0], stability_many(X, spec, 0.4))
    np.testing.assert_allclose(out[:, 1], out[:, 0] - spec(0.5), atol=1e-15)
    np.testing.assert_allclose(out[:, 2], 0.5)
    d = dictator(3, 1).table[None, :]
    assert st.transform(d)[0, 0] == pytest.approx(dictator_stability(spec, 0.4))
    assert list(st.get_feature_names_out()) == ["stability", "mutual_information", "mean"]


def test_params_and_clone():
    st = StabilityTransformer(rho=0.7, alpha=2.5)
    assert st.get_params()["rho"] == 0.7
    st2 = clone(st).set_params(rho=0.2)
    assert st2.rho == 0.2 and st.rho == 0.7


def test_pipeline():
    pipe = make_pipeline(DegreeWeightTransformer())
    assert pipe.fit_transform(X).shape == (len(X), 4)


def test_validation():
    with pytest.raises(NotFittedError):
        FourierTransformer().transform(X)
    with pytest.raises(ValueError, match="power of two"):
        FourierTransformer().fit(np.zeros((2, 6)))
    with pytest.raises(ValueError, match="0 and 1"):
        FourierTransformer().fit(np.full((2, 8), 2))
    ft = FourierTransformer().fit(X)
    with pytest.raises(ValueError, match="length"):
        ft.transform(np.zeros((1, 4)))
    with pytest.raises(ValueError, match="unknown features"):
        StabilityTransformer(features=("entropy",)).fit(X)
