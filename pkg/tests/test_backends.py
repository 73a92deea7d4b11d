import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sfcalc
from sfcalc import _kernels, _pykernels
from sfcalc.hypercomplex import product_tables, quaternion_tables

from oracles import clifford_product

needs_cython = pytest.mark.skipif("cython" not in sfcalc.available_backends(), reason="extension not built")


def tables(n):
    return quaternion_tables() if n == "H" else product_tables(n)


def size(n):
    return 4 if n == "H" else 2**n


algebras = st.sampled_from([1, 2, 3, 4, 5, "H"])


@needs_cython
@settings(max_examples=60, deadline=None)
@given(algebras, st.integers(0, 10**6))
def test_compiled_kernels_match_fallback(n, seed):
    from sfcalc import _ckernels

    rng = np.random.default_rng(seed)
    idx, sign = tables(n)
    m = size(n)
    a, b = rng.normal(size=m), rng.normal(size=m)
    A, B = rng.normal(size=(7, m)), rng.normal(size=(7, m))
    np.testing.assert_allclose(_ckernels.geometric_product(a, b, idx, sign), _pykernels.geometric_product(a, b, idx, sign), atol=1e-13)
    np.testing.assert_allclose(
        _ckernels.geometric_product_batch(A, B, idx, sign), _pykernels.geometric_product_batch(A, B, idx, sign), atol=1e-13
    )
    np.testing.assert_allclose(_ckernels.left_matrix(a, idx, sign), _pykernels.left_matrix(a, idx, sign), atol=1e-14)
    np.testing.assert_allclose(_ckernels.right_matrix(a, idx, sign), _pykernels.right_matrix(a, idx, sign), atol=1e-14)


@pytest.mark.parametrize("backend", sfcalc.available_backends())
def test_each_backend_matches_oracle(backend):
    previous = _kernels.impl()
    try:
        sfcalc.use_backend(backend)
        rng = np.random.default_rng(3)
        for n in range(1, 5):
            idx, sign = product_tables(n)
            a, b = rng.normal(size=2**n), rng.normal(size=2**n)
            np.testing.assert_allclose(_kernels.geometric_product(a, b, idx, sign), clifford_product(a, b, n), atol=1e-12)
            np.testing.assert_allclose(_kernels.left_matrix(a, idx, sign) @ b, clifford_product(a, b, n), atol=1e-12)
            np.testing.assert_allclose(_kernels.right_matrix(a, idx, sign) @ b, clifford_product(b, a, n), atol=1e-12)
    finally:
        _kernels._active = previous


def test_unknown_backend_is_rejected():
    with pytest.raises(ValueError):
        sfcalc.use_backend("fortran")


def test_fallback_selected_by_environment():
    import subprocess
    import sys

    code = "import sfcalc._kernels as k; print(k.impl().__name__)"
    out = subprocess.run(
        [sys.executable, "-c", code], env={"SFCALC_BACKEND": "python", "PATH": ""}, capture_output=True, text=True
    )
    assert out.stdout.strip().endswith("_pykernels")
