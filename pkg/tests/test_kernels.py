import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from gplab import _pykernels, kernels

try:
    from gplab import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
ids = [b.__name__.rsplit(".", 1)[-1] for b in BACKENDS]


@pytest.mark.parametrize("impl", BACKENDS, ids=ids)
def test_hull2d_matches_qhull(impl):
    pts = np.random.default_rng(1).standard_normal((500, 2))
    idx = impl.hull2d(pts)
    ref = ConvexHull(pts)
    assert set(idx.tolist()) == set(ref.vertices.tolist())
    area, per = impl.polygon_measures(pts, idx)
    assert area == pytest.approx(ref.volume, rel=1e-12)
    assert per == pytest.approx(ref.area, rel=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=ids)
def test_small_and_degenerate_inputs(impl):
    assert len(impl.hull2d(np.empty((0, 2)))) == 0
    assert impl.hull2d(np.array([[1.0, 2.0]])).tolist() == [0]
    seg = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    assert impl.batch_hull2d_area(seg[None]).tolist() == [0.0]
    assert impl.batch_hull2d_area(np.zeros((3, 2, 2))).tolist() == [0.0, 0.0, 0.0]
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [1, 0.5]], float)
    idx = impl.hull2d(sq)
    assert sorted(idx.tolist()) == [0, 1, 2, 3]
    assert impl.polygon_measures(sq, idx) == pytest.approx((1.0, 4.0))


@given(st.integers(0, 2**32 - 1), st.integers(3, 80), st.integers(1, 20))
def test_backends_agree(seed, m, sets):
    proj = np.random.default_rng(seed).standard_normal((sets, m, 2))
    a = _pykernels.batch_hull2d_area(proj)
    b = kernels.batch_hull2d_area(np.ascontiguousarray(proj))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    assert np.all(a >= 0)


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "cython"


def test_env_forces_python_fallback():
    env = dict(os.environ, GPLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from gplab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
