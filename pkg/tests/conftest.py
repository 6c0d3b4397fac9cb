import numpy as np
import pytest

from slicelab.quaternions import Quaternion, mul
from slicelab.series import SliceLaurentSeries


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def q(*c):
    return Quaternion(*[float(v) for v in c])


def brute_star(f: SliceLaurentSeries, g: SliceLaurentSeries) -> dict:
    """Convolution with scalar Quaternion products, as an index -> Quaternion map."""
    out = {}
    for i in range(f.n_min, f.n_max + 1):
        for j in range(g.n_min, g.n_max + 1):
            out[i + j] = out.get(i + j, Quaternion()) + mul(f.coeff(i), g.coeff(j))
    return out


def qpow(x: Quaternion, n: int) -> Quaternion:
    base = x if n >= 0 else x.inverse()
    r = Quaternion(1.0)
    for _ in range(abs(n)):
        r = mul(r, base)
    return r


def brute_eval(f: SliceLaurentSeries, x: Quaternion) -> Quaternion:
    total = Quaternion()
    for n in range(f.n_min, f.n_max + 1):
        total = total + mul(qpow(x, n), f.coeff(n))
    return total


def as_series_dict(d: dict, lo: int, hi: int) -> np.ndarray:
    return np.array([d.get(n, Quaternion()).as_array() for n in range(lo, hi + 1)])
