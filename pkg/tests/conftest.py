import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hipar import AttributeSchema, Dataset, load_csv  # noqa: E402

TOY_CSV = """property-type,state,rooms,surface,price
cottage,very good,5,120,510
cottage,very good,3,55,410
cottage,excellent,3,50,350
apartment,excellent,5,85,320
apartment,good,4,52,140
apartment,good,3,45,125
"""


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text(TOY_CSV)
    return str(path)


@pytest.fixture
def toy(toy_csv):
    """The six-row real-estate table used throughout the micro tests."""
    return load_csv(toy_csv, target="price")


def make_two_segment(n=200, noise_frac=0.05, seed=7) -> Dataset:
    """Synthetic benchmark: categorical switch with two clean linear segments.

    y = 1 + 2x on segment A and y = 10 - 3x on segment B, plus gaussian noise
    with sigma = noise_frac * range(y).
    """
    rng = np.random.default_rng(seed)
    seg = np.array(["A"] * (n // 2) + ["B"] * (n - n // 2), dtype=object)
    x = rng.uniform(0.0, 1.0, n)
    base = np.where(seg == "A", 1.0 + 2.0 * x, 10.0 - 3.0 * x)
    sigma = noise_frac * (base.max() - base.min())
    y = base + rng.normal(0.0, sigma, n)
    return Dataset(
        [
            AttributeSchema("segment", "categorical"),
            AttributeSchema("x", "numerical"),
            AttributeSchema("y", "numerical", role="target"),
        ],
        {"segment": seg, "x": x, "y": y},
    )


@pytest.fixture
def two_segment():
    return make_two_segment()
