import numpy as np
import pytest

from threshaug.dataset import Dataset


def make_sine_dataset(n=200, seed=0, name="sine"):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, size=(n, 2))
    y = np.sin(3 * x[:, 0]) + x[:, 1] ** 2 + rng.normal(0, 0.1, size=n)
    return Dataset(x, y, ("x1", "x2"), "y", name)


def write_csv(path, ds: Dataset):
    with open(path, "w") as fh:
        fh.write(",".join((*ds.feature_names, ds.target_name)) + "\n")
        for row, t in zip(ds.features, ds.target):
            fh.write(",".join(repr(float(v)) for v in (*row, t)) + "\n")
    return path


@pytest.fixture
def sine_dataset():
    return make_sine_dataset()
