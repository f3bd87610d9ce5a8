import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

DATA = pathlib.Path(__file__).parent.parent / "data" / "synthetic.libsvm"


@pytest.fixture(scope="session")
def libsvm_path():
    return DATA


@pytest.fixture
def write_libsvm(tmp_path):
    def _write(lines, name="data.libsvm"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write


@pytest.fixture(scope="session")
def small_quadratic():
    from diana.problems import quadratic_problem

    return quadratic_problem(n=2, dim=20, condition_number=10.0, seed=7)


@pytest.fixture(scope="session")
def small_logistic(libsvm_path):
    from diana.problems import logistic_problem

    return logistic_problem(libsvm_path, n_workers=4, lambda2=0.1, partition_seed=3)


def assert_close(a, b, tol=1e-12, msg=""):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    err = float(np.max(np.abs(a - b))) if a.size else 0.0
    assert err <= tol, f"{msg} max abs err {err:.3e} > {tol:.1e}"
