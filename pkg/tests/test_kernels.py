import os
import random
import subprocess
import sys

import pytest

from mellingamma import _pykernels, kernels

ck = pytest.importorskip("mellingamma._ckernels")


def _random_rows(rng, m, n, big=False):
    bound = 10**30 if big else 5
    return [[rng.randint(-bound, bound) if rng.random() < 0.6 else 0 for _ in range(n)] for _ in range(m)]


@pytest.mark.parametrize("seed", range(25))
def test_dense_kernel_matches_python(seed):
    rng = random.Random(seed)
    m, n = rng.randint(0, 9), rng.randint(1, 9)
    rows = _random_rows(rng, m, n, big=seed % 5 == 0)
    assert ck.rref_int(rows, n) == _pykernels.rref_int(rows, n)


@pytest.mark.parametrize("seed", range(25))
def test_sparse_kernel_matches_python(seed):
    rng = random.Random(1000 + seed)
    rows = []
    for _ in range(rng.randint(0, 30)):
        rows.append({rng.randrange(40): rng.randint(-9, 9) for _ in range(rng.randint(0, 5))})
    assert ck.sparse_rank_int(rows) == _pykernels.sparse_rank_int(rows)


def test_overflow_falls_back_exactly():
    rows = [[2**62, 3], [5, 2**62 + 1]]
    assert ck.rref_int(rows, 2) == _pykernels.rref_int(rows, 2)


@pytest.mark.parametrize("seed", range(10))
def test_sparse_overflow_resumes_exactly(seed):
    # entries near 2**40 overflow 64 bits only after a few eliminations
    rng = random.Random(2000 + seed)
    rows = [{rng.randrange(12): rng.randint(-2**40, 2**40) for _ in range(3)} for _ in range(20)]
    assert ck.sparse_rank_int(rows) == _pykernels.sparse_rank_int(rows)
    assert ck.sparse_rank_int([{0: 2**63}, {0: 1, 1: 1}]) == 2


def test_pivots_are_equal_and_rows_reduced():
    rows = [[2, 4, 1], [1, 3, 7], [3, 7, 8]]
    red, piv = _pykernels.rref_int(rows, 3)
    assert piv == [0, 1]
    assert red[0][0] == red[1][1]
    assert red[0][1] == 0 and red[1][0] == 0


def test_backend_selection_respects_env():
    env = dict(os.environ, MELLINGAMMA_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import mellingamma.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND == "cython"
