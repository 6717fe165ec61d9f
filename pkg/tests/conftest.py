import numpy as np
import pytest

from jordan_gft.jordan import JordanForm

ACCEPTANCE_LINES = []


def random_basis(rng, n, cond_cap=100.0):
    while True:
        v = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if np.linalg.cond(v) < cond_cap:
            return v


def planted_blocks(rng, n_max=10, block_max=4, repeat=True):
    """Random Jordan structure with small integer / Gaussian-integer eigenvalues."""
    n = int(rng.integers(2, n_max + 1))
    pool = [complex(x) for x in rng.integers(-3, 4, size=6)]
    pool += [complex(rng.integers(-3, 4), rng.integers(-3, 4)) for _ in range(3)]
    blocks, left, used = [], n, set()
    while left > 0:
        size = int(rng.integers(1, min(block_max, left) + 1))
        if repeat:
            lam = pool[rng.integers(len(pool))]
        else:
            lam = next(z for z in (complex(rng.integers(-9, 10), rng.integers(-9, 10))
                                   for _ in range(1000)) if z not in used)
            used.add(lam)
        blocks.append((lam, size))
        left -= size
    return blocks


def planted(rng, n_max=10, block_max=4, repeat=True):
    """``(A, blocks, V)`` with ``A = V J V^{-1}`` for a random structure."""
    blocks = planted_blocks(rng, n_max, block_max, repeat)
    j = JordanForm(tuple(blocks)).matrix()
    v = random_basis(rng, j.shape[0])
    return v @ j @ np.linalg.inv(v), blocks, v


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
