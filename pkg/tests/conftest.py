import numpy as np
import pytest
from hypothesis import strategies as st

ACCEPTANCE_LINES: list[str] = []


def random_instance(rng, max_goods=3, max_countries=3, high=10):
    """Integer demand/supply pair with no inert country and positive supply."""
    while True:
        n = int(rng.integers(1, max_goods + 1))
        M = int(rng.integers(1, max_countries + 1))
        C = rng.integers(0, high, (n, M)).astype(float)
        B = rng.integers(0, high, (n, M)).astype(float)
        if C.any(axis=0).all() and B.sum() > 0:
            return C, B


def balanced_instance(rng, max_goods=6, max_countries=6, swaps=50):
    """Supply with exactly the row and column totals of demand.

    Starts from B = C and moves integer mass around 2x2 rectangles, which
    keeps every margin unchanged.
    """
    C, _ = random_instance(rng, max_goods, max_countries)
    B = C.copy()
    n, M = B.shape
    if n > 1 and M > 1:
        for _ in range(swaps):
            s, t = rng.choice(n, 2, replace=False)
            k, m = rng.choice(M, 2, replace=False)
            amount = int(min(B[s, k], B[t, m]))
            if amount == 0:
                continue
            move = int(rng.integers(1, amount + 1))
            B[s, k] -= move
            B[t, m] -= move
            B[s, m] += move
            B[t, k] += move
    return C, B


@st.composite
def instances(draw, max_goods=6, max_countries=6):
    n = draw(st.integers(1, max_goods))
    M = draw(st.integers(1, max_countries))
    cell = st.integers(0, 9)
    C = np.array(draw(st.lists(cell, min_size=n * M, max_size=n * M)), float).reshape(n, M)
    B = np.array(draw(st.lists(cell, min_size=n * M, max_size=n * M)), float).reshape(n, M)
    for k in range(M):
        if not C[:, k].any():
            C[draw(st.integers(0, n - 1)), k] = draw(st.integers(1, 9))
    if not B.any():
        B[0, 0] = 1.0
    return C, B


def positive_prices(n):
    return st.lists(
        st.floats(1e-3, 1.0, allow_nan=False), min_size=n, max_size=n
    ).map(lambda xs: np.array(xs))


@pytest.fixture
def ideal_2x2():
    return np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def degenerate_2x2():
    return np.array([[1.0, 1.0], [0.0, 0.0]]), np.array([[1.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    if call.when == "call":
        item.rep_call = outcome.get_result()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
