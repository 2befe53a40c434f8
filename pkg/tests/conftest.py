import numpy as np
import pytest


def random_su2(rng):
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a, b = z[:2] / np.linalg.norm(z[:2])
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def controlled_matrix(nq, controls, target, u, control_values=None):
    """Brute-force matrix of a controlled 2x2 gate; qubit 0 is the MSB."""
    if control_values is None:
        control_values = [1] * len(controls)
    dim = 1 << nq
    out = np.zeros((dim, dim), dtype=complex)
    bit = lambda i, q: (i >> (nq - 1 - q)) & 1
    for col in range(dim):
        if all(bit(col, c) == v for c, v in zip(controls, control_values)):
            tb = bit(col, target)
            for new in (0, 1):
                row = col ^ ((tb ^ new) << (nq - 1 - target))
                out[row, col] += u[new, tb]
        else:
            out[col, col] = 1
    return out


def kron_all(ops):
    out = np.array([[1]], dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
