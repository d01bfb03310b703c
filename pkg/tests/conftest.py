import numpy as np
import pytest

from qent.sampler import SeededStream, sample_spectral_batch, sample_states


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def full_states():
    """1000 states from the product measure, with their spectral forms."""
    weights, frames = sample_spectral_batch(SeededStream(123, 0), 1000)
    return sample_states(SeededStream(123, 0), 1000), weights, frames


def random_hermitian(rng, n=4, size=None):
    shape = (n, n) if size is None else (size, n, n)
    x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return 0.5 * (x + np.swapaxes(x, -1, -2).conj())


def random_unitary(rng, n=4):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


_CRITERIA = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA[props["criterion"]] = (report.passed, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=int):
        ok, detail = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {int(key):2d}: {'PASS' if ok else 'FAIL'}  {detail}")
