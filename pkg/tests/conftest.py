import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record one acceptance line: ``report(n, passed, detail)``."""

    def _record(criterion: int, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class ScriptedRng:
    """Stand-in generator whose ``integers`` and ``random`` return scripted values."""

    def __init__(self, integers=(), uniforms=(), normals=None):
        self._ints = list(integers)
        self._unif = list(uniforms)
        self._normals = normals
        self._real = np.random.default_rng(0)

    def integers(self, high, size=None):
        if self._ints:
            return self._ints.pop(0)
        return self._real.integers(high, size=size)

    def random(self, size=None):
        if self._unif:
            return self._unif.pop(0)
        return self._real.random(size)

    def permutation(self, x):
        return np.arange(x) if isinstance(x, (int, np.integer)) else np.asarray(x)

    def standard_normal(self, size):
        if self._normals is not None:
            return np.asarray(self._normals, dtype=float)
        return self._real.standard_normal(size)


@pytest.fixture
def scripted():
    return ScriptedRng
