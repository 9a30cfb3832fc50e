"""Shared generators for randomized tests.

Every test seeds its own Generator, so cases are reproducible and failures
can be replayed by seed.  Models drawn here are small enough for the dense
and grid oracles to stay cheap.
"""

import numpy as np
import pytest

from svmcert import KernelSpec, SvmModel

KERNEL_KINDS = ("linear", "poly", "sigmoid", "rbf")


def random_kernel(rng: np.random.Generator, kind: str) -> KernelSpec:
    if kind == "linear":
        return KernelSpec("linear")
    if kind == "poly":
        return KernelSpec(
            "poly",
            degree=int(rng.integers(1, 5)),
            coef0=float(rng.uniform(0.0, 2.0)),
            gamma=float(rng.uniform(0.2, 1.5)),
        )
    if kind == "sigmoid":
        return KernelSpec("sigmoid", gamma=float(rng.uniform(0.1, 1.5)), coef0=float(rng.uniform(-2.0, -0.1)))
    if kind == "rbf":
        return KernelSpec("rbf", gamma=float(rng.uniform(0.1, 2.0)))
    raise ValueError(kind)


def random_model(rng: np.random.Generator, kind: str, max_m: int = 10, max_n: int = 8) -> SvmModel:
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    return SvmModel(
        support_vectors=rng.uniform(-1.0, 1.0, (m, n)),
        coef=rng.uniform(-2.0, 2.0, m),
        bias=float(rng.uniform(-1.0, 1.0)),
        kernel=random_kernel(rng, kind),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion at the end of the run."""
    outcomes = {}
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid and rep.when in ("call", "setup"):
                outcomes.setdefault(nodeid.split("::")[-1], status.upper())
    if outcomes:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in outcomes.items():
            terminalreporter.write_line(f"{status:>7}  {name}")
