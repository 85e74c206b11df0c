import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from lonsim.lon import LON

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def make_lon(fitness, edges=(), sense="min", variant="RAW", n=None, configs=None, **attrs):
    """LON with node i at configuration ``configs[i]`` (default ``i``) and unit weights."""
    k = len(fitness)
    configs = list(range(k)) if configs is None else list(configs)
    n = n if n is not None else max(1, int(max(configs, default=0)).bit_length())
    src = [a for a, _ in edges]
    dst = [b for _, b in edges]
    weight = attrs.pop("weight", None)
    meta = {"sense": sense, "variant": variant, "instance_id": attrs.pop("instance_id", "t")}
    return LON.build(n, configs, fitness, src=src, dst=dst, weight=weight, metadata=meta, **attrs)


@pytest.fixture
def lon_factory():
    return make_lon


def random_digraph(rng: np.random.Generator, n: int, p: float):
    return [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < p]


# -- acceptance report -------------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, title: str, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    print(ACCEPTANCE[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
