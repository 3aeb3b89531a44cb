import numpy as np
import pytest

import zocr.features
import zocr.raster
import zocr.segment
from zocr._backend import available_backends, get_kernels


@pytest.fixture(params=available_backends())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    k = get_kernels(request.param)
    for mod in (zocr.raster, zocr.segment, zocr.features):
        monkeypatch.setattr(mod, "kernels", k)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_binary(rng, max_side=32, density=None):
    h, w = rng.integers(1, max_side + 1, size=2)
    p = rng.uniform(0.1, 0.7) if density is None else density
    return (rng.random((h, w)) < p).astype(np.uint8)



@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Image corpora for 4 letters: (train_root, test_root)."""
    from zocr.synth import write_image_corpus

    root = tmp_path_factory.mktemp("corpus")
    write_image_corpus(root / "train", copies=3, seed=0, letters="AHOT")
    write_image_corpus(root / "test", copies=1, seed=1, letters="AHOT", start=100)
    return root / "train", root / "test"


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record and assert one acceptance criterion: ``criterion(ok, detail)``."""
    def check(ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {request.node.name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, detail
    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
