import os
import sys
import shlex
import textwrap

import numpy as np
import pytest

import BootAgg
from BootAgg import Dataset, PlotFrame, RenderSpec

REPOSITORY = os.path.dirname(os.path.dirname(os.path.abspath(BootAgg.__file__)))


@pytest.fixture(autouse=True)
def quiet_logging():
    level, destination = BootAgg.loglevel, BootAgg.logdest
    BootAgg.loglevel = BootAgg.LOG_CRITICAL
    yield
    BootAgg.loglevel, BootAgg.logdest = level, destination


@pytest.fixture
def normal_dataset():
    generator = np.random.default_rng(7)
    return Dataset.from_columns({
        "value": generator.normal(0.0, 1.0, 30).tolist(),
        "group": generator.choice(["a", "b", "c"], 30).tolist(),
    })


@pytest.fixture
def regression_dataset():
    generator = np.random.default_rng(11)
    x = np.linspace(0.0, 1.0, 25)
    y = 0.4 + 0.2 * x + generator.normal(0.0, 0.02, len(x))
    return Dataset.from_columns({"x": x.tolist(), "y": y.tolist()})


@pytest.fixture
def normal_csv(tmp_path, normal_dataset):
    path = tmp_path / "normal.csv"
    path.write_bytes(normal_dataset.to_csv())
    return str(path)


@pytest.fixture
def point_frame():
    return PlotFrame(-1.0, 1.0, -1.0, 1.0, 120, 40)


@pytest.fixture
def point_spec():
    return RenderSpec(RenderSpec.POINT_ESTIMATE, column="value")


@pytest.fixture
def config_dir(tmp_path):
    return str(tmp_path / "config")


@pytest.fixture
def renderer_script(tmp_path):
    """
    Writes a python program to *tmp_path* and returns a command template
    running it. The program body sees ``resample``, ``full``, ``out``,
    ``width``, ``height`` and ``index`` and may use BootAgg.
    """
    def write(body, name="renderer.py"):
        source = textwrap.dedent("""\
            import os
            import sys
            import time
            sys.path.insert(0, {repository!r})
            import BootAgg
            resample, full, out = sys.argv[1], sys.argv[2], sys.argv[3]
            width, height = int(sys.argv[4]), int(sys.argv[5])
            index = int(os.environ["BOOTAGG_REPLICATE_INDEX"])
        """).format(repository=REPOSITORY) + textwrap.dedent(body)
        path = tmp_path / name
        path.write_text(source)
        return " ".join([shlex.quote(sys.executable), shlex.quote(str(path)), "{resample} {full} {out} {width} {height}"])

    return write

