import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixture_data import DATA_DIR
from gerkit.augment import PcmBuffer, write_wav


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def noise_dir(tmp_path) -> Path:
    rng = np.random.default_rng(17)
    directory = tmp_path / "noise"
    directory.mkdir()
    for name in ("babble", "fan", "street"):
        samples = 0.2 * rng.standard_normal(8000)
        write_wav(directory / f"{name}.wav", PcmBuffer(samples, 16000))
    return directory
