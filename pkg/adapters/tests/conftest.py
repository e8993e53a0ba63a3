import wave

import numpy as np
import pytest
from click.testing import CliRunner

from dialspeech.cli import main as core_cli
from dialspeech.minicorpus import build_minicorpus


def write_pcm16(path, samples, rate=16000):
    with wave.open(str(path), "wb") as f:
        f.setnchannels(1 if samples.ndim == 1 else samples.shape[1])
        f.setsampwidth(2)
        f.setframerate(rate)
        f.writeframes(samples.astype("<i2").tobytes())


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """Mini-corpus ingested by the core: manifests + canonical audio."""
    root = tmp_path_factory.mktemp("adapters")
    config = build_minicorpus(root / "corpus")
    out = root / "out"
    result = CliRunner().invoke(
        core_cli, ["ingest", "--config", str(config), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture(scope="session")
def reference_pool(tmp_path_factory):
    pool = tmp_path_factory.mktemp("refpool")
    rng = np.random.default_rng(99)
    for i, seconds in enumerate((6.5, 8.0, 5.0)):
        t = np.arange(int(16000 * seconds)) / 16000
        clip = 0.3 * np.sin(2 * np.pi * (200 + 60 * i) * t)
        clip += 0.02 * rng.standard_normal(len(t))
        write_pcm16(pool / f"clean{i}.wav", (clip * 32767).astype(np.int16))
    return pool
