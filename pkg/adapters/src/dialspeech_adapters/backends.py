"""Scoring backends.

Model-backed implementations load the checkpoints pinned in
``models.lock``.  The "stub" backends exist for offline runs and
conformance testing: they are deterministic functions of the input
content, stay inside the documented score ranges, and carry no linguistic
or acoustic meaning whatsoever.
"""

from __future__ import annotations

import hashlib
from importlib import resources

import numpy as np

from . import ModelLoadError


def load_lockfile() -> dict[str, str]:
    pins: dict[str, str] = {}
    text = resources.files("dialspeech_adapters").joinpath("models.lock").read_text("utf-8")
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            key, _, value = line.partition("=")
            pins[key.strip()] = value.strip()
    return pins


def _unit(*parts: bytes) -> float:
    digest = hashlib.sha256(b"\x1f".join(parts)).digest()
    return int.from_bytes(digest[:8], "big") / 2.0**64


class StubTextBackend:
    """Deterministic text scorer for pipelines without model access."""

    name = "stub"

    def score_texts(self, texts: list[str]) -> list[tuple[float, int]]:
        out = []
        for text in texts:
            aldi = _unit(b"aldi", text.encode("utf-8"))
            out.append((aldi, int(aldi >= 0.5)))
        return out


class TransformersTextBackend:
    """ALDi regression (plus optional binary classifier) via transformers.

    Falls back to thresholding the dialectness score at 0.5 when no
    two-class checkpoint is configured.
    """

    name = "transformers"

    def __init__(self, aldi_model: str, msa_da_model: str | None = None, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as e:  # pragma: no cover - depends on environment
            raise ModelLoadError(f"transformers/torch unavailable: {e}") from e
        try:
            self._torch = torch
            self.device = device
            self.tokenizer = AutoTokenizer.from_pretrained(aldi_model)
            self.aldi = AutoModelForSequenceClassification.from_pretrained(aldi_model)
            self.aldi.to(device).eval()
            self.binary = None
            if msa_da_model:
                self.binary_tokenizer = AutoTokenizer.from_pretrained(msa_da_model)
                self.binary = AutoModelForSequenceClassification.from_pretrained(msa_da_model)
                self.binary.to(device).eval()
        except Exception as e:  # pragma: no cover - network/checkpoint issues
            raise ModelLoadError(f"could not load text checkpoints: {e}") from e

    def score_texts(self, texts: list[str]) -> list[tuple[float, int]]:  # pragma: no cover
        torch = self._torch
        with torch.no_grad():
            enc = self.tokenizer(
                texts, return_tensors="pt", padding=True, truncation=True, max_length=512
            ).to(self.device)
            aldi_raw = self.aldi(**enc).logits.squeeze(-1).tolist()
            if self.binary is not None:
                enc2 = self.binary_tokenizer(
                    texts, return_tensors="pt", padding=True, truncation=True, max_length=512
                ).to(self.device)
                probs = self.binary(**enc2).logits.softmax(-1)
                labels = probs.argmax(-1).tolist()
            else:
                labels = [int(a >= 0.5) for a in aldi_raw]
        return list(zip(aldi_raw, labels))


class StubAudioBackend:
    """Deterministic audio scorer; the subjective score also depends on
    the non-matching reference clip, mirroring the real predictor's
    interface."""

    name = "stub"

    def score_clip(self, samples: np.ndarray, rate: int, reference: np.ndarray) -> dict:
        payload = samples.tobytes()
        return {
            "pesq": 1.0 + 3.5 * _unit(b"pesq", payload),
            "stoi": _unit(b"stoi", payload),
            "si_sdr": -10.0 + 45.0 * _unit(b"sisdr", payload),
            "nmr_mos": 1.0 + 4.0 * _unit(b"mos", payload, reference.tobytes()),
        }


class SquimAudioBackend:
    """TorchAudio SQUIM objective + subjective predictors."""

    name = "squim"

    def __init__(self, device: str = "cpu"):
        try:
            import torch
            import torchaudio
        except ImportError as e:
            raise ModelLoadError(f"torchaudio unavailable: {e}") from e
        try:  # pragma: no cover - needs model downloads
            self._torch = torch
            self.device = device
            self.objective = torchaudio.pipelines.SQUIM_OBJECTIVE.get_model().to(device).eval()
            self.subjective = torchaudio.pipelines.SQUIM_SUBJECTIVE.get_model().to(device).eval()
        except Exception as e:
            raise ModelLoadError(f"could not load SQUIM checkpoints: {e}") from e

    def score_clip(self, samples, rate, reference):  # pragma: no cover
        torch = self._torch
        with torch.no_grad():
            wav = torch.as_tensor(samples, dtype=torch.float32).div(32768.0).unsqueeze(0)
            ref = torch.as_tensor(reference, dtype=torch.float32).div(32768.0).unsqueeze(0)
            stoi, pesq, si_sdr = self.objective(wav.to(self.device))
            mos = self.subjective(wav.to(self.device), ref.to(self.device))
        return {
            "pesq": float(pesq.item()),
            "stoi": float(stoi.item()),
            "si_sdr": float(si_sdr.item()),
            "nmr_mos": float(mos.item()),
        }


def make_text_backend(name: str, device: str = "cpu", msa_da_model: str | None = None):
    if name == "stub":
        return StubTextBackend()
    if name == "transformers":
        pins = load_lockfile()
        configured = msa_da_model or pins.get("msa_da") or None
        if configured and configured.startswith("threshold:"):
            configured = None
        return TransformersTextBackend(pins["aldi"], configured, device)
    raise ModelLoadError(f"unknown text backend {name!r}")


def make_audio_backend(name: str, device: str = "cpu"):
    if name == "stub":
        return StubAudioBackend()
    if name == "squim":
        return SquimAudioBackend(device)
    raise ModelLoadError(f"unknown audio backend {name!r}")
