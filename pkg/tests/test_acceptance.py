"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured figure.  Tolerances are pinned here, not in
any helper."""

import hashlib
import json
import random
import struct
import time
import unicodedata
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from dialspeech.audio import AudioSpec, downmix, read_wav, standardize_audio, write_wav
from dialspeech.audio.ops import quantize16
from dialspeech.cli import main as cli_main
from dialspeech.manifest import read_jsonl
from dialspeech.profiling import AldiBin, bin_aldi, pearson
from dialspeech.scoring import edit_counts, wer, wer_histogram
from dialspeech.splits import SplitTargets, build_benchmark
from dialspeech.textnorm import Normalizer, normalize

from conftest import make_record
from test_textnorm import GOLDEN


def _ok(name: str, detail: str = "") -> None:
    print(f"ACCEPTANCE {name}: PASS {detail}".rstrip())


# --- 1. normalization idempotence over 10k generated strings ---------------

_GEN_ALPHABET = (
    "ابتثجحخدذرزسشصضطظعغفقكلمنهويىةءأإآؤئ"
    + "".join(chr(c) for c in range(0x064B, 0x0653))
    + "ٰـ"
    + "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    + "٠١٢٣"
    + ".,;:!?()[]{}'\"-_/\\«»…"
    + "،؛؟٪۔"
    + "   \t\n"
)


def test_normalization_idempotence_10k():
    rng = random.Random(90210)
    strings = [
        "".join(rng.choice(_GEN_ALPHABET) for _ in range(rng.randint(0, 80)))
        for _ in range(10_000)
    ]
    norm = Normalizer()
    punct_extras = norm.extra_punctuation
    start = time.perf_counter()
    for s in strings:
        once = norm.normalize(s)
        assert norm.normalize(once) == once, f"not idempotent on {s!r}"
        for c in once:
            assert unicodedata.category(c) != "Mn", f"mark survived in {once!r}"
            assert not unicodedata.category(c).startswith("P"), f"punct survived in {once!r}"
            assert c not in punct_extras
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"took {elapsed:.2f}s, budget 10s"
    _ok("normalization-idempotence", f"(10000 strings in {elapsed:.2f}s)")


# --- 2. normalization rule-exactness: 30 hand-derived cases ----------------

def test_normalization_golden_exact():
    assert len(GOLDEN) == 30
    for raw, expected in GOLDEN:
        got = normalize(raw)
        assert got == expected, f"{raw!r}: {got!r} != {expected!r}"
    _ok("normalization-golden", "(30/30 byte-exact)")


# --- 3. edit-distance oracle -----------------------------------------------

def _all_sequences(alphabet: int, max_len: int):
    seqs = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [s + (a,) for s in frontier for a in range(alphabet)]
        seqs.extend(frontier)
    return seqs


def test_edit_distance_exhaustive_and_random():
    start = time.perf_counter()

    # Exhaustive: all token-sequence pairs of length <= 6 over 3 tokens,
    # against an independent all-pairs suffix recurrence.
    seqs = _all_sequences(3, 6)
    index = {s: i for i, s in enumerate(seqs)}
    n = len(seqs)
    assert n == 1093
    head = [s[0] if s else -1 for s in seqs]
    tail = [index[s[1:]] if s else -1 for s in seqs]
    order = sorted(range(n), key=lambda i: len(seqs[i]))

    oracle = np.zeros((n, n), dtype=np.int8)
    for ia in order:
        la = len(seqs[ia])
        for ib in order:
            if la == 0:
                oracle[ia, ib] = len(seqs[ib])
            elif len(seqs[ib]) == 0:
                oracle[ia, ib] = la
            else:
                sub = oracle[tail[ia], tail[ib]] + (head[ia] != head[ib])
                dele = oracle[tail[ia], ib] + 1
                ins = oracle[ia, tail[ib]] + 1
                oracle[ia, ib] = min(sub, dele, ins)

    checked = 0
    for ia, a in enumerate(seqs):
        row = oracle[ia]
        for ib, b in enumerate(seqs):
            counts = edit_counts(a, b)
            assert counts.total == row[ib], (a, b)
            checked += 1
    assert checked == n * n

    # 1000 random pairs of length <= 50 against a quadratic DP oracle.
    rng = random.Random(4096)

    def dp_cost(a, b):
        prev = list(range(len(b) + 1))
        for i, x in enumerate(a, 1):
            cur = [i] + [0] * len(b)
            for j, y in enumerate(b, 1):
                cur[j] = min(prev[j - 1] + (x != y), prev[j] + 1, cur[j - 1] + 1)
            prev = cur
        return prev[-1]

    for _ in range(1000):
        a = [rng.randrange(20) for _ in range(rng.randint(0, 50))]
        b = [rng.randrange(20) for _ in range(rng.randint(0, 50))]
        assert edit_counts(a, b).total == dp_cost(a, b)

    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"took {elapsed:.2f}s, budget 60s"
    _ok("edit-distance-oracle", f"({checked} exhaustive + 1000 random pairs in {elapsed:.1f}s)")


# --- 4. WER unboundedness ---------------------------------------------------

def test_wer_unbounded_unclipped():
    value = wer("ا", "ب ج د ه و")
    assert value == 5.0
    _ok("wer-unbounded", f"(1-token ref vs 5-token hyp = {value})")


# --- 5. Pearson -------------------------------------------------------------

def test_pearson_affine_and_oracle():
    rng = np.random.default_rng(777)
    x = rng.normal(size=1000)
    assert abs(pearson(x, 2 * x + 3) - 1.0) < 1e-9
    worst = 0.0
    for _ in range(100):
        xs = rng.normal(size=1000)
        ys = rng.normal(size=1000)
        got = pearson(xs, ys)
        want = float(np.corrcoef(xs, ys)[0, 1])
        worst = max(worst, abs(got - want))
    assert worst < 1e-12, f"worst deviation {worst:.2e}"
    _ok("pearson", f"(affine exact, oracle worst dev {worst:.1e})")


# --- 6. dialectness bins -----------------------------------------------------

def test_aldi_bin_boundaries():
    expected = {
        0.0: AldiBin.MSA,
        0.11: AldiBin.LITTLE_DA,
        0.44: AldiBin.MIXED,
        0.77: AldiBin.MOSTLY_DA,
        1.0: AldiBin.MOSTLY_DA,
    }
    for score, want in expected.items():
        assert bin_aldi(score) is want, f"{score} -> {bin_aldi(score)}"
    _ok("aldi-bins", "(boundary values land left-closed, top closed)")


# --- 7. audio standardization -----------------------------------------------

def test_audio_standardization(tmp_path):
    t = np.arange(2 * 44100) / 44100
    tone = 0.6 * np.sin(2 * np.pi * 440 * t)
    stereo = quantize16(np.stack([tone, tone], axis=1))
    out = standardize_audio(stereo, AudioSpec(44100, 2, 16))

    wav = tmp_path / "tone.wav"
    write_wav(wav, out, 16000)
    blob = wav.read_bytes()
    fmt = struct.unpack_from("<HHIIHH", blob, 20)
    assert fmt == (1, 1, 16000, 32000, 2, 16), "canonical header"

    back, rate = read_wav(wav)
    assert rate == 16000
    assert abs(len(back) / 16000 - 2.0) < 1 / 16000, "duration within one sample"

    spectrum = np.abs(np.fft.rfft(back.astype(np.float64)))
    peak = int(np.argmax(spectrum))
    bin_hz = 16000 / len(back)
    assert abs(peak * bin_hz - 440.0) <= bin_hz, "spectral peak within one bin"

    rng = np.random.default_rng(31)
    worst = 0
    for _ in range(100):
        channels = int(rng.integers(2, 6))
        frames = int(rng.integers(8, 400))
        x = rng.integers(-32768, 32767, size=(frames, channels)).astype(np.int16)
        got = quantize16(downmix(x) / 32768.0)
        oracle = []
        for frame in x:
            mean = sum(int(v) for v in frame) / channels
            r = np.sign(mean) * np.floor(abs(mean) + 0.5)
            oracle.append(int(min(max(r, -32768), 32767)))
        worst = max(worst, int(np.max(np.abs(got.astype(int) - np.array(oracle)))))
    assert worst <= 1, f"downmix deviates {worst} LSB from the mean oracle"
    _ok("audio-standardization", f"(header exact, peak at 440 Hz, downmix within {worst} LSB)")


# --- 8. split invariants -----------------------------------------------------

def _synthetic_corpus_500():
    rng = random.Random(1414)
    records = []
    for i in range(130):  # sampling path, fixed durations
        records.append(make_record(
            f"arz-{i:04d}", duration=100.0, dataset_id="dsa", dialect="arz_EGY",
            speaker_id=f"arz-spk-{i}"))
    for i in range(130):  # sampling path, varied durations
        records.append(make_record(
            f"apc-{i:04d}", duration=rng.uniform(80.0, 120.0), dataset_id="dsb",
            dialect="apc_JOR", speaker_id=f"apc-spk-{i}"))
    for i in range(100):  # thirds path (1000 s < 3 h)
        records.append(make_record(
            f"aeb-{i:04d}", duration=10.0, dataset_id="dsc", dialect="aeb_TUN",
            speaker_id=f"aeb-spk-{i}"))
    for i in range(70):  # canonical tags preserved
        split = ("train", "dev", "test")[i % 3]
        records.append(make_record(
            f"ary-{i:04d}", duration=30.0, dataset_id="dsd", dialect="ary_MAR",
            split=split))
    for i in range(70):  # ambiguous: excluded
        records.append(make_record(
            f"sau-{i:04d}", duration=30.0, dataset_id="dse",
            dialect="ambiguous:acw,ars"))
    assert len(records) == 500
    return records


def test_split_invariants_500():
    records = _synthetic_corpus_500()
    targets = SplitTargets()  # 5 h adapt, 1 h dev, 1 h test, 3 h pooling floor
    plan = build_benchmark(records, targets, seed=33)
    again = build_benchmark(records, targets, seed=33)

    # Strict partition: every non-dropped record assigned exactly one split.
    from dialspeech.schema import Ambiguous

    dropped = set(plan.dropped_ambiguous)
    assert dropped == {r.utterance_id for r in records if isinstance(r.dialect, Ambiguous)}
    assigned = set(plan.assignments)
    assert assigned == {r.utterance_id for r in records} - dropped
    assert all(s in ("train", "adapt", "dev", "test", "unassigned")
               for s in plan.assignments.values())

    # Zero ambiguous assignments.
    assert not (assigned & dropped)

    # Sampling path: per-dialect test/dev within one utterance of targets.
    for iso, max_dur in (("arz", 100.0), ("apc", 120.0)):
        for split, budget in (("test", targets.test_seconds), ("dev", targets.dev_seconds)):
            total = sum(
                r.duration for r in records
                if r.utterance_id.startswith(iso) and plan.assignments.get(r.utterance_id) == split
            )
            assert budget <= total < budget + max_dur, (iso, split, total)

    # Fallback path: even thirds within 10% relative.
    loads = {"train": 0.0, "dev": 0.0, "test": 0.0}
    frag_mode = plan.fragment_modes["aeb/dsc"]
    assert frag_mode == "thirds"
    for r in records:
        if r.utterance_id.startswith("aeb"):
            s = plan.assignments[r.utterance_id]
            if s in ("train", "adapt"):
                loads["train"] += r.duration  # adapt draws from the train pool
            elif s in loads:
                loads[s] += r.duration
    mean = sum(loads.values()) / 3
    for split, value in loads.items():
        assert abs(value - mean) / mean <= 0.10, (split, value, mean)

    # Canonical tags preserved for the tagged dataset (dev/test capped later).
    for r in records:
        if r.utterance_id.startswith("ary") and r.split == "train":
            assert plan.assignments[r.utterance_id] in ("train", "adapt")

    # Byte-identical plans for the same seed.
    assert plan.rows() == again.rows()
    assert plan.provenance_text() == again.provenance_text()
    _ok("split-invariants", "(partition, exclusion, targets, thirds, determinism)")


# --- 9. end-to-end determinism on the bundled fixture ------------------------

# Hand-scored WER for the fixture's ten hypothesis pairs: token edits
# counted on paper over the cleaned transcripts.
HAND_SCORED_WER = {
    "bayan-0001": 0.0,
    "bayan-0002": 0.0,
    "bayan-0003": 1 / 6,
    "bayan-0007": 1 / 4,
    "bayan-0008": 1 / 5,
    "suq-0003": 1 / 5,
    "suq-0004": 1 / 5,
    "suq-0006": 0.0,
    "suq-0008": 3 / 6,
    "suq-0009": 4 / 5,
}


def _run_pipeline(config: Path, root: Path, out: Path) -> None:
    runner = CliRunner()
    steps = [
        ["ingest", "--config", str(config), "--out", str(out)],
        ["profile", "--config", str(config), "--out", str(out),
         "--scores", str(root / "scores" / "synthetic_scores.jsonl")],
        ["split", "--config", str(config), "--out", str(out)],
        ["score", "--config", str(config), "--out", str(out),
         "--hyp", str(root / "hyps" / "system_a.jsonl")],
    ]
    for step in steps:
        result = runner.invoke(cli_main, step)
        assert result.exit_code == 0, f"{step[0]} failed: {result.output}"


def _tree_digest(root: Path) -> dict:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


def test_end_to_end_determinism(minicorpus, tmp_path):
    config, root = minicorpus["config"], minicorpus["root"]
    out_a, out_b = tmp_path / "run_a", tmp_path / "run_b"
    _run_pipeline(config, root, out_a)
    _run_pipeline(config, root, out_b)

    digest_a, digest_b = _tree_digest(out_a), _tree_digest(out_b)
    assert digest_a.keys() == digest_b.keys()
    diffs = [k for k in digest_a if digest_a[k] != digest_b[k]]
    assert not diffs, f"files differ between runs: {diffs}"

    detail = {row["utterance_id"]: row["wer"]
              for row in read_jsonl(out_a / "scores" / "system_a.utterances.jsonl")}
    assert detail.keys() == HAND_SCORED_WER.keys()
    for utt_id, want in HAND_SCORED_WER.items():
        assert abs(detail[utt_id] - want) < 1e-12, (utt_id, detail[utt_id], want)
    _ok("end-to-end-determinism", f"({len(digest_a)} files identical, 10 WERs hand-verified)")


# --- 10. histogram edges ------------------------------------------------------

def test_histogram_edges():
    h = wer_histogram([0.10, 0.1000001, 1.0, 1.0000001])
    assert h.counts[0] == 1, "<=10%"
    assert h.counts[1] == 1, "(10,20]%"
    assert h.counts[9] == 1, "(90,100]%"
    assert h.counts[10] == 1, ">100%"
    assert h.n == 4
    _ok("histogram-edges", "(0.10, 0.1000001, 1.0, 1.0000001 binned as specified)")
