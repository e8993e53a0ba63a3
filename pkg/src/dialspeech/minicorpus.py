"""Deterministic synthetic mini-corpus for demos and end-to-end tests.

Licensed corpora cannot ship with the toolkit, so this module materializes
a small stand-in: two datasets (one broadcast-style with canonical split
tags and one conversational with geographic dialect metadata), mixed audio
specs (44.1 kHz stereo, 22.05 kHz, 8 kHz, FLAC, a two-channel
conversational file), transcripts exercising diacritics, punctuation,
Buckwalter transliteration and script filtering, plus a hypothesis file
and a synthetic score-interchange file.

Everything is generated from a fixed seed; rebuilding into a fresh
directory yields byte-identical files.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .audio import write_flac, write_wav
from .audio.ops import quantize16
from .manifest import write_jsonl

# Kept after ingest filtering: 8 of the 11 bayan rows, 12 suq rows.
EXPECTED_KEPT = {"bayan": 8, "suq": 12}


def _tone(rng: np.random.Generator, rate: int, seconds: float, channels: int = 1) -> np.ndarray:
    n = int(rate * seconds)
    t = np.arange(n) / rate
    freq = float(rng.uniform(150, 900))
    amp = float(rng.uniform(0.2, 0.6))
    base = amp * np.sin(2 * np.pi * freq * t)
    base += 0.01 * rng.standard_normal(n)
    if channels == 1:
        return quantize16(base)
    chans = [base]
    for _ in range(channels - 1):
        chans.append(amp * np.sin(2 * np.pi * float(rng.uniform(150, 900)) * t))
    return quantize16(np.stack(chans, axis=1))


_BAYAN_ROWS = [
    # utt_id, file, rate, channels, seconds, split, transcript
    ("bayan-0001", "b0001.wav", 44100, 2, 1.2, "train", "السَّلامُ عَلَيكُم ورَحمَةُ الله"),
    ("bayan-0002", "b0002.wav", 22050, 1, 1.0, "train", "أهلاً وسهلاً بكم في نشرة الأخبار،"),
    ("bayan-0003", "b0003.wav", 16000, 1, 0.9, "train", "تشهد المنطقة أمطاراً غزيرة هذا الأسبوع."),
    ("bayan-0004", "b0004.flac", 16000, 1, 1.1, "train", "الحكومةُ تعلنُ خطةً جديدةً للتعليم"),
    ("bayan-0005", "b0005.wav", 8000, 1, 0.8, "dev", "ارتفعت درجات الحرارة في المدينة"),
    ("bayan-0006", "b0006.wav", 44100, 1, 0.7, "dev", ">ahlaN wa sahlaN bikum"),
    ("bayan-0007", "b0007.wav", 16000, 1, 1.0, "test", "مدرسة الموسيقى تفتح أبوابها؟"),
    ("bayan-0008", "b0008.wav", 22050, 1, 0.6, "test", "إلى اللقاء في الحلقة القادمة"),
    # The three below are dropped by ingest filtering.
    ("bayan-0009", "b0009.wav", 16000, 1, 0.5, "train", "recorded by the morning crew"),
    ("bayan-0010", "b0010.wav", 16000, 1, 0.5, "train", "123 !!"),
    ("bayan-0011", "b0011.wav", 16000, 1, 0.03, "train", "قصير جدا"),
]

_SUQ_ROWS = [
    # utt_id, file, rate, channels, seconds, channel, speaker, gender, age,
    # country, city, domain, transcript
    ("suq-0001", "s0001.wav", 16000, 2, 1.4, 0, "spk-amal", "F", "31",
     "Morocco", "", "places to go", "فين غادي نمشيو هاد الصيف"),
    ("suq-0002", "s0001.wav", 16000, 2, 1.4, 1, "spk-badr", "M", "42",
     "Morocco", "", "travel", "نمشيو للبحر واخا الطريق بعيدة"),
    ("suq-0003", "s0003.wav", 22050, 1, 1.1, None, "spk-dina", "F", "27",
     "Egypt", "", "family", "النهارده هنروح عند جدتي بالليل"),
    ("suq-0004", "s0004.wav", 16000, 1, 0.9, None, "spk-dina", "F", "27",
     "Egypt", "", "cooking", "الأكلة دي طعمها حلو أوي"),
    ("suq-0005", "s0005.wav", 44100, 1, 1.3, None, "spk-fady", "M", "35",
     "Egypt", "", "sports", "الماتش امبارح كان مجنون بجد"),
    ("suq-0006", "s0006.wav", 16000, 1, 1.0, None, "spk-hala", "F", "24",
     "Jordan", "", "university life", "بكرا عنا امتحان بالجامعة الصبح"),
    ("suq-0007", "s0007.wav", 16000, 1, 0.8, None, "spk-hala", "F", "24",
     "Jordan", "", "school", "الدوام اليوم طول كتير والله"),
    ("suq-0008", "s0008.wav", 8000, 1, 1.2, None, "spk-omar", "M", "51",
     "Saudi Arabia", "", "news", "اليوم الجو حار مرة في السوق"),
    ("suq-0009", "s0009.wav", 16000, 1, 0.7, None, "spk-omar", "M", "51",
     "Saudi Arabia", "", "news", "وش رايك نروح نتقهوى العصر"),
    ("suq-0010", "s0010.wav", 16000, 1, 1.0, None, "spk-reem", "F", "29",
     "UAE", "AZ", "podcast", "اليوم بنسولف عن الأكل البيتي"),
    ("suq-0011", "s0011.wav", 22050, 1, 0.9, None, "spk-reem", "F", "29",
     "UAE", "AZ", "podcast", "ضيفنا اليوم عنده قصة حلوة"),
    ("suq-0012", "s0012.wav", 16000, 1, 1.1, None, "spk-tala", "F", "33",
     "Mars Colony", "", "space farming", "نتكلم عن الزراعة hydro بالبيت"),
]

# Ten reference/hypothesis pairs with hand-constructed token edits.
HYP_ROWS = [
    ("bayan-0001", "السلام عليكم ورحمه الله"),                  # exact after cleanup
    ("bayan-0002", "اهلا وسهلا بكم في نشره الاخبار"),           # exact after cleanup
    ("bayan-0003", "تشهد المنطقه ثلوج غزيره هذا الاسبوع"),      # 1 sub of 6
    ("bayan-0007", "مدرسه الموسيقي تفتح"),                      # 1 del of 4
    ("bayan-0008", "الي اللقاء في في الحلقه القادمه"),          # 1 ins over 5
    ("suq-0003", "النهارده هنروح عند جدتي"),                    # 1 del of 5
    ("suq-0004", "الاكله دي طعمها وحش اوي"),                    # 1 sub of 5
    ("suq-0006", "بكرا عنا امتحان بالجامعه الصبح"),             # exact after cleanup
    ("suq-0008", "امس الجو بارد मरة في السوق"),                 # 3 subs of 6, odd script kept
    ("suq-0009", "وش"),                                          # 4 dels of 5
]


def _score_row(utt_id: str) -> dict:
    """Deterministic pseudo-scores in their documented ranges."""
    def unit(tag: str) -> float:
        digest = hashlib.sha256(f"{utt_id}|{tag}".encode()).digest()
        return int.from_bytes(digest[:8], "big") / 2**64

    aldi = round(unit("aldi"), 4)
    return {
        "utterance_id": utt_id,
        "aldi": aldi,
        "msa_da": 1 if aldi >= 0.5 else 0,
        "pesq": round(1.0 + 3.5 * unit("pesq"), 3),
        "stoi": round(unit("stoi"), 3),
        "si_sdr": round(-5.0 + 35.0 * unit("sisdr"), 2),
        "nmr_mos": round(1.0 + 4.0 * unit("mos"), 3),
    }


_BAYAN_CONFIG = """\
dataset_id: bayan
source_id: bayan-demo-v1
manifest: rows.tsv
format: tsv
audio_root: audio
recording_style: Broadcast
buckwalter: auto
min_duration: 0.1
dialect:
  mode: fixed
  code: arb
fields:
  utterance_id: utt
  audio: file
  transcript: text
  split: split
"""

_SUQ_CONFIG = """\
dataset_id: suq
source_id: suq-demo-v1
manifest: rows.jsonl
format: jsonl
audio_root: audio
recording_style: Conversational
location_semantics: speaker_origin
dialect:
  mode: geo
fields:
  utterance_id: utt
  audio: file
  transcript: text
  speaker: speaker
  gender: gender
  age: age
  country: country
  city: city
  domain: domain
  channel: channel
"""

_PIPELINE_CONFIG = """\
datasets:
  - bayan/config.yaml
  - suq/config.yaml
seed: 20
jobs: 1
split_targets:
  adapt_hours: 5.0
  dev_hours: 1.0
  test_hours: 1.0
  min_pool_hours: 3.0
"""


def build_minicorpus(dest: str | Path) -> Path:
    """Materialize the synthetic mini-corpus under ``dest``; returns the
    pipeline config path."""
    dest = Path(dest)
    rng = np.random.default_rng(2024)

    bayan = dest / "bayan"
    (bayan / "audio").mkdir(parents=True, exist_ok=True)
    (bayan / "config.yaml").write_text(_BAYAN_CONFIG, encoding="utf-8")
    lines = ["utt\tfile\ttext\tsplit"]
    for utt_id, filename, rate, channels, seconds, split, text in _BAYAN_ROWS:
        audio = _tone(rng, rate, seconds, channels)
        path = bayan / "audio" / filename
        if filename.endswith(".flac"):
            write_flac(path, audio, rate)
        else:
            write_wav(path, audio, rate)
        lines.append(f"{utt_id}\t{filename}\t{text}\t{split}")
    (bayan / "rows.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    suq = dest / "suq"
    (suq / "audio").mkdir(parents=True, exist_ok=True)
    (suq / "config.yaml").write_text(_SUQ_CONFIG, encoding="utf-8")
    written: set[str] = set()
    rows = []
    for (utt_id, filename, rate, channels, seconds, channel, speaker, gender,
         age, country, city, domain, text) in _SUQ_ROWS:
        if filename not in written:
            write_wav(suq / "audio" / filename, _tone(rng, rate, seconds, channels), rate)
            written.add(filename)
        rows.append(
            {
                "utt": utt_id,
                "file": filename,
                "text": text,
                "speaker": speaker,
                "gender": gender,
                "age": age,
                "country": country,
                "city": city,
                "domain": domain,
                "channel": channel,
            }
        )
    write_jsonl(suq / "rows.jsonl", rows)

    hyp_dir = dest / "hyps"
    hyp_dir.mkdir(exist_ok=True)
    write_jsonl(hyp_dir / "system_a.jsonl", ({"utterance_id": u, "text": t} for u, t in HYP_ROWS))

    score_dir = dest / "scores"
    score_dir.mkdir(exist_ok=True)
    kept_ids = [r[0] for r in _BAYAN_ROWS[:8]] + [r[0] for r in _SUQ_ROWS]
    write_jsonl(score_dir / "synthetic_scores.jsonl", (_score_row(u) for u in kept_ids))

    config = dest / "pipeline.yaml"
    config.write_text(_PIPELINE_CONFIG, encoding="utf-8")
    return config


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="materialize the synthetic mini-corpus")
    parser.add_argument("dest", help="output directory")
    args = parser.parse_args(argv)
    config = build_minicorpus(args.dest)
    print(config)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
