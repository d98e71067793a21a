"""Seeded generator of survey-shaped datasets with known informative questions.

Construction, for a question with ``m`` answer categories:

* ``half = m // 2``; the *low* distribution ``L`` is uniform on codes
  ``0 .. half-1`` and the *high* distribution ``H`` is uniform on codes
  ``m-half .. m-1``. ``L`` and ``H`` have disjoint support.
* A noise question draws every respondent's code from the uniform
  distribution ``U``.
* An informative question draws from ``(1 - delta) U + delta L`` for the
  class that tilts low and ``(1 - delta) U + delta H`` for the class that
  tilts high. The total-variation distance between the two is exactly
  ``delta``. By default healthy (0) tilts low and addicted (1) tilts high.

Random stream (one SplitMix64 per call, seeded by ``seed``): a label
vector with ``round_half_up(n * positive_fraction)`` ones placed after the
zeros is Fisher-Yates shuffled; then rows are filled in row-major order,
one ``uniform()`` draw per cell, mapped to a code by inverse CDF: the code is
the first ``c`` whose running sum ``p_0 + ... + p_c`` (accumulated left to
right in double precision) exceeds the draw, and ``m - 1`` if none does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from numba import njit

from ._rng import SplitMix64, nb_uniform
from .errors import DataError
from .ingest import Dataset, round_half_up, write_csv
from .schema import SurveySchema, default_schema

# the 18 questions the original study kept, including its top five by statistic
PAPER_KEY_QUESTIONS = (
    "Q36", "Q9", "Q23", "Q17", "Q26",
    "Q33", "Q10", "Q8", "Q6", "Q19", "Q21", "Q24", "Q20", "Q16", "Q14", "Q25", "Q34", "Q31",
)


@dataclass(frozen=True)
class SynthConfig:
    n: int
    positive_fraction: float = 0.5
    schema: SurveySchema = field(default_factory=default_schema)
    informative_ids: tuple[str, ...] = ()
    delta: float = 0.0
    seed: int = 42
    positive_tilts_high: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise DataError(f"n must be at least 2, got {self.n}")
        if not 0 < self.positive_fraction < 1:
            raise DataError(f"positive_fraction must lie in (0, 1), got {self.positive_fraction}")
        if not 0 <= self.delta < 1:
            raise DataError(f"delta must lie in [0, 1), got {self.delta}")
        unknown = [q for q in self.informative_ids if q not in self.schema.ids]
        if unknown:
            raise DataError(f"informative ids not in schema: {unknown}")
        n_pos = round_half_up(self.n * self.positive_fraction)
        if not 1 <= n_pos <= self.n - 1:
            raise DataError(f"n={self.n} at positive_fraction={self.positive_fraction} leaves a class empty")
        object.__setattr__(self, "informative_ids", tuple(self.informative_ids))


def class_distributions(m: int, delta: float, informative: bool, positive_tilts_high: bool = True):
    """Return the (class 0, class 1) category distributions for one question."""
    uniform = np.full(m, 1.0 / m)
    if not informative:
        return uniform, uniform.copy()
    half = m // 2
    low = np.zeros(m)
    low[:half] = 1.0 / half
    high = low[::-1].copy()
    tilt_low = (1.0 - delta) * uniform + delta * low
    tilt_high = (1.0 - delta) * uniform + delta * high
    return (tilt_low, tilt_high) if positive_tilts_high else (tilt_high, tilt_low)


def _inverse_cdf(probs, u: float) -> int:
    acc = 0.0
    for c, pc in enumerate(probs):
        acc += pc
        if u < acc:
            return c
    return len(probs) - 1


def generate(config: SynthConfig) -> Dataset:
    schema = config.schema
    rng = SplitMix64(config.seed)
    n_pos = round_half_up(config.n * config.positive_fraction)
    labels = [0] * (config.n - n_pos) + [1] * n_pos
    rng.shuffle(labels)
    informative = set(config.informative_ids)
    tables = [
        [
            d.tolist()
            for d in class_distributions(q.n_categories, config.delta, q.id in informative, config.positive_tilts_high)
        ]
        for q in schema.questions
    ]
    m = max(q.n_categories for q in schema.questions)
    probs = np.zeros((2, len(tables), m))
    sizes = np.array([q.n_categories for q in schema.questions], dtype=np.int64)
    for j, table in enumerate(tables):
        for c in (0, 1):
            probs[c, j, : sizes[j]] = table[c]
    state = np.array([rng.state], dtype=np.uint64)
    rows = _fill(np.array(labels, dtype=np.int64), probs, sizes, state)
    return Dataset(schema.fingerprint, tuple(schema.ids), rows, np.array(labels))


@njit(cache=True)
def _fill(labels, probs, sizes, state):
    # compiled twin of _inverse_cdf over the row-major cell stream
    n = labels.shape[0]
    p = sizes.shape[0]
    rows = np.empty((n, p), np.int64)
    for i in range(n):
        for j in range(p):
            u = nb_uniform(state)
            m = sizes[j]
            code = m - 1
            acc = 0.0
            for c in range(m):
                acc += probs[labels[i], j, c]
                if u < acc:
                    code = c
                    break
            rows[i, j] = code
    return rows


def paper_shaped_preset(seed: int = 42) -> SynthConfig:
    """486 respondents, balanced, 18 informative questions at delta 0.6."""
    return SynthConfig(
        n=486,
        positive_fraction=0.5,
        schema=default_schema(),
        informative_ids=PAPER_KEY_QUESTIONS,
        delta=0.6,
        seed=seed,
    )


def resolve_informative(schema: SurveySchema, spec: str) -> tuple[str, ...]:
    """``"18"`` takes the first 18 of the preset's key questions (then schema order);
    ``"Q1,Q5"`` names them explicitly."""
    spec = spec.strip()
    if spec.isdigit():
        count = int(spec)
        ordered = [q for q in PAPER_KEY_QUESTIONS if q in schema.ids]
        ordered += [q for q in schema.ids if q not in ordered]
        if count > len(ordered):
            raise DataError(f"asked for {count} informative questions, schema has {len(ordered)}")
        return tuple(ordered[:count])
    return tuple(s.strip() for s in spec.split(",") if s.strip())


def write_synthetic(config: SynthConfig, out_csv) -> Dataset:
    """Generate, write the CSV, and a ``<out>.truth.json`` sidecar."""
    ds = generate(config)
    write_csv(ds, out_csv, config.schema)
    truth = {
        "informative_ids": list(config.informative_ids),
        "delta": config.delta,
        "n": config.n,
        "positive_fraction": config.positive_fraction,
        "seed": config.seed,
        "schema_fingerprint": config.schema.fingerprint,
    }
    with open(f"{out_csv}.truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2)
        fh.write("\n")
    return ds


def swapped(config: SynthConfig) -> SynthConfig:
    return replace(config, positive_tilts_high=not config.positive_tilts_high)


def demo_data_path():
    """Path of the bundled fixture: ``generate(paper_shaped_preset(42))`` written as labels."""
    from importlib.resources import files

    return files("vulnscreen") / "data" / "demo_synth.csv"
