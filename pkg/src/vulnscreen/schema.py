"""Questionnaire schema and the categorical answer encoding.

A schema file is JSON with this layout::

    {
      "schema_version": 1,
      "target": {"column": "label", "classes": {"healthy": 0, "addicted": 1}},
      "questions": [
        {"id": "Q1", "text": "...", "kind": "Likert3",
         "categories": ["low", "mid", "high"], "factor_group": "demographics",
         "name": "age"},
        ...
      ]
    }

``name`` is an optional short identifier used in reports. Answers are coded
by their 0-based position in ``categories``, so Likert options must be
listed in their semantic order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import SchemaError

SCHEMA_VERSION = 1
KIND_SIZES = {"Binary": 2, "Likert3": 3}
FACTOR_GROUPS = (
    "demographics",
    "family_relations",
    "depression_stress",
    "peer_influence",
    "career",
    "curiosity",
    "personality",
    "religion",
)
DEFAULT_TARGET = {"healthy": 0, "addicted": 1}


@dataclass(frozen=True)
class QuestionSpec:
    id: str
    text: str
    kind: str
    categories: tuple[str, ...]
    factor_group: str
    name: str = ""

    def __post_init__(self):
        if self.kind not in KIND_SIZES:
            raise SchemaError(f"{self.id}: unknown kind {self.kind!r}")
        if len(self.categories) != KIND_SIZES[self.kind]:
            raise SchemaError(
                f"{self.id}: kind {self.kind} needs {KIND_SIZES[self.kind]} "
                f"categories, got {len(self.categories)}"
            )
        if len(set(self.categories)) != len(self.categories):
            raise SchemaError(f"{self.id}: duplicate category labels")
        if self.factor_group not in FACTOR_GROUPS:
            raise SchemaError(f"{self.id}: unknown factor group {self.factor_group!r}")

    @property
    def n_categories(self) -> int:
        return len(self.categories)

    @property
    def label(self) -> str:
        return self.name or self.id


@dataclass(frozen=True)
class SurveySchema:
    questions: tuple[QuestionSpec, ...]
    target: dict = field(default_factory=lambda: dict(DEFAULT_TARGET))
    label_column: str = "label"
    fingerprint: str = ""

    def __post_init__(self):
        ids = [q.id for q in self.questions]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SchemaError(f"duplicate question ids: {dupes}")
        if sorted(self.target.values()) != [0, 1]:
            raise SchemaError("target must map exactly two class names to 0 and 1")
        object.__setattr__(self, "_index", {q.id: i for i, q in enumerate(self.questions)})
        if not self.fingerprint:
            object.__setattr__(self, "fingerprint", _fingerprint(self))

    @property
    def ids(self) -> list[str]:
        return [q.id for q in self.questions]

    @property
    def class_names(self) -> list[str]:
        """Class names ordered by code."""
        return sorted(self.target, key=self.target.get)

    def index(self, question_id: str) -> int:
        try:
            return self._index[question_id]
        except KeyError:
            raise SchemaError(f"unknown question {question_id!r}") from None

    def question(self, question_id: str) -> QuestionSpec:
        return self.questions[self.index(question_id)]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "target": {"column": self.label_column, "classes": dict(self.target)},
            "questions": [
                {
                    "id": q.id,
                    "name": q.name,
                    "text": q.text,
                    "kind": q.kind,
                    "categories": list(q.categories),
                    "factor_group": q.factor_group,
                }
                for q in self.questions
            ],
        }


def _fingerprint(schema: SurveySchema) -> str:
    # canonical JSON: key order and file whitespace do not matter, question order does
    blob = json.dumps(schema.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def schema_from_dict(doc: dict) -> SurveySchema:
    if not isinstance(doc, dict):
        raise SchemaError("schema document must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r}")
    try:
        target = doc.get("target", {})
        questions = tuple(
            QuestionSpec(
                id=str(q["id"]),
                text=str(q.get("text", "")),
                kind=q["kind"],
                categories=tuple(str(c) for c in q["categories"]),
                factor_group=q["factor_group"],
                name=str(q.get("name", "")),
            )
            for q in doc["questions"]
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed question entry: {exc}") from exc
    return SurveySchema(
        questions=questions,
        target=dict(target.get("classes", DEFAULT_TARGET)),
        label_column=target.get("column", "label"),
    )


def load_schema(path=None) -> SurveySchema:
    """Load and validate a schema file; ``None`` loads the bundled paper36 schema."""
    if path is None:
        text = resources.files("vulnscreen").joinpath("schemas/paper36.schema").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"cannot parse schema {path}: {exc}") from exc
    return schema_from_dict(doc)


def default_schema() -> SurveySchema:
    return load_schema(None)


def encode_answer(schema: SurveySchema, question_id: str, answer_label: str) -> int:
    q = schema.question(question_id)
    try:
        return q.categories.index(answer_label)
    except ValueError:
        raise SchemaError(
            f"unknown answer {answer_label!r} for {question_id}; expected one of {list(q.categories)}"
        ) from None


def decode_answer(schema: SurveySchema, question_id: str, code: int) -> str:
    q = schema.question(question_id)
    if not 0 <= code < q.n_categories:
        raise SchemaError(f"code {code} out of range for {question_id}")
    return q.categories[code]
