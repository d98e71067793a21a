import warnings

import numpy as np
import pytest
from hypothesis import settings

from vulnscreen.ingest import Dataset
from vulnscreen.schema import default_schema, schema_from_dict

# numba compiles on first call, which would trip the default deadline
settings.register_profile("vulnscreen", deadline=None, max_examples=60)
settings.load_profile("vulnscreen")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def schema():
    return default_schema()


def tiny_schema(kinds):
    """Schema with one question per entry of ``kinds`` (2 or 3 categories)."""
    qs = []
    for i, m in enumerate(kinds, 1):
        cats = ["a", "b"] if m == 2 else ["lo", "mid", "hi"]
        qs.append({"id": f"Q{i}", "text": f"question {i}", "kind": "Binary" if m == 2 else "Likert3",
                   "categories": cats, "factor_group": "career"})
    return schema_from_dict({"schema_version": 1, "questions": qs,
                             "target": {"column": "label", "classes": {"healthy": 0, "addicted": 1}}})


def make_dataset(rows, labels, feature_ids=None, fingerprint="test"):
    rows = np.asarray(rows, dtype=np.int64)
    if feature_ids is None:
        feature_ids = tuple(f"Q{j + 1}" for j in range(rows.shape[1]))
    return Dataset(fingerprint, tuple(feature_ids), rows, np.asarray(labels, dtype=np.int64))


@pytest.fixture(autouse=True)
def _quiet_convergence():
    # separable toy sets make logistic regression report non-convergence
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*before reaching tol.*")
        yield
