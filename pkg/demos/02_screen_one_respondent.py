"""Train the screening model and explain a single prediction.

Same path the `predict --interactive` subcommand takes, minus the prompts.
"""

import numpy as np

from vulnscreen import default_schema, load_model, predict, run_pipeline
from vulnscreen.classifiers import contributions
from vulnscreen.schema import decode_answer
from vulnscreen.synth import demo_data_path

schema = default_schema()
result = run_pipeline(demo_data_path(), out_dir="demo_run")
print(result.summary())

model = load_model("demo_run/model.json")
rng = np.random.default_rng(0)

# a made-up respondent: pick an answer code for each question the model uses
answers = []
for qid in model.feature_ids:
    m = len(schema.question(qid).categories)
    answers.append(int(rng.integers(0, m)))

p = predict(model, answers, schema.fingerprint)
print("score:", p.score, "label:", schema.class_names[p.label])

contrib = contributions(model, answers)
if contrib is not None:
    order = np.argsort(-contrib, kind="stable")[:3]
    for j in order:
        qid = model.feature_ids[j]
        print(f"  {qid}: {decode_answer(schema, qid, answers[j])!r}  ({contrib[j]:+.3f})")
