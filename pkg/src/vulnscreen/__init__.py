"""Survey-based substance-abuse vulnerability screening.

Chi-squared feature ranking, backward elimination over six natively
implemented classifiers, ROC/AUC evaluation, and a synthetic survey
generator for testing the whole chain without private data.
"""

from .chi2 import ChiSquareReport, ChiSquareResult, chi2_sf, critical_value, rank_features, test_feature
from .classifiers import KINDS, TrainConfig, TrainedModel, load_model, predict, save_model, train
from .evaluation import EvalReport, auc, auc_pairwise_oracle, evaluate, roc_curve
from .ingest import Dataset, SplitIndices, parse_csv, select_columns, stratified_split, write_csv
from .schema import SurveySchema, default_schema, encode_answer, load_schema
from .selection import SelectionTrace, backward_eliminate, run_pipeline, select_winner
from .synth import SynthConfig, generate, paper_shaped_preset

__version__ = "0.1.0"
