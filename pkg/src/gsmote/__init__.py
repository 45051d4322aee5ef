"""G-SMOTE geometric oversampling and an evaluation harness for imbalanced binary data."""

from .dataset import Dataset, apply_minmax, fit_minmax, load_csv, synthetic_count
from .geometry import deform, make_direction, sample_unit_ball, translate, truncate
from .oversampling import (
    GSmoteConfig,
    SyntheticBatch,
    adasyn_generate,
    borderline_smote,
    gsmote_generate,
    oversample,
    random_oversample,
    select_surface,
    smote_generate,
)

__version__ = "0.1.0"
