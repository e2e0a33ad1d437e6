"""Linear law-based feature space transformation for time-series classification."""

from .exceptions import DomainError, LinlawError
from .linalg_small import EigenDecomposition, eigen_sym, eigen_sym_batch, gram, mat_mul
from .llt import (
    EmbeddingConfig,
    LawBank,
    LinearLaw,
    LinearLawTransformer,
    TransformedDataset,
    build_law_bank,
    embed,
    extract_law,
    transform_instance,
    transform_set,
)
from .market_data import Candle, CandleSeries, audit_continuity, feature_matrix, parse_candle_csv
from .synth import SynthSpec, generate_synthetic
from .windowing import (
    InstanceWindow,
    SamplingConfig,
    SplitIndex,
    balance_classes,
    make_instances,
    split_train_test,
)

__version__ = "0.1.0"
