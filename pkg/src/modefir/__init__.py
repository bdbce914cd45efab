"""Iterative Filtering signal decomposition with direct (one-shot) variants.

>>> import numpy as np, modefir
>>> x = np.arange(4000) / 3999
>>> s = np.sin(2 * np.pi * 40 * x) + np.sin(2 * np.pi * 2 * x)
>>> d = modefir.decompose(s, method="dFIF")
"""

__version__ = "0.1.0"

from .signal import (
    Decomposition,
    InsufficientExtremaError,
    IterationReport,
    ModefirError,
    count_extrema,
    reconstruct,
)
from .filters import (
    Filter,
    FilterSpectrum,
    build_filter,
    estimate_filter_length,
    filter_spectrum,
)
from .engine import (
    DecompositionConfig,
    DegenerateSpectrumWarning,
    compute_imf_dfif,
    compute_imf_fif,
    compute_imf_htfif,
    compute_imf_if,
    decompose,
    estimate_n0,
    if_step,
)
from .metrics import (
    ErrorReport,
    compare_decompositions,
    dfif_error_bound,
    htfif_error_bound,
    relative_error,
)
