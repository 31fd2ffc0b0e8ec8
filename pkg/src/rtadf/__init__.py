"""Right-tail ADF bubble tests (ADF, RADF, SADF, GSADF) with BSADF date-stamping."""

__version__ = "0.1.0"

from .adf_core import AdfSpec, adf_statistic, ols_fit, select_lag_bic
from .datestamp import BubbleEpisode, episode_coverage, stamp_episodes
from .errors import ConfigError, DegenerateWindowError, MonteCarloError, SeriesError
from .mc_critical import (
    CriticalValues,
    CvSequence,
    NullSpec,
    bsadf_cv_sequence,
    critical_values,
    simulate_null,
    simulate_null_path,
)
from .recursive import (
    StatSequence,
    TestConfig,
    adf_full,
    all_statistics,
    bsadf_sequence,
    gsadf,
    radf,
    sadf,
)
from .series import TimeSeries, load_csv, slice_series, to_log, write_csv
from .synth import EvansSpec, gen_evans_bubble, gen_explosive_ar1, gen_random_walk
