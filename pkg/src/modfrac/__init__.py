"""Modulation-space norms and fractional integral operators on sampled grids."""

from .fracint import (
    MultiplierSpec,
    OpNormEstimate,
    apply_iab,
    apply_riesz,
    band_decay_check,
    band_multiplier,
    bernstein_check,
    gamma_const,
    lemma31_sweep,
    opnorm,
    psi_field,
)
from .grid import Field, GridSpec, eval_bandlimited, forward_ft, inverse_ft, lp_norm, sample
from .modnorm import (
    DecompResult,
    MixedNormExponents,
    StftGrid,
    amalgam_norm,
    decomp_band,
    mpq_norm_decomp,
    mpq_norm_stft,
    stft,
)
from .region import (
    RegionQuery,
    RegionVerdict,
    amalgam_sufficient,
    embedding_verdict,
    hls_admissible,
    region_grid_scan,
    theorem11_verdict,
    theorem12_verdict,
)
from .reports import VERSION as __version__
from .sharpness import (
    CriticalScanConfig,
    DilationScanConfig,
    DivergenceReport,
    ScanReport,
    critical_scan,
    dilation_scan,
    hls_ratio_scan,
    log_series_oracle,
)
from .windows import BumpWindow, GaussWindow, PsiProfile, eval_bump, eval_psi, partition_lower_bound
