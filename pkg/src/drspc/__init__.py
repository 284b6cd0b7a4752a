"""Product-code FEC toolkit: BCH component codes, error-and-erasure decoding,
dynamic reliability scores, and a reproducible Monte-Carlo simulator."""

__version__ = "0.1.0"

from .gf2m import GF2m
from .bch import CodeSpec, build_code, encode, syndrome, bdd_decode
from .channel import ChannelConfig, transmit, quantize, error_prob, erasure_prob
from .eae import (
    ERASURE,
    eaed,
    ideal_eaed,
    forney_rule_decode,
    success_prob,
    iterated_success,
)
from .pc import DrsdConfig, pc_encode, ibdd_decode, ieaed_decode, drsd_decode, drs_init
from .sim import (
    BerEstimate,
    ExperimentConfig,
    SearchError,
    estimate_ber,
    grid_search_thresholds,
    instrumented_run,
    noise_threshold,
)
