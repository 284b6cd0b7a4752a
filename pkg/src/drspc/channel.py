"""BPSK over the binary-input AWGN channel with ternary quantization.

Bit 0 maps to +1 and bit 1 to -1. Received values with magnitude <= T are
declared erasures (the boundary |y| = T counts as an erasure); otherwise the
usual hard decision by sign applies. All randomness flows through explicit
numpy generators.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

ERASURE = 2  # ternary symbol encoding for '?'


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


@dataclass(frozen=True)
class ChannelConfig:
    rate_r: float
    ebn0_db: float
    erasure_T: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.rate_r <= 1.0:
            raise ValueError(f"rate_r must be in (0, 1], got {self.rate_r}")
        if self.erasure_T < 0.0:
            raise ValueError(f"erasure_T must be >= 0, got {self.erasure_T}")

    @property
    def ebn0_linear(self) -> float:
        return 10.0 ** (self.ebn0_db / 10.0)

    @property
    def sigma2(self) -> float:
        """Noise variance (2 r Eb/N0)^-1."""
        return 1.0 / (2.0 * self.rate_r * self.ebn0_linear)

    @property
    def Lc(self) -> float:
        return 2.0 / self.sigma2


def transmit(bits: np.ndarray, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """BPSK-modulate and add white Gaussian noise: (-1)^bit + N(0, sigma2)."""
    bits = np.asarray(bits, dtype=np.uint8)
    symbols = 1.0 - 2.0 * bits.astype(np.float64)
    return symbols + rng.normal(0.0, np.sqrt(cfg.sigma2), size=bits.shape)


def quantize(soft: np.ndarray, T: float) -> np.ndarray:
    """Map real channel outputs to the ternary alphabet {0, ?, 1}."""
    if T < 0.0:
        raise ValueError("erasure threshold must be >= 0")
    soft = np.asarray(soft, dtype=np.float64)
    out = np.full(soft.shape, ERASURE, dtype=np.uint8)
    out[soft > T] = 0
    out[soft < -T] = 1
    return out


def error_prob(cfg: ChannelConfig) -> float:
    """Per-symbol error probability of the quantized channel."""
    a = np.sqrt(2.0 * cfg.rate_r * cfg.ebn0_linear)
    return float(qfunc(a * (cfg.erasure_T + 1.0)))


def erasure_prob(cfg: ChannelConfig) -> float:
    """Per-symbol erasure probability of the quantized channel."""
    a = np.sqrt(2.0 * cfg.rate_r * cfg.ebn0_linear)
    return float(1.0 - qfunc(a * (cfg.erasure_T - 1.0)) - qfunc(a * (cfg.erasure_T + 1.0)))
