"""Component-level error-and-erasure decoding and its success analysis.

``eaed`` fills the erased positions with a fresh random pair of complementary
binary vectors, runs bounded-distance decoding on both candidates, and picks
the result closest to the input on the unerased coordinates (fair coin on
ties). ``ideal_eaed`` is the genie-aided benchmark: each BDD branch output is
discarded unless it equals the transmitted codeword, so the decoder succeeds
exactly when some branch lands inside the decoding sphere of the transmitted
word. That per-branch filter is what makes the closed-form ``success_prob``
an exact description of the genie decoder.

``forney_rule_decode`` emulates the one-step decoder that succeeds iff the
input lies in the ternary sphere 2*d + E < d_des of some codeword; it is a
reference decoder only.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .bch import CodeSpec, bdd_decode
from .channel import ERASURE


@dataclass(frozen=True)
class EaeOutcome:
    kind: str                  # "corrected" | "failure"
    word: np.ndarray           # binary codeword if corrected, else the ternary input
    bdd_steps: int             # BDD invocations consumed: 0, 1, or 2
    flips: tuple               # unerased coordinates where output differs from input
    fill: np.ndarray = None    # first filling vector p1 (diagnostic, may be None)

    @property
    def corrected(self) -> bool:
        return self.kind == "corrected"


def erasure_count(y: np.ndarray) -> int:
    return int(np.count_nonzero(np.asarray(y) == ERASURE))


def distance_unerased(y: np.ndarray, c: np.ndarray) -> int:
    """Hamming distance between y and c restricted to the unerased coordinates of y."""
    y = np.asarray(y)
    c = np.asarray(c)
    if y.shape != c.shape:
        raise ValueError("length mismatch")
    unerased = y != ERASURE
    return int(np.count_nonzero((y != c) & unerased))


def _flips(y: np.ndarray, w: np.ndarray) -> tuple:
    unerased = y != ERASURE
    return tuple(int(i) for i in np.flatnonzero((y != w) & unerased))


def eaed(code: CodeSpec, y: np.ndarray, rng: np.random.Generator,
         fill=None, transmitted=None) -> EaeOutcome:
    """Two-branch error-and-erasure decoding of a ternary word.

    ``fill`` overrides the random first filling vector (tests and the
    deterministic-filling ablation). ``transmitted`` enables the per-branch
    genie filter used by ``ideal_eaed``.
    """
    y = np.asarray(y, dtype=np.uint8)
    era = y == ERASURE
    E = int(era.sum())
    if E >= code.d_des:
        return EaeOutcome("failure", y, 0, ())

    if fill is None:
        fill = rng.integers(0, 2, E, dtype=np.uint8)
    else:
        fill = np.asarray(fill, dtype=np.uint8)
        if fill.shape != (E,):
            raise ValueError(f"fill length {fill.shape} != erasure count {E}")
    y1 = np.where(era, 0, y)
    y2 = y1.copy()
    y1[era] = fill
    y2[era] = 1 - fill

    r1 = bdd_decode(code, y1)
    r2 = bdd_decode(code, y2)
    ok1, ok2 = r1.corrected, r2.corrected
    if transmitted is not None:
        transmitted = np.asarray(transmitted, dtype=np.uint8)
        ok1 = ok1 and bool((r1.word == transmitted).all())
        ok2 = ok2 and bool((r2.word == transmitted).all())
    steps = 1 if E == 0 else 2

    if not ok1 and not ok2:
        return EaeOutcome("failure", y, steps, (), fill)
    if ok1 != ok2:
        w = r1.word if ok1 else r2.word
        return EaeOutcome("corrected", w, steps, _flips(y, w), fill)
    d1 = distance_unerased(y, r1.word)
    d2 = distance_unerased(y, r2.word)
    if d1 < d2:
        w = r1.word
    elif d2 < d1:
        w = r2.word
    else:
        w = r1.word if rng.integers(0, 2) == 0 else r2.word
    return EaeOutcome("corrected", w, steps, _flips(y, w), fill)


def ideal_eaed(code: CodeSpec, y: np.ndarray, transmitted: np.ndarray,
               rng: np.random.Generator, fill=None) -> EaeOutcome:
    """Genie-aided decoder: discards every miscorrected BDD branch, so the
    output is either the transmitted codeword or the unchanged input."""
    return eaed(code, y, rng, fill=fill, transmitted=transmitted)


def forney_rule_decode(code: CodeSpec, y: np.ndarray, rng: np.random.Generator) -> EaeOutcome:
    """One-step reference decoder: succeeds iff a codeword c satisfies
    2 * d_unerased(y, c) + E(y) < d_des.

    Emulated by running BDD on the two deterministic complementary fillings
    (all-zeros, all-ones) and keeping a candidate only if it satisfies the
    sphere condition. If the condition holds for some codeword, one of the
    two branches has at most t errors with respect to it, so the candidate is
    found; at most one codeword can satisfy the condition since d_des exceeds
    the sphere diameter.
    """
    y = np.asarray(y, dtype=np.uint8)
    era = y == ERASURE
    E = int(era.sum())
    if E >= code.d_des:
        return EaeOutcome("failure", y, 0, ())
    zeros = np.zeros(E, dtype=np.uint8)
    for fill in (zeros, 1 - zeros):
        yf = np.where(era, 0, y)
        yf[era] = fill
        r = bdd_decode(code, yf)
        if r.corrected and 2 * distance_unerased(y, r.word) + E < code.d_des:
            return EaeOutcome("corrected", r.word, 1 if E == 0 else 2, _flips(y, r.word))
    return EaeOutcome("failure", y, 1 if E == 0 else 2, ())


def success_prob(code: CodeSpec, D: int, E: int) -> float:
    """Closed-form success probability of the genie-aided decoder for a
    pattern of D errors and E erasures."""
    if D < 0 or E < 0:
        raise ValueError("D and E must be >= 0")
    if 2 * D + E < code.d_des:
        return 1.0
    if E >= code.d_des or D > code.t:
        return 0.0
    return 2.0 ** (1 - E) * sum(comb(E, e) for e in range(code.t - D + 1))


def iterated_success(Ps: float, trials: int) -> float:
    """Success probability after ``trials`` independent decoding attempts."""
    if not 0.0 <= Ps <= 1.0:
        raise ValueError("Ps must be in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return 1.0 - (1.0 - Ps) ** trials


def success_table(code: CodeSpec, d_max: int, e_max: int,
                  rule: str = "eaed", trials: int = 1):
    """(D, E, Ps) triples over the grid D <= d_max, E <= e_max.

    ``rule``: "eaed" for the randomized-filling decoder, "forney" for the
    one-step sphere rule. ``trials`` > 1 applies the repeated-attempt formula.
    """
    rows = []
    for D in range(d_max + 1):
        for E in range(e_max + 1):
            if rule == "eaed":
                ps = success_prob(code, D, E)
            elif rule == "forney":
                ps = 1.0 if (2 * D + E < code.d_des and D <= code.t) else 0.0
            else:
                raise ValueError(f"unknown rule {rule!r}")
            rows.append((D, E, iterated_success(ps, trials)))
    return rows
