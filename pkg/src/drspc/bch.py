"""BCH component codes: construction, systematic encoding, syndromes, and
strict bounded-distance decoding (BDD), including even-weight subcodes.

Bit convention: position i of a length-n word holds the coefficient of
x^(n-1-i), so the k message bits of a systematic codeword occupy positions
0..k-1 and the parity bits positions k..n-1.

Two decode paths are provided with the same contract (decode iff a codeword
lies within Hamming radius t):

* ``bdd_decode`` -- scalar Berlekamp-Massey + Chien search for any t,
* ``bdd_batch``  -- row-vectorized Peterson solver for t=2 (the simulator's
  hot path), falling back to the scalar decoder for t>2.

Even-weight subcodes are decoded with the mother t-error-correcting code and
the result is rejected (Failure) unless it has even weight, which is exactly
bounded-distance decoding on the subcode because the mother code already has
minimum distance > 2t.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .gf2m import GF2m


@dataclass(frozen=True)
class DecodeOutcome:
    kind: str                 # "corrected" | "failure"
    word: np.ndarray          # the codeword if corrected, the input if failure
    flips: tuple              # flipped coordinate indices (empty on failure)

    @property
    def corrected(self) -> bool:
        return self.kind == "corrected"


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """A BCH component code (or its even-weight subcode) plus decode tables."""

    field: GF2m
    n: int
    k: int
    t: int
    even_weight: bool
    d_des: int
    generator_poly: int       # bitmask, bit i = coefficient of x^i
    # precomputed tables (derived, excluded from repr)
    pow_mat: np.ndarray = dc_field(repr=False, default=None)    # (2t, n) alpha^{j(n-1-i)}
    chien_log: np.ndarray = dc_field(repr=False, default=None)  # (t+1, n) logs of alpha^{-l(n-1-i)}
    parity_mat: np.ndarray = dc_field(repr=False, default=None) # (k, n-k) systematic parity map

    @property
    def name(self) -> str:
        suffix = "even" if self.even_weight else ""
        return f"bch{self.n}t{self.t}{suffix}"

    def __eq__(self, other):
        return (isinstance(other, CodeSpec)
                and (other.field, other.n, other.k, other.t, other.even_weight)
                == (self.field, self.n, self.k, self.t, self.even_weight))

    def __hash__(self):
        return hash((self.field, self.n, self.k, self.t, self.even_weight))


def _minimal_poly(field: GF2m, j: int) -> int:
    """Binary minimal polynomial of alpha^j, as an int bitmask."""
    coset = []
    e = j % field.order
    while e not in coset:
        coset.append(e)
        e = (2 * e) % field.order
    # multiply out prod (x - alpha^e) with coefficients in the field
    poly = [1]  # ascending powers of x, field-element coefficients
    for e in coset:
        root = field.exp[e]
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] ^= c                      # c * x
            nxt[d] ^= field.mul(int(c), int(root))  # c * root
        poly = nxt
    mask = 0
    for d, c in enumerate(poly):
        if c not in (0, 1):
            raise AssertionError("minimal polynomial has non-binary coefficient")
        mask |= c << d
    return mask


def _poly_mul_gf2(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_mod_step(rem: int, g: int, deg_g: int) -> int:
    """(rem * x) mod g, for rem of degree < deg_g."""
    rem <<= 1
    if (rem >> deg_g) & 1:
        rem ^= g
    return rem


def build_code(nu: int, t: int, even_weight: bool) -> CodeSpec:
    """Construct the (2^nu - 1, k, t) BCH code or its even-weight subcode."""
    if nu not in (7, 8, 9):
        raise ValueError(f"unsupported nu={nu}")
    if t not in (2, 3, 4):
        raise ValueError(f"unsupported t={t}")
    field = GF2m(nu)
    n = field.order

    gen = 1
    seen_cosets = set()
    for j in range(1, 2 * t, 2):
        e = j
        coset = set()
        while e not in coset:
            coset.add(e)
            e = (2 * e) % field.order
        key = min(coset)
        if key in seen_cosets:
            continue
        seen_cosets.add(key)
        gen = _poly_mul_gf2(gen, _minimal_poly(field, j))
    if even_weight:
        gen = _poly_mul_gf2(gen, 0b11)  # extra (x + 1) factor
    deg = gen.bit_length() - 1
    k = n - deg
    d_des = 2 * t + 1 + (1 if even_weight else 0)

    # Syndrome evaluation tables: pow_mat[j-1, i] = alpha^{j (n-1-i)}
    exps = np.arange(n - 1, -1, -1, dtype=np.int64)
    pow_mat = np.empty((2 * t, n), dtype=np.int32)
    for j in range(1, 2 * t + 1):
        pow_mat[j - 1] = field.exp[(j * exps) % field.order]

    # Chien tables: chien_log[l, i] = log(alpha^{-l(n-1-i)}), for l = 0..t
    chien_log = np.empty((t + 1, n), dtype=np.int64)
    for l in range(t + 1):
        chien_log[l] = (l * (field.order - exps)) % field.order

    # Systematic parity map: rems[j] = x^{n-k+j} mod g
    rem = _poly_mod_step(1 << (deg - 1), gen, deg)  # x^{n-k} mod g
    rems = [rem]
    for _ in range(k - 1):
        rem = _poly_mod_step(rem, gen, deg)
        rems.append(rem)
    parity_mat = np.zeros((k, n - k), dtype=np.uint8)
    for i in range(k):
        r = rems[k - 1 - i]  # remainder of x^{n-1-i}
        for p in range(n - k):
            parity_mat[i, p] = (r >> (n - k - 1 - p)) & 1

    pow_mat.setflags(write=False)
    chien_log.setflags(write=False)
    parity_mat.setflags(write=False)
    return CodeSpec(field=field, n=n, k=k, t=t, even_weight=even_weight,
                    d_des=d_des, generator_poly=gen, pow_mat=pow_mat,
                    chien_log=chien_log, parity_mat=parity_mat)


def encode(code: CodeSpec, message: np.ndarray) -> np.ndarray:
    """Systematic encoding; message bits land at positions 0..k-1."""
    message = np.asarray(message, dtype=np.uint8)
    if message.shape[-1] != code.k:
        raise ValueError(f"message length {message.shape[-1]} != k={code.k}")
    parity = (message.astype(np.int64) @ code.parity_mat.astype(np.int64)) % 2
    return np.concatenate([message, parity.astype(np.uint8)], axis=-1)


def syndrome(code: CodeSpec, word: np.ndarray) -> np.ndarray:
    """Syndromes S_1..S_2t as field elements, plus the parity bit for
    even-weight codes. All-zero iff the word is in the code."""
    word = np.asarray(word, dtype=np.uint8)
    if word.shape != (code.n,):
        raise ValueError(f"word length {word.shape} != n={code.n}")
    mask = word.astype(bool)
    syn = np.bitwise_xor.reduce(np.where(mask, code.pow_mat, 0), axis=1)
    if code.even_weight:
        syn = np.concatenate([syn, [int(word.sum()) & 1]])
    return syn


def _odd_syndromes_rows(code: CodeSpec, bits: np.ndarray) -> np.ndarray:
    """Syndromes S_1, S_3, ..., S_{2t-1} for every row of a (m, n) matrix."""
    mask = bits.astype(bool)
    out = np.empty((code.t, bits.shape[0]), dtype=np.int32)
    for idx, j in enumerate(range(1, 2 * code.t, 2)):
        out[idx] = np.bitwise_xor.reduce(np.where(mask, code.pow_mat[j - 1], 0), axis=1)
    return out


def rows_in_code(code: CodeSpec, bits: np.ndarray) -> np.ndarray:
    """Membership test for every row of a binary (m, n) matrix."""
    syn = _odd_syndromes_rows(code, bits)
    ok = (syn == 0).all(axis=0)
    if code.even_weight:
        ok &= (bits.sum(axis=1, dtype=np.int64) & 1) == 0
    return ok


def _berlekamp_massey(field: GF2m, syndromes):
    """Error locator polynomial (ascending coefficients) from S_1..S_2t."""
    nsyn = len(syndromes)
    size = nsyn + 1
    C = [0] * size
    B = [0] * size
    C[0] = B[0] = 1
    L = 0
    m = 1
    b = 1
    for i in range(nsyn):
        d = int(syndromes[i])
        for j in range(1, L + 1):
            d ^= field.mul(C[j], int(syndromes[i - j]))
        if d == 0:
            m += 1
            continue
        coef = field.mul(d, field.inv(b))
        if 2 * L <= i:
            T = list(C)
            for j in range(size - m):
                C[j + m] ^= field.mul(coef, B[j])
            L = i + 1 - L
            B = T
            b = d
            m = 1
        else:
            for j in range(size - m):
                C[j + m] ^= field.mul(coef, B[j])
            m += 1
    return C, L


def bdd_decode(code: CodeSpec, word: np.ndarray) -> DecodeOutcome:
    """Strict bounded-distance decoding: return the unique codeword within
    Hamming radius t if it exists, otherwise Failure with the input."""
    word = np.asarray(word, dtype=np.uint8)
    field = code.field
    syn_odd = _odd_syndromes_rows(code, word[None, :])[:, 0]

    parity = int(word.sum()) & 1
    if (syn_odd == 0).all():
        if code.even_weight and parity:
            return DecodeOutcome("failure", word, ())
        return DecodeOutcome("corrected", word, ())

    # full syndrome list via S_{2j} = S_j^2
    S = [0] * (2 * code.t + 1)  # 1-indexed
    for idx, j in enumerate(range(1, 2 * code.t, 2)):
        S[j] = int(syn_odd[idx])
    for j in range(2, 2 * code.t + 1, 2):
        S[j] = field.mul(S[j // 2], S[j // 2])
    C, L = _berlekamp_massey(field, S[1:])
    deg = len(C) - 1
    while deg > 0 and C[deg] == 0:
        deg -= 1
    if L > code.t or deg != L:
        return DecodeOutcome("failure", word, ())

    # Chien search over all n positions: position i is in error iff
    # Lambda(alpha^{-(n-1-i)}) == 0
    val = np.full(code.n, C[0], dtype=np.int32)
    for l in range(1, deg + 1):
        if C[l]:
            val ^= field.exp[field.log[C[l]] + code.chien_log[l]].astype(np.int32)
    flips = np.flatnonzero(val == 0)
    if len(flips) != deg:
        return DecodeOutcome("failure", word, ())

    out = word.copy()
    out[flips] ^= 1
    # verification: the corrected word must be a codeword of the (sub)code
    if not rows_in_code(code, out[None, :])[0]:
        return DecodeOutcome("failure", word, ())
    return DecodeOutcome("corrected", out, tuple(int(i) for i in flips))


def bdd_batch(code: CodeSpec, bits: np.ndarray):
    """Bounded-distance decode every row of a binary (m, n) matrix.

    Returns ``(out, ok)`` where ``out[r]`` is the decoded codeword for rows
    with ``ok[r]`` and the unchanged input otherwise.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if code.t != 2:
        out = bits.copy()
        ok = np.zeros(bits.shape[0], dtype=bool)
        for r in range(bits.shape[0]):
            res = bdd_decode(code, bits[r])
            ok[r] = res.corrected
            if res.corrected:
                out[r] = res.word
        return out, ok

    field = code.field
    order = field.order
    n = code.n
    mask = bits.astype(bool)
    S1 = np.bitwise_xor.reduce(np.where(mask, code.pow_mat[0], 0), axis=1)
    S3 = np.bitwise_xor.reduce(np.where(mask, code.pow_mat[2], 0), axis=1)

    logS1 = field.log[S1]                       # junk where S1 == 0
    cube = field.exp[3 * logS1]                 # S1^3, junk where S1 == 0
    zero = (S1 == 0) & (S3 == 0)
    single = (S1 != 0) & (S3 == cube)
    double = (S1 != 0) & (S3 != cube)

    flips = np.zeros_like(bits)
    ok = zero.copy()

    rows_s = np.flatnonzero(single)
    if rows_s.size:
        pos = n - 1 - logS1[rows_s]
        flips[rows_s, pos] = 1
        ok[rows_s] = True

    rows_d = np.flatnonzero(double)
    if rows_d.size:
        s1 = S1[rows_d]
        sig2 = field.exp[field.log[S3[rows_d] ^ cube[rows_d]] + order - logS1[rows_d]]
        # Lambda(x) = 1 + s1 x + sig2 x^2 evaluated at x = alpha^{-(n-1-i)}
        t1 = field.exp[field.log[s1][:, None] + code.chien_log[1][None, :]]
        t2 = field.exp[field.log[sig2][:, None] + code.chien_log[2][None, :]]
        roots = (1 ^ t1 ^ t2) == 0
        ok_d = roots.sum(axis=1) == 2
        flips[rows_d] = roots
        ok[rows_d] = ok_d

    if code.even_weight:
        par = (bits.sum(axis=1, dtype=np.int64) + flips.sum(axis=1, dtype=np.int64)) & 1
        ok &= par == 0

    out = np.where(ok[:, None], bits ^ flips, bits)
    return out, ok
