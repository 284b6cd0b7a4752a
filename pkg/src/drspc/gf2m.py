"""Arithmetic over GF(2^nu) for nu in {7, 8, 9}.

Elements are packed integer bitmasks in polynomial basis. Multiplication goes
through precomputed log/antilog tables; the antilog table is replicated four
times so that sums of up to three logs index it without a modulo.
"""

import numpy as np

# Standard primitive polynomials, bit i = coefficient of x^i.
#   nu=7: x^7+x^3+1, nu=8: x^8+x^4+x^3+x^2+1, nu=9: x^9+x^4+1
PRIMITIVE_POLYS = {7: 0x89, 8: 0x11D, 9: 0x211}


class GF2m:
    """GF(2^nu) with log/antilog tables. Immutable after construction."""

    def __init__(self, nu: int):
        if nu not in PRIMITIVE_POLYS:
            raise ValueError(f"unsupported extension degree nu={nu}, need one of {sorted(PRIMITIVE_POLYS)}")
        self.nu = nu
        self.primitive_poly = PRIMITIVE_POLYS[nu]
        self.field_size = 1 << nu
        self.order = self.field_size - 1  # order of the multiplicative group

        exp = np.zeros(4 * self.order, dtype=np.int32)
        log = np.zeros(self.field_size, dtype=np.int32)
        x = 1
        for i in range(self.order):
            if x == 1 and i > 0:
                raise ValueError(f"polynomial {self.primitive_poly:#x} is not primitive over GF(2^{nu})")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.field_size:
                x ^= self.primitive_poly
        if x != 1:
            raise ValueError(f"polynomial {self.primitive_poly:#x} is not primitive over GF(2^{nu})")
        for rep in range(1, 4):
            exp[rep * self.order:(rep + 1) * self.order] = exp[:self.order]
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log

    # -- scalar operations --------------------------------------------------

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.exp[self.order - self.log[a]])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """a**e, with 0**0 defined as 1."""
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % self.order])

    # -- vectorized operations ---------------------------------------------

    def mul_vec(self, a, b):
        """Elementwise product of integer arrays (broadcasting allowed)."""
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def __eq__(self, other):
        return isinstance(other, GF2m) and other.nu == self.nu

    def __hash__(self):
        return hash(("GF2m", self.nu))

    def __repr__(self):
        return f"GF2m(nu={self.nu})"
