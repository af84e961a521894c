"""
Arithmetic in GF(2^n) for small n.

Elements are plain ints: bit i holds the coefficient of x^i in the
polynomial basis. Addition is XOR, multiplication is carry-less
multiplication reduced by the field's irreducible modulus.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

from dwfstokes.config import settings
from dwfstokes.exceptions import FieldError

logger = logging.getLogger(__name__)

FieldElement = int


def _degree(poly: int) -> int:
    return poly.bit_length() - 1


def _clmul(a: int, b: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def _poly_mod(a: int, m: int) -> int:
    dm = _degree(m)
    while a and _degree(a) >= dm:
        a ^= m << (_degree(a) - dm)
    return a


def is_irreducible(modulus: int) -> bool:
    """Exhaustive trial division by every polynomial of degree 1..deg/2."""
    n = _degree(modulus)
    if n < 1:
        return False
    for divisor in range(2, 1 << (n // 2 + 1)):
        if _poly_mod(modulus, divisor) == 0:
            return False
    return True


@dataclass(frozen=True)
class GF2n:
    n: int
    modulus: int

    def __post_init__(self):
        if not 1 <= self.n <= settings.max_degree:
            raise FieldError(f"Degree n={self.n} out of range [1, {settings.max_degree}]")
        if _degree(self.modulus) != self.n:
            raise FieldError(f"Modulus {self.modulus:#b} does not have degree {self.n}")
        if not is_irreducible(self.modulus):
            raise FieldError(f"Modulus {self.modulus:#b} is reducible over F_2")

    @classmethod
    def default(cls, n: int) -> "GF2n":
        if n not in settings.moduli:
            raise FieldError(f"No modulus configured for degree n={n}")
        return cls(n, settings.moduli[n])

    @property
    def order(self) -> int:
        return 1 << self.n

    def elements(self) -> range:
        return range(self.order)

    def check(self, a: FieldElement) -> FieldElement:
        if not 0 <= a < self.order:
            raise FieldError(f"{a} is not an element of GF(2^{self.n})")
        return a

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.check(a) ^ self.check(b)

    @cached_property
    def _mul_table(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(
            tuple(_poly_mod(_clmul(a, b), self.modulus) for b in self.elements())
            for a in self.elements()
        )

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self._mul_table[self.check(a)][self.check(b)]

    def power(self, a: FieldElement, k: int) -> FieldElement:
        result = 1
        base = self.check(a)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a: FieldElement) -> FieldElement:
        if self.check(a) == 0:
            raise FieldError("Zero has no multiplicative inverse")
        # a^(2^n - 2) = a^-1 in the multiplicative group of order 2^n - 1
        return self.power(a, self.order - 2)

    def trace(self, a: FieldElement) -> int:
        total = 0
        conj = self.check(a)
        for _ in range(self.n):
            total ^= conj
            conj = self.mul(conj, conj)
        if total not in (0, 1):
            raise FieldError(f"Trace of {a} left the prime field: {total}")
        return total

    def polynomial_basis(self) -> Tuple[FieldElement, ...]:
        return tuple(1 << i for i in range(self.n))

    def dual_basis(self, basis: Sequence[FieldElement]) -> Tuple[FieldElement, ...]:
        """
        Returns the trace-dual {f_j} of `basis`: Tr(e_i * f_j) = delta_ij.

        Each f_j is found by exhaustive search; a dependent basis leaves some
        system without a unique solution.
        """
        if len(basis) != self.n:
            raise FieldError(f"A basis of GF(2^{self.n}) needs {self.n} elements, got {len(basis)}")
        dual = []
        for j in range(self.n):
            candidates = [
                f for f in self.elements()
                if all(self.trace(self.mul(e, f)) == int(i == j) for i, e in enumerate(basis))
            ]
            if len(candidates) != 1:
                raise FieldError(f"Basis {list(basis)} is linearly dependent over F_2")
            dual.append(candidates[0])
        return tuple(dual)

    def coordinates(self, a: FieldElement, basis: "FieldBasis") -> Tuple[int, ...]:
        """Expansion bits of `a` in `basis.basis`, read off the dual: a_i = Tr(a * f_i)."""
        return tuple(self.trace(self.mul(a, f)) for f in basis.dual_basis)

    def dual_coordinates(self, a: FieldElement, basis: "FieldBasis") -> Tuple[int, ...]:
        """Expansion bits of `a` in `basis.dual_basis`: b_i = Tr(a * e_i)."""
        return tuple(self.trace(self.mul(a, e)) for e in basis.basis)

    def from_coordinates(self, bits: Sequence[int], elements: Sequence[FieldElement]) -> FieldElement:
        value = 0
        for bit, e in zip(bits, elements, strict=True):
            if bit:
                value ^= e
        return value


@dataclass(frozen=True)
class FieldBasis:
    field: GF2n
    basis: Tuple[FieldElement, ...]
    dual_basis: Tuple[FieldElement, ...]

    @classmethod
    def make(cls, field: GF2n, basis: Optional[Sequence[FieldElement]] = None) -> "FieldBasis":
        elements = tuple(basis) if basis is not None else field.polynomial_basis()
        for e in elements:
            field.check(e)
        dual = field.dual_basis(elements)
        logger.debug(f"GF(2^{field.n}) basis {elements} has dual {dual}")
        return cls(field, elements, dual)

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def modulus(self) -> int:
        return self.field.modulus

    def is_self_dual(self) -> bool:
        return self.basis == self.dual_basis
