"""Prime-field arithmetic and deterministic, splittable randomness.

Everything downstream (polynomials, matrices, automata, the identity-test
drivers) computes over a prime field F_p.  The default modulus is the
Mersenne prime 2^61 - 1, which keeps single products inside native machine
integers on 64-bit Python builds while leaving plenty of room for the
random-evaluation error bound.

Randomness is funnelled through :class:`SeededRng`: one 64-bit master seed,
with stage-local generators derived by *labelled splitting* so that the
draws of one pipeline stage never depend on how many draws another stage
made.
"""

from __future__ import annotations

import hashlib
import random

MERSENNE61 = (1 << 61) - 1

_MASK64 = (1 << 64) - 1


class NotPrime(ValueError):
    """Raised when a field is requested for a composite (or < 2) modulus."""


class DivisionByZero(ZeroDivisionError):
    """Raised on inversion of zero or division by zero in a field."""


_checked_primes: set[int] = set()


def _is_prime(n: int) -> bool:
    # sympy's isprime is deterministic (BPSW + extra rounds) for the 64-bit
    # range we allow; imported lazily because sympy is slow to load.
    if n in _checked_primes:
        return True
    from sympy import isprime

    if isprime(n):
        _checked_primes.add(n)
        return True
    return False


class Field:
    """A prime field F_p with a verified prime modulus."""

    __slots__ = ("modulus",)

    def __init__(self, modulus: int):
        modulus = int(modulus)
        if modulus < 2 or not _is_prime(modulus):
            raise NotPrime(f"{modulus} is not prime")
        self.modulus = modulus

    def __repr__(self):
        return f"Field({self.modulus})"

    def __eq__(self, other):
        return isinstance(other, Field) and self.modulus == other.modulus

    def __hash__(self):
        return hash(("Field", self.modulus))

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)


def make_prime_field(p: int) -> Field:
    """Build F_p, raising :class:`NotPrime` for composite p."""
    return Field(p)


class FieldElement:
    """An element of a :class:`Field`; immutable, operator-overloaded."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: Field):
        self.value = int(value) % field.modulus
        self.field = field

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field.modulus != self.field.modulus:
                raise ValueError(
                    f"mixed fields: F_{self.field.modulus} vs F_{other.field.modulus}"
                )
            return other.value
        if isinstance(other, int):
            return other % self.field.modulus
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value + v, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value - v, self.field)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(v - self.value, self.field)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.value * v, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise DivisionByZero("inverse of zero")
        return FieldElement(pow(self.value, self.field.modulus - 2, self.field.modulus), self.field)

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if v == 0:
            raise DivisionByZero("division by zero")
        return self * FieldElement(v, self.field).inv()

    def __rtruediv__(self, other):
        if self.value == 0:
            raise DivisionByZero("division by zero")
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(v, self.field) * self.inv()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inv() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.field.modulus), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.modulus == other.field.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.field.modulus, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value}"


class SeededRng:
    """Deterministic RNG with labelled splitting.

    ``split(label)`` derives an independent child generator whose stream is
    a pure function of (master seed, label path) -- not of the parent's
    draw history.  Stages of the pipeline each get their own split, so
    adding draws in one stage never perturbs another.
    """

    def __init__(self, seed: int, _path: tuple = ()):
        self.seed_value = int(seed) & _MASK64
        self.label_path = tuple(_path)
        digest = hashlib.sha256(
            repr((self.seed_value, self.label_path)).encode("utf-8")
        ).digest()
        self._rnd = random.Random(int.from_bytes(digest[:8], "big"))

    def split(self, label) -> "SeededRng":
        return SeededRng(self.seed_value, self.label_path + (str(label),))

    # thin delegation to the underlying stdlib generator
    def randrange(self, *args):
        return self._rnd.randrange(*args)

    def randint(self, a, b):
        return self._rnd.randint(a, b)

    def choice(self, seq):
        return self._rnd.choice(seq)

    def sample(self, population, k):
        return self._rnd.sample(population, k)

    def shuffle(self, seq):
        self._rnd.shuffle(seq)

    def random(self):
        return self._rnd.random()

    def __repr__(self):
        return f"SeededRng(seed={self.seed_value}, path={list(self.label_path)})"


def sample_uniform(field: Field, rng: SeededRng) -> FieldElement:
    """Draw a uniform element of the field from the given generator."""
    return FieldElement(rng.randrange(field.modulus), field)
