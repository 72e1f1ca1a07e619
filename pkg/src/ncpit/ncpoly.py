"""Sparse polynomials over a free (non-commutative) algebra.

Monomials of F<x_1..x_n> are *words*: tuples of variable indices, so
``(0, 1, 0)`` stands for x1*x2*x1 and the empty tuple for the constant
monomial.  Multiplication concatenates words and never reorders them;
``commutative_collapse`` is the ring map onto F[x_1..x_n] that does.

Beyond the free algebra itself this module carries the two monomial
disciplines the substitution pipeline cares about:

* ordered power-sum monomials -- words whose variable indices never
  decrease (xi1^i1 * xi2^i2 * ... with all i_j >= 0); and
* strict xi-patterns -- segments xi1^l1 ... xis^ls with l_1..l_{s-1} > 0
  and l_s >= 0, the shape every structured automaton output factors into.

Polynomials refuse to grow beyond a monomial cap (default 10^6) because a
plus-regular circuit can expand to doubly-exponentially many words; the
cap turns that into a :class:`CapExceeded` instead of an OOM kill.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import Field, FieldElement

DEFAULT_MONOMIAL_CAP = 10**6

Word = tuple  # tuple of variable indices; () is the constant monomial


class VarSetMismatch(ValueError):
    """Raised when combining polynomials over different variable sets."""


class CapExceeded(RuntimeError):
    """Raised when an operation would produce more monomials than allowed."""


class NotPatternProduct(ValueError):
    """Raised when a word does not factor into strict xi-patterns."""


class VarSet:
    """An ordered set of distinct variable names."""

    __slots__ = ("names", "_index")

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    @classmethod
    def indexed(cls, prefix: str, n: int) -> "VarSet":
        """x1..xn style."""
        return cls(tuple(f"{prefix}{i}" for i in range(1, n + 1)))

    @classmethod
    def grid(cls, prefix: str, rows: int, cols: int) -> "VarSet":
        """Row-major y1_1, y1_2, ..., y{rows}_{cols} style."""
        return cls(
            tuple(f"{prefix}{r}_{c}" for r in range(1, rows + 1) for c in range(1, cols + 1))
        )

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def name(self, i: int) -> str:
        return self.names[i]

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        if len(self.names) > 6:
            shown = ", ".join(self.names[:3]) + f", ... ({len(self.names)} vars)"
        else:
            shown = ", ".join(self.names)
        return f"VarSet[{shown}]"


class NcPolynomial:
    """A sparse element of the free algebra F<varset>."""

    __slots__ = ("varset", "field", "terms", "cap")

    def __init__(self, varset: VarSet, field: Field, terms=None, cap: int = DEFAULT_MONOMIAL_CAP):
        self.varset = varset
        self.field = field
        self.cap = cap
        clean = {}
        if terms:
            for word, coeff in terms.items():
                if not isinstance(coeff, FieldElement):
                    coeff = field.element(coeff)
                if coeff:
                    clean[tuple(word)] = coeff
        if len(clean) > cap:
            raise CapExceeded(f"{len(clean)} monomials exceeds cap {cap}")
        self.terms = clean

    # ---------------- constructors ----------------

    @classmethod
    def zero(cls, varset, field, cap=DEFAULT_MONOMIAL_CAP):
        return cls(varset, field, {}, cap)

    @classmethod
    def constant(cls, varset, field, value, cap=DEFAULT_MONOMIAL_CAP):
        return cls(varset, field, {(): value}, cap)

    @classmethod
    def variable(cls, varset, field, var, cap=DEFAULT_MONOMIAL_CAP):
        i = varset.index(var) if isinstance(var, str) else int(var)
        return cls(varset, field, {(i,): field.one()}, cap)

    @classmethod
    def monomial(cls, varset, field, word, coeff=1, cap=DEFAULT_MONOMIAL_CAP):
        return cls(varset, field, {tuple(word): coeff}, cap)

    # ---------------- queries ----------------

    def coefficient(self, word) -> FieldElement:
        return self.terms.get(tuple(word), self.field.zero())

    def support(self):
        return set(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Maximum word length; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(len(w) for w in self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    # ---------------- arithmetic ----------------

    def _check_compatible(self, other: "NcPolynomial"):
        if self.varset != other.varset:
            raise VarSetMismatch(f"{self.varset} vs {other.varset}")
        if self.field.modulus != other.field.modulus:
            raise VarSetMismatch("polynomials over different fields")

    def __add__(self, other):
        if isinstance(other, (int, FieldElement)):
            other = NcPolynomial.constant(self.varset, self.field, other, self.cap)
        self._check_compatible(other)
        out = dict(self.terms)
        for word, coeff in other.terms.items():
            acc = out.get(word)
            total = coeff if acc is None else acc + coeff
            if total:
                out[word] = total
            elif acc is not None:
                del out[word]
        return NcPolynomial(self.varset, self.field, out, min(self.cap, other.cap))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, FieldElement)):
            other = NcPolynomial.constant(self.varset, self.field, other, self.cap)
        return self + (-other)

    def __neg__(self):
        return NcPolynomial(
            self.varset, self.field, {w: -c for w, c in self.terms.items()}, self.cap
        )

    def scale(self, c) -> "NcPolynomial":
        if not isinstance(c, FieldElement):
            c = self.field.element(c)
        if not c:
            return NcPolynomial.zero(self.varset, self.field, self.cap)
        return NcPolynomial(
            self.varset, self.field, {w: c * v for w, v in self.terms.items()}, self.cap
        )

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return nc_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return (
            self.varset == other.varset
            and self.field.modulus == other.field.modulus
            and self.terms == other.terms
        )

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"NcPolynomial({fmt_nc(self)})"


def nc_mul(p: NcPolynomial, q: NcPolynomial) -> NcPolynomial:
    """Free-algebra product; word order is preserved, never sorted."""
    p._check_compatible(q)
    cap = min(p.cap, q.cap)
    out = {}
    for wp, cp in p.terms.items():
        for wq, cq in q.terms.items():
            coeff = cp * cq
            if not coeff:
                continue
            word = wp + wq
            acc = out.get(word)
            total = coeff if acc is None else acc + coeff
            if total:
                out[word] = total
                if len(out) > cap:
                    raise CapExceeded(f"product exceeds monomial cap {cap}")
            elif acc is not None:
                del out[word]
    return NcPolynomial(p.varset, p.field, out, cap)


def coefficient(p: NcPolynomial, word) -> FieldElement:
    return p.coefficient(word)


def derivative(p: NcPolynomial, word, side: str = "right") -> NcPolynomial:
    """Directional derivative with respect to the monomial ``word``.

    side="right": collects u with u*word in the support, returning
    sum coeff(u*word) * u.   side="left" mirrors it.
    """
    m = tuple(word)
    k = len(m)
    out = {}
    for w, c in p.terms.items():
        if len(w) < k:
            continue
        if side == "right":
            if w[len(w) - k :] == m:
                out[w[: len(w) - k]] = c
        elif side == "left":
            if w[:k] == m:
                out[w[k:]] = c
        else:
            raise ValueError("side must be 'left' or 'right'")
    return NcPolynomial(p.varset, p.field, out, p.cap)


# ---------------- commutative image ----------------


class CPolynomial:
    """A sparse commutative polynomial, keyed by exponent vectors."""

    __slots__ = ("varset", "field", "terms")

    def __init__(self, varset: VarSet, field: Field, terms=None):
        self.varset = varset
        self.field = field
        clean = {}
        if terms:
            for exps, coeff in terms.items():
                if not isinstance(coeff, FieldElement):
                    coeff = field.element(coeff)
                if coeff:
                    clean[tuple(exps)] = coeff
        self.terms = clean

    @classmethod
    def zero(cls, varset, field):
        return cls(varset, field, {})

    @classmethod
    def constant(cls, varset, field, value):
        return cls(varset, field, {(0,) * len(varset): value})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps) -> FieldElement:
        return self.terms.get(tuple(exps), self.field.zero())

    def __add__(self, other):
        if self.varset != other.varset:
            raise VarSetMismatch(f"{self.varset} vs {other.varset}")
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = out.get(exps)
            total = coeff if acc is None else acc + coeff
            if total:
                out[exps] = total
            elif acc is not None:
                del out[exps]
        return CPolynomial(self.varset, self.field, out)

    def __neg__(self):
        return CPolynomial(self.varset, self.field, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        if self.varset != other.varset:
            raise VarSetMismatch(f"{self.varset} vs {other.varset}")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                coeff = c1 * c2
                if not coeff:
                    continue
                key = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(key)
                total = coeff if acc is None else acc + coeff
                if total:
                    out[key] = total
                elif acc is not None:
                    del out[key]
        return CPolynomial(self.varset, self.field, out)

    def __rmul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c):
        if not isinstance(c, FieldElement):
            c = self.field.element(c)
        return CPolynomial(self.varset, self.field, {e: c * v for e, v in self.terms.items()})

    def evaluate(self, point) -> FieldElement:
        total = self.field.zero()
        for exps, coeff in self.terms.items():
            v = coeff
            for x, e in zip(point, exps):
                if e:
                    v = v * (x**e)
            total = total + v
        return total

    def __eq__(self, other):
        if not isinstance(other, CPolynomial):
            return NotImplemented
        return self.varset == other.varset and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "CPolynomial(0)"
        bits = []
        for exps in sorted(self.terms):
            mono = "*".join(
                f"{self.varset.name(i)}^{e}" if e > 1 else self.varset.name(i)
                for i, e in enumerate(exps)
                if e
            )
            bits.append(f"{self.terms[exps]}" + (f"*{mono}" if mono else ""))
        return "CPolynomial(" + " + ".join(bits) + ")"


def commutative_collapse(p: NcPolynomial) -> CPolynomial:
    """Project onto the commutative ring: each word becomes its exponent vector.

    Distinct words with equal letter counts merge, so cancellations that the
    free algebra kept apart (xy - yx) collapse to zero here.
    """
    n = len(p.varset)
    out = {}
    for word, coeff in p.terms.items():
        exps = [0] * n
        for i in word:
            exps[i] += 1
        key = tuple(exps)
        acc = out.get(key)
        total = coeff if acc is None else acc + coeff
        if total:
            out[key] = total
        elif acc is not None:
            del out[key]
    return CPolynomial(p.varset, p.field, out)


# ---------------- ordered power-sums and xi-patterns ----------------


def is_ordered_power_sum(p: NcPolynomial) -> bool:
    """True iff every monomial's variable indices are non-decreasing."""
    for word in p.terms:
        for a, b in zip(word, word[1:]):
            if b < a:
                return False
    return True


@dataclass(frozen=True)
class XiPattern:
    """Exponents (l_1, ..., l_s) of a strict pattern xi1^l1 ... xis^ls.

    Strictness: l_1..l_{s-1} > 0 and l_s >= 0, with at least one symbol.
    """

    exponents: tuple

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        if not exps:
            raise ValueError("empty pattern arity")
        if any(e <= 0 for e in exps[:-1]) or exps[-1] < 0:
            raise ValueError(f"not a strict pattern: {exps}")
        if sum(exps) == 0:
            raise ValueError("empty pattern")

    @property
    def arity(self) -> int:
        return len(self.exponents)

    def exponent_sum(self) -> int:
        return sum(self.exponents)

    def word(self) -> tuple:
        out = []
        for i, e in enumerate(self.exponents):
            out.extend([i] * e)
        return tuple(out)


def xi_pattern_decompose(word, s: int):
    """Greedily split a word over xi1..xis into maximal strict patterns.

    Raises :class:`NotPatternProduct` when no such split exists (a pattern
    not starting at xi1, a skipped middle index, or a word ending before
    xi_{s-1} is reached).
    """
    patterns = []
    cur = None
    level = 0  # 1-based index of the run we are currently inside
    for idx in word:
        lev = idx + 1
        if not 1 <= lev <= s:
            raise NotPatternProduct(f"variable index {idx} outside arity {s}")
        if cur is None:
            if lev != 1:
                raise NotPatternProduct("pattern must start with xi1")
            cur = [0] * s
            cur[0] = 1
            level = 1
        elif lev == level:
            cur[lev - 1] += 1
        elif lev == level + 1:
            cur[lev - 1] += 1
            level = lev
        elif lev == 1 and level >= s - 1:
            patterns.append(XiPattern(tuple(cur)))
            cur = [0] * s
            cur[0] = 1
            level = 1
        else:
            raise NotPatternProduct(
                f"cannot continue pattern at xi{lev} while inside the xi{level} run"
            )
    if cur is not None:
        if level < s - 1:
            raise NotPatternProduct(f"word ends inside the xi{level} run before xi{s - 1}")
        patterns.append(XiPattern(tuple(cur)))
    return patterns


# ---------------- mixed commutative x free monomials ----------------


class MixedPolynomial:
    """Polynomial whose monomials pair a commutative part with a word.

    The substitution automata emit products like y2_1 * xi2 where the y/z
    part commutes and the xi part does not; keys here are
    (exponent vector over cvars, word over ncvars).
    """

    __slots__ = ("cvars", "ncvars", "field", "terms")

    def __init__(self, cvars: VarSet, ncvars: VarSet, field: Field, terms=None):
        self.cvars = cvars
        self.ncvars = ncvars
        self.field = field
        clean = {}
        if terms:
            for (exps, word), coeff in terms.items():
                if not isinstance(coeff, FieldElement):
                    coeff = field.element(coeff)
                if coeff:
                    clean[(tuple(exps), tuple(word))] = coeff
        self.terms = clean

    @classmethod
    def zero(cls, cvars, ncvars, field):
        return cls(cvars, ncvars, field, {})

    @classmethod
    def term(cls, cvars, ncvars, field, exps, word, coeff=1):
        return cls(cvars, ncvars, field, {(tuple(exps), tuple(word)): coeff})

    def _check(self, other):
        if self.cvars != other.cvars or self.ncvars != other.ncvars:
            raise VarSetMismatch("mixed polynomials over different variable sets")

    def is_zero(self):
        return not self.terms

    def coefficient(self, exps, word) -> FieldElement:
        return self.terms.get((tuple(exps), tuple(word)), self.field.zero())

    def support(self):
        return set(self.terms)

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = out.get(key)
            total = coeff if acc is None else acc + coeff
            if total:
                out[key] = total
            elif acc is not None:
                del out[key]
        return MixedPolynomial(self.cvars, self.ncvars, self.field, out)

    def __neg__(self):
        return MixedPolynomial(
            self.cvars, self.ncvars, self.field, {k: -c for k, c in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        self._check(other)
        out = {}
        for (e1, w1), c1 in self.terms.items():
            for (e2, w2), c2 in other.terms.items():
                coeff = c1 * c2
                if not coeff:
                    continue
                key = (tuple(a + b for a, b in zip(e1, e2)), w1 + w2)
                acc = out.get(key)
                total = coeff if acc is None else acc + coeff
                if total:
                    out[key] = total
                elif acc is not None:
                    del out[key]
        return MixedPolynomial(self.cvars, self.ncvars, self.field, out)

    def __rmul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c):
        if not isinstance(c, FieldElement):
            c = self.field.element(c)
        return MixedPolynomial(
            self.cvars, self.ncvars, self.field, {k: c * v for k, v in self.terms.items()}
        )

    def __eq__(self, other):
        if not isinstance(other, MixedPolynomial):
            return NotImplemented
        return (
            self.cvars == other.cvars
            and self.ncvars == other.ncvars
            and self.terms == other.terms
        )

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"MixedPolynomial({len(self.terms)} terms)"


# ---------------- canonical text form ----------------


def fmt_nc(p: NcPolynomial) -> str:
    """Canonical text form: terms sorted by (length, word), coefficients as
    field representatives, the constant monomial printed bare."""
    if not p.terms:
        return "0"
    parts = []
    for word in sorted(p.terms, key=lambda w: (len(w), w)):
        coeff = p.terms[word].value
        if word:
            mono = "*".join(p.varset.name(i) for i in word)
            parts.append(f"{coeff}*{mono}" if coeff != 1 else mono)
        else:
            parts.append(str(coeff))
    return " + ".join(parts)


def parse_nc(text: str, varset: VarSet, field: Field, cap: int = DEFAULT_MONOMIAL_CAP) -> NcPolynomial:
    """Parse the canonical text form back into a polynomial.

    Round-trips exactly with :func:`fmt_nc`; also tolerates missing
    coefficients (read as 1) and extra whitespace.
    """
    text = text.strip()
    terms = {}
    if text == "0" or not text:
        return NcPolynomial.zero(varset, field, cap)
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError("empty term in polynomial text")
        coeff = 1
        word = []
        for tok in chunk.split("*"):
            tok = tok.strip()
            if not tok:
                raise ValueError(f"malformed term {chunk!r}")
            if tok.lstrip("-").isdigit():
                coeff = coeff * int(tok)
            else:
                word.append(varset.index(tok))
        key = tuple(word)
        prev = terms.get(key, field.zero())
        terms[key] = prev + coeff
    return NcPolynomial(varset, field, terms, cap)


class NcPolyRing:
    """Ring adapter so circuits can be evaluated symbolically."""

    def __init__(self, varset: VarSet, field: Field, cap: int = DEFAULT_MONOMIAL_CAP):
        self.varset = varset
        self.field = field
        self.cap = cap

    def zero(self):
        return NcPolynomial.zero(self.varset, self.field, self.cap)

    def one(self):
        return NcPolynomial.constant(self.varset, self.field, 1, self.cap)

    def from_scalar(self, c):
        return NcPolynomial.constant(self.varset, self.field, c, self.cap)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def scale(self, c, a):
        return a.scale(c)
