"""Sparse square matrices, Kronecker products, and substitution families.

A *substitution matrix family* assigns to each input letter x_i a square
matrix whose entries are affine forms over an output alphabet
(c_0 + c_1*xi_1 + ... + c_k*xi_k).  Running the family over a word
multiplies the matrices in order; the (start, accept) entries of the
product are the outputs.  Extended linearly over words, this substitutes
each input polynomial with a vector of output polynomials.

Two families compose: the Kronecker combination

    C_i = A0_i (x) I  +  sum_k Ak_i (x) B_k

(with A0_i / Ak_i the constant and per-letter coefficient parts of the
outer matrix for x_i, and B_k the inner matrix for the k-th intermediate
letter) realises "run the outer family, then feed its output to the inner
one" in a single pass.  ``sequential_chain_outputs`` is the slow two-pass
evaluation used as the correctness oracle for ``compose_chain``.

Indices flatten row-major throughout: (r1, r2) -> r1 * dim2 + r2.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .field import Field, FieldElement
from .ncpoly import (
    DEFAULT_MONOMIAL_CAP,
    NcPolynomial,
    VarSet,
    VarSetMismatch,
)


class DimensionMismatch(ValueError):
    """Raised when matrix shapes (or family dims) do not line up."""


class UnsupportedEntryKinds(TypeError):
    """Raised when an operation meets entry types it cannot multiply."""


# ---------------- affine forms ----------------


class AffineForm:
    """c_0 + sum_i c_i * letter_i over an output alphabet.

    Substitution matrix entries live here: degree at most one in the output
    letters, with the constant standing for the empty output word.
    """

    __slots__ = ("alphabet", "field", "const", "linear")

    def __init__(self, alphabet: VarSet, field: Field, const=0, linear=None):
        self.alphabet = alphabet
        self.field = field
        if not isinstance(const, FieldElement):
            const = field.element(const)
        self.const = const
        clean = {}
        if linear:
            for i, c in linear.items():
                if not isinstance(c, FieldElement):
                    c = field.element(c)
                if c:
                    clean[int(i)] = c
        self.linear = clean

    @classmethod
    def constant(cls, alphabet, field, value):
        return cls(alphabet, field, value)

    @classmethod
    def letter(cls, alphabet, field, i, coeff=1):
        idx = alphabet.index(i) if isinstance(i, str) else int(i)
        return cls(alphabet, field, 0, {idx: coeff})

    def is_constant(self) -> bool:
        return not self.linear

    def __bool__(self):
        return bool(self.const) or bool(self.linear)

    def _check(self, other: "AffineForm"):
        if self.alphabet != other.alphabet:
            raise VarSetMismatch("affine forms over different alphabets")

    def __add__(self, other):
        if isinstance(other, (int, FieldElement)):
            return AffineForm(self.alphabet, self.field, self.const + other, self.linear)
        if not isinstance(other, AffineForm):
            return NotImplemented
        self._check(other)
        lin = dict(self.linear)
        for i, c in other.linear.items():
            acc = lin.get(i)
            total = c if acc is None else acc + c
            if total:
                lin[i] = total
            elif acc is not None:
                del lin[i]
        return AffineForm(self.alphabet, self.field, self.const + other.const, lin)

    __radd__ = __add__

    def __neg__(self):
        return AffineForm(
            self.alphabet, self.field, -self.const, {i: -c for i, c in self.linear.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AffineForm":
        if not isinstance(c, FieldElement):
            c = self.field.element(c)
        if not c:
            return AffineForm(self.alphabet, self.field, 0)
        return AffineForm(
            self.alphabet, self.field, self.const * c, {i: v * c for i, v in self.linear.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        if not isinstance(other, AffineForm):
            return NotImplemented
        self._check(other)
        if self.is_constant():
            return other.scale(self.const)
        if other.is_constant():
            return self.scale(other.const)
        raise UnsupportedEntryKinds(
            "product of two non-constant affine forms leaves the affine space"
        )

    __rmul__ = __mul__

    def evaluate(self, point) -> FieldElement:
        """Substitute a scalar for every letter."""
        total = self.const
        for i, c in self.linear.items():
            total = total + c * point[i]
        return total

    def to_ncpoly(self, cap: int = DEFAULT_MONOMIAL_CAP) -> NcPolynomial:
        terms = {(i,): c for i, c in self.linear.items()}
        if self.const:
            terms[()] = self.const
        return NcPolynomial(self.alphabet, self.field, terms, cap)

    def __eq__(self, other):
        if isinstance(other, (int, FieldElement)):
            return not self.linear and self.const == other
        if not isinstance(other, AffineForm):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.const == other.const
            and self.linear == other.linear
        )

    def __repr__(self):
        parts = []
        if self.const or not self.linear:
            parts.append(str(self.const))
        for i in sorted(self.linear):
            c = self.linear[i]
            name = self.alphabet.name(i)
            parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts)


def as_affine(entry, alphabet: VarSet, field: Field) -> AffineForm:
    if isinstance(entry, AffineForm):
        if entry.alphabet != alphabet:
            raise VarSetMismatch("entry over unexpected alphabet")
        return entry
    if isinstance(entry, (int, FieldElement)):
        return AffineForm.constant(alphabet, field, entry)
    raise UnsupportedEntryKinds(f"cannot treat {type(entry).__name__} as an affine form")


# ---------------- generic sparse square matrices ----------------


class Matrix:
    """Dict-backed sparse square matrix; entries are any ring elements
    that support +, *, and truthiness-as-nonzero."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries=None):
        self.dim = int(dim)
        clean = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < self.dim and 0 <= c < self.dim):
                    raise DimensionMismatch(f"entry ({r},{c}) outside {self.dim}x{self.dim}")
                if v:
                    clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def identity(cls, dim: int, one) -> "Matrix":
        return cls(dim, {(i, i): one for i in range(dim)})

    @classmethod
    def from_dense(cls, rows) -> "Matrix":
        dim = len(rows)
        entries = {}
        for r, row in enumerate(rows):
            if len(row) != dim:
                raise DimensionMismatch("matrix is not square")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = v
        return cls(dim, entries)

    def get(self, r: int, c: int):
        return self.entries.get((r, c))

    def entry(self, r: int, c: int, zero):
        return self.entries.get((r, c), zero)

    def nnz(self) -> int:
        return len(self.entries)

    def __bool__(self):
        return bool(self.entries)

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} vs {other.dim}")
        out = dict(self.entries)
        for key, v in other.entries.items():
            acc = out.get(key)
            total = v if acc is None else acc + v
            if total:
                out[key] = total
            elif acc is not None:
                del out[key]
        m = Matrix.__new__(Matrix)
        m.dim = self.dim
        m.entries = out
        return m

    def __neg__(self):
        m = Matrix.__new__(Matrix)
        m.dim = self.dim
        m.entries = {k: -v for k, v in self.entries.items()}
        return m

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} vs {other.dim}")
        rows_b = {}
        for (r, c), v in other.entries.items():
            rows_b.setdefault(r, []).append((c, v))
        out = {}
        for (r, k), a in self.entries.items():
            row = rows_b.get(k)
            if not row:
                continue
            for c, b in row:
                prod = a * b
                if not prod:
                    continue
                key = (r, c)
                acc = out.get(key)
                total = prod if acc is None else acc + prod
                if total:
                    out[key] = total
                elif acc is not None:
                    del out[key]
        m = Matrix.__new__(Matrix)
        m.dim = self.dim
        m.entries = out
        return m

    def scale(self, c) -> "Matrix":
        out = {}
        for key, v in self.entries.items():
            prod = v * c
            if prod:
                out[key] = prod
        m = Matrix.__new__(Matrix)
        m.dim = self.dim
        m.entries = out
        return m

    def map_entries(self, fn) -> "Matrix":
        out = {}
        for key, v in self.entries.items():
            w = fn(v)
            if w:
                out[key] = w
        m = Matrix.__new__(Matrix)
        m.dim = self.dim
        m.entries = out
        return m

    def to_dense(self, zero):
        return [
            [self.entries.get((r, c), zero) for c in range(self.dim)] for r in range(self.dim)
        ]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __repr__(self):
        return f"Matrix(dim={self.dim}, nnz={len(self.entries)})"


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product with row-major index flattening.

    Entry ((ra, rb), (ca, cb)) of the product sits at row ra * dim(b) + rb,
    column ca * dim(b) + cb.  Entry kinds must admit a product (scalar with
    anything; two non-constant affine forms raise
    :class:`UnsupportedEntryKinds`).
    """
    db = b.dim
    out = {}
    for (ra, ca), va in a.entries.items():
        for (rb, cb), vb in b.entries.items():
            prod = va * vb
            if prod:
                out[(ra * db + rb, ca * db + cb)] = prod
    m = Matrix.__new__(Matrix)
    m.dim = a.dim * db
    m.entries = out
    return m


def decompose_affine(mat: Matrix, alphabet: VarSet, field: Field):
    """Split an affine-entry matrix as (A0, [A_1..A_k]) with scalar entries:
    mat = A0 + sum_i letter_i * A_i  (entrywise)."""
    const_entries = {}
    letter_entries = [dict() for _ in range(len(alphabet))]
    for key, v in mat.entries.items():
        form = as_affine(v, alphabet, field)
        if form.const:
            const_entries[key] = form.const
        for i, c in form.linear.items():
            letter_entries[i][key] = c
    a0 = Matrix(mat.dim, const_entries)
    return a0, [Matrix(mat.dim, e) for e in letter_entries]


# ---------------- substitution matrix families ----------------


@dataclass
class SubstMatrixFamily:
    """Per-letter matrices plus start/accept bookkeeping.

    ``matrices[i]`` is the matrix substituted for input letter i.  Entries
    are affine forms over ``out_vars`` (plain field scalars are read as
    constant forms).
    """

    name: str
    in_vars: VarSet
    out_vars: VarSet
    dim: int
    start: int
    accepts: tuple
    fld: Field
    matrices: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.accepts = tuple(self.accepts)
        if not 0 <= self.start < self.dim:
            raise DimensionMismatch(f"start state {self.start} outside dim {self.dim}")
        for f in self.accepts:
            if not 0 <= f < self.dim:
                raise DimensionMismatch(f"accept state {f} outside dim {self.dim}")
        if len(self.matrices) != len(self.in_vars):
            raise DimensionMismatch(
                f"{len(self.matrices)} matrices for {len(self.in_vars)} input letters"
            )
        for i, m in self.matrices.items():
            if m.dim != self.dim:
                raise DimensionMismatch(f"matrix for letter {i} has dim {m.dim}, family {self.dim}")

    def matrix_for(self, var) -> Matrix:
        i = self.in_vars.index(var) if isinstance(var, str) else int(var)
        return self.matrices[i]

    def scalarize(self, point) -> dict:
        """Evaluate every entry at a scalar point for the output letters,
        yielding plain field matrices keyed by input letter index."""
        out = {}
        for i, m in self.matrices.items():
            out[i] = m.map_entries(
                lambda v: as_affine(v, self.out_vars, self.fld).evaluate(point)
            )
        return out

    def symbolic_matrices(self, cap: int = DEFAULT_MONOMIAL_CAP) -> dict:
        """Matrices with free-algebra entries over the output alphabet."""
        out = {}
        for i, m in self.matrices.items():
            out[i] = m.map_entries(
                lambda v: as_affine(v, self.out_vars, self.fld).to_ncpoly(cap)
            )
        return out


def compose_pair(outer: SubstMatrixFamily, inner: SubstMatrixFamily) -> SubstMatrixFamily:
    """One-pass family equivalent to outer-then-inner substitution."""
    if outer.out_vars != inner.in_vars:
        raise VarSetMismatch(
            f"outer emits {outer.out_vars} but inner consumes {inner.in_vars}"
        )
    if outer.fld.modulus != inner.fld.modulus:
        raise ValueError("families over different fields")
    d2 = inner.dim
    ident = Matrix.identity(d2, inner.fld.one())
    matrices = {}
    for i in range(len(outer.in_vars)):
        a0, letters = decompose_affine(outer.matrices[i], outer.out_vars, outer.fld)
        acc = kron(a0, ident)
        for k, ak in enumerate(letters):
            if not ak:
                continue
            acc = acc + kron(ak, inner.matrices[k])
        matrices[i] = acc
    return SubstMatrixFamily(
        name=f"{outer.name}>{inner.name}",
        in_vars=outer.in_vars,
        out_vars=inner.out_vars,
        dim=outer.dim * d2,
        start=outer.start * d2 + inner.start,
        accepts=tuple(f1 * d2 + f2 for f1 in outer.accepts for f2 in inner.accepts),
        fld=outer.fld,
        matrices=matrices,
    )


def compose_chain(families) -> SubstMatrixFamily:
    families = list(families)
    if not families:
        raise ValueError("empty chain")
    acc = families[0]
    for fam in families[1:]:
        acc = compose_pair(acc, fam)
    return acc


# ---------------- evaluation and the sequential oracle ----------------


class MatrixRing:
    """Ring adapter over dim x dim matrices for generic evaluation."""

    def __init__(self, dim: int, fld: Field, entry_one=None):
        self.dim = dim
        self.fld = fld
        self.entry_one = fld.one() if entry_one is None else entry_one

    def zero(self):
        return Matrix(self.dim)

    def one(self):
        return Matrix.identity(self.dim, self.entry_one)

    def from_scalar(self, c):
        return self.one().scale(c)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def scale(self, c, a):
        return a.scale(c)


def evaluate_poly_on_matrices(poly: NcPolynomial, matrices, ring: MatrixRing) -> Matrix:
    """sum_w c_w * prod_j matrices[w_j]; the empty word is the identity."""
    out = ring.zero()
    for word, coeff in poly.terms.items():
        m = ring.one()
        for i in word:
            m = ring.mul(m, matrices[i])
        out = ring.add(out, ring.scale(coeff, m))
    return out


def family_transform(
    family: SubstMatrixFamily, poly: NcPolynomial, cap: int = DEFAULT_MONOMIAL_CAP
) -> Matrix:
    """Push a polynomial through one family symbolically; entries of the
    result are free-algebra polynomials over the family's output alphabet."""
    if poly.varset != family.in_vars:
        raise VarSetMismatch(f"polynomial over {poly.varset}, family consumes {family.in_vars}")
    one = NcPolynomial.constant(family.out_vars, family.fld, 1, cap)
    ring = MatrixRing(family.dim, family.fld, entry_one=one)
    return evaluate_poly_on_matrices(poly, family.symbolic_matrices(cap), ring)


def sequential_chain_outputs(families, poly: NcPolynomial, cap: int = DEFAULT_MONOMIAL_CAP):
    """Oracle for :func:`compose_chain`.

    Evaluates stage by stage: run the first family on the polynomial, read
    off each accept entry as a polynomial over the intermediate alphabet,
    recurse.  Returns {(f_1, ..., f_K): final polynomial}.
    """
    families = list(families)
    fam = families[0]
    mat = family_transform(fam, poly, cap)
    zero = NcPolynomial.zero(fam.out_vars, fam.fld, cap)
    out = {}
    for f in fam.accepts:
        g = mat.entry(fam.start, f, zero)
        if len(families) == 1:
            out[(f,)] = g
        else:
            for rest, val in sequential_chain_outputs(families[1:], g, cap).items():
                out[(f,) + rest] = val
    return out


def flatten_accept(families, accept_tuple) -> int:
    """Map a per-stage accept tuple to the composed family's flat index."""
    families = list(families)
    flat = accept_tuple[0]
    for fam, f in zip(families[1:], accept_tuple[1:]):
        flat = flat * fam.dim + f
    return flat
