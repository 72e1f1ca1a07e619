"""Constructors for the substitution-automaton stages, as matrix families.

Every stage is a :class:`~ncpit.matring.SubstMatrixFamily`: one matrix per
input letter with affine entries over an output alphabet, plus start and
accept states.  The stages all revolve around *pattern products*: words
over a leveled alphabet that factor into strict patterns (level-1 run,
then level-2 run, ... with every middle level present).  The factory
functions here build

* ``build_step1`` -- dimension-s overlay that guesses s-1 positions per
  degree-D1 factor, rewriting x-words into scalar-weighted xi-words whose
  structured part is a product of patterns with exponent sum exactly D1;
* ``build_small_degree`` -- the c-state cycle used instead when factors
  have degree c <= s-2, emitting position-indexed letters, no spurious
  part;
* ``build_sparsify`` -- keeps s-1 nondeterministically guessed factors
  verbatim and collapses the rest to scalars, weighting each collapsed
  factor by a chi scalar that records how many kept factors precede it;
* ``build_commutative_transform`` -- block-position relabeling that sends
  pattern products to segment-indexed letters, injectively;
* ``build_pattern_counter`` / ``build_remainder_nfa`` -- identity
  substitutions that filter or rescale monomials by pattern count, or by
  the number of patterns whose exponent sum hits a residue, modulo p.

``run_on_word`` and ``classify_paths`` are the word-level oracles used to
verify all of the above by brute force.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import Field, FieldElement, NotPrime, _is_prime
from .matring import AffineForm, Matrix, SubstMatrixFamily, family_transform
from .ncpoly import (
    DEFAULT_MONOMIAL_CAP,
    NcPolynomial,
    VarSet,
    xi_pattern_decompose,
)

DEFAULT_PATH_CAP = 10**6


class PathExplosion(RuntimeError):
    """Raised when path enumeration exceeds the configured cap."""


# ---------------- leveled alphabets ----------------


@dataclass(frozen=True)
class LeveledAlphabet:
    """An alphabet whose letters carry a 1-based level.

    Pattern structure is defined on levels: a strict pattern visits level
    1, then 2, ... with every level below the last occurring at least
    once.  The xi alphabet has one letter per level; the small-degree
    grid has n letters on each of its c levels.
    """

    varset: VarSet
    levels: tuple
    ends: frozenset = None
    jumps: frozenset = frozenset()

    def __post_init__(self):
        if len(self.levels) != len(self.varset):
            raise ValueError("one level per letter required")
        if self.levels and set(self.levels) != set(range(1, max(self.levels) + 1)):
            raise ValueError(f"levels must cover 1..max, got {sorted(set(self.levels))}")
        if self.ends is not None:
            k = max(self.levels) if self.levels else 0
            if not self.ends or not all(1 <= e <= k for e in self.ends):
                raise ValueError(f"ends must be a nonempty subset of 1..{k}")

    @classmethod
    def xi(cls, s: int) -> "LeveledAlphabet":
        return cls(VarSet.indexed("xi", s), tuple(range(1, s + 1)))

    @classmethod
    def grid(cls, rows: int, cols: int, prefix: str = "z") -> "LeveledAlphabet":
        vs = VarSet.grid(prefix, rows, cols)
        return cls(vs, tuple(r for r in range(1, rows + 1) for _ in range(cols)))

    @property
    def arity(self) -> int:
        return max(self.levels) if self.levels else 0

    def level(self, letter: int) -> int:
        return self.levels[letter]

    def terminators(self) -> frozenset:
        """Levels a factor word over this alphabet may end on.

        By default that follows from strictness (last level may carry
        exponent zero, so k-1 or k); alphabets produced by composing
        stages override it with the image of their input's end levels.
        """
        if self.ends is not None:
            return self.ends
        k = self.arity
        return frozenset({k} if k <= 1 else {k - 1, k})

    def successors(self, pos: int) -> frozenset:
        """Levels that may directly follow ``pos`` inside one factor word.

        Plain alphabets are strict (pos -> pos+1); composed alphabets add
        jump pairs for levels a factor word is allowed to skip.
        """
        return frozenset({pos + 1} | {j for (i, j) in self.jumps if i == pos})

    def __len__(self):
        return len(self.levels)


class _Table:
    """Accumulates transitions into per-letter sparse matrices."""

    def __init__(self, dim, in_vars, out_vars, fld):
        self.dim = dim
        self.in_vars = in_vars
        self.out_vars = out_vars
        self.fld = fld
        self.cells = {i: {} for i in range(len(in_vars))}

    def add(self, letter, frm, to, coeff=1, out=None):
        """Transition on input ``letter`` from ``frm`` to ``to`` emitting
        coeff (out=None) or coeff*out_letter."""
        if out is None:
            term = AffineForm.constant(self.out_vars, self.fld, coeff)
        else:
            term = AffineForm.letter(self.out_vars, self.fld, out, coeff)
        cell = self.cells[letter]
        key = (frm, to)
        cell[key] = term if key not in cell else cell[key] + term

    def family(self, name, start, accepts) -> SubstMatrixFamily:
        matrices = {
            i: Matrix(self.dim, cell) for i, cell in self.cells.items()
        }
        return SubstMatrixFamily(
            name=name,
            in_vars=self.in_vars,
            out_vars=self.out_vars,
            dim=self.dim,
            start=start,
            accepts=tuple(accepts),
            fld=self.fld,
            matrices=matrices,
        )


def _field_of(scalars) -> Field:
    for v in scalars.values():
        if isinstance(v, FieldElement):
            return v.field
    raise ValueError("cannot infer field: no FieldElement among the scalars")


# ---------------- stage 1: boundary-guessing overlay ----------------


def step1_scalar_names(s: int, n: int):
    """Names of the scalars the dimension-s overlay consumes: the guess
    weights y{k}_{i} (k-th guess, variable i) and the pass weights z{i}."""
    return tuple(VarSet.grid("y", s - 1, n).names) + tuple(VarSet.indexed("z", n).names)


def _overlay(s: int, n: int, yz_scalars: dict, returns: bool, tag: str) -> SubstMatrixFamily:
    if s < 2:
        raise ValueError(f"overlay needs s >= 2, got {s}")
    fld = _field_of(yz_scalars)
    in_vars = VarSet.indexed("x", n)
    out = LeveledAlphabet.xi(s)
    t = _Table(s, in_vars, out.varset, fld)

    def y(k, i):
        return yz_scalars[f"y{k}_{i}"]

    def z(i):
        return yz_scalars[f"z{i}"]

    for i in range(1, n + 1):
        a = i - 1
        for j in range(s):
            t.add(a, j, j, z(i), out=j)  # stay, emit xi_{j+1}
        for j in range(s - 1):
            t.add(a, j, j + 1, y(j + 1, i), out=j)  # advance, emit xi_{j+1}
        if returns:
            if s >= 3:
                t.add(a, s - 2, 0, y(s - 1, i), out=s - 2)  # return, emit xi_{s-1}
            t.add(a, s - 1, 0, z(i), out=s - 1)  # return, emit xi_s
    return t.family(f"{tag}(s={s},n={n})", 0, (s - 1,))


def build_step1(s: int, n: int, yz_scalars: dict) -> SubstMatrixFamily:
    """Dimension-s overlay automaton for degree-D1 factor products.

    States form a cycle q0..q_{s-1}.  Reading variable x_i at state q_j:
    stay (weight z_i, emit xi_{j+1}) or advance (weight y_{j+1,i}, emit
    xi_{j+1}).  Returns to q0 re-arm the guessing for the next factor:
    from q_{s-2} with weight y_{s-1,i} emitting xi_{s-1} and from
    q_{s-1} with weight z_i emitting xi_s.  Start q0, accept q_{s-1}.

    For s = 2 the advance-return would collide with the q0 self-loop, so
    only the z-weighted return is kept.
    """
    return _overlay(s, n, yz_scalars, True, "step1")


def build_one_pass(s: int, n: int, yz_scalars: dict) -> SubstMatrixFamily:
    """Single-factor variant of the overlay: the return edges are
    dropped, so an accepting run crosses q0..q_{s-1} exactly once and
    only degree-s-compatible single products survive.  Adding the
    returns back (:func:`wrap_with_returns`) recovers :func:`build_step1`
    for s >= 3."""
    return _overlay(s, n, yz_scalars, False, "onepass")


def build_small_degree(c: int, n: int, fld: Field) -> SubstMatrixFamily:
    """c-state cycle for factors of degree c: the variable read at cycle
    position l is renamed to the letter z{l}_{j}.  Start = accept = q0,
    so only words of length divisible by c survive; the renaming is a
    bijection on monomials and there is no spurious part."""
    if c < 1:
        raise ValueError(f"cycle length must be >= 1, got {c}")
    in_vars = VarSet.indexed("x", n)
    out = LeveledAlphabet.grid(c, n)
    t = _Table(c, in_vars, out.varset, fld)
    for j in range(1, n + 1):
        a = j - 1
        for ell in range(1, c + 1):
            letter = out.varset.index(f"z{ell}_{j}")
            t.add(a, ell - 1, ell % c, 1, out=letter)
    return t.family(f"smalldeg(c={c},n={n})", 0, (0,))


# ---------------- stage 2: product sparsification ----------------


def build_sparsify(
    s: int,
    arity: int = None,
    zeta: dict = None,
    chi=None,
    alphabet: LeveledAlphabet = None,
) -> SubstMatrixFamily:
    """Keep s-1 guessed factors verbatim, collapse the rest to scalars.

    Dimension 4s-2.  State blocks per guess count i (how many factors
    were already kept verbatim): a collapsed-side run/past pair and a
    verbatim-side run/past pair.  With 1-based labels the boundary states
    sit at 4i+1 and the accepts are the last two states {4s-3, 4s-2}:
    "just finished the last kept factor" and "collapsed tail consumed".

    A collapsed factor's letters map to the per-letter scalars
    ``zeta[name]``; its first letter additionally carries ``chi[i]``, so
    the product of chi weights records where the kept factors sit.  A
    word must contain exactly s-1 kept factors to reach an accept state.
    """
    if s < 2:
        raise ValueError(f"sparsification needs s >= 2, got {s}")
    if alphabet is None:
        alphabet = LeveledAlphabet.xi(arity if arity is not None else s)
    k = alphabet.arity
    fld = _field_of(zeta)
    chi = tuple(chi)
    if len(chi) < s:
        raise ValueError(f"need {s} chi scalars, got {len(chi)}")
    dim = 4 * s - 2
    vs = alphabet.varset
    t = _Table(dim, vs, vs, fld)

    def pc(i):
        return 4 * i if i < s - 1 else 4 * s - 3

    def rc(i):
        return 4 * i + 1 if i < s - 1 else 4 * s - 5

    def rn(i):
        return 4 * i + 2

    def pn(i):
        return 4 * i + 3 if i < s - 2 else 4 * s - 4

    def zt(a):
        return zeta[vs.name(a)]

    def boundary(u, a, i):
        """New factor starts at state u with i factors already kept."""
        t.add(a, u, rc(i) if k >= 2 else pc(i), zt(a) * chi[i])
        if i <= s - 2:
            t.add(a, u, rn(i) if k >= 2 else pn(i), 1, out=a)

    for a in range(len(vs)):
        lvl = alphabet.level(a)
        if k == 1:
            # Single-level alphabets: every letter is a whole factor, so
            # boundary states chain directly.
            for i in range(s):
                boundary(pc(i), a, i)
            for i in range(s - 1):
                t.add(a, pn(i), pc(i + 1), zt(a) * chi[i + 1])
                if i + 1 <= s - 2:
                    t.add(a, pn(i), pn(i + 1), 1, out=a)
            continue
        for i in range(s):
            if lvl == 1:
                t.add(a, rc(i), rc(i), zt(a))
                boundary(pc(i), a, i)
            else:
                t.add(a, rc(i), pc(i), zt(a))
                t.add(a, pc(i), pc(i), zt(a))
        for i in range(s - 1):
            if lvl == 1:
                t.add(a, rn(i), rn(i), 1, out=a)
                boundary(pn(i), a, i + 1)
            else:
                t.add(a, rn(i), pn(i), 1, out=a)
                t.add(a, pn(i), pn(i), 1, out=a)

    return t.family(
        f"sparsify(s={s},k={k})", pc(0), (pn(s - 2), pc(s - 1))
    )


# ---------------- stage 3: commutative relabeling ----------------


def com_output_alphabet(blocks: int, alphabet: LeveledAlphabet) -> LeveledAlphabet:
    """Output alphabet of the relabeling stage: w{seg}_{li} for segment
    seg in 1..blocks*arity and letter index li; the segment is the level.

    Pipeline words entering the stage carry blocks-1 factors, so output
    words end in segment (blocks-2)*k + e for an input end level e; that
    set is recorded as ``ends``.  Skipped segments (input jumps shifted
    into each block, plus the block boundary when a factor stops one
    level early) are recorded as ``jumps`` so that downstream relabeling
    stages can follow them.
    """
    k = max(alphabet.arity, 1)
    nletters = len(alphabet)
    names = tuple(
        f"w{seg}_{li}" for seg in range(1, blocks * k + 1) for li in range(1, nletters + 1)
    )
    levels = tuple(seg for seg in range(1, blocks * k + 1) for _ in range(nletters))
    term = alphabet.terminators()
    ends = None
    if blocks >= 2:
        ends = frozenset((blocks - 2) * k + e for e in term)
    jumps = set()
    for b in range(blocks):
        for (i, j) in alphabet.jumps:
            jumps.add((b * k + i, b * k + j))
        if b + 1 < blocks:
            for e in term:
                if e != k:
                    jumps.add((b * k + e, (b + 1) * k + 1))
    return LeveledAlphabet(VarSet(names), levels, ends=ends, jumps=frozenset(jumps))


def build_commutative_transform(
    arity: int = None,
    blocks: int = None,
    fld: Field = None,
    alphabet: LeveledAlphabet = None,
) -> SubstMatrixFamily:
    """Relabel a product of ``blocks`` patterns segment by segment.

    State (block b, position j) loops on level-j letters and steps
    forward along the alphabet's successor relation, emitting the letter
    indexed by the target segment (b-1)*arity + position.  A level-1
    letter at an end position of the alphabet advances to the next
    block.  The map word -> relabeled word is injective on factor
    products.  Accepts are the valid factor-end positions of every
    block; with blocks = arity = s the dimension is s^2.
    """
    if alphabet is None:
        if arity is None or arity < 2:
            raise ValueError("arity >= 2 required without an explicit alphabet")
        alphabet = LeveledAlphabet.xi(arity)
    k = max(alphabet.arity, 1)
    if blocks is None:
        blocks = k
    if fld is None:
        raise ValueError("a field is required")
    out = com_output_alphabet(blocks, alphabet)
    nletters = len(alphabet)
    dim = blocks * k
    t = _Table(dim, alphabet.varset, out.varset, fld)

    def state(b, pos):
        return b * k + (pos - 1)

    def w(seg, a):
        return (seg - 1) * nletters + a

    term = alphabet.terminators()
    for a in range(nletters):
        lvl = alphabet.level(a)
        for b in range(blocks):
            if k == 1:
                if b + 1 < blocks:
                    t.add(a, state(b, 1), state(b + 1, 1), 1, out=w(b + 1, a))
                continue
            for pos in range(1, k + 1):
                if lvl == pos:
                    t.add(a, state(b, pos), state(b, pos), 1, out=w(b * k + pos, a))
                elif lvl in alphabet.successors(pos):
                    t.add(a, state(b, pos), state(b, lvl), 1, out=w(b * k + lvl, a))
                elif lvl == 1 and pos in term and b + 1 < blocks:
                    t.add(a, state(b, pos), state(b + 1, 1), 1, out=w((b + 1) * k + 1, a))

    if k == 1:
        accepts = tuple(range(dim))
    else:
        accepts = tuple(
            state(b, pos) for b in range(blocks) for pos in range(1, k + 1) if pos in term
        )
    return t.family(f"comtrans(b={blocks},k={k})", 0, sorted(set(accepts)))


# ---------------- coefficient modification ----------------


def _check_prime(p: int):
    if p < 2 or not _is_prime(p):
        raise NotPrime(f"{p} is not prime")


def build_pattern_counter(
    s: int,
    p: int,
    lam: int,
    fld: Field,
    alphabet: LeveledAlphabet = None,
) -> SubstMatrixFamily:
    """Identity substitution keeping only words with pattern count = lam
    (mod p).

    Dimension 3p: per residue r a boundary/run/past triple.  Transitions
    are deterministic -- the run/past pair tracks the current pattern and
    a level-1 letter from a past state closes it -- so acceptance happens
    at the states whose implied count is lam: the boundary state of
    residue lam (empty word) and the run/past pair of residue lam-1.
    """
    _check_prime(p)
    if not 0 <= lam < p:
        raise ValueError(f"residue {lam} outside [0, {p})")
    if alphabet is None:
        alphabet = LeveledAlphabet.xi(s)
    k = alphabet.arity
    dim = 3 * p
    t = _Table(dim, alphabet.varset, alphabet.varset, fld)

    def b(r):
        return 3 * (r % p)

    def run(r):
        return 3 * (r % p) + 1

    def past(r):
        return 3 * (r % p) + 2

    for a in range(len(alphabet)):
        lvl = alphabet.level(a)
        for r in range(p):
            if k == 1:
                t.add(a, b(r), b(r + 1), 1, out=a)
                continue
            if lvl == 1:
                t.add(a, b(r), run(r), 1, out=a)
                t.add(a, run(r), run(r), 1, out=a)
                t.add(a, past(r), run(r + 1), 1, out=a)
            else:
                t.add(a, run(r), past(r), 1, out=a)
                t.add(a, past(r), past(r), 1, out=a)

    accepts = (b(lam),) if k == 1 else (b(lam), run(lam - 1), past(lam - 1))
    return t.family(f"patcount(k={k},p={p},lam={lam})", b(0), sorted(set(accepts)))


def build_remainder_nfa(
    s: int,
    p: int,
    lam: int,
    fld: Field,
    alphabet: LeveledAlphabet = None,
) -> SubstMatrixFamily:
    """Identity substitution scaling each word by the number of its
    patterns whose exponent sum is lam (mod p).

    The start side consumes a prefix of whole patterns; at a boundary the
    automaton may commit to the next pattern and track its exponent sum
    through a run/past grid indexed by residue.  Exits: a level-1 letter
    after a committed pattern with sum lam reaches the all-consuming
    accept state (pattern not last); reading a letter that lands on a
    terminator level with new sum lam may instead jump to the dead accept
    state (pattern last), which survives only at word end.  Dimension
    2p+4; for alphabets with at most two levels the prefix run/past pair
    is merged (dimension 2p+3), which lets the automaton also commit in
    the middle of a level-1 run.  On such alphabets the scale counts
    level-1 suffix segments instead of patterns; the two notions agree
    on words whose level-1 runs all have length one.  Zero in, zero out
    holds regardless.
    """
    _check_prime(p)
    if not 0 <= lam < p:
        raise ValueError(f"residue {lam} outside [0, {p})")
    if alphabet is None:
        alphabet = LeveledAlphabet.xi(s)
    k = alphabet.arity
    vs = alphabet.varset
    merged = k <= 2
    if merged:
        pre_run = pre_past = 0
        grid0 = 1
    else:
        pre_run, pre_past = 0, 1
        grid0 = 2
    dim = grid0 + 2 * p + 2
    qf1 = grid0 + 2 * p
    qf2 = qf1 + 1
    term = alphabet.terminators()
    t = _Table(dim, vs, vs, fld)

    def gr(r):
        return grid0 + (r % p)

    def gp(r):
        return grid0 + p + (r % p)

    for a in range(len(vs)):
        lvl = alphabet.level(a)
        # prefix consumption
        if merged:
            t.add(a, pre_past, pre_past, 1, out=a)
        else:
            if lvl == 1:
                t.add(a, pre_run, pre_run, 1, out=a)
                t.add(a, pre_past, pre_run, 1, out=a)
            else:
                t.add(a, pre_run, pre_past, 1, out=a)
                t.add(a, pre_past, pre_past, 1, out=a)
        # committing to the next pattern (entry consumes its first letter)
        if lvl == 1:
            t.add(a, pre_past, gr(1), 1, out=a)
            if lvl in term and 1 % p == lam:
                t.add(a, pre_past, qf2, 1, out=a)
        # inside the committed pattern
        for r in range(p):
            nxt = (r + 1) % p
            if lvl == 1:
                t.add(a, gr(r), gr(nxt), 1, out=a)
                if r == lam:
                    t.add(a, gp(r), qf1, 1, out=a)
                if k == 1 and r == lam:
                    t.add(a, gr(r), qf1, 1, out=a)
            else:
                t.add(a, gr(r), gp(nxt), 1, out=a)
                t.add(a, gp(r), gp(nxt), 1, out=a)
            if lvl in term and nxt == lam:
                # the letter may be the committed pattern's last
                t.add(a, gr(r), qf2, 1, out=a)
                if lvl != 1:
                    t.add(a, gp(r), qf2, 1, out=a)
        t.add(a, qf1, qf1, 1, out=a)

    return t.family(
        f"remainder(k={k},p={p},lam={lam})", pre_past, (qf1, qf2)
    )


# ---------------- wrapping: add returns to the start state ----------------


def wrap_with_returns(fam: SubstMatrixFamily) -> SubstMatrixFamily:
    """Duplicate every accept-bound edge into the start column so the
    automaton may restart after each accepted segment.  The accept set is
    unchanged; applied to a one-pass overlay this yields the cyclic
    factor-product form."""
    matrices = {}
    for i, m in fam.matrices.items():
        entries = dict(m.entries)
        for (r, c), v in m.entries.items():
            if c in fam.accepts and c != fam.start:
                key = (r, fam.start)
                entries[key] = v if key not in entries else entries[key] + v
        matrices[i] = Matrix(fam.dim, entries)
    return SubstMatrixFamily(
        name=f"wrap({fam.name})",
        in_vars=fam.in_vars,
        out_vars=fam.out_vars,
        dim=fam.dim,
        start=fam.start,
        accepts=fam.accepts,
        fld=fam.fld,
        matrices=matrices,
    )


# ---------------- word-level oracles ----------------


def run_on_word(fam: SubstMatrixFamily, word, cap: int = DEFAULT_MONOMIAL_CAP) -> NcPolynomial:
    """Sum over the accept entries of the start row after processing one
    word; equals the sum over accepting paths of their emissions."""
    poly = NcPolynomial.monomial(fam.in_vars, fam.fld, tuple(word))
    mat = family_transform(fam, poly, cap)
    zero = NcPolynomial.zero(fam.out_vars, fam.fld, cap)
    total = zero
    for f in fam.accepts:
        total = total + mat.entry(fam.start, f, zero)
    return total


def _edges(fam: SubstMatrixFamily):
    """Per-letter edge lists (from, to, coeff, out-letter-or-None),
    splitting affine entries into parallel edges."""
    out = {}
    for a, m in fam.matrices.items():
        edges = []
        for (r, c), v in m.entries.items():
            form = v if isinstance(v, AffineForm) else AffineForm.constant(
                fam.out_vars, fam.fld, v
            )
            if form.const:
                edges.append((r, c, form.const, None))
            for li, coeff in form.linear.items():
                edges.append((r, c, coeff, li))
        out[a] = edges
    return out


@dataclass(frozen=True)
class PathTrace:
    """One accepting computation path on one word."""

    word: tuple
    states: tuple
    output_word: tuple
    coeff: FieldElement
    structured: bool

    @property
    def kind(self) -> str:
        return "structured" if self.structured else "spurious"


def classify_paths(
    fam: SubstMatrixFamily,
    word,
    d1: int,
    path_cap: int = DEFAULT_PATH_CAP,
):
    """Enumerate accepting paths of the overlay on one word and classify
    each: structured iff the path re-enters the start state exactly at
    the factor boundaries (positions d1, 2*d1, ...).  Self-loops at the
    start state do not count as re-entries; they occur inside every
    initial level-1 run.

    Asserts, per trace, that structured-ness coincides with every output
    pattern having exponent sum d1.
    """
    word = tuple(word)
    if d1 < 1 or len(word) % d1 != 0:
        raise ValueError(f"word length {len(word)} not a multiple of d1={d1}")
    edges = _edges(fam)
    s = len(fam.out_vars)
    traces = []
    explored = 0
    # iterative DFS over (position, state, emitted, coeff, state sequence)
    work = [(0, fam.start, (), fam.fld.one(), (fam.start,))]
    while work:
        pos, state, emitted, coeff, seq = work.pop()
        explored += 1
        if explored > path_cap:
            raise PathExplosion(f"more than {path_cap} partial paths")
        if pos == len(word):
            if state in fam.accepts:
                arrivals = {
                    i
                    for i in range(1, len(word))
                    if seq[i] == fam.start and seq[i - 1] != fam.start
                }
                wanted = set(range(d1, len(word), d1))
                structured = arrivals == wanted
                sums = [
                    pat.exponent_sum()
                    for pat in xi_pattern_decompose(emitted, s)
                ]
                assert structured == all(x == d1 for x in sums), (
                    f"boundary criterion and pattern sums disagree on {emitted}: "
                    f"{structured} vs {sums}"
                )
                traces.append(
                    PathTrace(word, seq, emitted, coeff, structured)
                )
            continue
        for (r, c, w8, li) in edges[word[pos]]:
            if r != state or not w8:
                continue
            work.append(
                (
                    pos + 1,
                    c,
                    emitted + ((li,) if li is not None else ()),
                    coeff * w8,
                    seq + (c,),
                )
            )
    return traces


# ---------------- transition-list view ----------------


@dataclass(frozen=True)
class AutomatonSpec:
    """Flat description of a family: every transition as a tuple
    (input letter, from, to, coefficient, output letter or None)."""

    name: str
    dim: int
    start: int
    accepts: tuple
    transitions: tuple

    @classmethod
    def from_family(cls, fam: SubstMatrixFamily) -> "AutomatonSpec":
        rows = []
        for a in sorted(fam.matrices):
            in_name = fam.in_vars.name(a)
            for (r, c, coeff, li) in sorted(
                _edges(fam)[a], key=lambda e: (e[0], e[1], e[3] if e[3] is not None else -1)
            ):
                out_name = fam.out_vars.name(li) if li is not None else None
                rows.append((in_name, r, c, coeff.value, out_name))
        if not fam.accepts:
            raise ValueError("family has no accept states")
        return cls(fam.name, fam.dim, fam.start, tuple(fam.accepts), tuple(rows))

    def reconstruct(self, in_vars: VarSet, out_vars: VarSet, fld: Field) -> dict:
        """Rebuild the per-letter matrices from the transition list."""
        t = _Table(self.dim, in_vars, out_vars, fld)
        for (in_name, r, c, coeff, out_name) in self.transitions:
            t.add(
                in_vars.index(in_name),
                r,
                c,
                coeff,
                out=None if out_name is None else out_vars.index(out_name),
            )
        return {i: Matrix(self.dim, t.cells[i]) for i in t.cells}


def dump_automaton(fam: SubstMatrixFamily) -> str:
    """Text dump: header, transitions, then coordinate triplets."""
    spec = AutomatonSpec.from_family(fam)
    lines = [
        f"name {spec.name}",
        f"dim {spec.dim}",
        f"start {spec.start}",
        "accepts " + " ".join(str(x) for x in spec.accepts),
        "transitions",
    ]
    for (in_name, r, c, coeff, out_name) in spec.transitions:
        emit = f"{coeff}" if out_name is None else f"{coeff}*{out_name}"
        lines.append(f"  {in_name}: {r} -> {c}  {emit}")
    lines.append("matrices")
    for a in sorted(fam.matrices):
        lines.append(f"  letter {fam.in_vars.name(a)}")
        m = fam.matrices[a]
        for (r, c) in sorted(m.entries):
            lines.append(f"    {r} {c} {m.entries[(r, c)]!r}")
    return "\n".join(lines) + "\n"
