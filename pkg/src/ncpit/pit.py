"""Randomized non-zeroness drivers for layered non-commutative circuits.

A driver never opens the box: it builds the substitution pipeline that
matches the declared depth, draws every commutative scalar from a seeded
generator, evaluates the black box on the resulting matrices and reads
the accept entries.  Any non-zero entry certifies a non-zero polynomial;
an all-zero answer is repeated over independent trials and, for depth 5
and above, over a sweep of coefficient-modification cells before the
probabilistic ZERO verdict is returned.

Strategies:

* ``pit_depth3`` -- single overlay pass, matrices of dimension exactly s.
* ``pit_depth5`` -- overlay / sparsify / relabel pipeline plus the
  counter and remainder sweeps.
* ``pit_general`` -- delegates small depths and, from depth 7 on, wraps
  the depth-(d-2) pipeline with return edges and reapplies the outer
  stages on the composed output alphabet.
* ``pit_oracle`` -- exact brute-force expansion, the ground truth.
* ``al_baseline`` -- generic random-matrix substitution of dimension
  floor(D/2)+1 for comparison.
"""

import json
import logging
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
import sympy
from scipy import sparse

from .automata import (
    DEFAULT_PATH_CAP,
    LeveledAlphabet,
    build_commutative_transform,
    build_one_pass,
    build_pattern_counter,
    build_remainder_nfa,
    build_small_degree,
    build_sparsify,
    build_step1,
    com_output_alphabet,
    step1_scalar_names,
    wrap_with_returns,
)
from .circuit import PlusRegularCircuit, evaluate as circuit_evaluate, expand
from .field import Field, FieldElement, MERSENNE61, SeededRng, make_prime_field, sample_uniform
from .matring import (
    Matrix,
    as_affine,
    compose_chain,
    decompose_affine,
)
from .ncpoly import DEFAULT_MONOMIAL_CAP, VarSet

log = logging.getLogger(__name__)

# 21-bit prime: products of reduced entries accumulate safely in int64
# for dimensions up to 2^20, so the sparse integer backend never wraps.
FAST_FIELD = 2097143


class DepthMismatch(ValueError):
    """The driver was handed a box of a different depth."""


class EvenDepth(ValueError):
    """Layered circuits have odd depth 2d-1; even depths are malformed."""


class MissingDegreeHint(ValueError):
    """The requested plan needs layer degrees the box did not declare."""


class DegreeTooLarge(ValueError):
    """The required matrix dimension exceeds the configured cap."""


# ---------------- configuration and reports ----------------


@dataclass(frozen=True)
class PitConfig:
    """Knobs shared by every driver; all randomness flows from ``seed``."""

    field: Field = None
    seed: int = 0
    trials: int = 5
    monomial_cap: int = DEFAULT_MONOMIAL_CAP
    path_cap: int = DEFAULT_PATH_CAP
    dim_cap: int = 1 << 17
    strict: bool = False


@dataclass(frozen=True)
class PitReport:
    """Single-object run record; serialization is byte-stable per seed."""

    verdict: str
    strategy: str
    N: int
    trials: int
    seed: int
    field_modulus: int
    stages: tuple = ()
    sweep: tuple = ()
    witness: dict = None

    @property
    def nonzero(self) -> bool:
        return self.verdict == "NONZERO"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "strategy": self.strategy,
            "N": self.N,
            "trials": self.trials,
            "seed": self.seed,
            "field": self.field_modulus,
            "stages": list(self.stages),
            "sweep": [dict(cell) for cell in self.sweep],
            "witness": dict(self.witness) if self.witness is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


# ---------------- the black box ----------------


@dataclass(frozen=True)
class BlackBox:
    """Evaluation access to a polynomial plus its declared shape.

    ``evaluate(assignment, ring)`` receives matrices keyed by the
    canonical variable names x1..xn and must return their image under
    the polynomial.  ``s`` is the top fan-in, ``d`` the odd depth;
    ``hints`` may carry ``degrees``, the per-layer product arities
    bottom-up ((d+1)/2 - 1 entries).
    """

    evaluate: object
    s: int
    n: int
    d: int
    hints: dict = dataclass_field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1 or self.d % 2 == 0:
            raise EvenDepth(f"depth must be odd and positive, got {self.d}")
        if self.s < 1 or self.n < 1:
            raise ValueError(f"need s >= 1 and n >= 1, got s={self.s}, n={self.n}")

    def degrees(self):
        degrees = self.hints.get("degrees")
        return None if degrees is None else tuple(int(x) for x in degrees)


def blackbox_from_circuit(c: PlusRegularCircuit) -> BlackBox:
    """Wrap a circuit; the adapter renames x1..xn to the circuit's own
    variable order and forwards the declared layer degrees as hints."""
    d = c.depth
    if d is None:
        raise DepthMismatch("circuit has no plus layers; cannot infer a depth")
    names = c.variables

    def ev(assignment, ring):
        mapped = {names[i]: assignment[f"x{i + 1}"] for i in range(len(names))}
        return circuit_evaluate(c, mapped, ring=ring)

    hints = {"modulus": c.field.modulus}
    if c.degrees is not None:
        hints["degrees"] = c.degrees
    return BlackBox(evaluate=ev, s=c.top_fanin or 1, n=len(names), d=d, hints=hints)


def _resolve_field(bb: BlackBox, cfg: PitConfig, default: int) -> Field:
    """Evaluation field: explicit config wins, then the modulus the box
    declares (a circuit's verdict only makes sense in its own
    characteristic; zero-planting cancels mod that prime), then the
    strategy default."""
    if cfg.field is not None:
        return cfg.field
    return make_prime_field(bb.hints.get("modulus") or default)


# ---------------- scalar draws ----------------


def dlsz_scalarize(varset: VarSet, fld: Field, rng: SeededRng) -> dict:
    """One independent uniform draw per name, in name order."""
    return {name: sample_uniform(fld, rng) for name in varset.names}


def find_distinguishing_prime(k: int, m: int, n: int) -> int:
    """Smallest prime p with k != m mod p; for 0 <= k != m < n it stays
    within ceil(4.4 * log2 n) because k - m has fewer than log2 n prime
    factors and primorials outgrow 2^(p / 4.4)."""
    if k == m:
        raise ValueError(f"{k} and {m} are equal; no prime separates them")
    bound = math.ceil(4.4 * math.log2(max(n, 2)))
    p = 2
    while k % p == m % p:
        p = sympy.nextprime(p)
    if p > bound:
        log.warning("distinguishing prime %d exceeds the bound %d for n=%d", p, bound, n)
    return p


# ---------------- numeric matrix backends ----------------


def _as_int(c) -> int:
    return int(c.value) if isinstance(c, FieldElement) else int(c)


class DenseMat:
    """Dense list-of-rows matrix over Z/p with plain integer entries;
    the workhorse for small dimensions and large moduli."""

    __slots__ = ("rows", "p")

    def __init__(self, rows, p):
        self.rows = rows
        self.p = p

    @classmethod
    def zeros(cls, dim, p):
        return cls([[0] * dim for _ in range(dim)], p)

    @classmethod
    def identity(cls, dim, p, v=1):
        v %= p
        rows = [[v if r == c else 0 for c in range(dim)] for r in range(dim)]
        return cls(rows, p)

    @property
    def dim(self):
        return len(self.rows)

    def __add__(self, other):
        p = self.p
        return DenseMat(
            [[(x + y) % p for x, y in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], p
        )

    def __mul__(self, other):
        p = self.p
        cols = list(zip(*other.rows))
        return DenseMat(
            [[sum(x * y for x, y in zip(row, col)) % p for col in cols] for row in self.rows], p
        )

    def scale(self, c):
        c = _as_int(c) % self.p
        p = self.p
        return DenseMat([[x * c % p for x in row] for row in self.rows], p)

    def entry(self, r, c) -> int:
        return self.rows[r][c] % self.p

    def __bool__(self):
        return any(any(row) for row in self.rows)


class CsrMat:
    """Sparse int64 matrix over Z/p, p < 2^21; entries are reduced after
    every operation so row sums never overflow."""

    __slots__ = ("m", "p")

    def __init__(self, m, p):
        self.m = m
        self.p = p

    @classmethod
    def zeros(cls, dim, p):
        return cls(sparse.csr_matrix((dim, dim), dtype=np.int64), p)

    @classmethod
    def identity(cls, dim, p, v=1):
        return cls(sparse.identity(dim, dtype=np.int64, format="csr") * (v % p), p)

    @property
    def dim(self):
        return self.m.shape[0]

    def __add__(self, other):
        s = self.m + other.m
        s.data %= self.p
        s.eliminate_zeros()
        return CsrMat(s, self.p)

    def __mul__(self, other):
        s = self.m @ other.m
        s.data %= self.p
        s.eliminate_zeros()
        return CsrMat(s, self.p)

    def scale(self, c):
        s = self.m * (_as_int(c) % self.p)
        s.data %= self.p
        s.eliminate_zeros()
        return CsrMat(s, self.p)

    def entry(self, r, c) -> int:
        return int(self.m[r, c]) % self.p

    def __bool__(self):
        return self.m.nnz > 0


class PitMatRing:
    """Ring adapter over the numeric backends for circuit evaluation."""

    def __init__(self, dim: int, modulus: int, fast: bool = None):
        self.dim = dim
        self.p = modulus
        self.fast = modulus < (1 << 21) if fast is None else fast
        self._cls = CsrMat if self.fast else DenseMat

    def zero(self):
        return self._cls.zeros(self.dim, self.p)

    def one(self):
        return self._cls.identity(self.dim, self.p)

    def from_scalar(self, c):
        return self._cls.identity(self.dim, self.p, _as_int(c))

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def scale(self, c, a):
        return a.scale(c)

    def convert(self, mat: Matrix):
        """Lift a field-entry matrix into the backend representation."""
        if self.fast:
            rows, cols, data = [], [], []
            for (r, c), v in mat.entries.items():
                rows.append(r)
                cols.append(c)
                data.append(_as_int(v) % self.p)
            coo = sparse.coo_matrix(
                (np.array(data, dtype=np.int64), (rows, cols)), shape=(self.dim, self.dim)
            )
            return CsrMat(coo.tocsr(), self.p)
        out = [[0] * self.dim for _ in range(self.dim)]
        for (r, c), v in mat.entries.items():
            out[r][c] = _as_int(v) % self.p
        return DenseMat(out, self.p)


# ---------------- pipeline plans ----------------


@dataclass(frozen=True)
class PipelinePlan:
    """A fully drawn stage chain, composed and ready to evaluate.

    ``matrices`` holds one numeric N x N matrix per input variable (the
    output alphabet was drawn and substituted during composition), with
    ``start`` and ``accepts`` the flattened state indices.  ``N`` equals
    the product of the stage dims; ``families`` keeps the affine stages
    for exact cross-checks.
    """

    label: str
    stage_names: tuple
    stage_dims: tuple
    N: int
    families: tuple
    matrices: dict
    start: int
    accepts: tuple
    wpoint: dict
    scalars: dict
    coeffmod: tuple = None
    meta: dict = dataclass_field(default_factory=dict)

    def composed_affine(self):
        """Exact symbolic composition of the stage chain; the oracle
        route for validating the numeric fold at small dimensions."""
        return compose_chain(self.families)


def _csr_of(mat: Matrix, dim: int, p: int):
    rows, cols, data = [], [], []
    for (r, c), v in mat.entries.items():
        rows.append(r)
        cols.append(c)
        data.append(_as_int(v) % p)
    coo = sparse.coo_matrix((np.array(data, dtype=np.int64), (rows, cols)), shape=(dim, dim))
    return coo.tocsr()


def _letter_point(varset: VarSet, named: dict) -> dict:
    return {i: named[varset.name(i)] for i in range(len(varset.names))}


def _fold_numeric(stages, wpoint_named: dict, p: int) -> dict:
    """Compose the stage chain right to left in sparse integer arithmetic.

    The last stage's output letters are evaluated at the drawn point;
    every outer stage then contributes kron(A0, I) + sum_k kron(Ak, B_k)
    per input letter.  Requires a modulus below 2^21 so products stay
    inside int64.
    """
    last = stages[-1]
    point = _letter_point(last.out_vars, wpoint_named)
    inner = {}
    for k, m in last.matrices.items():
        sc = m.map_entries(lambda v: as_affine(v, last.out_vars, last.fld).evaluate(point))
        inner[k] = _csr_of(sc, last.dim, p)
    bdim = last.dim
    for fam in reversed(stages[:-1]):
        eye = sparse.identity(bdim, dtype=np.int64, format="csr")
        nxt = {}
        for i, m in fam.matrices.items():
            a0, lin = decompose_affine(m, fam.out_vars, fam.fld)
            acc = sparse.kron(_csr_of(a0, fam.dim, p), eye, format="csr")
            for k, ak in enumerate(lin):
                b = inner.get(k)
                if ak.entries and b is not None and b.nnz:
                    acc = acc + sparse.kron(_csr_of(ak, fam.dim, p), b, format="csr")
            acc.data %= p
            acc.eliminate_zeros()
            nxt[i] = acc
        inner = nxt
        bdim = fam.dim * bdim
    return inner


def _fold_exact(stages, wpoint_named: dict):
    """Exact composition fallback for large moduli: compose the affine
    chain, then evaluate the output letters.  Quadratic in N; meant for
    small dimensions only."""
    composed = compose_chain(stages)
    point = _letter_point(composed.out_vars, wpoint_named)
    return {i: m for i, m in composed.scalarize(point).items()}


def _coeffmod_stage(case: str, s: int, p: int, lam: int, fld: Field, alphabet: LeveledAlphabet):
    if case == "counter":
        return build_pattern_counter(s, p, lam, fld, alphabet=alphabet)
    if case == "remainder":
        return build_remainder_nfa(s, p, lam, fld, alphabet=alphabet)
    raise ValueError(f"unknown coefficient-modification case {case!r}")


def build_pipeline_plan(
    bb: BlackBox,
    cfg: PitConfig,
    rng: SeededRng,
    branch: str,
    c: int = None,
    s_sps: tuple = None,
    coeffmod: tuple = None,
) -> PipelinePlan:
    """Draw scalars, build the stage chain for depth bb.d and compose it.

    ``branch`` picks the innermost stage: "step1" (factor degree at least
    s-1) or "small" (cycle of length c).  ``s_sps`` lists the sparsify
    guess counts bottom-up, one per plus layer above the innermost.  The
    optional ``coeffmod`` (case, p, lam) cell sits right below the
    outermost sparsify, reading the composed alphabet of everything
    beneath it.
    """
    fld = _resolve_field(bb, cfg, FAST_FIELD)
    d = bb.d
    dplus = (d + 1) // 2
    nlevels = dplus - 2
    if nlevels < 1:
        raise DepthMismatch(f"pipeline plans start at depth 5, got {d}")
    s = max(2, bb.s)
    n = bb.n
    s_sps = tuple(s_sps) if s_sps is not None else (s,) * nlevels
    if len(s_sps) != nlevels:
        raise ValueError(f"need {nlevels} sparsify arities, got {len(s_sps)}")

    scalars = {}
    if branch == "step1":
        yz = dlsz_scalarize(VarSet(step1_scalar_names(s, n)), fld, rng.split("yz"))
        scalars.update(yz)
        fam1 = build_step1(s, n, yz)
        alph = LeveledAlphabet.xi(s)
    elif branch == "small":
        if c is None or c < 1:
            raise ValueError(f"small-degree branch needs a cycle length, got {c}")
        fam1 = build_small_degree(c, n, fld)
        alph = LeveledAlphabet.grid(c, n)
    else:
        raise ValueError(f"unknown branch {branch!r}")

    stages = [fam1]
    for j, ssp in enumerate(s_sps):
        if j > 0:
            stages = [wrap_with_returns(compose_chain(stages))]
        if coeffmod is not None and j == nlevels - 1:
            case, p, lam = coeffmod
            stages.append(_coeffmod_stage(case, s, p, lam, fld, alph))
        zeta = dlsz_scalarize(alph.varset, fld, rng.split(f"zeta{j}"))
        chi_rng = rng.split(f"chi{j}")
        chi = tuple(sample_uniform(fld, chi_rng) for _ in range(ssp))
        scalars.update({f"L{j}.{k}": v for k, v in zeta.items()})
        scalars.update({f"L{j}.chi{i + 1}": v for i, v in enumerate(chi)})
        stages.append(build_sparsify(ssp, zeta=zeta, chi=chi, alphabet=alph))
        stages.append(build_commutative_transform(blocks=ssp, fld=fld, alphabet=alph))
        alph = com_output_alphabet(ssp, alph)

    dims = [f.dim for f in stages]
    N = math.prod(dims)
    if N > cfg.dim_cap:
        raise DegreeTooLarge(f"composed dimension {N} exceeds the cap {cfg.dim_cap}")
    wpoint = dlsz_scalarize(alph.varset, fld, rng.split("wout"))
    scalars.update(wpoint)

    modulus = fld.modulus
    fast = modulus < (1 << 21)
    if fast:
        csr = _fold_numeric(stages, wpoint, modulus)
        matrices = {
            stages[0].in_vars.name(i): CsrMat(m, modulus) for i, m in csr.items()
        }
    else:
        ring = PitMatRing(N, modulus, fast=False)
        matrices = {
            stages[0].in_vars.name(i): ring.convert(m)
            for i, m in _fold_exact(stages, wpoint).items()
        }
    start = 0
    accepts = [0]
    for fam in stages:
        start = start * fam.dim + fam.start
        accepts = [a * fam.dim + f for a in accepts for f in fam.accepts]

    label = branch if branch == "step1" else f"small(c={c})"
    label += "".join(f"|sp{j}={ssp}" for j, ssp in enumerate(s_sps))
    return PipelinePlan(
        label=label,
        stage_names=tuple(f.name for f in stages),
        stage_dims=tuple(dims),
        N=N,
        families=tuple(stages),
        matrices=matrices,
        start=start,
        accepts=tuple(accepts),
        wpoint=wpoint,
        scalars=scalars,
        coeffmod=coeffmod,
        meta={"d": d, "s": s, "branch": branch, "c": c, "s_sps": s_sps},
    )


def _accept_values(plan: PipelinePlan, bb: BlackBox, fld: Field) -> list:
    """Evaluate the box on the plan's matrices; return the accept-entry
    coordinates and values of the start row."""
    ring = PitMatRing(plan.N, fld.modulus, fast=fld.modulus < (1 << 21))
    assignment = dict(plan.matrices)
    for j in range(1, bb.n + 1):
        assignment.setdefault(f"x{j}", ring.zero())
    out = bb.evaluate(assignment, ring)
    r0 = plan.start
    return [(r0, f, out.entry(r0, f)) for f in plan.accepts]


def _witness(plan_label, cell, trial, entry, value, scalars):
    w = {
        "plan": plan_label,
        "cell": cell,
        "trial": trial,
        "entry": list(entry),
        "value": value,
    }
    if scalars is not None and len(scalars) <= 512:
        w["scalars"] = {k: _as_int(v) for k, v in sorted(scalars.items())}
    return w


# ---------------- depth-3 driver ----------------


def pit_depth3(bb: BlackBox, cfg: PitConfig = None) -> PitReport:
    """Single-pass overlay test: dimension exactly s, entry (q0, q_{s-1})."""
    cfg = cfg or PitConfig()
    if bb.d != 3:
        raise DepthMismatch(f"pit_depth3 needs depth 3, got {bb.d}")
    fld = _resolve_field(bb, cfg, MERSENNE61)
    s = max(2, bb.s)
    n = bb.n
    root = SeededRng(cfg.seed).split("pit3")
    stages = (f"onepass(s={s},n={n})",)
    for t in range(cfg.trials):
        rng = root.split(f"trial{t}")
        yz = dlsz_scalarize(VarSet(step1_scalar_names(s, n)), fld, rng.split("yz"))
        fam = build_one_pass(s, n, yz)
        xi = dlsz_scalarize(fam.out_vars, fld, rng.split("xi"))
        point = {i: xi[fam.out_vars.name(i)] for i in range(s)}
        ring = PitMatRing(s, fld.modulus, fast=False)
        assignment = {f"x{i + 1}": ring.convert(m) for i, m in fam.scalarize(point).items()}
        out = bb.evaluate(assignment, ring)
        v = out.entry(0, s - 1)
        if v % fld.modulus:
            scalars = dict(yz)
            scalars.update(xi)
            return PitReport(
                verdict="NONZERO",
                strategy="depth3",
                N=s,
                trials=cfg.trials,
                seed=cfg.seed,
                field_modulus=fld.modulus,
                stages=stages,
                witness=_witness(stages[0], None, t, (0, s - 1), v, scalars),
            )
    return PitReport(
        verdict="ZERO(probabilistic)",
        strategy="depth3",
        N=s,
        trials=cfg.trials,
        seed=cfg.seed,
        field_modulus=fld.modulus,
        stages=stages,
    )


# ---------------- depth-5 and deeper pipeline drivers ----------------


def _candidates(bb: BlackBox, cfg: PitConfig):
    """Stage-shape candidates (branch, c, s_sps).  With degree hints the
    shape is determined; without them (depth 5 only) every viable branch
    and guess count is tried, which at most squares the work."""
    d = bb.d
    dplus = (d + 1) // 2
    s = max(2, bb.s)
    degrees = bb.degrees()
    if degrees is not None:
        if len(degrees) != dplus - 1:
            raise MissingDegreeHint(
                f"depth {d} wants {dplus - 1} layer degrees, got {len(degrees)}"
            )
        d1 = degrees[0]
        s_sps = tuple(max(2, min(s, degrees[j] + 1)) for j in range(1, dplus - 1))
        if d1 >= s - 1:
            return [("step1", None, s_sps)]
        return [("small", d1, s_sps)]
    if cfg.strict:
        raise MissingDegreeHint("strict mode requires layer degree hints")
    if d >= 7:
        raise MissingDegreeHint(f"depth {d} plans require layer degree hints")
    cands = [("step1", None, (ssp,)) for ssp in range(s, 1, -1)]
    for c in range(1, s - 1):
        cands += [("small", c, (ssp,)) for ssp in range(s, 1, -1)]
    return cands


def _sweep_primes(bb: BlackBox) -> list:
    degrees = bb.degrees()
    dbound = math.prod(degrees) if degrees else 2 ** max(2, bb.s)
    pmax = math.ceil(4.4 * math.log2(max(2, dbound)))
    return list(sympy.primerange(2, pmax + 1))


def _pit_pipeline(bb: BlackBox, cfg: PitConfig, strategy: str) -> PitReport:
    fld = _resolve_field(bb, cfg, FAST_FIELD)
    cands = _candidates(bb, cfg)
    root = SeededRng(cfg.seed).split(f"pit{bb.d}")
    plan0 = None

    def report(verdict, sweep=(), witness=None):
        return PitReport(
            verdict=verdict,
            strategy=strategy,
            N=plan0.N,
            trials=cfg.trials,
            seed=cfg.seed,
            field_modulus=fld.modulus,
            stages=plan0.stage_names,
            sweep=tuple(sweep),
            witness=witness,
        )

    for t in range(cfg.trials):
        for ci, (branch, c, s_sps) in enumerate(cands):
            rng = root.split(f"base.t{t}.c{ci}")
            plan = build_pipeline_plan(bb, cfg, rng, branch, c=c, s_sps=s_sps)
            if plan0 is None:
                plan0 = plan
            for r, f, v in _accept_values(plan, bb, fld):
                if v % fld.modulus:
                    return report(
                        "NONZERO",
                        witness=_witness(plan.label, None, t, (r, f), v, plan.scalars),
                    )

    cells = []
    sweep_cands = [
        (ci, cand)
        for ci, cand in enumerate(cands)
        if not (bb.d == 5 and cand[0] == "small")
    ]
    for case in ("counter", "remainder"):
        for p in _sweep_primes(bb):
            for lam in range(p):
                for ci, (branch, c, s_sps) in sweep_cands:
                    rng = root.split(f"sweep.{case}.p{p}.l{lam}.c{ci}")
                    plan = build_pipeline_plan(
                        bb, cfg, rng, branch, c=c, s_sps=s_sps, coeffmod=(case, p, lam)
                    )
                    vals = _accept_values(plan, bb, fld)
                    hits = [(r, f, v) for r, f, v in vals if v % fld.modulus]
                    cells.append(
                        {
                            "case": case,
                            "p": p,
                            "lam": lam,
                            "plan": plan.label,
                            "N": plan.N,
                            "nonzero": bool(hits),
                        }
                    )
                    if hits:
                        r, f, v = hits[0]
                        return report(
                            "NONZERO",
                            sweep=cells,
                            witness=_witness(
                                plan.label, {"case": case, "p": p, "lam": lam}, 0, (r, f), v, plan.scalars
                            ),
                        )
    return report("ZERO(probabilistic)", sweep=cells)


def pit_depth5(bb: BlackBox, cfg: PitConfig = None) -> PitReport:
    """Overlay / sparsify / relabel pipeline with the base trials first
    and the full counter and remainder sweep on an all-zero outcome."""
    cfg = cfg or PitConfig()
    if bb.d != 5:
        raise DepthMismatch(f"pit_depth5 needs depth 5, got {bb.d}")
    return _pit_pipeline(bb, cfg, "depth5")


def pit_general(bb: BlackBox, cfg: PitConfig = None) -> PitReport:
    """Depth dispatch: 3 and 5 delegate; from 7 on the depth-(d-2) chain
    is wrapped with return edges and the outer stages are rebuilt over
    its composed output alphabet.  Depth hints are mandatory there."""
    cfg = cfg or PitConfig()
    d = bb.d
    if d % 2 == 0:
        raise EvenDepth(f"depth must be odd, got {d}")
    if d == 1:
        return _pit_depth1(bb, cfg)
    if d == 3:
        return pit_depth3(bb, cfg)
    return _pit_pipeline(bb, cfg, "general")


def _pit_depth1(bb: BlackBox, cfg: PitConfig) -> PitReport:
    """A depth-1 box is a linear form; scalar substitution settles it."""
    fld = _resolve_field(bb, cfg, MERSENNE61)
    root = SeededRng(cfg.seed).split("pit1")
    for t in range(cfg.trials):
        rng = root.split(f"trial{t}")
        ring = PitMatRing(1, fld.modulus, fast=False)
        assignment = {
            f"x{i + 1}": DenseMat([[rng.randrange(fld.modulus)]], fld.modulus)
            for i in range(bb.n)
        }
        out = bb.evaluate(assignment, ring)
        v = out.entry(0, 0)
        if v % fld.modulus:
            return PitReport(
                verdict="NONZERO",
                strategy="depth1",
                N=1,
                trials=cfg.trials,
                seed=cfg.seed,
                field_modulus=fld.modulus,
                stages=("scalar",),
                witness=_witness("scalar", None, t, (0, 0), v, None),
            )
    return PitReport(
        verdict="ZERO(probabilistic)",
        strategy="depth1",
        N=1,
        trials=cfg.trials,
        seed=cfg.seed,
        field_modulus=fld.modulus,
        stages=("scalar",),
    )


# ---------------- exact oracle and the generic baseline ----------------


def pit_oracle(c: PlusRegularCircuit, cfg: PitConfig = None) -> PitReport:
    """Exact verdict by brute-force expansion; raises CapExceeded when
    the monomial count explodes."""
    cfg = cfg or PitConfig()
    poly = expand(c, cap=cfg.monomial_cap)
    witness = None
    verdict = "ZERO"
    if not poly.is_zero():
        verdict = "NONZERO"
        word, coeff = min(poly.terms.items())
        witness = {
            "monomial": ".".join(poly.varset.name(i) for i in word),
            "value": _as_int(coeff),
        }
    return PitReport(
        verdict=verdict,
        strategy="oracle",
        N=0,
        trials=0,
        seed=cfg.seed,
        field_modulus=c.field.modulus,
        stages=("expand",),
        witness=witness,
    )


def al_baseline(bb: BlackBox, degree: int, cfg: PitConfig = None) -> PitReport:
    """Generic substitution by unstructured random matrices of dimension
    floor(D/2)+1; complete for any polynomial of degree at most D."""
    cfg = cfg or PitConfig()
    fld = _resolve_field(bb, cfg, MERSENNE61)
    dim = degree // 2 + 1
    if dim > cfg.dim_cap:
        raise DegreeTooLarge(f"baseline dimension {dim} exceeds the cap {cfg.dim_cap}")
    root = SeededRng(cfg.seed).split("al")
    ring = PitMatRing(dim, fld.modulus, fast=False)
    for t in range(cfg.trials):
        rng = root.split(f"trial{t}")
        assignment = {
            f"x{i + 1}": DenseMat(
                [[rng.randrange(fld.modulus) for _ in range(dim)] for _ in range(dim)],
                fld.modulus,
            )
            for i in range(bb.n)
        }
        out = bb.evaluate(assignment, ring)
        for r in range(dim):
            for cc in range(dim):
                v = out.entry(r, cc)
                if v % fld.modulus:
                    return PitReport(
                        verdict="NONZERO",
                        strategy="al",
                        N=dim,
                        trials=cfg.trials,
                        seed=cfg.seed,
                        field_modulus=fld.modulus,
                        stages=("random-matrices",),
                        witness=_witness("random-matrices", None, t, (r, cc), v, None),
                    )
    return PitReport(
        verdict="ZERO(probabilistic)",
        strategy="al",
        N=dim,
        trials=cfg.trials,
        seed=cfg.seed,
        field_modulus=fld.modulus,
        stages=("random-matrices",),
    )
