"""Layered +-regular circuit IR: build, validate, evaluate, expand.

A circuit here is a DAG of input / const / plus / times gates.  Plus
gates have unbounded fan-in and carry a scalar label on every incoming
wire; times gates have exactly two ordered children and multiply left to
right (the algebra is non-commutative).  A *layer assignment* tags every
plus gate with a layer index in 1..d+; regularity means each
input-to-output path crosses every plus layer exactly once, all plus
gates are homogeneous, and gates sharing a layer share a syntactic
degree.  The declared assignment is taken at face value:
``validate_plus_regular`` checks it but never infers a different one.

``evaluate`` runs the circuit over any ring supplied through a small
adapter (scalars, square matrices, or free-algebra polynomials), which is
both the black-box interface the identity testers consume and, with the
polynomial ring plugged in, the brute-force ``expand`` oracle.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .field import MERSENNE61, Field, FieldElement, SeededRng, make_prime_field
from .matring import DimensionMismatch, Matrix, MatrixRing
from .ncpoly import DEFAULT_MONOMIAL_CAP, NcPolynomial, NcPolyRing, VarSet

GATE_KINDS = ("input", "const", "plus", "times")


class CircuitError(ValueError):
    """Structural problem in a gate table (bad reference, cycle, arity)."""

    def __init__(self, message, gate=None):
        super().__init__(message)
        self.gate = gate


class NotHomogeneous(CircuitError):
    """A plus gate sums children of different syntactic degrees."""


class InfeasibleProfile(ValueError):
    """The requested random-circuit profile cannot be realised."""


class CircuitFileError(ValueError):
    """Parse failure for the circuit file format, with a 1-based line."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"{message} (line {line})")
        self.line = line


@dataclass(frozen=True)
class Gate:
    """One gate; ``args`` is a tuple of (child id, scale) pairs.

    Scales are canonical field representatives; times gates must carry
    scale 1 on both wires (labels belong to plus wires only).
    """

    id: int
    kind: str
    var: str = None
    value: int = None
    args: tuple = ()


class PlusRegularCircuit:
    """Immutable gate table with output id, layer map and degree hints."""

    def __init__(self, field, variables, gates, output, layers=None, degrees=None):
        self.field = field
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise CircuitError("duplicate variable names")
        if not isinstance(gates, dict):
            gates = {g.id: g for g in gates}
        self.gates = {}
        for gid, gate in gates.items():
            if gid != gate.id:
                raise CircuitError(f"gate table key {gid} != gate id {gate.id}", gate=gid)
            self.gates[gid] = self._canonical(gate)
        if output not in self.gates:
            raise CircuitError(f"output gate {output} not in table", gate=output)
        self.output = output
        self.layers = {}
        for gid, layer in (layers or {}).items():
            gid = int(gid)
            if gid not in self.gates:
                raise CircuitError(f"layer assigned to unknown gate {gid}", gate=gid)
            self.layers[gid] = int(layer)
        self.degrees = None if degrees is None else tuple(int(d) for d in degrees)
        self.topo = self._toposort()

    def _canonical(self, gate: Gate) -> Gate:
        if gate.kind not in GATE_KINDS:
            raise CircuitError(f"gate {gate.id} has unknown kind {gate.kind!r}", gate=gate.id)
        if gate.kind == "input":
            if gate.var not in self.variables:
                raise CircuitError(
                    f"gate {gate.id} reads unknown variable {gate.var!r}", gate=gate.id
                )
            return Gate(gate.id, "input", var=gate.var)
        if gate.kind == "const":
            value = gate.value.value if isinstance(gate.value, FieldElement) else gate.value
            if value is None:
                raise CircuitError(f"const gate {gate.id} has no value", gate=gate.id)
            return Gate(gate.id, "const", value=self.field.element(value).value)
        args = []
        for arg in gate.args:
            child, scale = arg
            scale = scale.value if isinstance(scale, FieldElement) else scale
            args.append((int(child), self.field.element(scale).value))
        if gate.kind == "times":
            if len(args) != 2:
                raise CircuitError(
                    f"times gate {gate.id} has {len(args)} children, wants 2", gate=gate.id
                )
            if any(s != 1 for _, s in args):
                raise CircuitError(
                    f"times gate {gate.id} carries a scaled wire", gate=gate.id
                )
        elif not args:
            raise CircuitError(f"plus gate {gate.id} has no children", gate=gate.id)
        return Gate(gate.id, gate.kind, args=tuple(args))

    def _toposort(self):
        pending = {}
        parents = {}
        for gid, gate in self.gates.items():
            kids = [c for c, _ in gate.args]
            for c in kids:
                if c not in self.gates:
                    raise CircuitError(f"gate {gid} references missing gate {c}", gate=gid)
                parents.setdefault(c, []).append(gid)
            pending[gid] = len(kids)
        ready = sorted(g for g, k in pending.items() if k == 0)
        order = []
        while ready:
            gid = ready.pop()
            order.append(gid)
            for par in parents.get(gid, ()):
                pending[par] -= 1
                if pending[par] == 0:
                    ready.append(par)
        if len(order) != len(self.gates):
            stuck = min(g for g, k in pending.items() if k > 0)
            raise CircuitError(f"cycle through gate {stuck}", gate=stuck)
        return tuple(order)

    # ---------------- conveniences ----------------

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def top_fanin(self):
        out = self.gates[self.output]
        return len(out.args) if out.kind == "plus" else None

    @property
    def num_plus_layers(self):
        return max(self.layers.values()) if self.layers else None

    @property
    def depth(self):
        d_plus = self.num_plus_layers
        return None if d_plus is None else 2 * d_plus - 1

    def children(self, gid: int):
        return tuple(c for c, _ in self.gates[gid].args)

    def __repr__(self):
        return (
            f"PlusRegularCircuit(n={len(self.variables)}, gates={len(self.gates)}, "
            f"layers={self.num_plus_layers})"
        )


# ---------------- syntactic degree ----------------


def _all_degrees(c: PlusRegularCircuit) -> dict:
    deg = {}
    for gid in c.topo:
        gate = c.gates[gid]
        if gate.kind == "input":
            deg[gid] = 1
        elif gate.kind == "const":
            deg[gid] = 0
        elif gate.kind == "plus":
            deg[gid] = max(deg[ch] for ch, _ in gate.args)
        else:
            deg[gid] = sum(deg[ch] for ch, _ in gate.args)
    return deg


def syntactic_degree(c: PlusRegularCircuit, gate=None) -> int:
    """Variables count 1, constants 0; plus takes max, times the sum."""
    if gate is None:
        gate = c.output
    return _all_degrees(c)[gate]


# ---------------- validation ----------------


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    gate: int = None
    layer: int = None


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self):
        return sorted({v.code for v in self.violations})


def validate_plus_regular(c: PlusRegularCircuit) -> ValidationReport:
    """Check the declared layering; an empty violation list means valid.

    Emitted codes: output-not-plus, inhomogeneous-plus, missing-layer,
    layer-degree-mismatch, same-layer-path, layer-skip.
    """
    v = []
    deg = _all_degrees(c)
    if c.gates[c.output].kind != "plus":
        v.append(
            Violation(
                "output-not-plus",
                f"output gate {c.output} is a {c.gates[c.output].kind} gate",
                gate=c.output,
            )
        )

    plus_ids = [g for g in c.topo if c.gates[g].kind == "plus"]
    for gid in plus_ids:
        degs = {deg[ch] for ch, _ in c.gates[gid].args}
        if len(degs) > 1:
            v.append(
                Violation(
                    "inhomogeneous-plus",
                    f"plus gate {gid} sums degrees {sorted(degs)}",
                    gate=gid,
                )
            )
        if gid not in c.layers:
            v.append(Violation("missing-layer", f"plus gate {gid} has no layer", gate=gid))

    by_layer = {}
    for gid in plus_ids:
        if gid in c.layers:
            by_layer.setdefault(c.layers[gid], set()).add(deg[gid])
    for layer, degrees in sorted(by_layer.items()):
        if len(degrees) > 1:
            v.append(
                Violation(
                    "layer-degree-mismatch",
                    f"layer {layer} mixes syntactic degrees {sorted(degrees)}",
                    layer=layer,
                )
            )

    # Layers of plus gates strictly below each gate, for the same-layer check.
    below = {}
    for gid in c.topo:
        acc = set()
        for ch in c.children(gid):
            acc |= below[ch]
            if c.gates[ch].kind == "plus" and ch in c.layers:
                acc.add(c.layers[ch])
        below[gid] = acc
    for gid in plus_ids:
        layer = c.layers.get(gid)
        if layer is not None and layer in below[gid]:
            v.append(
                Violation(
                    "same-layer-path",
                    f"plus gate {gid} has a layer-{layer} plus gate beneath it",
                    gate=gid,
                    layer=layer,
                )
            )

    # Crossed-layer sets, bottom-up.  None marks an all-constant subtree,
    # which never needs to cross anything.
    crossed = {}
    for gid in c.topo:
        gate = c.gates[gid]
        if gate.kind == "input":
            crossed[gid] = frozenset()
        elif gate.kind == "const":
            crossed[gid] = None
        elif gate.kind == "times":
            (a, _), (b, _) = gate.args
            ca, cb = crossed[a], crossed[b]
            if ca is None:
                crossed[gid] = cb
            elif cb is None:
                crossed[gid] = ca
            else:
                if ca != cb:
                    v.append(
                        Violation(
                            "layer-skip",
                            f"times gate {gid} joins factors crossing layers "
                            f"{sorted(ca)} and {sorted(cb)}",
                            gate=gid,
                        )
                    )
                crossed[gid] = ca | cb
        else:
            layer = c.layers.get(gid)
            if layer is None:
                kids = [crossed[ch] for ch in c.children(gid) if crossed[ch] is not None]
                crossed[gid] = frozenset().union(*kids) if kids else frozenset()
                continue
            want = frozenset(range(1, layer))
            for ch in c.children(gid):
                cc = crossed[ch]
                if cc is not None and cc != want:
                    v.append(
                        Violation(
                            "layer-skip",
                            f"child {ch} of layer-{layer} plus gate {gid} crosses "
                            f"layers {sorted(cc)}, wants {sorted(want)}",
                            gate=gid,
                            layer=layer,
                        )
                    )
            crossed[gid] = frozenset(range(1, layer + 1))

    if c.layers:
        top = max(c.layers.values())
        if set(c.layers.values()) != set(range(1, top + 1)):
            v.append(
                Violation(
                    "layer-skip",
                    f"declared layers {sorted(set(c.layers.values()))} are not 1..{top}",
                )
            )
        out_layer = c.layers.get(c.output)
        if out_layer is not None and out_layer != top:
            v.append(
                Violation(
                    "layer-skip",
                    f"output sits at layer {out_layer} but layer {top} is declared",
                    gate=c.output,
                    layer=out_layer,
                )
            )
    return ValidationReport(v)


# ---------------- normalization ----------------


def _plus_depths(gates: dict) -> dict:
    order = PlusRegularCircuit.__new__(PlusRegularCircuit)
    order.gates = gates
    order = order._toposort()
    depth = {}
    for gid in order:
        gate = gates[gid]
        kids = [depth[c] for c, _ in gate.args]
        if gate.kind in ("input", "const"):
            depth[gid] = 0
        elif gate.kind == "times":
            depth[gid] = max(kids)
        else:
            depth[gid] = 1 + (max(kids) if kids else 0)
    return depth


def normalize_layers(c: PlusRegularCircuit) -> PlusRegularCircuit:
    """Wrap the output and raw inputs so the top and bottom layers are sums.

    Adds at most n+1 fan-in-1 plus gates, recomputes the layer map when it
    changed anything, and leaves already-normal circuits untouched.  The
    computed polynomial is exactly preserved.
    """
    deg = _all_degrees(c)
    for gid in c.topo:
        gate = c.gates[gid]
        if gate.kind == "plus":
            degs = {deg[ch] for ch, _ in gate.args}
            if len(degs) > 1:
                raise NotHomogeneous(
                    f"plus gate {gid} sums degrees {sorted(degs)}", gate=gid
                )

    gates = dict(c.gates)
    output = c.output
    next_id = max(gates) + 1
    changed = False

    depth = _plus_depths(gates)
    wrappers = {}

    def wrapper_for(input_id):
        nonlocal next_id, changed
        if input_id not in wrappers:
            gates[next_id] = Gate(next_id, "plus", args=((input_id, 1),))
            wrappers[input_id] = next_id
            next_id += 1
            changed = True
        return wrappers[input_id]

    for gid in list(gates):
        gate = gates[gid]
        if gate.kind not in ("plus", "times"):
            continue
        bad = False
        for ch, _ in gate.args:
            if gates[ch].kind != "input":
                continue
            if gate.kind == "times" or depth[gid] >= 2:
                bad = True
        if bad:
            new_args = []
            for ch, sc in gate.args:
                if gates[ch].kind == "input" and (gate.kind == "times" or depth[gid] >= 2):
                    new_args.append((wrapper_for(ch), sc))
                else:
                    new_args.append((ch, sc))
            gates[gid] = Gate(gid, gate.kind, args=tuple(new_args))

    if gates[output].kind != "plus":
        gates[next_id] = Gate(next_id, "plus", args=((output, 1),))
        output = next_id
        next_id += 1
        changed = True

    layers = {g: d for g, d in _plus_depths(gates).items() if gates[g].kind == "plus"}
    if not changed and c.layers == layers:
        return c
    return PlusRegularCircuit(
        c.field,
        c.variables,
        gates,
        output,
        layers=layers,
        degrees=c.degrees if not changed else None,
    )


# ---------------- evaluation ----------------


class ScalarRing:
    """Ring adapter over plain field scalars."""

    def __init__(self, fld: Field):
        self.fld = fld

    def zero(self):
        return self.fld.zero()

    def one(self):
        return self.fld.one()

    def from_scalar(self, c):
        return c if isinstance(c, FieldElement) else self.fld.element(c)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def scale(self, c, a):
        return self.from_scalar(c) * a


def _infer_ring(c: PlusRegularCircuit, assignment):
    values = list(assignment.values())
    if not values:
        return ScalarRing(c.field)
    first = values[0]
    if isinstance(first, FieldElement):
        for v in values:
            if not isinstance(v, FieldElement) or v.field.modulus != c.field.modulus:
                raise ValueError("mixed or foreign scalar assignment")
        return ScalarRing(c.field)
    if isinstance(first, Matrix):
        dim = first.dim
        for v in values:
            if not isinstance(v, Matrix):
                raise ValueError("mixed matrix/scalar assignment")
            if v.dim != dim:
                raise DimensionMismatch(f"assignment mixes dims {dim} and {v.dim}")
        return MatrixRing(dim, c.field)
    if isinstance(first, NcPolynomial):
        return NcPolyRing(first.varset, c.field, first.cap)
    raise TypeError(f"cannot infer a ring for {type(first).__name__}; pass ring=")


def evaluate(c: PlusRegularCircuit, assignment, ring=None):
    """Evaluate gate by gate in topological order.

    ``assignment`` maps variable names to ring elements; times multiplies
    its children left to right, plus applies the scalar wire labels.
    """
    if ring is None:
        ring = _infer_ring(c, assignment)
    values = {}
    for gid in c.topo:
        gate = c.gates[gid]
        if gate.kind == "input":
            try:
                values[gid] = assignment[gate.var]
            except KeyError:
                raise CircuitError(f"assignment missing variable {gate.var!r}") from None
        elif gate.kind == "const":
            values[gid] = ring.from_scalar(c.field.element(gate.value))
        elif gate.kind == "plus":
            acc = None
            for ch, sc in gate.args:
                term = values[ch] if sc == 1 else ring.scale(c.field.element(sc), values[ch])
                acc = term if acc is None else ring.add(acc, term)
            values[gid] = acc
        else:
            (a, _), (b, _) = gate.args
            values[gid] = ring.mul(values[a], values[b])
    return values[c.output]


def expand(c: PlusRegularCircuit, cap: int = DEFAULT_MONOMIAL_CAP) -> NcPolynomial:
    """Brute-force symbolic expansion; the oracle everything is tested
    against.  Raises CapExceeded once any intermediate passes ``cap``."""
    varset = VarSet(c.variables)
    ring = NcPolyRing(varset, c.field, cap)
    assignment = {
        name: NcPolynomial.variable(varset, c.field, name, cap) for name in c.variables
    }
    return evaluate(c, assignment, ring)


# ---------------- builders ----------------


def build_power_circuit(n: int, k: int, field: Field = None) -> PlusRegularCircuit:
    """(x1 + ... + xn)^(2^k) by repeated squaring; valid depth 3."""
    if n < 1 or k < 0:
        raise InfeasibleProfile(f"power circuit wants n >= 1, k >= 0; got {n}, {k}")
    if field is None:
        field = make_prime_field(MERSENNE61)
    names = VarSet.indexed("x", n).names
    gates = {i: Gate(i, "input", var=names[i]) for i in range(n)}
    lin = n
    gates[lin] = Gate(lin, "plus", args=tuple((i, 1) for i in range(n)))
    prev = lin
    for j in range(k):
        gid = n + 1 + j
        gates[gid] = Gate(gid, "times", args=((prev, 1), (prev, 1)))
        prev = gid
    out = n + 1 + k
    gates[out] = Gate(out, "plus", args=((prev, 1),))
    return PlusRegularCircuit(
        field, names, gates, out, layers={lin: 1, out: 2}, degrees=(2**k,)
    )


@dataclass(frozen=True)
class CircuitProfile:
    """Shape request for the generator.

    ``degrees`` lists the product arity between consecutive plus layers,
    bottom-up, so it has (depth-1)/2 entries and the output degree is
    their product.  ``pool`` is how many distinct gates each non-top layer
    offers to the layer above.
    """

    depth: int
    n: int
    degrees: tuple
    top_fanin: int = 2
    inner_fanin: int = 2
    pool: int = 2
    zero_planted: bool = False
    size_budget: int = None


def random_circuit(profile: CircuitProfile, field: Field, rng: SeededRng) -> PlusRegularCircuit:
    """Sample a valid circuit with the canonical layered shape.

    Zero-planting builds f once, clones its internal gates into a fresh
    sub-DAG, and merges both under one top plus with negated wire labels,
    so the output is identically zero by construction.
    """
    d = profile.depth
    if d < 1 or d % 2 == 0:
        raise InfeasibleProfile(f"depth must be odd and positive, got {d}")
    d_plus = (d + 1) // 2
    degrees = tuple(int(x) for x in profile.degrees)
    if len(degrees) != d_plus - 1:
        raise InfeasibleProfile(
            f"depth {d} wants {d_plus - 1} layer degrees, got {len(degrees)}"
        )
    if any(x < 1 for x in degrees):
        raise InfeasibleProfile(f"layer degrees must be positive: {degrees}")
    if profile.n < 1 or profile.top_fanin < 1 or profile.inner_fanin < 1 or profile.pool < 1:
        raise InfeasibleProfile("n, fan-ins and pool must all be >= 1")

    p = field.modulus
    names = VarSet.indexed("x", profile.n).names
    gates = {i: Gate(i, "input", var=names[i]) for i in range(profile.n)}
    layer_of = {}
    counter = [profile.n]

    def add(kind, args):
        gid = counter[0]
        counter[0] += 1
        gates[gid] = Gate(gid, kind, args=tuple(args))
        return gid

    def coeff():
        return rng.randrange(1, p)

    def comb(children):
        node = children[0]
        for ch in children[1:]:
            node = add("times", ((node, 1), (ch, 1)))
        return node

    def build_body():
        """Gates below the top layer; returns the top-gate argument list."""
        pool = list(range(profile.n))
        for layer in range(1, d_plus):
            fresh = []
            fanin = len(pool) if layer == 1 else profile.inner_fanin
            for _ in range(profile.pool):
                if layer == 1:
                    args = [(i, coeff()) for i in pool]
                else:
                    args = [
                        (comb([rng.choice(pool) for _ in range(degrees[layer - 2])]), coeff())
                        for _ in range(fanin)
                    ]
                gid = add("plus", args)
                layer_of[gid] = layer
                fresh.append(gid)
            pool = fresh
        if d_plus == 1:
            return [(i, coeff()) for i in pool]
        arity = degrees[d_plus - 2]
        return [
            (comb([rng.choice(pool) for _ in range(arity)]), coeff())
            for _ in range(profile.top_fanin)
        ]

    base = counter[0]
    top_args = build_body()

    if profile.zero_planted:
        body_ids = [g for g in sorted(gates) if g >= base]
        remap = {}
        for gid in body_ids:
            gate = gates[gid]
            new_args = tuple((remap.get(ch, ch), sc) for ch, sc in gate.args)
            new_id = add(gate.kind, new_args)
            remap[gid] = new_id
            if gid in layer_of:
                layer_of[new_id] = layer_of[gid]
        top_args = list(top_args) + [
            (remap.get(ch, ch), (p - sc) % p) for ch, sc in top_args
        ]

    out = add("plus", top_args)
    layer_of[out] = d_plus

    if profile.size_budget is not None and len(gates) > profile.size_budget:
        raise InfeasibleProfile(
            f"profile needs {len(gates)} gates, budget {profile.size_budget}"
        )
    return PlusRegularCircuit(field, names, gates, out, layers=layer_of, degrees=degrees)


# ---------------- file format ----------------


def dump_circuit(c: PlusRegularCircuit) -> str:
    """Line-oriented JSON with one gate per line."""
    gate_lines = []
    for gid in sorted(c.gates):
        gate = c.gates[gid]
        obj = {"id": gid, "kind": gate.kind}
        if gate.kind == "input":
            obj["var"] = gate.var
        elif gate.kind == "const":
            obj["value"] = gate.value
        else:
            obj["args"] = [
                {"gate": ch} if sc == 1 else {"gate": ch, "scale": sc}
                for ch, sc in gate.args
            ]
        gate_lines.append(json.dumps(obj))
    parts = ['{', f'"vars": {json.dumps(list(c.variables))},', '"gates": [']
    for i, line in enumerate(gate_lines):
        parts.append(line + ("," if i + 1 < len(gate_lines) else ""))
    parts.append("],")
    body = f'"output": {c.output}'
    if c.layers:
        body += f',\n"layers": {json.dumps({str(k): v for k, v in sorted(c.layers.items())})}'
    if c.degrees is not None:
        body += f',\n"degrees": {json.dumps(list(c.degrees))}'
    parts.append(body)
    parts.append("}")
    return "\n".join(parts) + "\n"


def save_circuit(c: PlusRegularCircuit, path):
    with open(path, "w") as fh:
        fh.write(dump_circuit(c))


def parse_circuit(text: str, field: Field) -> PlusRegularCircuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitFileError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, dict):
        raise CircuitFileError("circuit file must hold a JSON object", line=1)

    lines_of = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        for m in re.finditer(r'"id"\s*:\s*(\d+)', line):
            lines_of.setdefault(int(m.group(1)), []).append(lineno)

    def line_for(gid, occurrence=0):
        hits = lines_of.get(gid, [])
        if not hits:
            return None
        return hits[min(occurrence, len(hits) - 1)]

    varnames = data.get("vars")
    if not isinstance(varnames, list) or not all(isinstance(x, str) for x in varnames):
        raise CircuitFileError('"vars" must be a list of names', line=1)
    raw_gates = data.get("gates")
    if not isinstance(raw_gates, list):
        raise CircuitFileError('"gates" must be a list', line=1)

    gates = {}
    for pos, obj in enumerate(raw_gates):
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), int):
            raise CircuitFileError(f"gate #{pos} lacks an integer id", line=None)
        gid = obj["id"]
        line = line_for(gid)
        if gid in gates:
            raise CircuitFileError(f"duplicate gate id {gid}", line=line_for(gid, 1))
        kind = obj.get("kind")
        if kind not in GATE_KINDS:
            raise CircuitFileError(f"gate {gid} has unknown kind {kind!r}", line=line)
        args = []
        for arg in obj.get("args", []):
            if not isinstance(arg, dict) or not isinstance(arg.get("gate"), int):
                raise CircuitFileError(f"gate {gid} has a malformed wire", line=line)
            scale = arg.get("scale", 1)
            if not isinstance(scale, int):
                raise CircuitFileError(f"gate {gid} has a non-integer scale", line=line)
            args.append((arg["gate"], scale))
        gates[gid] = Gate(
            gid, kind, var=obj.get("var"), value=obj.get("value"), args=tuple(args)
        )

    if not isinstance(data.get("output"), int):
        raise CircuitFileError('"output" must name a gate id', line=None)
    layers = None
    if "layers" in data:
        try:
            layers = {int(k): int(v) for k, v in data["layers"].items()}
        except (AttributeError, TypeError, ValueError):
            raise CircuitFileError('"layers" must map gate ids to layer indices', line=None)
    degrees = data.get("degrees")
    if degrees is not None and not (
        isinstance(degrees, list) and all(isinstance(x, int) for x in degrees)
    ):
        raise CircuitFileError('"degrees" must be a list of integers', line=None)

    try:
        return PlusRegularCircuit(
            field, varnames, gates, data["output"], layers=layers, degrees=degrees
        )
    except CircuitError as e:
        raise CircuitFileError(str(e), line=line_for(e.gate) if e.gate is not None else None)


def load_circuit(path, field: Field) -> PlusRegularCircuit:
    with open(path) as fh:
        return parse_circuit(fh.read(), field)
