"""Command-line front end.

Subcommands: ``run`` (validate a circuit file and test it for identity),
``gen`` (write a deterministic corpus with a manifest of planted truths),
``dump-automaton`` (print a family as transition and triplet text),
``expand`` (canonical polynomial text), ``bench`` (CSV timings over a
corpus directory).

Exit codes: 0 success, 2 parse/validation failure, 3 cap breach.
"""

import argparse
import csv
import dataclasses
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import sympy

from .automata import (
    LeveledAlphabet,
    PathExplosion,
    build_commutative_transform,
    build_one_pass,
    build_pattern_counter,
    build_remainder_nfa,
    build_small_degree,
    build_sparsify,
    build_step1,
    dump_automaton,
    step1_scalar_names,
)
from .circuit import (
    CircuitFileError,
    CircuitProfile,
    expand,
    load_circuit,
    random_circuit,
    save_circuit,
    syntactic_degree,
    validate_plus_regular,
)
from .field import MERSENNE61, SeededRng, make_prime_field, sample_uniform
from .ncpoly import CapExceeded, DEFAULT_MONOMIAL_CAP, VarSet, fmt_nc
from .pit import (
    DegreeTooLarge,
    DepthMismatch,
    EvenDepth,
    MissingDegreeHint,
    PitConfig,
    al_baseline,
    blackbox_from_circuit,
    dlsz_scalarize,
    pit_depth3,
    pit_depth5,
    pit_general,
    pit_oracle,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAP = 3

STRATEGIES = ("auto", "depth3", "depth5", "general", "oracle", "al")


def _parse_degrees(text):
    try:
        degrees = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected D1,D2,... integers, got {text!r}")
    if not degrees or any(x < 1 for x in degrees):
        raise argparse.ArgumentTypeError("layer degrees must be positive")
    return degrees


def _field_from(args):
    modulus = getattr(args, "field", None) or MERSENNE61
    if not sympy.isprime(modulus):
        raise SystemExit(_fail(EXIT_INVALID, f"--field {modulus} is not prime"))
    return make_prime_field(modulus)


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def _config_from(args, field):
    kwargs = {"field": field, "seed": args.seed, "trials": args.trials}
    for name in ("monomial_cap", "path_cap", "dim_cap"):
        value = getattr(args, name, None)
        if value is not None:
            kwargs[name] = value
    return PitConfig(**kwargs)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------- run ----------------


def _dispatch(strategy, circ, bb, cfg):
    if strategy == "oracle":
        return pit_oracle(circ, cfg)
    if strategy == "al":
        return al_baseline(bb, syntactic_degree(circ), cfg)
    if strategy == "depth3":
        return pit_depth3(bb, cfg)
    if strategy == "depth5":
        return pit_depth5(bb, cfg)
    if strategy == "general":
        return pit_general(bb, cfg)
    try:
        return pit_general(bb, cfg)
    except (EvenDepth, MissingDegreeHint, DegreeTooLarge):
        return pit_oracle(circ, cfg)


def cmd_run(args):
    field = _field_from(args)
    try:
        circ = load_circuit(args.circuit, field)
    except FileNotFoundError:
        return _fail(EXIT_INVALID, f"no such file: {args.circuit}")
    except CircuitFileError as e:
        where = f" (line {e.line})" if getattr(e, "line", None) else ""
        return _fail(EXIT_INVALID, f"{args.circuit}: {e}{where}")

    report = validate_plus_regular(circ)
    if not report.ok:
        for v in report.violations:
            loc = "".join(
                f" {k}={getattr(v, k)}" for k in ("gate", "layer") if getattr(v, k) is not None
            )
            print(f"violation: {v.code}: {v.where}{loc}", file=sys.stderr)
        return _fail(EXIT_INVALID, f"{args.circuit}: {len(report.violations)} violation(s)")

    cfg = _config_from(args, field)
    bb = blackbox_from_circuit(circ)
    if args.degrees:
        bb = dataclasses.replace(bb, hints={**bb.hints, "degrees": args.degrees})
    try:
        rep = _dispatch(args.strategy, circ, bb, cfg)
    except (CapExceeded, PathExplosion, DegreeTooLarge) as e:
        return _fail(EXIT_CAP, str(e))
    except (DepthMismatch, EvenDepth, MissingDegreeHint) as e:
        return _fail(EXIT_INVALID, str(e))
    _emit(rep.to_json() + "\n", args.out)
    return EXIT_OK


# ---------------- gen ----------------


def _default_shape(depth, rng):
    nlayers = (depth + 1) // 2 - 1
    if depth == 3:
        return (rng.randint(2, 8),), rng.randint(1, 4)
    if depth == 5:
        return (rng.randint(2, 4), rng.randint(2, 3)), rng.randint(1, 2)
    return tuple(2 for _ in range(nlayers)), 1


def cmd_gen(args):
    field = _field_from(args)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    root = SeededRng(args.seed).split("gen")
    nzero = int(round(args.count * args.zero_frac))
    cfg = _config_from(args, field)
    instances = []
    for i in range(args.count):
        rng = root.split(f"inst{i}")
        planted = i < nzero
        if args.degrees:
            degrees, fanin = args.degrees, args.top_fanin or 2
        else:
            degrees, fanin = _default_shape(args.depth, rng.split("shape"))
            if args.top_fanin:
                fanin = args.top_fanin
        try:
            profile = CircuitProfile(
                depth=args.depth,
                n=args.n,
                degrees=degrees,
                top_fanin=fanin,
                zero_planted=planted,
            )
            circ = random_circuit(profile, field, rng.split("circuit"))
        except ValueError as e:
            return _fail(EXIT_INVALID, str(e))
        name = f"circuit_{i:03d}.json"
        save_circuit(circ, outdir / name)
        if planted:
            truth = "ZERO"
        else:
            try:
                truth = pit_oracle(circ, cfg).verdict
            except CapExceeded:
                truth = "UNKNOWN"
        instances.append(
            {
                "file": name,
                "depth": args.depth,
                "n": args.n,
                "degrees": list(degrees),
                "top_fanin": fanin,
                "zero_planted": planted,
                "truth": truth,
            }
        )
    manifest = {
        "count": args.count,
        "seed": args.seed,
        "field": field.modulus,
        "instances": instances,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.count} circuits + manifest to {outdir}")
    return EXIT_OK


# ---------------- dump-automaton ----------------


def _build_family(args, field):
    rng = SeededRng(args.seed).split("dump")
    arity = args.arity or args.s
    if args.family in ("step1", "onepass"):
        yz = dlsz_scalarize(VarSet(step1_scalar_names(args.s, args.n)), field, rng)
        build = build_step1 if args.family == "step1" else build_one_pass
        return build(args.s, args.n, yz)
    if args.family == "small":
        return build_small_degree(args.cycle, args.n, field)
    alphabet = LeveledAlphabet.xi(arity)
    if args.family == "sparsify":
        zeta = dlsz_scalarize(alphabet.varset, field, rng.split("zeta"))
        chi = tuple(sample_uniform(field, rng.split("chi")) for _ in range(args.s))
        return build_sparsify(args.s, zeta=zeta, chi=chi, alphabet=alphabet)
    if args.family == "comtrans":
        return build_commutative_transform(blocks=args.s, fld=field, alphabet=alphabet)
    if args.family == "counter":
        return build_pattern_counter(args.s, args.p, args.lam, field, alphabet=alphabet)
    if args.family == "remainder":
        return build_remainder_nfa(args.s, args.p, args.lam, field, alphabet=alphabet)
    raise SystemExit(_fail(EXIT_INVALID, f"unknown family {args.family!r}"))


def cmd_dump_automaton(args):
    field = _field_from(args)
    fam = _build_family(args, field)
    _emit(dump_automaton(fam), args.out)
    return EXIT_OK


# ---------------- expand ----------------


def cmd_expand(args):
    field = _field_from(args)
    try:
        circ = load_circuit(args.circuit, field)
    except FileNotFoundError:
        return _fail(EXIT_INVALID, f"no such file: {args.circuit}")
    except CircuitFileError as e:
        return _fail(EXIT_INVALID, f"{args.circuit}: {e}")
    try:
        poly = expand(circ, cap=args.monomial_cap or DEFAULT_MONOMIAL_CAP)
    except CapExceeded as e:
        return _fail(EXIT_CAP, str(e))
    _emit(fmt_nc(poly) + "\n", args.out)
    return EXIT_OK


# ---------------- bench ----------------


def _bench_one(task):
    path, strategy, modulus, seed, trials = task
    field = make_prime_field(modulus)
    cfg = PitConfig(field=field, seed=seed, trials=trials)
    circ = load_circuit(path, field)
    bb = blackbox_from_circuit(circ)
    t0 = time.perf_counter()
    try:
        rep = _dispatch(strategy, circ, bb, cfg)
        verdict, n = rep.verdict, rep.N
    except (CapExceeded, PathExplosion, DegreeTooLarge) as e:
        verdict, n = f"error({type(e).__name__})", 0
    millis = int(round((time.perf_counter() - t0) * 1000))
    return (Path(path).name, strategy, n, verdict, millis)


def cmd_bench(args):
    field = _field_from(args)
    corpus = Path(args.corpus)
    files = sorted(p for p in corpus.glob("circuit_*.json"))
    if not files:
        return _fail(EXIT_INVALID, f"no circuit_*.json files under {corpus}")
    tasks = [(str(p), args.strategy, field.modulus, args.seed, args.trials) for p in files]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["instance", "strategy", "N", "verdict", "millis"])
    for row in sorted(rows):
        writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------- parser ----------------


def _add_common(p):
    p.add_argument("--field", type=int, default=None, help="Prime modulus (default 2^61-1).")
    p.add_argument("--seed", type=int, default=0, help="Master seed; all randomness derives from it.")
    p.add_argument("--trials", type=int, default=5, help="Independent scalar draws per plan.")
    p.add_argument("--monomial-cap", type=int, default=None, dest="monomial_cap")
    p.add_argument("--path-cap", type=int, default=None, dest="path_cap")
    p.add_argument("--dim-cap", type=int, default=None, dest="dim_cap")
    p.add_argument("--out", type=str, default=None, help="Write output here instead of stdout.")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="ncpit",
        description="Randomized identity testing for layered non-commutative circuits.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Validate a circuit file and test it for identity.")
    run.add_argument("circuit", help="Circuit file (line-oriented JSON).")
    run.add_argument("--strategy", choices=STRATEGIES, default="auto")
    run.add_argument(
        "--degrees",
        type=_parse_degrees,
        default=None,
        help="Override layer product arities, bottom-up (D1,D2,...).",
    )
    _add_common(run)
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen", help="Write a deterministic corpus with a truth manifest.")
    gen.add_argument("outdir")
    gen.add_argument("--depth", type=int, required=True, help="Odd circuit depth (3, 5, 7, ...).")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--n", type=int, default=2, help="Variable count.")
    gen.add_argument("--degrees", type=_parse_degrees, default=None)
    gen.add_argument("--top-fanin", type=int, default=None, dest="top_fanin")
    gen.add_argument(
        "--zero-frac",
        type=float,
        default=0.5,
        dest="zero_frac",
        help="Fraction of instances planted identically zero.",
    )
    _add_common(gen)
    gen.set_defaults(func=cmd_gen)

    dump = sub.add_parser("dump-automaton", help="Print a substitution family as text.")
    dump.add_argument(
        "family",
        choices=("step1", "onepass", "small", "sparsify", "comtrans", "counter", "remainder"),
    )
    dump.add_argument("--s", type=int, default=3, help="Stage parameter (fan-in / blocks / denominator).")
    dump.add_argument("--n", type=int, default=2, help="Variable count (step1/onepass/small).")
    dump.add_argument("--cycle", type=int, default=2, help="Cycle length (small).")
    dump.add_argument("--arity", type=int, default=None, help="Alphabet arity (defaults to --s).")
    dump.add_argument("--p", type=int, default=2, help="Counting modulus (counter/remainder).")
    dump.add_argument("--lam", type=int, default=0, help="Target residue (counter/remainder).")
    _add_common(dump)
    dump.set_defaults(func=cmd_dump_automaton)

    exp = sub.add_parser("expand", help="Print the canonical expanded polynomial.")
    exp.add_argument("circuit")
    _add_common(exp)
    exp.set_defaults(func=cmd_expand)

    bench = sub.add_parser("bench", help="CSV of (instance, strategy, N, verdict, millis).")
    bench.add_argument("corpus", help="Directory of circuit_*.json files.")
    bench.add_argument("--strategy", choices=STRATEGIES, default="auto")
    bench.add_argument("--jobs", type=int, default=1, help="Parallel workers across files.")
    _add_common(bench)
    bench.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
