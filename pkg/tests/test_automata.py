import random

import pytest

from ncpit.automata import (
    AutomatonSpec,
    LeveledAlphabet,
    PathExplosion,
    build_commutative_transform,
    build_one_pass,
    build_pattern_counter,
    build_remainder_nfa,
    build_small_degree,
    build_sparsify,
    build_step1,
    classify_paths,
    com_output_alphabet,
    dump_automaton,
    run_on_word,
    step1_scalar_names,
    wrap_with_returns,
)
from ncpit.field import make_prime_field
from ncpit.ncpoly import VarSet, xi_pattern_decompose

FLD = make_prime_field(101)


def draw_yz(s, n, rnd):
    return {name: FLD(rnd.randrange(1, 101)) for name in step1_scalar_names(s, n)}


# ---- overlay template ----


def expected_overlay_rows(s, n, yz, returns):
    """Transition tuples of the dimension-s overlay, written out directly
    from the template: loops, forward edges, and (with returns) the two
    re-arm edges into the start column."""
    rows = set()
    for i in range(1, n + 1):
        x = f"x{i}"
        z = yz[f"z{i}"].value
        for j in range(s):
            rows.add((x, j, j, z, f"xi{j + 1}"))
        for j in range(s - 1):
            rows.add((x, j, j + 1, yz[f"y{j + 1}_{i}"].value, f"xi{j + 1}"))
        if returns:
            if s >= 3:
                rows.add((x, s - 2, 0, yz[f"y{s - 1}_{i}"].value, f"xi{s - 1}"))
            rows.add((x, s - 1, 0, z, f"xi{s}"))
    return rows


def test_step1_matches_template():
    rnd = random.Random(3)
    for s in (2, 3, 4, 5):
        yz = draw_yz(s, 2, rnd)
        fam = build_step1(s, 2, yz)
        spec = AutomatonSpec.from_family(fam)
        assert spec.dim == s and spec.start == 0 and spec.accepts == (s - 1,)
        assert set(spec.transitions) == expected_overlay_rows(s, 2, yz, returns=True)


def test_one_pass_drops_only_the_returns():
    rnd = random.Random(5)
    for s in (2, 3, 4):
        yz = draw_yz(s, 2, rnd)
        fam = build_one_pass(s, 2, yz)
        spec = AutomatonSpec.from_family(fam)
        assert set(spec.transitions) == expected_overlay_rows(s, 2, yz, returns=False)


def test_wrap_with_returns_recovers_step1():
    rnd = random.Random(7)
    for s in (3, 4, 5):
        yz = draw_yz(s, 2, rnd)
        wrapped = wrap_with_returns(build_one_pass(s, 2, yz))
        direct = build_step1(s, 2, yz)
        assert wrapped.dim == direct.dim
        assert wrapped.start == direct.start
        assert wrapped.accepts == direct.accepts
        for i in range(2):
            assert wrapped.matrices[i].entries == direct.matrices[i].entries


def test_overlay_output_on_a_short_word():
    yz = {"y1_1": FLD(7), "z1": FLD(3)}
    fam = build_step1(2, 1, yz)
    out = run_on_word(fam, (0, 0))
    # q0 -loop-> q0 -advance-> q1 gives z*y on xi1 xi1;
    # q0 -advance-> q1 -loop-> q1 gives y*z on xi1 xi2
    assert out.coefficient((0, 0)) == FLD(21)
    assert out.coefficient((0, 1)) == FLD(21)
    assert out.num_terms() == 2


# ---- step-1 path classification ----


def test_classify_paths_flags_match_pattern_sums():
    rnd = random.Random(11)
    for s in (2, 3):
        yz = draw_yz(s, 2, rnd)
        fam = build_step1(s, 2, yz)
        for d1 in (2, 4):
            for length in (d1, 2 * d1):
                for w in range(2**length):
                    word = tuple((w >> b) & 1 for b in range(length))
                    for tr in classify_paths(fam, word, d1):
                        sums = [
                            p.exponent_sum()
                            for p in xi_pattern_decompose(tr.output_word, s)
                        ]
                        assert tr.structured == all(x == d1 for x in sums)


def test_classify_paths_counts_structured_runs():
    yz = {"y1_1": FLD(2), "y2_1": FLD(3), "z1": FLD(5)}
    fam = build_step1(3, 1, yz)
    traces = classify_paths(fam, (0,) * 6, 3)
    structured = [t for t in traces if t.structured]
    # one factor of degree 3 crossing q0 q1 q2 leaves one free loop slot:
    # 3 state sequences per factor, hence 9 structured paths over 2 factors
    assert len(structured) == 9
    assert all(t.states[3] == 0 for t in structured)


def test_classify_paths_explodes_on_tiny_cap():
    yz = draw_yz(2, 1, random.Random(13))
    fam = build_step1(2, 1, yz)
    with pytest.raises(PathExplosion):
        classify_paths(fam, (0,) * 8, 2, path_cap=5)


# ---- small-degree cycle ----


def test_small_degree_relabels_positions():
    fam = build_small_degree(3, 2, FLD)
    assert fam.dim == 3 and fam.start == 0 and fam.accepts == (0,)
    out = run_on_word(fam, (0, 1, 0, 1, 1, 0))
    names = [fam.out_vars.name(i) for i in next(iter(out.terms))]
    assert names == ["z1_1", "z2_2", "z3_1", "z1_2", "z2_2", "z3_1"]
    assert run_on_word(fam, (0, 1)).is_zero()
    assert run_on_word(fam, (0, 1, 0, 1)).is_zero()


# ---- pattern products used by the stage oracles ----


def greedy_factors(word, alphabet):
    """Split into maximal patterns by levels; None when not a product."""
    try:
        levels = [alphabet.level(a) for a in word]
        pats = xi_pattern_decompose(tuple(x - 1 for x in levels), alphabet.arity)
    except Exception:
        return None
    factors = []
    pos = 0
    for pat in pats:
        ln = pat.exponent_sum()
        factors.append(tuple(word[pos : pos + ln]))
        pos += ln
    return factors


def random_product(rnd, alphabet, max_factors=4, max_run=2):
    """A pattern-product word over the alphabet, greedy-compatible."""
    k = alphabet.arity
    by_level = {}
    for a in range(len(alphabet)):
        by_level.setdefault(alphabet.level(a), []).append(a)
    count = rnd.randrange(1, max_factors + 1)
    word = []
    for j in range(count):
        last = count - 1 == j
        for lvl in range(1, k):
            for _ in range(rnd.randrange(1, max_run + 1)):
                word.append(rnd.choice(by_level[lvl]))
        top_floor = 0 if (last or k > 2) else 1
        for _ in range(rnd.randrange(top_floor, max_run + 1)):
            word.append(rnd.choice(by_level[k]))
    return tuple(word)


# ---- sparsification ----


def sparsify_oracle(word, s, zeta, chi, alphabet):
    """Sum over choices of s-1 factors kept verbatim; collapsed factors
    turn into their zeta product times the chi of the current kept count."""
    import itertools

    factors = greedy_factors(word, alphabet)
    assert factors is not None
    vs = alphabet.varset
    out = {}
    m = len(factors)
    for keep in itertools.combinations(range(m), s - 1):
        kept = set(keep)
        final = factors[-1]
        if alphabet.level(final[-1]) == 1:
            continue  # stage has no accept state inside a level-1 run
        coeff = FLD.one()
        nc_seen = 0
        emitted = []
        for j, fac in enumerate(factors):
            if j in kept:
                emitted.extend(fac)
                nc_seen += 1
            else:
                coeff = coeff * chi[nc_seen]
                for a in fac:
                    coeff = coeff * zeta[vs.name(a)]
        key = tuple(emitted)
        acc = out.get(key, FLD.zero()) + coeff
        if acc:
            out[key] = acc
        elif key in out:
            del out[key]
    return out


def test_sparsify_matches_subset_oracle():
    rnd = random.Random(17)
    for k in (2, 3):
        alphabet = LeveledAlphabet.xi(k)
        for s in (2, 3):
            zeta = {name: FLD(rnd.randrange(1, 101)) for name in alphabet.varset.names}
            chi = tuple(FLD(rnd.randrange(1, 101)) for _ in range(s))
            fam = build_sparsify(s, zeta=zeta, chi=chi, alphabet=alphabet)
            assert fam.dim == 4 * s - 2
            for _ in range(40):
                word = random_product(rnd, alphabet)
                got = run_on_word(fam, word)
                want = sparsify_oracle(word, s, zeta, chi, alphabet)
                assert {w: c for w, c in got.terms.items()} == want, (k, s, word)


def test_sparsify_needs_enough_factors():
    alphabet = LeveledAlphabet.xi(3)
    zeta = {name: FLD(2) for name in alphabet.varset.names}
    chi = (FLD(1), FLD(1), FLD(1))
    fam = build_sparsify(3, zeta=zeta, chi=chi, alphabet=alphabet)
    # one factor cannot feed two verbatim slots
    assert run_on_word(fam, (0, 1, 2)).is_zero()
    # two factors, both kept: coefficient chi[2] only after both
    out = run_on_word(fam, (0, 1, 2, 0, 1))
    assert out.coefficient((0, 1, 2, 0, 1)) == FLD(1)


# ---- commutative relabeling ----


def comtrans_oracle(word, blocks, alphabet):
    """Deterministic relabeling: track (block, position), follow the
    successor relation, emit w{segment}_{letter}; None when stuck or not
    ending at a terminator position."""
    k = alphabet.arity
    term = alphabet.terminators()
    b, pos = 0, 1
    out = []
    for a in word:
        lvl = alphabet.level(a)
        if lvl == pos:
            pass
        elif lvl in alphabet.successors(pos):
            pos = lvl
        elif lvl == 1 and pos in term and b + 1 < blocks:
            b, pos = b + 1, 1
        else:
            return None
        out.append(f"w{b * k + pos}_{a + 1}")
    return tuple(out) if pos in term else None


def test_comtrans_matches_simulation():
    rnd = random.Random(19)
    for k in (2, 3):
        alphabet = LeveledAlphabet.xi(k)
        for blocks in (2, 3):
            fam = build_commutative_transform(blocks=blocks, fld=FLD, alphabet=alphabet)
            assert fam.dim == blocks * k
            for _ in range(60):
                word = random_product(rnd, alphabet, max_factors=blocks)
                got = run_on_word(fam, word)
                want = comtrans_oracle(word, blocks, alphabet)
                if want is None:
                    assert got.is_zero(), (k, blocks, word)
                else:
                    names = tuple(fam.out_vars.index(nm) for nm in want)
                    assert got.terms == {names: FLD.one()}, (k, blocks, word)


def test_comtrans_pinned_word():
    fam = build_commutative_transform(blocks=2, fld=FLD, alphabet=LeveledAlphabet.xi(2))
    out = run_on_word(fam, (0, 1, 0))
    word = next(iter(out.terms))
    assert [fam.out_vars.name(i) for i in word] == ["w1_1", "w2_2", "w3_1"]


def test_comtrans_injective_on_products():
    rnd = random.Random(23)
    alphabet = LeveledAlphabet.xi(3)
    fam = build_commutative_transform(blocks=3, fld=FLD, alphabet=alphabet)
    seen = {}
    for _ in range(200):
        word = random_product(rnd, alphabet, max_factors=3)
        got = run_on_word(fam, word)
        if got.is_zero():
            continue
        image = next(iter(got.terms))
        assert seen.get(image, word) == word
        seen[image] = word


def test_com_output_alphabet_records_skips():
    al5 = com_output_alphabet(3, LeveledAlphabet.xi(3))
    assert al5.arity == 9
    assert al5.terminators() == frozenset({5, 6})
    assert al5.jumps == frozenset({(2, 4), (5, 7)})
    al5b = com_output_alphabet(2, LeveledAlphabet.xi(2))
    assert al5b.terminators() == frozenset({1, 2})
    assert al5b.jumps == frozenset({(1, 3)})


def test_comtrans_follows_jumps_of_composed_alphabets():
    rnd = random.Random(29)
    inner = com_output_alphabet(3, LeveledAlphabet.xi(3))
    fam = build_commutative_transform(blocks=2, fld=FLD, alphabet=inner)
    by_level = {}
    for a in range(len(inner)):
        by_level.setdefault(inner.level(a), []).append(a)
    term = inner.terminators()
    # walk the successor relation so accepted words occur; a factor ending
    # at level 5 (a terminator below the arity) must jump to the next block
    hits = 0
    for _ in range(300):
        pos = 1
        word = []
        for _ in range(rnd.randrange(2, 8)):
            moves = [pos] + [m for m in sorted(inner.successors(pos)) if m <= inner.arity]
            if pos in term:
                moves.append(1)
            pos = rnd.choice(moves)
            word.append(rnd.choice(by_level[pos]))
        got = run_on_word(fam, tuple(word))
        want = comtrans_oracle(tuple(word), 2, inner)
        if want is None:
            assert got.is_zero()
        else:
            hits += 1
            names = tuple(fam.out_vars.index(nm) for nm in want)
            assert got.terms == {names: FLD.one()}
    assert hits > 30


# ---- coefficient-modification stages ----


def test_pattern_counter_filters_by_count():
    rnd = random.Random(31)
    for k in (2, 3):
        alphabet = LeveledAlphabet.xi(k)
        for p in (2, 3):
            fams = {
                lam: build_pattern_counter(k, p, lam, FLD, alphabet=alphabet)
                for lam in range(p)
            }
            assert all(f.dim == 3 * p for f in fams.values())
            for _ in range(50):
                word = random_product(rnd, alphabet)
                count = len(greedy_factors(word, alphabet))
                for lam in range(p):
                    got = run_on_word(fams[lam], word)
                    if count % p == lam:
                        assert got.terms == {tuple(word): FLD.one()}, (k, p, lam, word)
                    else:
                        assert got.is_zero(), (k, p, lam, word)


def remainder_oracle(word, p, lam, alphabet):
    """Number of counted tails: at arity >= 3 one per whole pattern with
    letter count lam mod p; at arity <= 2 one per level-1 position whose
    distance to its pattern's end is lam mod p."""
    factors = greedy_factors(word, alphabet)
    count = 0
    if alphabet.arity >= 3:
        for fac in factors:
            if len(fac) % p == lam:
                count += 1
        return count
    pos = 0
    for fac in factors:
        for off, a in enumerate(fac):
            if alphabet.level(a) == 1 and (len(fac) - off) % p == lam:
                count += 1
        pos += len(fac)
    return count


def test_remainder_scales_by_matching_patterns():
    rnd = random.Random(37)
    for k in (2, 3):
        alphabet = LeveledAlphabet.xi(k)
        for p in (2, 3):
            for lam in range(p):
                fam = build_remainder_nfa(k, p, lam, FLD, alphabet=alphabet)
                assert fam.dim == (2 * p + 3 if k <= 2 else 2 * p + 4)
                for _ in range(40):
                    word = random_product(rnd, alphabet)
                    got = run_on_word(fam, word)
                    scale = remainder_oracle(word, p, lam, alphabet) % 101
                    if scale:
                        assert got.terms == {tuple(word): FLD(scale)}, (k, p, lam, word)
                    else:
                        assert got.is_zero(), (k, p, lam, word)


# ---- texture of the flat dump ----


def test_spec_round_trip_rebuilds_matrices():
    rnd = random.Random(41)
    yz = draw_yz(3, 2, rnd)
    alphabet = LeveledAlphabet.xi(3)
    zeta = {name: FLD(rnd.randrange(1, 101)) for name in alphabet.varset.names}
    chi = tuple(FLD(rnd.randrange(1, 101)) for _ in range(3))
    fams = [
        build_step1(3, 2, yz),
        build_sparsify(3, zeta=zeta, chi=chi, alphabet=alphabet),
        build_commutative_transform(blocks=3, fld=FLD, alphabet=alphabet),
        build_pattern_counter(3, 3, 1, FLD, alphabet=alphabet),
        build_remainder_nfa(3, 2, 0, FLD, alphabet=alphabet),
    ]
    for fam in fams:
        spec = AutomatonSpec.from_family(fam)
        rebuilt = spec.reconstruct(fam.in_vars, fam.out_vars, fam.fld)
        for i, m in fam.matrices.items():
            assert {k: v for k, v in rebuilt[i].entries.items() if v} == {
                k: v for k, v in m.entries.items() if v
            }


def test_dump_automaton_sections():
    yz = draw_yz(2, 1, random.Random(43))
    text = dump_automaton(build_step1(2, 1, yz))
    lines = text.splitlines()
    assert lines[0] == "name step1(s=2,n=1)"
    assert lines[1] == "dim 2"
    assert lines[2] == "start 0"
    assert lines[3] == "accepts 1"
    assert "transitions" in lines and "matrices" in lines
