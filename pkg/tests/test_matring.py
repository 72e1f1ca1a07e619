import random

import pytest

from ncpit.field import make_prime_field
from ncpit.matring import (
    AffineForm,
    Matrix,
    SubstMatrixFamily,
    as_affine,
    compose_chain,
    compose_pair,
    decompose_affine,
    family_transform,
    flatten_accept,
    kron,
    sequential_chain_outputs,
)
from ncpit.ncpoly import NcPolynomial, VarSet

FLD = make_prime_field(101)


def rand_scalar_matrix(rnd, dim):
    entries = {}
    for r in range(dim):
        for c in range(dim):
            v = rnd.randrange(101)
            if v:
                entries[(r, c)] = FLD(v)
    return Matrix(dim, entries)


# ---- kronecker product ----


def test_kron_small_example():
    a = Matrix(2, {(0, 0): FLD(1), (0, 1): FLD(2)})
    b = Matrix(2, {(1, 0): FLD(3)})
    k = kron(a, b)
    assert k.dim == 4
    assert k.entries == {(1, 0): FLD(3), (1, 2): FLD(6)}


def test_kron_mixed_product_random():
    rnd = random.Random(11)
    for _ in range(60):
        da, db = rnd.randrange(1, 4), rnd.randrange(1, 4)
        a, c = rand_scalar_matrix(rnd, da), rand_scalar_matrix(rnd, da)
        b, d = rand_scalar_matrix(rnd, db), rand_scalar_matrix(rnd, db)
        assert kron(a, b) * kron(c, d) == kron(a * c, b * d)


def test_kron_associative_and_identity():
    rnd = random.Random(13)
    ident = Matrix.identity(1, FLD.one())
    for _ in range(20):
        a = rand_scalar_matrix(rnd, rnd.randrange(1, 3))
        b = rand_scalar_matrix(rnd, rnd.randrange(1, 3))
        c = rand_scalar_matrix(rnd, rnd.randrange(1, 3))
        assert kron(kron(a, b), c) == kron(a, kron(b, c))
        assert kron(a, ident) == a


# ---- affine entries ----


def rand_affine(rnd, alphabet):
    form = AffineForm.constant(alphabet, FLD, rnd.randrange(101))
    for i in range(len(alphabet)):
        if rnd.random() < 0.5:
            form = form + AffineForm.letter(alphabet, FLD, i, rnd.randrange(101))
    return form


def rand_affine_matrix(rnd, dim, alphabet, density=0.7):
    entries = {}
    for r in range(dim):
        for c in range(dim):
            if rnd.random() < density:
                form = rand_affine(rnd, alphabet)
                if form:
                    entries[(r, c)] = form
    return Matrix(dim, entries)


def test_decompose_affine_reconstructs():
    rnd = random.Random(19)
    xs = VarSet.indexed("w", 3)
    for _ in range(40):
        dim = rnd.randrange(1, 4)
        m = rand_affine_matrix(rnd, dim, xs)
        a0, lin = decompose_affine(m, xs, FLD)
        point = {i: FLD(rnd.randrange(101)) for i in range(3)}
        direct = m.map_entries(lambda v: as_affine(v, xs, FLD).evaluate(point))
        rebuilt = a0
        for k, ak in enumerate(lin):
            rebuilt = rebuilt + ak.map_entries(lambda v: v * point[k])
        assert {k: v for k, v in rebuilt.entries.items() if v} == {
            k: v for k, v in direct.entries.items() if v
        }


# ---- family composition against the sequential oracle ----


def rand_family(rnd, name, in_vars, out_vars, dim):
    matrices = {
        i: rand_affine_matrix(rnd, dim, out_vars, density=0.6)
        for i in range(len(in_vars))
    }
    naccept = rnd.randrange(1, dim + 1)
    return SubstMatrixFamily(
        name=name,
        in_vars=in_vars,
        out_vars=out_vars,
        dim=dim,
        start=rnd.randrange(dim),
        accepts=tuple(sorted(rnd.sample(range(dim), naccept))),
        fld=FLD,
        matrices=matrices,
    )


def rand_poly(rnd, varset, max_deg=5, max_terms=4):
    terms = {}
    for _ in range(rnd.randrange(1, max_terms + 1)):
        word = tuple(rnd.randrange(len(varset)) for _ in range(rnd.randrange(0, max_deg + 1)))
        terms[word] = rnd.randrange(1, 101)
    return NcPolynomial(varset, FLD, terms)


def rand_chain(rnd, k):
    alphabets = [VarSet.indexed(f"v{j}", rnd.randrange(1, 4)) for j in range(k + 1)]
    return [
        rand_family(rnd, f"st{j}", alphabets[j], alphabets[j + 1], rnd.randrange(1, 4))
        for j in range(k)
    ]


def test_compose_pair_matches_sequential_oracle():
    rnd = random.Random(29)
    for _ in range(60):
        fams = rand_chain(rnd, 2)
        comp = compose_chain(fams)
        poly = rand_poly(rnd, fams[0].in_vars)
        seq = sequential_chain_outputs(fams, poly)
        mat = family_transform(comp, poly)
        zero = NcPolynomial.zero(comp.out_vars, comp.fld)
        for accept_tuple, expected in seq.items():
            flat = flatten_accept(fams, accept_tuple)
            assert mat.entry(comp.start, flat, zero) == expected


def test_compose_chain_association_invariance():
    rnd = random.Random(37)
    for _ in range(25):
        f1, f2, f3 = rand_chain(rnd, 3)
        left = compose_pair(compose_pair(f1, f2), f3)
        right = compose_pair(f1, compose_pair(f2, f3))
        assert left.dim == right.dim and left.start == right.start
        assert sorted(left.accepts) == sorted(right.accepts)
        point = {i: FLD(rnd.randrange(101)) for i in range(len(f3.out_vars))}
        sl, sr = left.scalarize(point), right.scalarize(point)
        for i in sl:
            le = {k: v for k, v in sl[i].entries.items() if v}
            re = {k: v for k, v in sr[i].entries.items() if v}
            assert le == re


def test_composed_accepts_are_cross_products():
    rnd = random.Random(41)
    for _ in range(25):
        fams = rand_chain(rnd, 3)
        comp = compose_chain(fams)
        expected = set()
        import itertools

        for tup in itertools.product(*(f.accepts for f in fams)):
            expected.add(flatten_accept(fams, tup))
        assert set(comp.accepts) == expected


def test_compose_requires_matching_alphabets():
    rnd = random.Random(43)
    a = rand_family(rnd, "a", VarSet.indexed("u", 2), VarSet.indexed("v", 2), 2)
    b = rand_family(rnd, "b", VarSet.indexed("w", 2), VarSet.indexed("t", 2), 2)
    with pytest.raises(Exception):
        compose_pair(a, b)
