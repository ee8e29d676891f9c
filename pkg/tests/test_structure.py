import random

import pytest

from perverse.fields import QQ
from perverse.poset import Poset
from perverse.linalg import vec_add, vec_scale
from perverse.algebra import PDGA, algebra_as_bimodule, dual_bimodule
from perverse.builders import (sphere_algebra, truncated_polynomial, corpus,
                               random_pdga)
from perverse.hochschild import (Chains, Cochains, middle_words, word_sdeg,
                                 apply_cochain_D, action_pairing, sdeg, _sgn)
from perverse.structure import (cochain_op, mult_op, diff_op, unit_cochain,
                                to_cochain, brace, circle, op_combine,
                                cup_op, bracket_op, cochain_D_op, iota, lie,
                                connes_B, phi_pairing, phi_pairing_inv,
                                connes_B_dual, ChainsSlots, find_duality_class,
                                BVOperator, random_cochain, verify_calculus,
                                _sub)

P3 = Poset(3)
Z0 = P3.zero


def _rand_hom_cochain(A, words, rng, lo=-5, hi=5):
    for _ in range(30):
        q = rng.randint(lo, hi)
        f = random_cochain(A, words, q, rng)
        if f:
            return f, q
    return {}, 0


def _nondegenerate_family():
    return [sphere_algebra(QQ, P3, 2),
            truncated_polynomial(QQ, P3, 2, power=3),
            random_pdga(QQ, P3, 0, labeled=False),
            random_pdga(QQ, P3, 5, labeled=False)]


# --- brace calculus, exact at chain level ----------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_cochain_differential_is_hochschild_bracket(seed):
    # D*f = [d_A, f] + [m, f], compared against the direct differential
    rng = random.Random(seed)
    for A in _nondegenerate_family():
        words = middle_words(A, 4)
        f, q = _rand_hom_cochain(A, words, rng)
        lhs = apply_cochain_D(A, algebra_as_bimodule(A), f, q, words)
        rhs = to_cochain(cochain_D_op(cochain_op(A, f, q)), words)
        assert lhs == rhs


@pytest.mark.parametrize("seed", range(4))
def test_cup_is_signed_double_brace(seed):
    rng = random.Random(100 + seed)
    for A in _nondegenerate_family():
        words = middle_words(A, 4)
        f, qf = _rand_hom_cochain(A, words, rng)
        g, qg = _rand_hom_cochain(A, words, rng)
        fop, gop = cochain_op(A, f, qf), cochain_op(A, g, qg)
        lhs = to_cochain(cup_op(fop, gop), words)
        rhs = to_cochain(brace(mult_op(A), [fop, gop]), words)
        rhs = {k: QQ.mul(_sgn(QQ, qf), c) for k, c in rhs.items()}
        assert lhs == rhs


def test_cup_brace_sign_is_not_optional():
    # negative control: dropping the (-1)^{|f|} breaks the comparison
    A = truncated_polynomial(QQ, P3, 2, power=3)
    words = middle_words(A, 4)
    f = {(("x",), "x"): QQ.one}
    fop = cochain_op(A, f, 1)
    cup = to_cochain(cup_op(fop, fop), words)
    braced = to_cochain(brace(mult_op(A), [fop, fop]), words)
    assert cup and braced
    assert cup != braced
    signed = {k: QQ.mul(_sgn(QQ, 1), c) for k, c in braced.items()}
    assert cup == signed


def test_cup_unit_laws():
    rng = random.Random(7)
    for A in _nondegenerate_family():
        words = middle_words(A, 4)
        f, qf = _rand_hom_cochain(A, words, rng)
        fop = cochain_op(A, f, qf)
        uop = cochain_op(A, unit_cochain(A), 0)
        assert to_cochain(cup_op(fop, uop), words) == f
        assert to_cochain(cup_op(uop, fop), words) == f


@pytest.mark.parametrize("seed", range(4))
def test_bracket_skew_commutativity_exact(seed):
    rng = random.Random(200 + seed)
    for A in _nondegenerate_family():
        words = middle_words(A, 4)
        f, qf = _rand_hom_cochain(A, words, rng)
        g, qg = _rand_hom_cochain(A, words, rng)
        fop, gop = cochain_op(A, f, qf), cochain_op(A, g, qg)
        lhs = to_cochain(bracket_op(fop, gop), words)
        rhs = to_cochain(bracket_op(gop, fop), words)
        s = _sgn(QQ, 1 + (qf - 1) * (qg - 1))
        assert lhs == {k: QQ.mul(s, c) for k, c in rhs.items()}


@pytest.mark.parametrize("seed", range(3))
def test_pre_jacobi_exact(seed):
    # (phi{f}){g,h} expansion into the six ordered insertions
    rng = random.Random(300 + seed)
    for A in _nondegenerate_family()[:2]:
        words = middle_words(A, 4)
        phi, qp = _rand_hom_cochain(A, words, rng)
        f, qf = _rand_hom_cochain(A, words, rng)
        g, qg = _rand_hom_cochain(A, words, rng)
        h, qh = _rand_hom_cochain(A, words, rng)
        pop = cochain_op(A, phi, qp)
        fop, gop = cochain_op(A, f, qf), cochain_op(A, g, qg)
        hop = cochain_op(A, h, qh)
        lhs = to_cochain(brace(brace(pop, [fop]), [gop, hop]), words)
        terms = [
            (0, brace(pop, [fop, gop, hop])),
            (0, brace(pop, [brace(fop, [gop]), hop])),
            (0, brace(pop, [brace(fop, [gop, hop])])),
            ((qf - 1) * (qg - 1), brace(pop, [gop, fop, hop])),
            ((qf - 1) * (qg - 1), brace(pop, [gop, brace(fop, [hop])])),
            ((qf - 1) * (qg + qh), brace(pop, [gop, hop, fop])),
        ]
        assert lhs == to_cochain(op_combine(A, 0, terms), words)


# --- cyclic operator on chains ---------------------------------------------


@pytest.mark.parametrize("name", ["sphere2", "sphere3", "trunc2", "trunc3"])
def test_connes_B_squares_to_zero(name):
    A = corpus(QQ, P3)[name]
    ch = Chains(A, algebra_as_bimodule(A), 4)
    for (m, w) in [(A.unit, ()), ("x", ()), ("x", ("x",))]:
        z = {(m, w): QQ.one}
        assert connes_B(ch, connes_B(ch, z)) == {}


@pytest.mark.parametrize("seed", range(4))
def test_connes_B_anticommutes_with_boundary(seed):
    A = _nondegenerate_family()[2 + seed % 2]
    ch = Chains(A, algebra_as_bimodule(A), 4)
    rng = random.Random(seed)
    keys = [(m, w) for w in middle_words(A, 2) for m in A.names]
    z = {k: QQ.of(rng.choice([1, -1, 2])) for k in keys if rng.random() < 0.5}
    lhs = connes_B(ch, ch.D(z))
    rhs = ch.D(connes_B(ch, z))
    assert vec_add(QQ, lhs, rhs) == {}


def test_connes_B_overflow_guard():
    A = sphere_algebra(QQ, P3, 2)
    ch = Chains(A, algebra_as_bimodule(A), 2)
    with pytest.raises(OverflowError):
        connes_B(ch, {("x", ("x", "x")): QQ.one})


def test_iota_of_unit_cochain_is_identity():
    for A in _nondegenerate_family():
        ch = Chains(A, algebra_as_bimodule(A), 4)
        uop = cochain_op(A, unit_cochain(A), 0)
        for w in middle_words(A, 3):
            for m in A.names:
                z = {(m, w): QQ.one}
                assert iota(ch, uop, z) == z


def test_iota_is_a_module_map_on_homology():
    # i_f i_g = i_{f cup g} on classes
    L = 5
    for A in (sphere_algebra(QQ, P3, 2),
              truncated_polynomial(QQ, P3, 2, power=3)):
        words = middle_words(A, L)
        cs = ChainsSlots(A, L, -2, 6)
        cx = Cochains(A, algebra_as_bimodule(A), L, -3, 6)
        reps = [(q, rep) for q in range(-2, 5)
                for rep in cx.representatives(Z0, q)]
        chains = [(qc, z) for qc in range(0, 4)
                  for z in cs.representatives(Z0, qc)
                  if cs.margin(Z0, qc) >= 2]
        checked = 0
        for (qf, f) in reps:
            for (qg, g) in reps:
                fop, gop = cochain_op(A, f, qf), cochain_op(A, g, qg)
                fg = cochain_op(A, to_cochain(cup_op(fop, gop), words),
                                qf + qg)
                for qc, z in chains:
                    lhs = iota(cs.ch, fop, iota(cs.ch, gop, z))
                    rhs = iota(cs.ch, fg, z)
                    assert cs.is_boundary(Z0, qc + qf + qg,
                                          _sub(QQ, lhs, rhs))
                    checked += 1
        assert checked


def test_lie_satisfies_cartan_module_axioms_on_homology():
    # L_f is the commutator of B with i_f; the other two axioms follow and
    # are checked on classes
    L = 5
    A = sphere_algebra(QQ, P3, 2)
    words = middle_words(A, L)
    cs = ChainsSlots(A, L, -2, 8)
    ch = cs.ch
    cx = Cochains(A, algebra_as_bimodule(A), L, -3, 8)
    reps = [(q, rep) for q in range(-2, 5)
            for rep in cx.representatives(Z0, q)]
    chains = [(qc, z) for qc in range(0, 4)
              for z in cs.representatives(Z0, qc)
              if cs.margin(Z0, qc) >= 2]
    for (qf, f) in reps:
        fop = cochain_op(A, f, qf)
        for (qg, g) in reps:
            gop = cochain_op(A, g, qg)
            br = cochain_op(A, to_cochain(bracket_op(fop, gop), words),
                            qf + qg - 1)
            fg = cochain_op(A, to_cochain(cup_op(fop, gop), words), qf + qg)
            for qc, z in chains:
                # i_{[f,g]} = (-1)^{|g|(|f|+1)} L_f i_g - i_g L_f
                lhs = iota(ch, br, z)
                s = _sgn(QQ, qg * (qf + 1))
                rhs = vec_scale(QQ, s, lie(ch, fop, iota(ch, gop, z)))
                rhs = _sub(QQ, rhs, iota(ch, gop, lie(ch, fop, z)))
                assert cs.is_boundary(Z0, qc + qf + qg - 1,
                                      _sub(QQ, lhs, rhs))
                # L_{f cup g} = L_f i_g + (-1)^{|f|} i_f L_g
                lhs = lie(ch, fg, z)
                rhs = lie(ch, fop, iota(ch, gop, z))
                rhs = vec_add(QQ, rhs, vec_scale(
                    QQ, _sgn(QQ, qf), iota(ch, fop, lie(ch, gop, z))))
                assert cs.is_boundary(Z0, qc + qf + qg - 1,
                                      _sub(QQ, lhs, rhs))


def test_two_sum_lie_shape_misses_length_zero_chains():
    # any formula whose terms all evaluate the cochain on subwords or wraps
    # of the middle word is identically zero on a0[]; the commutator with B
    # is not, so the two-sum shape cannot be the right operator
    A = sphere_algebra(QQ, P3, 2)
    L = 4
    cs = ChainsSlots(A, L, -2, 6)
    f = {((), "x"): QQ.one}
    fop = cochain_op(A, f, 2)
    z = {(A.unit, ()): QQ.one}
    out = lie(cs.ch, fop, z)
    assert out == {(A.unit, ("x",)): QQ.one}
    assert not cs.is_boundary(Z0, 1, out)


# --- dual pairing and the cyclic operator on dual cochains -----------------


@pytest.mark.parametrize("seed", [0, 5])
def test_pairing_transport_of_the_differential(seed):
    # phi(D* e) = -(-1)^{|e|} phi(e) o D, entrywise on basis cochains
    A = random_pdga(QQ, P3, seed, labeled=False)
    D = dual_bimodule(A)
    L = 4
    words = middle_words(A, L)
    ch = Chains(A, algebra_as_bimodule(A), L)
    checked = 0
    for w in words:
        if len(w) > L - 1:
            continue
        for m in D.names:
            q = D.degree[m] - word_sdeg(A, w)
            e = {(w, m): QQ.one}
            lhs = phi_pairing(A, apply_cochain_D(A, D, e, q, words))
            phi = phi_pairing(A, e)
            comp = {}
            for w2 in words:
                for b in A.names:
                    val = QQ.zero
                    for k2, c2 in ch.D_key((b, w2)).items():
                        val = QQ.add(val, QQ.mul(c2, phi.get(k2, QQ.zero)))
                    if not QQ.iszero(val):
                        comp[(b, w2)] = val
            s = _sgn(QQ, q + 1)
            scaled = {k: QQ.mul(s, c) for k, c in comp.items()}
            lhs = {k: c for k, c in lhs.items() if not QQ.iszero(c)}
            assert lhs == scaled
            if lhs:
                checked += 1
    assert checked


def test_pairing_roundtrip():
    A = sphere_algebra(QQ, P3, 2)
    f = {(("x",), "x*"): QQ.of(3), ((), "1*"): QQ.of(-2)}
    assert phi_pairing_inv(A, phi_pairing(A, f)) == f


@pytest.mark.parametrize("seed", range(3))
def test_bdual_matches_pairing_composition(seed):
    # B_dual f = phi^{-1}(-(-1)^{|f|} phi(f) o B) on basis cochains
    A = _nondegenerate_family()[2 + seed % 2]
    D = dual_bimodule(A)
    L = 4
    words = middle_words(A, L)
    ch = Chains(A, algebra_as_bimodule(A), L)
    checked = 0
    for w in words:
        for m in D.names:
            q = D.degree[m] - word_sdeg(A, w)
            e = {(w, m): QQ.one}
            phi = phi_pairing(A, e)
            psi = {}
            for w2 in words:
                if len(w2) + 1 > L:
                    continue
                for b in A.names:
                    val = QQ.zero
                    for k2, c2 in connes_B(ch, {(b, w2): QQ.one}).items():
                        val = QQ.add(val, QQ.mul(c2, phi.get(k2, QQ.zero)))
                    if not QQ.iszero(val):
                        psi[(b, w2)] = QQ.mul(_sgn(QQ, q + 1), val)
            ref = phi_pairing_inv(A, psi)
            cur = {k: c for k, c in connes_B_dual(A, e, q, words).items()
                   if not QQ.iszero(c)}
            assert cur == ref
            if ref:
                checked += 1
    assert checked


@pytest.mark.parametrize("seed", range(2))
def test_bdual_anticommutes_and_squares_to_zero(seed):
    A = _nondegenerate_family()[1 + seed]
    D = dual_bimodule(A)
    L = 5
    words = middle_words(A, L)
    bydeg = {}
    for w in words:
        if len(w) > L - 2:
            continue
        for m in D.names:
            q = D.degree[m] - word_sdeg(A, w)
            bydeg.setdefault(q, []).append((w, m))
    rng = random.Random(seed)
    informative = 0
    for q, pairs in sorted(bydeg.items()):
        for _ in range(4):
            f = {p: QQ.of(rng.choice([1, -1, 2])) for p in pairs
                 if rng.random() < 0.6}
            if not f:
                continue
            df = apply_cochain_D(A, D, f, q, words)
            bdf = connes_B_dual(A, df, q + 1, words)
            dbf = apply_cochain_D(
                A, D, connes_B_dual(A, f, q, words), q - 1, words)
            total = vec_add(QQ, bdf, dbf)
            assert all(QQ.iszero(c) for c in total.values())
            if bdf or dbf:
                informative += 1
            bbf = connes_B_dual(
                A, connes_B_dual(A, f, q, words), q - 1, words)
            assert all(QQ.iszero(c) for c in bbf.values())
    assert informative


# --- duality detection and the BV operator ---------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_duality_class_detected_for_spheres(n):
    A = sphere_algebra(QQ, P3, n)
    nc, Mv = find_duality_class(A)
    assert nc == n
    assert set(Mv) == {"x*"}


def test_duality_class_detected_for_truncated_polynomial():
    A = truncated_polynomial(QQ, P3, 2, power=3)
    nc, Mv = find_duality_class(A)
    assert nc == 4


def test_duality_gate_rejects_noncommutative():
    A = PDGA(QQ, P3,
             [("1", 0, P3.zero), ("x", 2, P3.zero), ("y", 2, P3.zero),
              ("z", 4, P3.zero)], "1",
             products={("x", "y"): {"z": QQ.one}})
    assert not A.is_commutative()
    with pytest.raises(ValueError, match="non-commutative duality lift"):
        find_duality_class(A)
    rows = verify_calculus(A, 3, -2, 2, trials=2, seed=0)
    tail = rows[-1]
    assert tail["identity"] == "BV block"
    assert tail["status"] == "skipped"
    assert tail["witness"] == "unsupported: non-commutative duality lift"


def test_duality_gate_reports_missing_class():
    # commutative but without a fundamental-class isomorphism
    A = PDGA(QQ, P3,
             [("1", 0, P3.zero), ("x", 2, P3.zero), ("y", 4, P3.zero)], "1",
             products={})
    assert A.is_commutative()
    with pytest.raises(LookupError, match="not a detected pDPDA"):
        find_duality_class(A)


@pytest.mark.parametrize("n", [2, 3])
def test_bv_operator_on_spheres(n):
    A = sphere_algebra(QQ, P3, n)
    bv = BVOperator(A, 5, -6, 6)
    assert bv.n == n
    for r in P3.elements:
        assert bv.unit_obstruction(r) == {}
    squares = 0
    for q in range(-6, 7):
        try:
            m1 = bv.matrix(Z0, q)
            m2 = bv.matrix(Z0, q - 1)
        except LookupError:
            continue
        if m1.ncols and m2.nrows:
            assert m2.mul(m1).is_zero()
            squares += 1
    assert squares


def test_bv_unstable_slot_raises():
    # HH^{-5} of the even sphere needs full-length words at L = 5; the
    # duality solve refuses instead of guessing
    A = sphere_algebra(QQ, P3, 2)
    bv = BVOperator(A, 5, -6, 6)
    f = bv.cx.representatives(Z0, -4)[0]
    with pytest.raises(LookupError, match="stable truncation window"):
        bv.delta(Z0, -4, f)


# --- the suite --------------------------------------------------------------


@pytest.mark.parametrize("name", ["sphere2", "sphere3", "truncx3"])
def test_identity_suite_passes(name):
    A = {"sphere2": sphere_algebra(QQ, P3, 2),
         "sphere3": sphere_algebra(QQ, P3, 3),
         "truncx3": truncated_polynomial(QQ, P3, 2, power=3)}[name]
    rows = verify_calculus(A, 5, -6, 6, trials=8, seed=1)
    assert not [r for r in rows if r["status"] == "fail"], rows
    names = [r["identity"] for r in rows]
    assert "BV seven-term relation" in names
    assert "Menichi identity" in names


def test_identity_suite_trivial_algebra():
    A = corpus(QQ, P3)["trivial"]
    rows = verify_calculus(A, 3, -2, 2, trials=4, seed=0)
    assert not [r for r in rows if r["status"] == "fail"], rows
