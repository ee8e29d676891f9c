import pytest

from perverse.fields import QQ
from perverse.poset import Poset
from perverse.linalg import SparseMatrix, vec_add, vec_scale, kernel_basis
from perverse.algebra import algebra_as_bimodule, dual_bimodule
from perverse.builders import (trivial_algebra, sphere_algebra,
                               truncated_polynomial, corpus, random_pdga,
                               quasi_iso_fixture)
from perverse.hochschild import (Bar, Chains, Cochains, middle_words,
                                 word_sdeg, apply_cochain_D, hh_table,
                                 hh_table_oracle, action_pairing,
                                 index_cochain, eval_cochain, InducedHH,
                                 check_pdga_map, restrict_bimodule)

P3 = Poset(3)


def identity_fmap(A):
    return {x: {x: QQ.one} for x in A.names}


# --- bar complex -----------------------------------------------------------


def test_bar_dimensions_and_degrees():
    A = sphere_algebra(QQ, P3, 2)
    bar = Bar(A, 2)
    by_len = {}
    for (a, w, b) in bar.words:
        by_len[len(w)] = by_len.get(len(w), 0) + 1
    assert by_len == {0: 4, 1: 4, 2: 4}
    assert bar.degree(("1", ("x", "x"), "1")) == 2
    assert bar.degree(("x", ("x",), "x")) == 5


def test_bar_d1_of_single_word():
    # D(1[x]1) = x[]1 - 1[]x for a closed generator
    A = sphere_algebra(QQ, P3, 2)
    bar = Bar(A, 2)
    d = bar.D_word(("1", ("x",), "1"))
    assert d == {("x", (), "1"): QQ.one, ("1", (), "x"): QQ.of(-1)}


@pytest.mark.parametrize("name", ["trivial", "sphere2", "sphere3", "trunc3"])
def test_bar_d_squared_corpus(name):
    A = corpus(QQ, P3)[name]
    bar = Bar(A, 4)
    for word in bar.words:
        assert bar.D(bar.D_word(word)) == {}, word


@pytest.mark.parametrize("seed", range(10))
def test_bar_d_squared_random(seed):
    A = random_pdga(QQ, Poset(4), seed)
    bar = Bar(A, 3)
    for word in bar.words:
        assert bar.D(bar.D_word(word)) == {}, word


def test_bar_last_sign_definition_variant_fails():
    # an eps_{k+1} sign in the last d1 term breaks D^2 = 0; the two choices
    # only differ when |s(a_k)| is odd, so use the degree-2 generator
    A = sphere_algebra(QQ, P3, 2)
    bar = Bar(A, 3)

    def D_variant(word):
        a, w, b = word
        out = dict(bar.D_word(word))
        if w:
            # flip the last d1 term from eps_k to eps_{k+1}
            s = (A.deg(w[-1]) - 1) % 2
            if s:
                for y, c in A.mul(w[-1], b).items():
                    key = (a, w[:-1], y)
                    prev = out.get(key, QQ.zero)
                    # subtracting twice the printed term flips its sign
                    two = QQ.of(2)
                    cur = QQ.add(prev, QQ.mul(two, c))
                    if QQ.iszero(cur):
                        out.pop(key, None)
                    else:
                        out[key] = cur
        return out

    def Dv(vec):
        out = {}
        for word, c in vec.items():
            out = vec_add(QQ, out, vec_scale(QQ, c, D_variant(word)))
        return out

    bad = [w for w in bar.words if Dv(Dv({w: QQ.one}))]
    assert bad, "variant sign unexpectedly satisfies D^2 = 0"


def test_q_A_is_a_surjective_chain_map():
    A = truncated_polynomial(QQ, P3, 2, power=3)
    bar = Bar(A, 3)
    for word in bar.words:
        v = {word: QQ.one}
        assert bar.q_A(bar.D(v)) == A.d_vec(bar.q_A(v)), word
    for x in A.names:
        assert bar.q_A({(x, (), "1"): QQ.one}) == {x: QQ.one}


@pytest.mark.parametrize("name", ["trivial", "sphere2", "sphere3", "sphere4",
                                  "trunc2", "trunc3"])
def test_contracting_homotopy_on_kernel(name):
    A = corpus(QQ, P3)[name]
    L = 4
    bar = Bar(A, L)

    def dh_hd(v):
        return vec_add(QQ, bar.D(bar.h(v)), bar.h(bar.D(v)))

    # positive lengths lie in ker(q_A) wordwise
    for word in bar.words:
        if not word[1] or len(word[1]) >= L:
            continue
        v = {word: QQ.one}
        assert dh_hd(v) == v, word
    # length-0 kernel: combinations with vanishing product
    zero_len = [w for w in bar.words if not w[1]]
    rows = sorted(A.names)
    m = SparseMatrix(QQ, len(rows), len(zero_len))
    for j, (a, _, b) in enumerate(zero_len):
        for y, c in A.mul(a, b).items():
            m[rows.index(y), j] = c
    for k in kernel_basis(m):
        v = {zero_len[i]: c for i, c in k.items()}
        assert dh_hd(v) == v


# --- Hochschild chains -----------------------------------------------------


@pytest.mark.parametrize("name", ["trivial", "sphere2", "sphere3", "trunc3"])
def test_chain_d_squared_corpus(name):
    A = corpus(QQ, P3)[name]
    ch = Chains(A, algebra_as_bimodule(A), 4)
    for w in ch.mids:
        for m in A.names:
            assert ch.D(ch.D_key((m, w))) == {}, (m, w)


@pytest.mark.parametrize("seed", range(10))
def test_chain_d_squared_random(seed):
    A = random_pdga(QQ, Poset(4), seed)
    ch = Chains(A, algebra_as_bimodule(A), 3)
    for w in ch.mids:
        for m in A.names:
            assert ch.D(ch.D_key((m, w))) == {}, (m, w)


def test_chain_d_on_length_zero():
    A = random_pdga(QQ, P3, 2)
    ch = Chains(A, algebra_as_bimodule(A), 2)
    for m in A.names:
        assert ch.D_key((m, ())) == {(y, ()): c for y, c in A.d(m).items()}


# --- Hochschild cochains ---------------------------------------------------


def cochain_d_squared_ok(A, M, L, lo, hi, poset):
    cx = Cochains(A, M, L, lo, hi)
    for r in poset.elements:
        for q in range(lo, hi):
            m2 = cx.matrix(r, q + 1).mul(cx.matrix(r, q))
            if not m2.is_zero():
                return False
    return True


@pytest.mark.parametrize("name", ["trivial", "sphere2", "sphere3", "trunc3"])
def test_cochain_d_squared_corpus(name):
    A = corpus(QQ, P3)[name]
    assert cochain_d_squared_ok(A, algebra_as_bimodule(A), 4, -3, 3, P3)


@pytest.mark.parametrize("seed", range(8))
def test_cochain_d_squared_random(seed):
    P = Poset(4)
    A = random_pdga(QQ, P, seed)
    assert cochain_d_squared_ok(A, algebra_as_bimodule(A), 3, -3, 3, P)


@pytest.mark.parametrize("seed", [0, 3, 5])
def test_cochain_d_squared_dual_coefficients(seed):
    P = Poset(4)
    A = random_pdga(QQ, P, seed)
    assert cochain_d_squared_ok(A, dual_bimodule(A), 3, -6, 2, P)


def test_cochain_slot_example_sphere():
    # length-1 maps x -> 1 and x -> x sit in cochain degrees -1 and 1
    A = sphere_algebra(QQ, P3, 2)
    cx = Cochains(A, algebra_as_bimodule(A), 3, -3, 3)
    r = P3.zero
    assert (("x",), "1") in cx.pairs(r, -1)
    assert (("x",), "x") in cx.pairs(r, 1)


# --- oracle first: sanity of the dense bar-dual implementation -------------


def test_oracle_trivial_algebra():
    A = trivial_algebra(QQ, P3)
    t = hh_table_oracle(A, algebra_as_bimodule(A), 3, -2, 2)
    for (r, q), d in t.items():
        assert d == (1 if q == 0 else 0), (r, q)


def test_oracle_degree_zero_is_center():
    # for commutative d=0 algebras HH^0 is the degree-0 center: the unit line
    for name in ["sphere2", "sphere3", "trunc3"]:
        A = corpus(QQ, P3)[name]
        t = hh_table_oracle(A, algebra_as_bimodule(A), 3, 0, 0)
        for (r, q), d in t.items():
            assert d == 1, (name, r, q)


def test_oracle_known_sphere2_low_degrees():
    # H*(S^2): x central, so x itself gives a 1-dim class in degree 2, and
    # the derivation x -> x gives a class in degree 0 beyond the unit? No:
    # degree-0 cochains of positive length change the table only through
    # homology; pin the whole low window instead and require L-stability.
    A = sphere_algebra(QQ, P3, 2)
    M = algebra_as_bimodule(A)
    t4 = hh_table_oracle(A, M, 4, -2, 2)
    t5 = hh_table_oracle(A, M, 5, -2, 2)
    assert t4 == t5
    assert t4[(P3.zero, 2)] >= 1  # the class of x


# --- main implementation against the oracle --------------------------------


@pytest.mark.parametrize("name", ["trivial", "sphere2", "sphere3", "trunc2",
                                  "trunc3"])
def test_hh_matches_oracle_corpus(name):
    A = corpus(QQ, P3)[name]
    M = algebra_as_bimodule(A)
    assert hh_table(A, M, 3, -3, 3) == hh_table_oracle(A, M, 3, -3, 3)


@pytest.mark.parametrize("seed", [1, 4, 6])
def test_hh_matches_oracle_random(seed):
    P = Poset(4)
    A = random_pdga(QQ, P, seed)
    M = algebra_as_bimodule(A)
    assert hh_table(A, M, 3, -2, 2) == hh_table_oracle(A, M, 3, -2, 2)


@pytest.mark.parametrize("seed", [0, 5])
def test_hh_matches_oracle_dual_coefficients(seed):
    P = Poset(4)
    A = random_pdga(QQ, P, seed)
    M = dual_bimodule(A)
    assert hh_table(A, M, 3, -5, 1) == hh_table_oracle(A, M, 3, -5, 1)


def test_window_exact_flag():
    A = sphere_algebra(QQ, P3, 2)
    M = algebra_as_bimodule(A)
    assert Cochains(A, M, 4, -2, 2).window_exact()
    assert not Cochains(A, M, 2, -2, 2).window_exact()
    B = truncated_polynomial(QQ, P3, 1)  # degree-1 generator: never exact
    assert not Cochains(B, algebra_as_bimodule(B), 6, -2, 2).window_exact()


def test_l_stability_when_exact():
    A = truncated_polynomial(QQ, P3, 3)
    M = algebra_as_bimodule(A)
    lo, hi = -2, 2
    L = max(A.degree.values()) - lo
    assert Cochains(A, M, L, lo, hi).window_exact()
    assert hh_table(A, M, L, lo, hi) == hh_table(A, M, L + 1, lo, hi)


# --- action pairing --------------------------------------------------------


def test_action_of_unit_class_is_identity():
    A = truncated_polynomial(QQ, P3, 2, power=3)
    M = algebra_as_bimodule(A)
    words = middle_words(A, 3)
    unit = {((), "1"): QQ.one}
    for g in [{((), "x"): QQ.one},
              {(("x",), "x^2"): QQ.one, (("x", "x"), "x^2"): QQ.of(2)}]:
        gdeg = {0: 2, 1: 3}  # not used beyond sign parity below
        # degree of g: take it from its first pair
        (w0, m0) = next(iter(g))
        q = A.deg(m0) - word_sdeg(A, w0)
        assert action_pairing(A, M, unit, 0, g, q, words) == g


def test_action_pairing_hand_expansion():
    # f of length 1 (x -> 1), g of length 0 (-> x): (f.g)[x] = f(x).g() = x
    A = sphere_algebra(QQ, P3, 2)
    M = algebra_as_bimodule(A)
    f = {(("x",), "1"): QQ.one}
    g = {((), "x"): QQ.one}
    out = action_pairing(A, M, f, -1, g, 2, middle_words(A, 2))
    assert out == {(("x",), "x"): QQ.one}


# --- induced maps ----------------------------------------------------------


def test_induced_identity_map():
    A = truncated_polynomial(QQ, P3, 2)
    ind = InducedHH(A, A, identity_fmap(A), 3, -2, 2)
    for r in P3.elements:
        for q in range(-2, 3):
            m = ind.matrix(r, q)
            assert m == SparseMatrix.identity(QQ, m.nrows), (r, q)


def test_induced_quasi_iso_fixture_is_iso():
    A, B, fmap = quasi_iso_fixture(QQ, P3)
    check_pdga_map(A, B, fmap)
    ind = InducedHH(A, B, fmap, 3, -2, 2)
    for r in P3.elements:
        for q in range(-2, 3):
            assert ind.is_iso(r, q), (r, q)


def test_restricted_bimodule_validates():
    A, B, fmap = quasi_iso_fixture(QQ, P3)
    rep = restrict_bimodule(A, B, fmap).validate()
    assert rep["valid"], rep["violations"][:3]
