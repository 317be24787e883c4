import pytest
from hypothesis import given, strategies as st

from cyclicsplit.errors import InvalidAutomorphism, InvalidLetter, PreconditionViolation
from cyclicsplit.whitehead import AutSequence, TypeI, TypeII
from cyclicsplit.words import (Alphabet, apply_aut_to_word, conjugate, cyclic_reduce,
                               free_reduce, inverse, is_cyclically_reduced, is_proper_power,
                               is_reduced, multiply, power)

X = Alphabet(("a", "b"))
X3 = Alphabet(("a", "b", "c"))

letters2 = st.sampled_from([1, -1, 2, -2])
raw_words = st.lists(letters2, max_size=12).map(tuple)


def test_parse_and_format_round_trip():
    assert X.parse("a b A B") == (1, 2, -1, -2)
    assert X.parse("abAB") == (1, 2, -1, -2)
    assert X.format((1, 2, -1, -2)) == "a b A B"


def test_alphabet_from_string():
    assert Alphabet.from_string("a,b,c") == X3
    assert Alphabet.from_string("abc") == X3
    with pytest.raises(ValueError):
        Alphabet.from_string("a")


def test_unknown_symbol_reports_position():
    with pytest.raises(InvalidLetter) as info:
        X.parse_words("a x")
    assert info.value.symbol == "x" and info.value.position == 2


def test_parse_words_separators_and_identity():
    assert X.parse_words("a, B a b") == [(1,), (-2, 1, 2)]
    assert X.parse_words("a\nb") == [(1,), (2,)]
    assert X.parse_words("a, a") == [(1,), (1,)]
    with pytest.warns(UserWarning):
        assert X.parse_words("a A, b") == [(2,)]


def test_free_reduce_examples():
    assert free_reduce((1, 2, -2, -1, 1)) == (1,)
    assert free_reduce(()) == ()
    with pytest.raises(InvalidLetter):
        free_reduce((1, 3), X)


@given(raw_words)
def test_free_reduce_is_reduced_and_idempotent(w):
    r = free_reduce(w)
    assert is_reduced(r)
    assert free_reduce(r) == r


@given(raw_words, raw_words)
def test_inverse_is_antihomomorphism(u, v):
    assert inverse(multiply(u, v)) == multiply(inverse(v), inverse(u))
    assert multiply(u, inverse(u)) == ()


@given(raw_words)
def test_cyclic_reduce_reconstructs(w):
    core, c = cyclic_reduce(w)
    assert is_cyclically_reduced(core)
    assert multiply(c, core, inverse(c)) == free_reduce(w)


def test_proper_power():
    assert is_proper_power((1, 2, 1, 2)) == ((1, 2), 2)
    assert is_proper_power((1, 1, 1)) == ((1,), 3)
    assert is_proper_power((1, 2, -1, -2)) is None
    with pytest.raises(PreconditionViolation):
        is_proper_power(())
    with pytest.raises(PreconditionViolation):
        is_proper_power((1, 2, -1))


@given(st.lists(letters2, min_size=1, max_size=5).map(tuple), st.integers(2, 4))
def test_powers_detected(u, k):
    core, _ = cyclic_reduce(u)
    if core:
        root, j = is_proper_power(power(core, k))
        assert power(root, j) == power(core, k)
        assert j >= k


def test_conjugate_exponent_convention():
    assert conjugate((1,), (2,)) == (-2, 1, 2)


def test_apply_type2_and_sequence():
    phi = TypeII({1, 2}, 1, 2)
    # b is in the cut, B is not
    assert apply_aut_to_word(phi, (2,)) == (2, 1)
    assert apply_aut_to_word(phi, (1, 2)) == (1, 2, 1)
    seq = AutSequence((phi, TypeI((2, 1))))
    assert apply_aut_to_word(seq, (2,)) == (1, 2)


def test_apply_rejects_foreign_letters():
    with pytest.raises(InvalidAutomorphism):
        apply_aut_to_word(TypeII({1}, 1, 2), (3,))
