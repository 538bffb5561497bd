import pytest
from hypothesis import given
from hypothesis import strategies as st_

from semspace.core import Body
from semspace.errors import (
    AlphabetMismatchError,
    ChainDimensionError,
    UntranslatableSymbolError,
)
from semspace.language import (
    Alphabet,
    TranslationMatrix,
    common_part,
    continuity_check,
    is_invertible,
    superagent_language,
    translate,
)

VERBS = Alphabet(("SEND", "RECEIVE", "SEEK", "FORWARD", "BACK"))
OPS = Alphabet(("PUT", "GET", "APPEND"))
WORDMAP = TranslationMatrix(
    VERBS, OPS,
    ((1, 0, 0, 0, 0),
     (0, 1, 0, 0, 0),
     (1, 0, 1, 1, 0)),
)


def body_of(*symbols):
    return Body("+", "msg", {s: 1 for s in symbols})


def test_send_translates_to_put():
    out = translate(body_of("SEND"), WORDMAP)
    assert out.coefficient("PUT") == 1
    assert out.symbol_set == {"PUT", "APPEND"}


def test_receive_translates_to_get_exactly():
    out = translate(body_of("RECEIVE"), WORDMAP)
    assert dict(out.symbols) == {"GET": 1}


def test_seek_lands_on_append_only():
    out = translate(body_of("SEEK"), WORDMAP)
    assert dict(out.symbols) == {"APPEND": 1}


def test_identity_matrix_preserves_body():
    identity = TranslationMatrix(OPS, OPS, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    body = body_of("PUT", "APPEND")
    assert translate(body, identity) == body


def test_translation_preserves_sign_type_valency():
    body = Body("-", "msg", {"SEND": 1}, valency=3)
    out = translate(body, WORDMAP)
    assert (out.sign, out.type_tag, out.valency) == ("-", "msg", 3)


def test_zero_column_symbol_is_untranslatable():
    with pytest.raises(UntranslatableSymbolError) as err:
        translate(body_of("BACK"), WORDMAP)
    assert err.value.symbol == "BACK"


def test_foreign_symbol_needs_translation_first():
    with pytest.raises(AlphabetMismatchError):
        translate(body_of("PUT"), WORDMAP)


def test_wordmap_not_invertible():
    assert not is_invertible(WORDMAP)


def test_identity_and_swap_invertible():
    identity = TranslationMatrix(OPS, OPS, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    two = Alphabet(("a", "b"))
    swap = TranslationMatrix(two, two, ((0, 1), (1, 0)))
    assert is_invertible(identity)
    assert is_invertible(swap)


def test_reverse_of_wordmap_translates_renamings_only():
    back = WORDMAP.reversed_matrix()
    assert dict(translate(body_of("PUT"), back).symbols) == {"SEND": 1}
    assert dict(translate(body_of("GET"), back).symbols) == {"RECEIVE": 1}
    with pytest.raises(UntranslatableSymbolError) as err:
        translate(body_of("APPEND"), back)
    assert err.value.symbol == "APPEND"


@given(st_.permutations(range(4)))
def test_invertible_round_trip_is_identity(perm):
    src = Alphabet(("w", "x", "y", "z"))
    dst = Alphabet(("p", "q", "r", "s"))
    rows = tuple(
        tuple(1 if perm[j] == i else 0 for j in range(4)) for i in range(4)
    )
    matrix = TranslationMatrix(src, dst, rows)
    assert is_invertible(matrix)
    inverse = matrix.inverse()
    body = Body("+", "msg", {"w": 2, "y": 1})
    assert translate(translate(body, matrix), inverse) == body


def test_unimodular_round_trip():
    two = Alphabet(("a", "b"))
    other = Alphabet(("c", "d"))
    matrix = TranslationMatrix(two, other, ((1, 1), (0, 1)))
    body = Body("+", "msg", {"a": 1, "b": 2})
    assert translate(translate(body, matrix), matrix.inverse()) == body


# -- continuity ---------------------------------------------------------------


def test_single_patch_is_continuous():
    assert continuity_check([(VERBS, None)])


def test_identity_chain_is_continuous():
    identity = TranslationMatrix(OPS, OPS, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    report = continuity_check([(OPS, identity), (OPS, None)])
    assert report.continuous


def test_zero_matrix_breaks_at_boundary_zero():
    a = Alphabet(("x",))
    b = Alphabet(("y",))
    zero = TranslationMatrix(a, b, ((0,),))
    report = continuity_check([(a, zero), (b, None)])
    assert not report.continuous
    assert report.failing_boundary == 0


def test_chain_dimension_mismatch_errors():
    other = Alphabet(("k", "l", "m"))
    identity = TranslationMatrix(OPS, OPS, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(ChainDimensionError):
        continuity_check([(OPS, identity), (other, None)])


def test_invertible_implies_two_patch_continuity():
    two = Alphabet(("a", "b"))
    other = Alphabet(("c", "d"))
    matrix = TranslationMatrix(two, other, ((1, 1), (0, 1)))
    inverse = matrix.inverse()
    assert continuity_check([(two, matrix), (other, inverse), (two, None)])


# -- distinguishability --------------------------------------------------------------


def test_dna_in_letter_and_blood():
    letter = Body("+", "evidence", {"DNA": 1, "paper": 1})
    blood = Body("+", "evidence", {"DNA": 1, "cells": 1})
    receiver = Body("-", "evidence", {"DNA": 1})
    assert common_part(letter, blood, receiver) == {"DNA"}


def test_disjoint_bodies_are_distinguishable():
    b1 = Body("+", "t", {"x": 1})
    b2 = Body("+", "t", {"y": 1})
    assert common_part(b1, b2, Body("-", "t", {"x": 1, "y": 1})) == frozenset()


def test_common_part_idempotent_and_commutative():
    b = Body("+", "t", {"x": 1, "y": 2})
    assert common_part(b, b, b) == b.symbol_set
    other = Body("+", "t", {"y": 1})
    filt = Body("-", "t", {"x": 1, "y": 1})
    assert common_part(b, other, filt) == common_part(other, b, filt)


def test_common_part_checks_alphabet():
    alpha = Alphabet(("x",))
    with pytest.raises(AlphabetMismatchError):
        common_part(Body("+", "t", {"q": 1}), Body("+", "t", {"x": 1}),
                    Body("-", "t", {"x": 1}), alphabet=alpha)


# -- super-agent language ---------------------------------------------------------------


def test_superagent_language_single():
    assert superagent_language([VERBS]) == Alphabet(tuple(sorted(VERBS.symbols)))


def test_superagent_language_disjoint_union():
    a = Alphabet(("SEND", "RECEIVE"))
    b = Alphabet(("PUT", "GET"))
    assert superagent_language([a, b]).dim == 4


@given(
    st_.lists(st_.sets(st_.sampled_from("abcdef"), min_size=1), min_size=1, max_size=4),
    st_.lists(st_.sets(st_.sampled_from("abcdef"), min_size=1), min_size=1, max_size=4),
)
def test_superagent_language_union_homomorphism(xs, ys):
    ax = [Alphabet(tuple(sorted(s))) for s in xs]
    ay = [Alphabet(tuple(sorted(s))) for s in ys]
    combined = superagent_language(ax + ay)
    merged = superagent_language([superagent_language(ax), superagent_language(ay)])
    assert combined == merged
