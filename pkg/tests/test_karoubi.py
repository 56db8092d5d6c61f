"""Normalised Karoubi envelope: objects, SPO pairs, decohered systems."""

import random
from fractions import Fraction as F

import pytest

import catprob.karoubi as kb
import catprob.matcat as mc
from catprob.backend import ClassicalBackend, QuantumBackend
from catprob.semirings import get_semiring
from spo_tools import random_classical_spo, random_quantum_spo

RATNN = get_semiring("ratnn")
B = ClassicalBackend(RATNN)
H3 = mc.obj_of_size(3, "h")
X2 = mc.obj_of_size(2, "x")

P = mc.morphism(RATNN, X2, H3, [[F(1, 2), 0], [F(1, 2), 0], [0, 1]])
M = mc.morphism(RATNN, H3, X2, [[1, 1, 0], [0, 0, 1]])
PAIR = kb.SpoPair(prep=P, obs=M)


def test_make_object_validates_idempotence_and_normalisation():
    idem = mc.compose(P, M)
    obj = kb.make_object(B, H3, idem)
    assert obj.base == H3
    with pytest.raises(kb.KaroubiError):
        kb.make_object(B, H3, mc.scale(F(1, 2), idem))  # not idempotent
    half = mc.scale(F(1, 2), mc.identity(RATNN, H3))
    with pytest.raises(kb.KaroubiError):
        kb.make_object(B, H3, mc.compose(half, half))  # not even idempotent
    sub = mc.morphism(RATNN, H3, H3, [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(kb.KaroubiError):
        kb.make_object(B, H3, sub)  # idempotent but not normalised


def test_spo_validation():
    rep = kb.spo_validate(B, PAIR)
    assert rep.sharp and rep.normalised
    bad = kb.SpoPair(
        prep=mc.morphism(RATNN, X2, H3, [[1, 0], [1, 0], [0, 1]]),
        obs=mc.morphism(RATNN, H3, X2, [[1, 1, 0], [0, 0, 1]]),
    )
    with pytest.raises(kb.KaroubiError):
        kb.spo_validate(B, bad)  # m . p doubles the first point


def test_decoherence_map_and_object():
    dec = kb.decoherence_map(B, PAIR)
    assert mc.equal(mc.compose(dec, dec), dec)
    assert mc.is_normalised(dec)
    obj = kb.decohered_object(B, PAIR)
    assert kb.is_hom(B, dec, obj, obj)


def test_project_hom_lands_in_the_hom_set():
    rng = random.Random(4)
    obj = kb.decohered_object(B, PAIR)
    f = mc.random_morphism(RATNN, H3, H3, rng)
    g = kb.project_hom(B, f, obj, obj)
    assert kb.is_hom(B, g, obj, obj)


def test_object_tensor():
    a = kb.decohered_object(B, PAIR)
    t = kb.object_tensor(B, a, a)
    assert t.base == mc.obj_tensor(H3, H3)


def test_classical_roundtrip_fixed_pair():
    rng = random.Random(5)
    f = mc.random_normalised(RATNN, X2, X2, rng)
    lifted = kb.declassicalise(B, f, PAIR, PAIR)
    obj = kb.decohered_object(B, PAIR)
    assert kb.is_hom(B, lifted, obj, obj)
    assert B.is_normalised(lifted)
    back = kb.classicalise(B, lifted, PAIR, PAIR)
    assert mc.equal(back, f)


def test_classicalise_rejects_non_invariant_morphisms():
    rng = random.Random(6)
    f = mc.random_morphism(RATNN, H3, H3, rng)
    with pytest.raises(kb.KaroubiError):
        kb.classicalise(B, f, PAIR, PAIR)


def test_classical_roundtrip_random_pairs():
    rng = random.Random(7)
    for _ in range(10):
        hs = rng.randrange(2, 5)
        xs = rng.randrange(1, hs + 1)
        pair_a = random_classical_spo(RATNN, mc.obj_of_size(hs, "h"), mc.obj_of_size(xs, "x"), rng)
        pair_b = random_classical_spo(RATNN, mc.obj_of_size(hs, "g"), mc.obj_of_size(xs, "y"), rng)
        rep = kb.spo_validate(B, pair_a)
        assert rep.sharp and rep.normalised
        f = mc.random_normalised(RATNN, B.dom(pair_a.prep), B.dom(pair_b.prep), rng)
        lifted = kb.declassicalise(B, f, pair_a, pair_b)
        back = kb.classicalise(B, lifted, pair_a, pair_b)
        assert mc.equal(back, f)


def test_quantum_roundtrip_random_pairs():
    qb = QuantumBackend(get_semiring("gauss-rat"))
    rng = random.Random(8)
    for _ in range(4):
        d = rng.randrange(2, 4)
        k = rng.randrange(1, d + 1)
        pair = random_quantum_spo(qb, d, k, rng)
        rep = kb.spo_validate(qb, pair)
        assert rep.sharp and rep.normalised
        f = mc.random_normalised(qb.pp.ring, qb.dom(pair.prep)[0].as_obj(), qb.dom(pair.prep)[0].as_obj(), rng)
        lifted = kb.declassicalise(qb, f, pair, pair)
        obj = kb.decohered_object(qb, pair)
        assert kb.is_hom(qb, lifted, obj, obj)
        back = kb.classicalise(qb, lifted, pair, pair)
        assert mc.equal(back, f)
