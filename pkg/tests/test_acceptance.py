"""Acceptance suite: one test per top-level claim, one pass/fail line each.

Every test prints `criterion N: PASS` on success (pytest -s shows the lines;
under plain pytest the test names carry the same information).
"""

import itertools
import math
import os
import random
import time
from fractions import Fraction as F

import catprob.bell as bell
import catprob.diagram as dg
import catprob.karoubi as kb
import catprob.matcat as mc
import catprob.quantum as qt
import catprob.scenarios as scn
from catprob.backend import ClassicalBackend, QuantumBackend, backend_self_test, toy_theory
from catprob.semirings import get_semiring, is_positive, positivity_witness_search
from spo_tools import random_classical_spo, random_quantum_spo

HERE = os.path.dirname(__file__)
ROOT = os.path.join(HERE, os.pardir)
SCEN = os.path.join(ROOT, "scenarios")
CORPUS = os.path.join(ROOT, "eqcorpus")

LAW_SEMIRINGS = ["bool", "nat", "ratnn", "rat", "gauss-rat", "split-rat", "gf 3", "gf2 2"]


def _report(n, text):
    print(f"criterion {n}: PASS - {text}")


# ---------------------------------------------------------------------------
# 1. classical-theory laws on random instances


def test_criterion_1_classical_laws():
    t0 = time.time()
    for sid in LAW_SEMIRINGS:
        sr = get_semiring(sid)
        rng = random.Random(20170901)
        objs = [mc.obj_of_size(1, "u"), mc.obj_of_size(2, "v"), mc.obj_of_size(3, "w")]
        for _ in range(200):
            a, b, c = (rng.choice(objs) for _ in range(3))
            f = mc.random_morphism(sr, a, b, rng)
            h = mc.random_morphism(sr, a, b, rng)
            g = mc.random_morphism(sr, b, c, rng)
            k = mc.random_morphism(sr, b, c, rng)
            # enrichment: bilinearity of composition and tensor, zero absorbs
            assert mc.equal(
                mc.compose(g, mc.madd(f, h)),
                mc.madd(mc.compose(g, f), mc.compose(g, h)),
            )
            assert mc.equal(
                mc.compose(mc.madd(g, k), f),
                mc.madd(mc.compose(g, f), mc.compose(k, f)),
            )
            assert mc.equal(
                mc.tensor(mc.madd(f, h), g),
                mc.madd(mc.tensor(f, g), mc.tensor(h, g)),
            )
            assert mc.equal(mc.compose(g, mc.zero(sr, a, b)), mc.zero(sr, a, c))
            # interchange
            g2 = mc.random_morphism(sr, a, b, rng)
            lhs = mc.compose(mc.tensor(k, g), mc.tensor(f, g2))
            rhs = mc.tensor(mc.compose(k, f), mc.compose(g, g2))
            assert mc.equal(lhs, rhs)
            # environment structure
            assert mc.equal(
                mc.tensor(mc.discard(sr, a), mc.discard(sr, b)),
                mc.discard(sr, mc.obj_tensor(a, b)),
            )
            n = mc.random_normalised(sr, a, b, rng)
            assert mc.equal(mc.compose(mc.discard(sr, b), n), mc.discard(sr, a))
    elapsed = time.time() - t0
    assert elapsed < 30.0, f"law suite took {elapsed:.1f}s"
    _report(1, f"200 instances x {len(LAW_SEMIRINGS)} semirings in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. Stoch recovery: is_normalised == column-stochastic, exhaustively


def test_criterion_2_stoch_recovery():
    sr = get_semiring("ratnn")
    vals = (F(0), F(1, 2), F(1))
    count = 0
    for rows_n in (1, 2, 3):
        for cols_n in (1, 2, 3):
            dom = mc.obj_of_size(cols_n, "c")
            cod = mc.obj_of_size(rows_n, "r")
            for flat in itertools.product(vals, repeat=rows_n * cols_n):
                entries = tuple(
                    tuple(flat[r * cols_n + c] for c in range(cols_n)) for r in range(rows_n)
                )
                f = mc.Morphism(dom, cod, entries, sr)
                stochastic = all(
                    sum(entries[r][c] for r in range(rows_n)) == 1 for c in range(cols_n)
                )
                assert mc.is_normalised(f) == stochastic
                count += 1
    _report(2, f"{count} exhaustive {{0, 1/2, 1}} matrices up to 3x3")


# ---------------------------------------------------------------------------
# 3. decohered systems are classical: round trips on both backends


def test_criterion_3_decohered_roundtrips():
    sr = get_semiring("ratnn")
    cb = ClassicalBackend(sr)
    rng = random.Random(101)
    for _ in range(100):
        hs = rng.randrange(2, 5)
        xs = rng.randrange(1, hs + 1)
        src = random_classical_spo(sr, mc.obj_of_size(hs, "h"), mc.obj_of_size(xs, "x"), rng)
        dst = random_classical_spo(sr, mc.obj_of_size(hs, "g"), mc.obj_of_size(xs, "y"), rng)
        f = mc.random_normalised(sr, cb.dom(src.prep), cb.dom(dst.prep), rng)
        lifted = kb.declassicalise(cb, f, src, dst)
        back = kb.classicalise(cb, lifted, src, dst)
        assert mc.equal(back, f)

    qb = QuantumBackend(get_semiring("gauss-rat"))
    rng = random.Random(102)
    for i in range(100):
        d = rng.choice((2, 2, 3, 3, 4))
        k = rng.randrange(1, d + 1)
        pair = random_quantum_spo(qb, d, k, rng)
        x = qb.dom(pair.prep)[0].as_obj()
        f = mc.random_normalised(qb.pp.ring, x, x, rng)
        lifted = kb.declassicalise(qb, f, pair, pair)
        if d <= 3:
            back = kb.classicalise(qb, lifted, pair, pair)  # validates invariance
        else:
            back = qb.to_classical(qb.compose(pair.obs, qb.compose(lifted, pair.prep)))
        assert mc.equal(back, f)
    _report(3, "100 classical + 100 quantum round trips, dims <= 4, exact")


# ---------------------------------------------------------------------------
# 4. classical systems in CPM: extract/embed on decohered Kraus channels


def test_criterion_4_cpm_extract_embed():
    sr = get_semiring("gauss-rat")
    qb = QuantumBackend(sr)
    pp = qb.pp
    rng = random.Random(103)
    for _ in range(100):
        din, dout = rng.randrange(1, 4), rng.randrange(1, 4)
        wd, wc = (qt.QWire(din),), (qt.QWire(dout),)
        mats = [
            [[sr.sample(rng) for _ in range(din)] for _ in range(dout)]
            for _ in range(rng.randrange(1, 3))
        ]
        phi = qt.cpm_from_kraus(qt.kraus_family(sr, wd, wc, mats))
        dec = qt.s_compose(
            qt.decoherence_all(sr, wc), qt.s_compose(phi, qt.decoherence_all(sr, wd))
        )
        g = qt.classical_extract(dec, pp)
        assert g.sr.id == "ratnn"
        for row in g.entries:
            for v in row:
                assert isinstance(v, F) and v >= 0
        again = qt.classical_embed(g, pp, dom=wd, cod=wc)
        assert qt.s_equal(again, dec)
        assert mc.equal(qt.classical_extract(again, pp), g)
    _report(4, "100 Kraus-built decohered channels: extract/embed mutually inverse in ratnn")


# ---------------------------------------------------------------------------
# 5. Bell scenarios: exact CHSH and float Tsirelson


def test_criterion_5_bell_scenarios():
    t0 = time.time()
    s = scn.load_scenario(os.path.join(SCEN, "chsh-345.scn"))
    model = bell.evaluate(s)
    one = model.sr.one
    for ctx in model.contexts:
        assert model.sr.sum(model.table[ctx].values()) == one
    rep = bell.no_signalling_check(model)
    assert rep.ok and rep.rows_normalised
    assert model.table[(("1",), ("0",))][(("0",), ("0",))] == F(9, 50)
    exact_t = time.time() - t0
    assert exact_t < 5.0

    t0 = time.time()
    s2 = scn.load_scenario(os.path.join(SCEN, "tsirelson.scn"))
    model2 = bell.evaluate(s2)

    def corr(a, b):
        row = model2.row(((str(a),), (str(b),)))
        return sum((1 if j[0] == j[1] else -1) * float(v) for j, v in row.items())

    s_val = corr(0, 0) + corr(0, 1) + corr(1, 0) - corr(1, 1)
    assert abs(s_val - 2 * math.sqrt(2)) < 1e-6
    assert bell.no_signalling_check(model2).ok
    float_t = time.time() - t0
    assert float_t < 5.0
    _report(5, f"exact CHSH ({exact_t:.2f}s) and Tsirelson S=2*sqrt(2) ({float_t:.2f}s)")


# ---------------------------------------------------------------------------
# 6. positivity verdicts match brute force


def test_criterion_6_positivity():
    for sid in LAW_SEMIRINGS:
        sr = get_semiring(sid)
        rep = is_positive(sr)
        found = positivity_witness_search(sr, max_size=3)
        assert rep.positive == (found is None)
        if found is not None:
            assert sr.eq(sr.sum(found), sr.zero)
            assert any(not sr.eq(x, sr.zero) for x in found)
        if not rep.positive:
            assert sr.eq(sr.sum(rep.witness), sr.zero)
            assert any(not sr.eq(x, sr.zero) for x in rep.witness)
    _report(6, "verdicts for all eight semirings agree with brute-force search")


# ---------------------------------------------------------------------------
# 7. toy-theory zoo


def test_criterion_7_toy_zoo():
    s = scn.load_scenario(os.path.join(SCEN, "relational-pair.scn"))
    model = bell.evaluate(s)
    assert model.sr.id == "bool"
    assert all(v in (True, False) for row in model.table.values() for v in row.values())
    assert bell.no_signalling_check(model).ok

    hyp = get_semiring("split-rat")
    vec = [[(F(5, 4), F(0))], [(F(0), F(3, 4))]]
    rho = qt.double(hyp, vec, (), (qt.QWire(2),))
    assert rho.entries[0][0] == (F(25, 16), F(0))
    assert rho.entries[3][0] == (F(-9, 16), F(0))
    assert qt.s_is_normalised(rho)

    modal = toy_theory("modal(2)")
    assert modal.scalar_ring.id == "gf 2"
    assert backend_self_test(modal, seed=5, rounds=10) == []
    _report(7, "relational model boolean + no-signalling; hyperbolic weights 25/16, -9/16; modal(2) passes")


# ---------------------------------------------------------------------------
# 8. purity and purification


def test_criterion_8_purity_purification():
    gr = get_semiring("gauss-rat")
    u = [[(F(3, 5), F(0)), (F(4, 5), F(0))], [(F(-4, 5), F(0)), (F(3, 5), F(0))]]
    assert qt.is_pure_choi(qt.double(gr, u, (qt.QWire(2),), (qt.QWire(2),)))
    assert not qt.is_pure_choi(qt.decoherence_superop(gr, qt.QWire(2)))

    cf = get_semiring("complex-f64")
    rng = random.Random(104)
    worst = 0.0
    for _ in range(50):
        d = rng.randrange(2, 4)
        w = (qt.QWire(d),)
        mats = [
            [[cf.sample(rng) for _ in range(d)] for _ in range(d)]
            for _ in range(rng.randrange(1, 4))
        ]
        phi = qt.cpm_from_kraus(qt.kraus_family(cf, w, w, mats))
        back = qt.cpm_from_kraus(qt.purify(phi))
        err = max(
            abs(a - b) for ra, rb in zip(phi.entries, back.entries) for a, b in zip(ra, rb)
        )
        worst = max(worst, err)
        assert err < 1e-9
    _report(8, f"purity verdicts correct; 50 purify round trips, worst error {worst:.2e}")


# ---------------------------------------------------------------------------
# 9. the equation corpus under random bindings


def _doc_objects(doc, backend):
    return {name: backend.classical_obj(s.labels) for name, s in doc.decls.systems.items()}


def _obj_of(backend, objs, names):
    o = backend.unit
    for w in names:
        o = backend.obj_tensor(o, objs[w])
    return o


def _random_bindings(name, doc, backend, rng):
    sr = backend.sr
    objs = _doc_objects(doc, backend)
    if name in ("spo-sharpness", "spo-normalisation", "decoherence-idempotent"):
        pair = random_classical_spo(sr, objs["h"], objs["x"], rng)
        return {"p": pair.prep, "m": pair.obs}
    out = {}
    for gname, g in doc.decls.generators.items():
        if g.matrix is not None:
            continue
        dom = _obj_of(backend, objs, g.dom)
        cod = _obj_of(backend, objs, g.cod)
        if name == "normalised-absorb" and gname == "f":
            out[gname] = mc.random_normalised(sr, dom, cod, rng)
        elif name == "prep-test-distribution" and gname == "p":
            out[gname] = mc.random_normalised(sr, dom, cod, rng)
        else:
            out[gname] = mc.random_morphism(sr, dom, cod, rng)
    return out


def test_criterion_9_equation_corpus():
    backend = ClassicalBackend(get_semiring("ratnn"))
    names = sorted(os.listdir(CORPUS))
    assert len(names) >= 13
    rng = random.Random(105)
    for name in names:
        d = os.path.join(CORPUS, name)
        with open(os.path.join(d, "lhs.diag")) as fh:
            lhs = dg.parse(fh.read())
        with open(os.path.join(d, "rhs.diag")) as fh:
            rhs = dg.parse(fh.read())
        with open(os.path.join(d, "bindings.txt")) as fh:
            stored = dg.load_bindings(fh.read(), backend)
        bound = dg.bind_generators(lhs, backend, stored)
        assert mc.equal(
            dg.run_document(lhs, backend, bound), dg.run_document(rhs, backend, bound)
        ), f"{name}: stored bindings"
        for k in range(20):
            rnd = _random_bindings(name, lhs, backend, rng)
            lv = dg.run_document(lhs, backend, rnd)
            rv = dg.run_document(rhs, backend, rnd)
            assert mc.equal(lv, rv), f"{name}: random binding {k}"
    _report(9, f"{len(names)} equations x 20 random bindings each, exact equality")
