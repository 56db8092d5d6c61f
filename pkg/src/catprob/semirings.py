"""Exact arithmetic for the commutative involutive semirings used as scalars.

Every instance is described by a `Semiring` record whose callables act on
plain Python values:

    bool        -> bool
    nat         -> int >= 0
    ratnn, rat  -> fractions.Fraction
    gauss-rat   -> (Fraction, Fraction)  meaning a + b*i, i^2 = -1
    split-rat   -> (Fraction, Fraction)  meaning a + b*j, j^2 = +1
    gf p        -> int in range(p)
    gf2 p       -> (int, int) meaning a + b*t over GF(p^2)
    complex-f64 -> complex (approximate mode, tolerance-based equality)

All exact representations are canonical (Fraction keeps lowest terms with
positive denominator, residues live in range(p)), so structural equality is
semantic equality in exact mode.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional


@dataclass(frozen=True)
class Semiring:
    """A commutative involutive semiring with exact (or tolerance) equality."""

    id: str
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    star: Callable[[Any], Any]
    positive: bool
    invertible: Callable[[Any], bool]
    inv: Callable[[Any], Any]
    sample: Callable[[random.Random], Any]
    parse: Callable[[str], Any]
    fmt: Callable[[Any], str]
    tolerance: Optional[float] = None  # None => exact mode
    elements: Optional[tuple] = None  # full carrier, finite instances only
    is_element: Callable[[Any], bool] = field(default=lambda x: True)
    coerce: Callable[[Any], Any] = field(default=lambda x: x)

    @property
    def exact(self) -> bool:
        return self.tolerance is None

    def eq(self, a, b) -> bool:
        if self.tolerance is None:
            return a == b
        return abs(a - b) <= self.tolerance

    def sum(self, xs):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def product(self, xs):
        acc = self.one
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    def pow(self, x, n: int):
        acc = self.one
        for _ in range(n):
            acc = self.mul(acc, x)
        return acc

    def __repr__(self):
        return f"Semiring({self.id!r})"


class SemiringError(ValueError):
    pass


class ConditioningError(SemiringError):
    """Raised when a scalar that must be inverted is not invertible."""


# ---------------------------------------------------------------------------
# literal parsing helpers

_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _parse_frac(tok: str) -> Fraction:
    tok = tok.strip()
    if not _RAT_RE.match(tok):
        raise SemiringError(f"bad rational literal: {tok!r}")
    return Fraction(tok)


def _fmt_frac(x: Fraction) -> str:
    return str(x)


_PAIR_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?\s*"
    r"(?P<im>[+-]\s*\d*(?:/\d+)?|[+-]?\d*(?:/\d+)?)?\s*(?P<unit>[ij])?\s*$"
)


def _parse_pair(tok: str, unit: str) -> tuple:
    """Parse `a`, `bi`, `a+bi`, `a-bi` style literals (unit 'i' or 'j')."""
    tok = tok.strip().replace(" ", "")
    if unit not in tok:
        return (_parse_frac(tok), Fraction(0))
    head, _, _ = tok.partition(unit)
    # split off the imaginary coefficient: last top-level + or - not at pos 0
    cut = -1
    for k in range(len(head) - 1, 0, -1):
        if head[k] in "+-" and head[k - 1] not in "+-/":
            cut = k
            break
    if cut == -1:
        re_part, im_part = "0", head
    else:
        re_part, im_part = head[:cut], head[cut:]
    if im_part in ("", "+"):
        im = Fraction(1)
    elif im_part == "-":
        im = Fraction(-1)
    else:
        im = _parse_frac(im_part)
    return (_parse_frac(re_part or "0"), im)


def _fmt_pair(x: tuple, unit: str) -> str:
    a, b = x
    if b == 0:
        return str(a)
    sb = f"{b}{unit}" if b >= 0 else f"{b}{unit}"
    if a == 0:
        return sb
    return f"{a}+{sb}" if b >= 0 else f"{a}{sb}"


def _parse_cf64(tok: str) -> complex:
    tok = tok.strip().replace(" ", "")
    if tok.endswith("i"):
        tok = tok[:-1] + "j"
    try:
        return complex(tok)
    except ValueError as exc:
        raise SemiringError(f"bad complex literal: {tok!r}") from exc


# ---------------------------------------------------------------------------
# instance constructors


def _bool() -> Semiring:
    return Semiring(
        id="bool",
        add=lambda a, b: a or b,
        mul=lambda a, b: a and b,
        zero=False,
        one=True,
        star=lambda a: a,
        positive=True,
        invertible=lambda a: a is True or a == 1,
        inv=lambda a: True,
        sample=lambda rng: rng.random() < 0.5,
        parse=lambda s: {"0": False, "1": True, "true": True, "false": False}[s.strip().lower()],
        fmt=lambda a: "1" if a else "0",
        elements=(False, True),
        is_element=lambda a: isinstance(a, bool),
    )


def _nat() -> Semiring:
    return Semiring(
        id="nat",
        add=lambda a, b: a + b,
        mul=lambda a, b: a * b,
        zero=0,
        one=1,
        star=lambda a: a,
        positive=True,
        invertible=lambda a: a == 1,
        inv=lambda a: 1,
        sample=lambda rng: rng.randrange(0, 5),
        parse=lambda s: int(s),
        fmt=str,
        is_element=lambda a: isinstance(a, int) and a >= 0,
    )


def _rat(nonneg: bool) -> Semiring:
    def smp(rng: random.Random) -> Fraction:
        x = Fraction(rng.randrange(0, 7), rng.randrange(1, 5))
        if not nonneg and rng.random() < 0.5:
            x = -x
        return x

    return Semiring(
        id="ratnn" if nonneg else "rat",
        add=lambda a, b: a + b,
        mul=lambda a, b: a * b,
        zero=Fraction(0),
        one=Fraction(1),
        star=lambda a: a,
        positive=nonneg,
        invertible=lambda a: a != 0,
        inv=lambda a: 1 / a,
        sample=smp,
        parse=_parse_frac,
        fmt=_fmt_frac,
        is_element=(lambda a: isinstance(a, Fraction) and a >= 0)
        if nonneg
        else (lambda a: isinstance(a, Fraction)),
        coerce=lambda a: a if isinstance(a, Fraction) else Fraction(a),
    )


def _pair_ring(unit: str) -> Semiring:
    """Gaussian rationals (unit 'i', i^2=-1) or split-complex ('j', j^2=+1)."""
    sq = Fraction(-1) if unit == "i" else Fraction(1)

    def add(x, y):
        return (x[0] + y[0], x[1] + y[1])

    def mul(x, y):
        a, b = x
        c, d = y
        return (a * c + sq * b * d, a * d + b * c)

    def star(x):
        return (x[0], -x[1])

    def inv(x):
        a, b = x
        n = a * a - sq * b * b
        if n == 0:
            raise ConditioningError(f"{_fmt_pair(x, unit)} is not invertible")
        return (a / n, -b / n)

    def invertible(x):
        a, b = x
        return a * a - sq * b * b != 0

    def smp(rng: random.Random):
        f = lambda: Fraction(rng.randrange(-4, 5), rng.randrange(1, 4))
        return (f(), f())

    return Semiring(
        id="gauss-rat" if unit == "i" else "split-rat",
        add=add,
        mul=mul,
        zero=(Fraction(0), Fraction(0)),
        one=(Fraction(1), Fraction(0)),
        star=star,
        positive=False,
        invertible=invertible,
        inv=inv,
        sample=smp,
        parse=lambda s: _parse_pair(s, unit),
        fmt=lambda x: _fmt_pair(x, unit),
        is_element=lambda x: isinstance(x, tuple)
        and len(x) == 2
        and all(isinstance(c, Fraction) for c in x),
        coerce=lambda x: (Fraction(x[0]), Fraction(x[1]))
        if isinstance(x, tuple)
        else (Fraction(x), Fraction(0)),
    )


def _gf(p: int) -> Semiring:
    if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise SemiringError(f"gf modulus must be prime, got {p}")
    return Semiring(
        id=f"gf {p}",
        add=lambda a, b: (a + b) % p,
        mul=lambda a, b: (a * b) % p,
        zero=0,
        one=1 % p,
        star=lambda a: a,
        positive=False,
        invertible=lambda a: a % p != 0,
        inv=lambda a: pow(a, p - 2, p),
        sample=lambda rng: rng.randrange(p),
        parse=lambda s: int(s) % p,
        fmt=str,
        elements=tuple(range(p)),
        is_element=lambda a: isinstance(a, int) and 0 <= a < p,
    )


def _irreducible_quadratic(p: int) -> tuple:
    """Coefficients (u, v) with x^2 + u x + v irreducible over GF(p).

    Prefers x^2 + x + 1; falls back to x^2 + c for the least workable c.
    Deterministic per p, so element literals are stable across runs.
    """

    def irred(u, v):
        return all((x * x + u * x + v) % p != 0 for x in range(p))

    if irred(1, 1):
        return (1, 1)
    for c in range(1, p):
        if irred(0, c):
            return (0, c)
    raise SemiringError(f"no irreducible quadratic found for p={p}")  # pragma: no cover


def _gf2(p: int) -> Semiring:
    base = _gf(p)
    u, v = _irreducible_quadratic(p)

    def add(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def mul(x, y):
        a, b = x
        c, d = y
        # (a + b t)(c + d t) with t^2 = -(u t + v)
        t2 = b * d
        return ((a * c - v * t2) % p, (a * d + b * c - u * t2) % p)

    def pw(x, n):
        acc = (1, 0)
        sq = x
        while n:
            if n & 1:
                acc = mul(acc, sq)
            sq = mul(sq, sq)
            n >>= 1
        return acc

    def star(x):  # Frobenius x -> x^p
        return pw(x, p)

    def inv(x):
        if x == (0, 0):
            raise ConditioningError("0 is not invertible in GF(p^2)")
        return pw(x, p * p - 2)

    return Semiring(
        id=f"gf2 {p}",
        add=add,
        mul=mul,
        zero=(0, 0),
        one=(1 % p, 0),
        star=star,
        positive=False,
        invertible=lambda x: x != (0, 0),
        inv=inv,
        sample=lambda rng: (rng.randrange(p), rng.randrange(p)),
        parse=lambda s: tuple(int(c) % p for c in _split_gf2_literal(s)),
        fmt=lambda x: f"{x[0]}" if x[1] == 0 else f"{x[0]}+{x[1]}t",
        elements=tuple((a, b) for a in range(p) for b in range(p)),
        is_element=lambda x: isinstance(x, tuple) and len(x) == 2,
    )


def _split_gf2_literal(s: str):
    s = s.strip().replace(" ", "")
    if "t" not in s:
        return (int(s), 0)
    head, _, _ = s.partition("t")
    if "+" in head[1:]:
        k = head.rindex("+")
        return (int(head[:k]), int(head[k + 1 :] or "1"))
    return (0, int(head or "1"))


def _complex_f64(tolerance: float = 1e-9) -> Semiring:
    if tolerance < 0:
        raise SemiringError("tolerance must be nonnegative")
    return Semiring(
        id="complex-f64",
        add=lambda a, b: a + b,
        mul=lambda a, b: a * b,
        zero=0j,
        one=1 + 0j,
        star=lambda a: a.conjugate(),
        positive=False,
        invertible=lambda a: abs(a) > tolerance,
        inv=lambda a: 1 / a,
        sample=lambda rng: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
        parse=_parse_cf64,
        fmt=lambda a: f"{a.real:.12g}+{a.imag:.12g}i",
        tolerance=tolerance,
        is_element=lambda a: isinstance(a, (complex, float, int)),
        coerce=complex,
    )


def _real_nn_f64(tolerance: float = 1e-9) -> Semiring:
    """Nonnegative double-precision reals: the scalar semiring of complex-f64."""
    return Semiring(
        id="real-f64",
        add=lambda a, b: a + b,
        mul=lambda a, b: a * b,
        zero=0.0,
        one=1.0,
        star=lambda a: a,
        positive=True,
        invertible=lambda a: abs(a) > tolerance,
        inv=lambda a: 1 / a,
        sample=lambda rng: rng.uniform(0.0, 1.5),
        parse=float,
        fmt=lambda a: f"{a:.12g}",
        tolerance=tolerance,
        is_element=lambda a: isinstance(a, (float, int)),
    )


# ---------------------------------------------------------------------------
# registry

_FIXED = {
    "bool": _bool,
    "nat": _nat,
    "ratnn": lambda: _rat(True),
    "rat": lambda: _rat(False),
    "gauss-rat": lambda: _pair_ring("i"),
    "split-rat": lambda: _pair_ring("j"),
}

KNOWN_IDS = ("bool", "nat", "ratnn", "rat", "gauss-rat", "split-rat", "gf <p>", "gf2 <p>", "complex-f64")


def get_semiring(name: str, tolerance: float = 1e-9) -> Semiring:
    """Look up a semiring by its textual id, e.g. 'ratnn', 'gf 3', 'gf2 2'."""
    name = " ".join(name.split())
    if name in _FIXED:
        return _FIXED[name]()
    if name == "complex-f64":
        return _complex_f64(tolerance)
    m = re.match(r"^(gf2?)\s+(\d+)$", name)
    if m:
        p = int(m.group(2))
        return _gf2(p) if m.group(1) == "gf2" else _gf(p)
    raise SemiringError(f"unknown semiring id {name!r} (known: {', '.join(KNOWN_IDS)})")


# ---------------------------------------------------------------------------
# law checking


def axioms_check(sr: Semiring, budget: int = 100, seed: int = 0) -> list:
    """Randomized check of the commutative-semiring and involution laws.

    Returns a list of human-readable violation descriptions (empty when all
    sampled triples satisfy the laws). Deterministic for a given seed.
    """
    if budget < 1:
        raise SemiringError("budget must be >= 1")
    rng = random.Random(seed)
    eq, add, mul, st = sr.eq, sr.add, sr.mul, sr.star
    violations = []

    def report(law, *xs):
        violations.append(f"{law} violated at ({', '.join(sr.fmt(x) for x in xs)})")

    for _ in range(budget):
        a, b, c = sr.sample(rng), sr.sample(rng), sr.sample(rng)
        if not eq(add(a, b), add(b, a)):
            report("add commutativity", a, b)
        if not eq(add(add(a, b), c), add(a, add(b, c))):
            report("add associativity", a, b, c)
        if not eq(mul(a, b), mul(b, a)):
            report("mul commutativity", a, b)
        if not eq(mul(mul(a, b), c), mul(a, mul(b, c))):
            report("mul associativity", a, b, c)
        if not eq(mul(a, add(b, c)), add(mul(a, b), mul(a, c))):
            report("distributivity", a, b, c)
        if not eq(add(a, sr.zero), a):
            report("additive identity", a)
        if not eq(mul(a, sr.one), a):
            report("multiplicative identity", a)
        if not eq(mul(a, sr.zero), sr.zero):
            report("zero annihilation", a)
        if not eq(st(st(a)), a):
            report("involution self-inverse", a)
        if not eq(st(add(a, b)), add(st(a), st(b))):
            report("involution additivity", a, b)
        if not eq(st(mul(a, b)), mul(st(a), st(b))):
            report("involution multiplicativity", a, b)
    return violations


@dataclass(frozen=True)
class PositivityReport:
    positive: bool
    witness: Optional[tuple]  # family (p_x) with sum 0 and some p_x != 0


def _sample_set(sr: Semiring, count: int = 12, seed: int = 7) -> list:
    if sr.elements is not None:
        return list(sr.elements)
    rng = random.Random(seed)
    seen = [sr.zero, sr.one]
    if sr.coerce is not None:
        for probe in (-1, 2, -2):
            try:
                x = sr.coerce(probe)
            except (TypeError, ValueError):
                continue
            if sr.is_element(x) and x not in seen:
                seen.append(x)
    for _ in range(count * 20):
        if len(seen) >= count:
            break
        x = sr.sample(rng)
        if x not in seen:
            seen.append(x)
    return seen


def positivity_witness_search(sr: Semiring, max_size: int = 3, seed: int = 7):
    """Brute-force search for a family summing to zero with a nonzero member."""
    from itertools import combinations_with_replacement

    pool = _sample_set(sr, seed=seed)
    for n in range(1, max_size + 1):
        for fam in combinations_with_replacement(pool, n):
            if any(not sr.eq(x, sr.zero) for x in fam) and sr.eq(sr.sum(fam), sr.zero):
                return fam
    return None


_WITNESSES = {
    "rat": (Fraction(1), Fraction(-1)),
    "gauss-rat": ((Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0))),
    "split-rat": ((Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0))),
    "complex-f64": (1 + 0j, -1 + 0j),
}


def is_positive(sr: Semiring) -> PositivityReport:
    """Report the declared positivity of the semiring, with a witness when false.

    The witness is a family (p_x) with sum zero and some nonzero member. When
    the semiring is declared positive, a bounded brute-force search double
    checks that no such small family exists.
    """
    if not sr.exact:
        raise SemiringError("is_positive is only supported in exact mode")
    if sr.positive:
        found = positivity_witness_search(sr)
        if found is not None:  # pragma: no cover - declared flags are correct
            raise SemiringError(f"{sr.id} declared positive but witness found: {found}")
        return PositivityReport(True, None)
    if sr.id in _WITNESSES:
        return PositivityReport(False, _WITNESSES[sr.id])
    if sr.id.startswith("gf2 "):
        p = int(sr.id.split()[1])
        return PositivityReport(False, tuple([(1, 0)] * p))
    if sr.id.startswith("gf "):
        p = int(sr.id.split()[1])
        return PositivityReport(False, tuple([1] * p))
    witness = positivity_witness_search(sr)
    return PositivityReport(False, witness)


# ---------------------------------------------------------------------------
# the sub-semiring of positive elements R = closure of {x* x} under addition


@dataclass(frozen=True)
class PositivePart:
    """Scalar semiring R inside S, with the embedding and its retraction."""

    ring: Semiring  # R
    ambient: Semiring  # S
    embed: Callable[[Any], Any]  # R -> S
    member: Callable[[Any], bool]  # is this S element in the image of R?
    retract: Callable[[Any], Any]  # S -> R (raises off the image)


def positive_part(sr: Semiring) -> PositivePart:
    """The Born-rule scalar semiring for an involutive semiring.

    Realised as a lookup over the supported instances; `verify_positive_part`
    checks the closure property {x* x} subset R by enumeration/sampling.
    """
    sid = sr.id

    def mk(r, embed, member, retract):
        return PositivePart(r, sr, embed, member, retract)

    def bad(x):
        raise SemiringError(f"{sr.fmt(x)} lies outside the positive sub-semiring of {sid}")

    if sid == "gauss-rat":
        r = get_semiring("ratnn")
        return mk(
            r,
            lambda q: (q, Fraction(0)),
            lambda x: x[1] == 0 and x[0] >= 0,
            lambda x: x[0] if (x[1] == 0 and x[0] >= 0) else bad(x),
        )
    if sid == "split-rat":
        r = get_semiring("rat")
        return mk(
            r,
            lambda q: (q, Fraction(0)),
            lambda x: x[1] == 0,
            lambda x: x[0] if x[1] == 0 else bad(x),
        )
    if sid == "rat":  # real theory: identity involution, squares are nonnegative
        r = get_semiring("ratnn")
        return mk(r, lambda q: q, lambda x: x >= 0, lambda x: x if x >= 0 else bad(x))
    if sid in ("ratnn", "bool", "nat"):
        return mk(sr, lambda q: q, lambda x: True, lambda x: x)
    if sid.startswith("gf2 "):
        p = int(sid.split()[1])
        r = get_semiring(f"gf {p}")
        return mk(
            r,
            lambda q: (q, 0),
            lambda x: x[1] == 0,
            lambda x: x[0] if x[1] == 0 else bad(x),
        )
    if sid == "complex-f64":
        tol = sr.tolerance
        r = _real_nn_f64(tol)

        def member(x):
            return abs(complex(x).imag) <= tol and complex(x).real >= -tol

        return mk(
            r,
            lambda q: complex(q),
            member,
            lambda x: complex(x).real if member(x) else bad(x),
        )
    raise SemiringError(f"no positive sub-semiring tabulated for {sid!r}")


def scalar_subsemiring(sr: Semiring) -> Semiring:
    """The semiring R of positive elements of S (Born-rule scalars)."""
    pp = positive_part(sr)
    verify_positive_part(pp)
    return pp.ring


def verify_positive_part(pp: PositivePart, samples: int = 200, seed: int = 11) -> None:
    """Check that every x* x lies in R (exhaustive for finite S, sampled else)."""
    sr = pp.ambient
    xs = sr.elements if sr.elements is not None else None
    if xs is None:
        rng = random.Random(seed)
        xs = [sr.sample(rng) for _ in range(samples)]
    for x in xs:
        y = sr.mul(sr.star(x), x)
        if not pp.member(y):
            raise SemiringError(
                f"closure failure: {sr.fmt(x)}* {sr.fmt(x)} = {sr.fmt(y)} not in {pp.ring.id}"
            )
