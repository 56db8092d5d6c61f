"""Doubled (CPM-style) processes over an involutive semiring.

A `Superoperator` acts between lists of wires. Every wire is doubled: a
quantum wire of dimension d contributes an index pair (i, i') with i, i' < d;
a classical wire with n labels likewise contributes a pair (i, i') but its
off-diagonal blocks are constrained to zero (decoherence invariance), which
is what makes the wire classical.

The global index of a wire list is the mixed-radix number with digits
(i_1, i_1', i_2, i_2', ...), row-major with the first wire major. Under this
fixed linearisation doubling is functorial: double(f (x) g) equals
double(f) (x) double(g) entry for entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from . import matcat
from .matcat import Morphism, Obj, ShapeError
from .semirings import PositivePart, Semiring, SemiringError


@dataclass(frozen=True)
class QWire:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError("quantum wire dimension must be positive")

    @property
    def size(self) -> int:
        return self.dim

    def __repr__(self):
        return f"Q{self.dim}"


@dataclass(frozen=True)
class CWire:
    """A classical wire, carrying the labels of the classical system."""

    labels: tuple  # tuples of atoms, as in matcat.Obj

    @property
    def size(self) -> int:
        return len(self.labels)

    def as_obj(self) -> Obj:
        return Obj(self.labels)

    def __repr__(self):
        return f"C{self.size}"


def cwire(x: Obj) -> CWire:
    return CWire(x.labels)


def doubled_dim(wires: tuple) -> int:
    d = 1
    for w in wires:
        d *= w.size * w.size
    return d


def plain_dim(wires: tuple) -> int:
    d = 1
    for w in wires:
        d *= w.size
    return d


def index_pairs(wires: tuple):
    """All digit tuples ((i1,i1'),(i2,i2'),...) in linearisation order."""
    return itertools.product(*(itertools.product(range(w.size), repeat=2) for w in wires))


def lin(wires: tuple, pairs) -> int:
    idx = 0
    for w, (i, j) in zip(wires, pairs):
        idx = (idx * w.size + i) * w.size + j
    return idx


def plain_lin(wires: tuple, digits) -> int:
    idx = 0
    for w, i in zip(wires, digits):
        idx = idx * w.size + i
    return idx


def _classical_diagonal(wires: tuple, pairs) -> bool:
    return all(
        i == j for w, (i, j) in zip(wires, pairs) if isinstance(w, CWire)
    )


@dataclass(frozen=True)
class Superoperator:
    """A matrix between doubled wire lists; classical wires are constrained."""

    dom: tuple  # wires
    cod: tuple
    entries: tuple  # row-major over the doubled indices
    sr: Semiring

    def __post_init__(self):
        if len(self.entries) != doubled_dim(self.cod) or any(
            len(r) != doubled_dim(self.dom) for r in self.entries
        ):
            raise ShapeError("superoperator entry shape mismatch")

    def __getitem__(self, rc):
        return self.entries[rc[0]][rc[1]]

    def __repr__(self):
        return f"Superoperator({list(self.dom)}->{list(self.cod)} over {self.sr.id})"


class NotDecoheredError(ShapeError):
    pass


def check_classical_invariance(phi: Superoperator) -> None:
    """Entries touching an off-diagonal classical digit pair must vanish."""
    sr = phi.sr
    for r, rp in enumerate(index_pairs(phi.cod)):
        row_ok = _classical_diagonal(phi.cod, rp)
        for c, cp in enumerate(index_pairs(phi.dom)):
            if row_ok and _classical_diagonal(phi.dom, cp):
                continue
            if not sr.eq(phi.entries[r][c], sr.zero):
                raise NotDecoheredError(
                    f"entry at row {r}, col {c} breaks decoherence invariance on a classical wire"
                )


def superoperator(sr: Semiring, dom: tuple, cod: tuple, entries, check: bool = True) -> Superoperator:
    phi = Superoperator(tuple(dom), tuple(cod), tuple(tuple(r) for r in entries), sr)
    if check and any(isinstance(w, CWire) for w in phi.dom + phi.cod):
        check_classical_invariance(phi)
    return phi


def _zeros(rows: int, cols: int, z):
    return [[z] * cols for _ in range(rows)]


# ---------------------------------------------------------------------------
# SMC structure


def s_identity(sr: Semiring, wires: tuple) -> Superoperator:
    n = doubled_dim(wires)
    rows = _zeros(n, n, sr.zero)
    for pairs in index_pairs(wires):
        if _classical_diagonal(wires, pairs):
            i = lin(wires, pairs)
            rows[i][i] = sr.one
    return Superoperator(tuple(wires), tuple(wires), tuple(map(tuple, rows)), sr)


def s_zero(sr: Semiring, dom: tuple, cod: tuple) -> Superoperator:
    return Superoperator(
        tuple(dom), tuple(cod),
        tuple(map(tuple, _zeros(doubled_dim(cod), doubled_dim(dom), sr.zero))), sr,
    )


def s_compose(g: Superoperator, f: Superoperator) -> Superoperator:
    if f.sr.id != g.sr.id:
        raise ShapeError("semiring mismatch")
    if f.cod != g.dom:
        raise ShapeError(f"cannot compose: cod {f.cod} != dom {g.dom}")
    sr = f.sr
    mid = doubled_dim(f.cod)
    din = doubled_dim(f.dom)
    # doubled matrices are mostly structural zeros; skip them in the inner sum
    live = [[k for k in range(mid) if f.entries[k][c] != sr.zero] for c in range(din)]
    rows = tuple(
        tuple(
            sr.sum(sr.mul(g.entries[r][k], f.entries[k][c]) for k in live[c])
            for c in range(din)
        )
        for r in range(doubled_dim(g.cod))
    )
    return Superoperator(f.dom, g.cod, rows, sr)


def s_tensor(f: Superoperator, g: Superoperator) -> Superoperator:
    if f.sr.id != g.sr.id:
        raise ShapeError("semiring mismatch")
    sr = f.sr
    df, dg = doubled_dim(f.dom), doubled_dim(g.dom)
    rows = tuple(
        tuple(
            sr.mul(f.entries[rf][cf], g.entries[rg][cg]) for cf in range(df) for cg in range(dg)
        )
        for rf in range(doubled_dim(f.cod))
        for rg in range(doubled_dim(g.cod))
    )
    return Superoperator(f.dom + g.dom, f.cod + g.cod, rows, sr)


def s_add(f: Superoperator, g: Superoperator) -> Superoperator:
    if f.dom != g.dom or f.cod != g.cod or f.sr.id != g.sr.id:
        raise ShapeError("sum needs matching shapes")
    sr = f.sr
    rows = tuple(
        tuple(sr.add(a, b) for a, b in zip(rf, rg)) for rf, rg in zip(f.entries, g.entries)
    )
    return Superoperator(f.dom, f.cod, rows, sr)


def s_scale(s, f: Superoperator) -> Superoperator:
    sr = f.sr
    return Superoperator(
        f.dom, f.cod, tuple(tuple(sr.mul(s, x) for x in row) for row in f.entries), sr
    )


def s_equal(f: Superoperator, g: Superoperator) -> bool:
    if f.dom != g.dom or f.cod != g.cod:
        return False
    sr = f.sr
    return all(sr.eq(a, b) for rf, rg in zip(f.entries, g.entries) for a, b in zip(rf, rg))


def s_swap(sr: Semiring, a, b) -> Superoperator:
    """The symmetry swapping two adjacent wires."""
    dom = (a, b)
    cod = (b, a)
    rows = _zeros(doubled_dim(cod), doubled_dim(dom), sr.zero)
    for pa in itertools.product(range(a.size), repeat=2):
        for pb in itertools.product(range(b.size), repeat=2):
            if isinstance(a, CWire) and pa[0] != pa[1]:
                continue
            if isinstance(b, CWire) and pb[0] != pb[1]:
                continue
            rows[lin(cod, (pb, pa))][lin(dom, (pa, pb))] = sr.one
    return Superoperator(dom, cod, tuple(map(tuple, rows)), sr)


def s_discard(sr: Semiring, wires: tuple) -> Superoperator:
    """Trace on quantum wires, marginalisation on classical wires."""
    row = [sr.zero] * doubled_dim(wires)
    for pairs in index_pairs(wires):
        if all(i == j for (i, j) in pairs):
            row[lin(wires, pairs)] = sr.one
    return Superoperator(tuple(wires), (), (tuple(row),), sr)


def s_is_normalised(f: Superoperator) -> bool:
    return s_equal(s_compose(s_discard(f.sr, f.cod), f), s_discard(f.sr, f.dom))


# ---------------------------------------------------------------------------
# doubling and Kraus data


def double(sr: Semiring, mat, dom: tuple, cod: tuple) -> Superoperator:
    """The CPM doubling f (x) f* of a pure matrix between the wire lists.

    `mat` is a plain cod-by-dom matrix (plain dims), nested sequences.
    """
    mat = [list(r) for r in mat]
    if len(mat) != plain_dim(cod) or any(len(r) != plain_dim(dom) for r in mat):
        raise ShapeError("pure matrix shape does not match the wire lists")
    rows = _zeros(doubled_dim(cod), doubled_dim(dom), sr.zero)
    for rp in index_pairs(cod):
        y = plain_lin(cod, [i for i, _ in rp])
        yp = plain_lin(cod, [j for _, j in rp])
        for cp in index_pairs(dom):
            x = plain_lin(dom, [i for i, _ in cp])
            xp = plain_lin(dom, [j for _, j in cp])
            rows[lin(cod, rp)][lin(dom, cp)] = sr.mul(mat[y][x], sr.star(mat[yp][xp]))
    return Superoperator(tuple(dom), tuple(cod), tuple(map(tuple, rows)), sr)


@dataclass(frozen=True)
class KrausFamily:
    """A nonempty list of pure cod-by-dom matrices sharing one shape."""

    elements: tuple  # tuple of matrices (tuple of row tuples)
    dom: tuple
    cod: tuple
    sr: Semiring

    def __post_init__(self):
        if not self.elements:
            raise ShapeError("Kraus family must be nonempty")
        for k in self.elements:
            if len(k) != plain_dim(self.cod) or any(len(r) != plain_dim(self.dom) for r in k):
                raise ShapeError("inconsistent Kraus element shapes")

    @property
    def env_dim(self) -> int:
        return len(self.elements)


def kraus_family(sr: Semiring, dom: tuple, cod: tuple, mats) -> KrausFamily:
    return KrausFamily(tuple(tuple(tuple(r) for r in m) for m in mats), tuple(dom), tuple(cod), sr)


def cpm_from_kraus(k: KrausFamily) -> Superoperator:
    """Sum of doubled Kraus elements (environment leg contracted)."""
    acc = s_zero(k.sr, k.dom, k.cod)
    for m in k.elements:
        acc = s_add(acc, double(k.sr, m, k.dom, k.cod))
    return acc


def stack_environment(k: KrausFamily):
    """The pure map H -> G (x) E whose environment contraction gives the channel.

    Returns (pure matrix, wire list cod + (QWire(env_dim),)).
    """
    env = QWire(k.env_dim)
    cod = k.cod + (env,)
    dc = plain_dim(k.cod)
    rows = _zeros(dc * k.env_dim, plain_dim(k.dom), k.sr.zero)
    for e, m in enumerate(k.elements):
        for y in range(dc):
            for x in range(plain_dim(k.dom)):
                rows[y * k.env_dim + e][x] = m[y][x]
    return tuple(map(tuple, rows)), cod


def quantum_discard(sr: Semiring, a: QWire) -> Superoperator:
    return s_discard(sr, (a,))


def decoherence_superop(sr: Semiring, a: QWire) -> Superoperator:
    """Standard-basis decoherence: kill all off-diagonal doubled entries."""
    d = a.dim
    rows = _zeros(d * d, d * d, sr.zero)
    for i in range(d):
        k = i * d + i
        rows[k][k] = sr.one
    return Superoperator((a,), (a,), tuple(map(tuple, rows)), sr)


def decoherence_all(sr: Semiring, wires: tuple) -> Superoperator:
    """Decoherence projector on every wire (identity has the same effect on
    classical wires, which are diagonal already)."""
    n = doubled_dim(wires)
    rows = _zeros(n, n, sr.zero)
    for pairs in index_pairs(wires):
        if all(i == j for (i, j) in pairs):
            k = lin(wires, pairs)
            rows[k][k] = sr.one
    return Superoperator(tuple(wires), tuple(wires), tuple(map(tuple, rows)), sr)


def is_decoherence_invariant(phi: Superoperator) -> bool:
    dec_d = decoherence_all(phi.sr, phi.dom)
    dec_c = decoherence_all(phi.sr, phi.cod)
    return s_equal(phi, s_compose(dec_c, s_compose(phi, dec_d)))


# ---------------------------------------------------------------------------
# Born-rule classical extraction (and its inverse embedding)


def classical_extract(phi: Superoperator, pp: PositivePart) -> Morphism:
    """The classical matrix <y| f(|x><x|) |y> of a decoherence-invariant map.

    All wires are reinterpreted as classical; entries are retracted into the
    positive scalar semiring R.
    """
    if not is_decoherence_invariant(phi):
        raise NotDecoheredError("superoperator is not decoherence-invariant")
    dom_obj = _wires_as_obj(phi.dom)
    cod_obj = _wires_as_obj(phi.cod)
    rows = []
    for ds in itertools.product(*(range(w.size) for w in phi.cod)):
        r = lin(phi.cod, [(i, i) for i in ds])
        row = []
        for cs in itertools.product(*(range(w.size) for w in phi.dom)):
            c = lin(phi.dom, [(i, i) for i in cs])
            row.append(pp.retract(phi.entries[r][c]))
        rows.append(tuple(row))
    return Morphism(dom_obj, cod_obj, tuple(rows), pp.ring)


def classical_embed(f: Morphism, pp: PositivePart, dom: tuple = None, cod: tuple = None) -> Superoperator:
    """Embed a classical matrix over R as a decohered superoperator over S."""
    sr = pp.ambient
    dom = tuple(dom) if dom is not None else (cwire(f.dom),)
    cod = tuple(cod) if cod is not None else (cwire(f.cod),)
    if plain_dim(dom) != f.dom.size or plain_dim(cod) != f.cod.size:
        raise ShapeError("wire lists do not match the classical matrix shape")
    rows = _zeros(doubled_dim(cod), doubled_dim(dom), sr.zero)
    for y in range(f.cod.size):
        r = lin(cod, _diag_digits(cod, y))
        for x in range(f.dom.size):
            c = lin(dom, _diag_digits(dom, x))
            rows[r][c] = pp.embed(f.entries[y][x])
    return Superoperator(dom, cod, tuple(map(tuple, rows)), sr)


def _diag_digits(wires: tuple, flat: int):
    digits = []
    for w in reversed(wires):
        digits.append(flat % w.size)
        flat //= w.size
    digits.reverse()
    return [(i, i) for i in digits]


def _wires_as_obj(wires: tuple) -> Obj:
    if not wires:
        return matcat.UNIT
    o = None
    for w in wires:
        cur = Obj(w.labels) if isinstance(w, CWire) else matcat.obj_of_size(w.dim)
        o = cur if o is None else matcat.obj_tensor(o, cur)
    return o


def delta_superstate(sr: Semiring, w: CWire, label) -> Superoperator:
    """The doubled deterministic state |x><x| on a classical wire."""
    i = w.as_obj().index(label)
    col = [[sr.zero] for _ in range(w.size * w.size)]
    col[i * w.size + i][0] = sr.one
    return Superoperator((), (w,), tuple(map(tuple, col)), sr)


def point_supereffect(sr: Semiring, w: CWire, label) -> Superoperator:
    i = w.as_obj().index(label)
    row = [sr.zero] * (w.size * w.size)
    row[i * w.size + i] = sr.one
    return Superoperator((w,), (), (tuple(row),), sr)


# ---------------------------------------------------------------------------
# Choi matrix, purity, purification


def flatten_quantum(phi: Superoperator):
    """Re-linearise a quantum-only superoperator to single global (Y, Y') order.

    Returns (matrix, d_out, d_in) with matrix[(Y * d_out + Y'), (X * d_in + X')].
    """
    if any(isinstance(w, CWire) for w in phi.dom + phi.cod):
        raise ShapeError("flatten_quantum expects quantum-only wires")
    din, dout = plain_dim(phi.dom), plain_dim(phi.cod)
    out = _zeros(dout * dout, din * din, phi.sr.zero)
    for rp in index_pairs(phi.cod):
        y = plain_lin(phi.cod, [i for i, _ in rp])
        yp = plain_lin(phi.cod, [j for _, j in rp])
        for cp in index_pairs(phi.dom):
            x = plain_lin(phi.dom, [i for i, _ in cp])
            xp = plain_lin(phi.dom, [j for _, j in cp])
            out[y * dout + yp][x * din + xp] = phi.entries[lin(phi.cod, rp)][lin(phi.dom, cp)]
    return out, dout, din


def choi_matrix(phi: Superoperator):
    """Choi[(y,x),(y',x')] = Phi[(y,y'),(x,x')] (frozen reshuffle convention)."""
    flat, dout, din = flatten_quantum(phi)
    n = dout * din
    choi = _zeros(n, n, phi.sr.zero)
    for y in range(dout):
        for yp in range(dout):
            for x in range(din):
                for xp in range(din):
                    choi[y * din + x][yp * din + xp] = flat[y * dout + yp][x * din + xp]
    return choi


def _matrix_rank_field(sr: Semiring, mat) -> int:
    """Rank by Gaussian elimination; needs multiplicative inverses in sr."""
    m = [list(r) for r in mat]
    rows, cols = len(m), len(m[0]) if m else 0
    rank = 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if not sr.eq(m[r][c], sr.zero):
                if sr.tolerance is not None:
                    if piv is None or abs(m[r][c]) > abs(m[piv][c]):
                        piv = r
                else:
                    piv = r
                    break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = sr.inv(m[rank][c])
        m[rank] = [sr.mul(inv, v) for v in m[rank]]
        for r in range(rows):
            if r != rank and not sr.eq(m[r][c], sr.zero):
                factor = m[r][c]
                m[r] = [
                    sr.add(v, sr.mul(_neg(sr, factor), w)) for v, w in zip(m[r], m[rank])
                ]
        rank += 1
    return rank


def _neg(sr: Semiring, x):
    """Additive inverse; only called for semirings that are rings."""
    if sr.id in ("rat", "ratnn"):
        return -x
    if sr.id in ("gauss-rat", "split-rat"):
        return (-x[0], -x[1])
    if sr.id == "complex-f64":
        return -x
    if sr.id.startswith("gf2 "):
        p = int(sr.id.split()[1])
        return ((-x[0]) % p, (-x[1]) % p)
    if sr.id.startswith("gf "):
        p = int(sr.id.split()[1])
        return (-x) % p
    raise SemiringError(f"{sr.id} has no additive inverses")


def is_pure_choi(phi: Superoperator) -> bool:
    """Desk-scale purity test: the Choi matrix has rank at most one."""
    sr = phi.sr
    if sr.id in ("bool", "nat"):
        raise SemiringError("purity test needs a semiring with division")
    choi = choi_matrix(phi)
    if sr.tolerance is not None:
        import numpy as np

        a = np.array([[complex(v) for v in row] for row in choi])
        if a.size == 0:
            return True
        svals = np.linalg.svd(a, compute_uv=False)
        scale = max(svals[0], 1.0)
        return sum(1 for s in svals if s > sr.tolerance * scale) <= 1
    return _matrix_rank_field(sr, choi) <= 1


class NotCompletelyPositiveError(ShapeError):
    pass


def purify(phi: Superoperator, tol: float = None) -> KrausFamily:
    """Kraus decomposition of an approximate-complex channel via the Choi matrix.

    Eigenvalues are sorted descending; components below tolerance are dropped.
    The stacked family is a pure map into cod (x) environment reproducing phi
    when the environment is discarded.
    """
    import numpy as np

    sr = phi.sr
    if sr.tolerance is None:
        raise SemiringError("purify is only available in approximate-complex mode")
    tol = sr.tolerance if tol is None else tol
    choi = np.array([[complex(v) for v in row] for row in choi_matrix(phi)])
    herm_err = np.abs(choi - choi.conj().T).max()
    evals, evecs = np.linalg.eigh((choi + choi.conj().T) / 2)
    scale = max(np.abs(evals).max(), 1.0)
    if herm_err > 1e-7 * scale or evals.min() < -1e-7 * scale:
        raise NotCompletelyPositiveError("Choi matrix is not PSD within tolerance")
    order = np.argsort(-evals)
    din, dout = plain_dim(phi.dom), plain_dim(phi.cod)
    mats = []
    for k in order:
        lam = evals[k]
        if lam <= max(tol, 1e-12) * scale:
            continue
        v = evecs[:, k] * np.sqrt(lam)
        mats.append(tuple(tuple(complex(v[y * din + x]) for x in range(din)) for y in range(dout)))
    if not mats:
        mats = [tuple(tuple(0j for _ in range(din)) for _ in range(dout))]
    return kraus_family(sr, phi.dom, phi.cod, mats)
