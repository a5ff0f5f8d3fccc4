"""SL2 over finite rings, the semidirect products R^2 x| SL2(R), and words.

Groups are handled through integer indices. ``IndexedGroup`` numbers its
elements (v, g) as ``(v_x * q + v_y) * |SL2| + j`` where ``j`` is the
position of ``g`` in the SL2 list (identity first, then lexicographic on
(a, b, c, d)). Index 0 is always the identity. ``mul``/``inv`` act on index
arrays and never build an element list.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .rings import FiniteRing

SL2_CAP = 10**6
GROUP_CAP = 10**7
BRUTE_FORCE_MAX_RING = 64
# SL2 x SL2 and SL2 x R^2 lookup tables are precomputed below this many entries.
TABLE_MAX_ENTRIES = 2 * 10**7


class CapExceeded(ValueError):
    pass


# -- SL2 ---------------------------------------------------------------------


def sl2_count_formula(k: int) -> int:
    """|SL2(Z/k)| = k^3 prod_{p | k} (1 - 1/p^2)."""
    count = k**3
    n, p = k, 2
    primes = []
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        primes.append(n)
    for p in primes:
        count = count * (p * p - 1) // (p * p)
    return count


def _sl2_codes(ring: FiniteRing, mats: np.ndarray) -> np.ndarray:
    q = ring.size
    return ((mats[:, 0] * q + mats[:, 1]) * q + mats[:, 2]) * q + mats[:, 3]


def _sl2_brute(ring: FiniteRing, cap: int) -> np.ndarray:
    q = ring.size
    r = ring.elements()
    prod = ring.mul(r[:, None], r[None, :])  # prod[x, y] = x*y
    ad = prod.ravel()
    # bucket (b, c) pairs by their product
    bc_order = np.argsort(ad, kind="stable")
    bc_sorted = ad[bc_order]
    target = ring.sub(ad, ring.one)  # need bc = ad - 1
    lo = np.searchsorted(bc_sorted, target, side="left")
    hi = np.searchsorted(bc_sorted, target, side="right")
    total = int((hi - lo).sum())
    if total > cap:
        raise CapExceeded(f"|SL2({ring})| = {total} exceeds cap {cap}")
    counts = hi - lo
    ad_idx = np.repeat(np.arange(q * q), counts)
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    bc_idx = bc_order[np.arange(total) + starts]
    a, d = np.divmod(ad_idx, q)
    b, c = np.divmod(bc_idx, q)
    return np.stack([a, b, c, d], axis=1).astype(np.int64)


def _sl2_mat_mul(ring: FiniteRing, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    a2, b2, c2, d2 = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
    add, mul = ring.add, ring.mul
    return np.stack(
        [
            add(mul(a1, a2), mul(b1, c2)),
            add(mul(a1, b2), mul(b1, d2)),
            add(mul(c1, a2), mul(d1, c2)),
            add(mul(c1, b2), mul(d1, d2)),
        ],
        axis=-1,
    )


def _sl2_closure(ring: FiniteRing, cap: int) -> np.ndarray:
    """BFS closure of the elementary matrices E12(u), E21(u), u an additive generator."""
    one, zero = ring.one, ring.zero
    gens = []
    for u in ring.additive_generators():
        gens.append((one, u, zero, one))
        gens.append((one, zero, u, one))
    gens = np.array(gens, dtype=np.int64).reshape(-1, 4)
    ident = np.array([[one, zero, zero, one]], dtype=np.int64)
    seen = {int(_sl2_codes(ring, ident)[0])}
    found = [ident]
    frontier = ident
    while len(frontier):
        cand = _sl2_mat_mul(ring, frontier[:, None, :], gens[None, :, :]).reshape(-1, 4)
        codes = _sl2_codes(ring, cand)
        codes, first = np.unique(codes, return_index=True)
        fresh = [i for i, c in zip(first, codes.tolist()) if c not in seen]
        seen.update(codes.tolist())
        frontier = cand[fresh]
        found.append(frontier)
        if len(seen) > cap:
            raise CapExceeded(f"|SL2({ring})| exceeds cap {cap}")
    return np.concatenate(found)


def sl2_enumerate(ring: FiniteRing, cap: int = SL2_CAP, method: str = "auto") -> np.ndarray:
    """All determinant-one 2x2 matrices over ``ring`` as an (n, 4) array of codes.

    Rows are (a, b, c, d), the identity first and the rest in lexicographic
    order. ``method`` is ``"brute"`` (determinant filter), ``"closure"``
    (generator BFS) or ``"auto"`` (brute force for rings of size <= 64).
    """
    if method == "auto":
        method = "brute" if ring.size <= BRUTE_FORCE_MAX_RING else "closure"
    if method == "brute":
        mats = _sl2_brute(ring, cap)
    elif method == "closure":
        mats = _sl2_closure(ring, cap)
    else:
        raise ValueError(f"unknown method {method!r}")
    codes = _sl2_codes(ring, mats)
    order = np.argsort(codes, kind="stable")
    mats = mats[order]
    ident = np.array([ring.one, 0, 0, ring.one])
    pos = int(np.flatnonzero((mats == ident).all(axis=1))[0])
    return np.concatenate([mats[pos : pos + 1], mats[:pos], mats[pos + 1 :]])


# -- groups ------------------------------------------------------------------


class FiniteGroup:
    """Index-based finite group. Element 0 is the identity."""

    size: int

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def all_indices(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    @cached_property
    def is_abelian(self) -> bool:
        idx = self.all_indices()
        step = 4096
        for start in range(0, self.size, step):
            x = idx[start : start + step, None]
            if not np.array_equal(self.mul(x, idx[None, :]), self.mul(idx[None, :], x)):
                return False
        return True

    def mul_table(self) -> np.ndarray:
        idx = self.all_indices()
        return self.mul(idx[:, None], idx[None, :])


@dataclass(frozen=True)
class GroupElement:
    """(v, g) in R^2 x| SL2(R), components as ring codes."""

    v: tuple[int, int]
    g: tuple[int, int, int, int]

    def __str__(self):
        a, b, c, d = self.g
        return f"(({self.v[0]},{self.v[1]}),[[{a},{b}],[{c},{d}]])"


class IndexedGroup(FiniteGroup):
    """R^2 x| SL2(R) with product (v1, g1)(v2, g2) = (v1 + g1 v2, g1 g2)."""

    def __init__(self, ring: FiniteRing, sl2_cap: int = SL2_CAP, group_cap: int = GROUP_CAP, method: str = "auto"):
        self.ring = ring
        q = ring.size
        if ring.kind == "zmod":
            expected = sl2_count_formula(q) if q > 1 else 1
            if expected > sl2_cap:
                raise CapExceeded(f"|SL2({ring})| = {expected} exceeds cap {sl2_cap}")
            if q * q * expected > group_cap:
                raise CapExceeded(f"|group| = {q * q * expected} exceeds cap {group_cap}")
        self.sl2 = sl2_enumerate(ring, cap=sl2_cap, method=method)
        self.sl2_size = len(self.sl2)
        self.size = q * q * self.sl2_size
        if self.size > group_cap:
            raise CapExceeded(f"|group| = {self.size} exceeds cap {group_cap}")
        codes = _sl2_codes(ring, self.sl2)
        self._code_order = np.argsort(codes)
        self._codes_sorted = codes[self._code_order]
        self._build_tables()

    @classmethod
    def from_descriptor(cls, desc: dict, **kw) -> IndexedGroup:
        return cls(FiniteRing.from_descriptor(desc["ring"]), **kw)

    @classmethod
    def zmod(cls, k: int, **kw) -> IndexedGroup:
        return cls(FiniteRing.zmod(k), **kw)

    def descriptor(self) -> dict:
        return {"ring": self.ring.descriptor()}

    def __repr__(self):
        return f"IndexedGroup({self.ring}^2 x| SL2({self.ring}), order {self.size})"

    # -- lookups -------------------------------------------------------------

    def sl2_index(self, mats: np.ndarray) -> np.ndarray:
        codes = _sl2_codes(self.ring, mats)
        pos = np.searchsorted(self._codes_sorted, codes)
        pos = np.minimum(pos, self.sl2_size - 1)
        if not np.array_equal(self._codes_sorted[pos], codes):
            raise KeyError("matrix not in SL2")
        return self._code_order[pos]

    def _build_tables(self):
        ring, s, q = self.ring, self.sl2_size, self.ring.size
        self._sl2_inv = self.sl2_index(
            np.stack([self.sl2[:, 3], ring.neg(self.sl2[:, 1]), ring.neg(self.sl2[:, 2]), self.sl2[:, 0]], axis=1)
        )
        self._sl2_mul = None
        if s * s <= TABLE_MAX_ENTRIES:
            prod = _sl2_mat_mul(ring, self.sl2[:, None, :], self.sl2[None, :, :])
            self._sl2_mul = self.sl2_index(prod.reshape(-1, 4)).reshape(s, s)
        self._act = None
        if s * q * q <= TABLE_MAX_ENTRIES:
            vx, vy = np.divmod(np.arange(q * q), q)
            self._act = self._act_direct(np.arange(s)[:, None], vx[None, :], vy[None, :])

    def _act_direct(self, j, vx, vy):
        g = self.sl2[j]
        ring = self.ring
        x = ring.add(ring.mul(g[..., 0], vx), ring.mul(g[..., 1], vy))
        y = ring.add(ring.mul(g[..., 2], vx), ring.mul(g[..., 3], vy))
        return x * self.ring.size + y

    def act(self, j, v):
        """Index of g_j . v for SL2 index ``j`` and vector index ``v``."""
        if self._act is not None:
            return self._act[j, v]
        vx, vy = np.divmod(v, self.ring.size)
        return self._act_direct(j, vx, vy)

    def sl2_mul(self, j1, j2):
        if self._sl2_mul is not None:
            return self._sl2_mul[j1, j2]
        j1, j2 = np.broadcast_arrays(j1, j2)
        prod = _sl2_mat_mul(self.ring, self.sl2[j1], self.sl2[j2])
        return self.sl2_index(prod.reshape(-1, 4)).reshape(j1.shape)

    def vec_add(self, u, v):
        q = self.ring.size
        ux, uy = np.divmod(u, q)
        vx, vy = np.divmod(v, q)
        return self.ring.add(ux, vx) * q + self.ring.add(uy, vy)

    def vec_neg(self, v):
        q = self.ring.size
        vx, vy = np.divmod(v, q)
        return self.ring.neg(vx) * q + self.ring.neg(vy)

    def split(self, x):
        """Index -> (vector index, SL2 index)."""
        return np.divmod(np.asarray(x, dtype=np.int64), self.sl2_size)

    def join(self, v, j):
        return np.asarray(v, dtype=np.int64) * self.sl2_size + j

    # -- group law -----------------------------------------------------------

    def mul(self, x, y):
        v1, j1 = self.split(x)
        v2, j2 = self.split(y)
        return self.join(self.vec_add(v1, self.act(j1, v2)), self.sl2_mul(j1, j2))

    def inv(self, x):
        v, j = self.split(x)
        ji = self._sl2_inv[j]
        return self.join(self.vec_neg(self.act(ji, v)), ji)

    # -- elements ------------------------------------------------------------

    def element(self, i: int) -> GroupElement:
        if not 0 <= i < self.size:
            raise IndexError(i)
        v, j = divmod(int(i), self.sl2_size)
        vx, vy = divmod(v, self.ring.size)
        return GroupElement((vx, vy), tuple(int(c) for c in self.sl2[j]))

    def index(self, elem: GroupElement) -> int:
        q = self.ring.size
        if not all(0 <= c < q for c in (*elem.v, *elem.g)):
            raise KeyError(f"{elem} has components outside the ring")
        j = int(self.sl2_index(np.array([elem.g]))[0])
        return (elem.v[0] * q + elem.v[1]) * self.sl2_size + j

    def elements(self):
        for i in range(self.size):
            yield self.element(i)

    def make(self, v=(0, 0), g=None) -> int:
        """Index of the element with integer components reduced into the ring."""
        r = self.ring
        if g is None:
            g = (1, 0, 0, 1)
        return self.index(GroupElement(tuple(r.from_int(c) for c in v), tuple(r.from_int(c) for c in g)))

    def translations(self) -> np.ndarray:
        """Indices of the subgroup {(v, I)}."""
        return np.arange(self.ring.size**2, dtype=np.int64) * self.sl2_size

    def linear(self) -> np.ndarray:
        """Indices of the subgroup {(0, g)}."""
        return np.arange(self.sl2_size, dtype=np.int64)


class Subgroup(FiniteGroup):
    """A subgroup given by a sorted array of parent indices (identity first)."""

    def __init__(self, parent: FiniteGroup, members, name: str = "explicit", check: bool = True):
        members = np.unique(np.asarray(members, dtype=np.int64))
        if len(members) == 0 or members[0] != 0:
            raise ValueError("subgroup must contain the identity")
        self.parent = parent
        self.members = members
        self.size = len(members)
        self.name = name
        if check:
            self._check_closed()

    def _check_closed(self):
        m = self.members
        step = max(1, 2**22 // self.size)
        for start in range(0, self.size, step):
            prods = self.parent.mul(m[start : start + step, None], m[None, :])
            pos = np.minimum(np.searchsorted(m, prods), self.size - 1)
            if not np.array_equal(m[pos], prods):
                raise ValueError("element list is not closed under multiplication")

    def local(self, parent_idx):
        pos = np.searchsorted(self.members, parent_idx)
        return pos

    def mul(self, x, y):
        return self.local(self.parent.mul(self.members[x], self.members[y]))

    def inv(self, x):
        return self.local(self.parent.inv(self.members[x]))

    def descriptor(self) -> dict:
        return {"subgroup": self.name, "of": self.parent.descriptor(), "order": self.size}

    def __repr__(self):
        return f"Subgroup({self.name}, order {self.size} in {self.parent!r})"


class ProductGroup(FiniteGroup):
    """Direct product G1 x G2, indexed as i1 * |G2| + i2."""

    def __init__(self, left: FiniteGroup, right: FiniteGroup):
        self.left = left
        self.right = right
        self.size = left.size * right.size

    def split(self, x):
        return np.divmod(np.asarray(x, dtype=np.int64), self.right.size)

    def join(self, a, b):
        return np.asarray(a, dtype=np.int64) * self.right.size + b

    def mul(self, x, y):
        a1, b1 = self.split(x)
        a2, b2 = self.split(y)
        return self.join(self.left.mul(a1, a2), self.right.mul(b1, b2))

    def inv(self, x):
        a, b = self.split(x)
        return self.join(self.left.inv(a), self.right.inv(b))

    def descriptor(self) -> dict:
        return {"product": [self.left.descriptor(), self.right.descriptor()]}

    def __repr__(self):
        return f"ProductGroup({self.left!r}, {self.right!r})"


class VectorGroup(FiniteGroup):
    """The additive group R^2, indexed as x * q + y."""

    def __init__(self, ring: FiniteRing):
        self.ring = ring
        self.size = ring.size**2

    def mul(self, x, y):
        q = self.ring.size
        x1, y1 = np.divmod(x, q)
        x2, y2 = np.divmod(y, q)
        return self.ring.add(x1, x2) * q + self.ring.add(y1, y2)

    def inv(self, x):
        q = self.ring.size
        x1, y1 = np.divmod(x, q)
        return self.ring.neg(x1) * q + self.ring.neg(y1)

    def vector(self, x) -> tuple[int, int]:
        return divmod(int(x), self.ring.size)

    def index(self, x: int, y: int) -> int:
        return self.ring.from_int(x) * self.ring.size + self.ring.from_int(y)

    def descriptor(self) -> dict:
        return {"vectors": self.ring.descriptor()}

    def __repr__(self):
        return f"VectorGroup({self.ring}^2)"


def describe(G: FiniteGroup, x: int) -> str:
    """Readable form of element ``x``."""
    x = int(x)
    if isinstance(G, IndexedGroup):
        return str(G.element(x))
    if isinstance(G, VectorGroup):
        return "({},{})".format(*G.vector(x))
    if isinstance(G, ProductGroup):
        a, b = G.split(x)
        return f"<{describe(G.left, a)}, {describe(G.right, b)}>"
    if isinstance(G, Subgroup):
        if G.name == "translations" and isinstance(G.parent, IndexedGroup):
            v, _ = G.parent.split(G.members[x])
            return "({},{})".format(*divmod(int(v), G.parent.ring.size))
        return describe(G.parent, G.members[x])
    return str(x)


def generated_subgroup(G: FiniteGroup, gens, name: str = "generated") -> Subgroup:
    """Closure of ``gens`` under right multiplication by generators."""
    gens = np.unique(np.asarray(gens, dtype=np.int64))
    seen = np.zeros(G.size, dtype=bool) if G.size <= 10**8 else None
    members = {0}
    if seen is not None:
        seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    while len(frontier):
        cand = np.unique(G.mul(frontier[:, None], gens[None, :]).ravel())
        if seen is not None:
            cand = cand[~seen[cand]]
            seen[cand] = True
        else:
            cand = np.array([c for c in cand.tolist() if c not in members], dtype=np.int64)
            members.update(cand.tolist())
        frontier = cand
    idx = np.flatnonzero(seen) if seen is not None else np.array(sorted(members))
    return Subgroup(G, idx, name=name, check=False)


def translation_subgroup(G: FiniteGroup) -> Subgroup:
    """Image of Z^2 (generated by (1,0), (0,1)) in G."""
    if isinstance(G, IndexedGroup):
        return Subgroup(G, G.translations(), name="translations", check=False)
    gens = [Word.parse("a").evaluate(G), Word.parse("b").evaluate(G)]
    return generated_subgroup(G, gens, name="translations")


def linear_subgroup(G: FiniteGroup) -> Subgroup:
    if isinstance(G, IndexedGroup):
        return Subgroup(G, G.linear(), name="linear", check=False)
    gens = [Word.parse("S").evaluate(G), Word.parse("T").evaluate(G)]
    return generated_subgroup(G, gens, name="linear")


# -- words -------------------------------------------------------------------

# Letter -> (translation part, linear part) over Z.
LETTERS = {
    "a": ((1, 0), (1, 0, 0, 1)),
    "b": ((0, 1), (1, 0, 0, 1)),
    "S": ((0, 0), (0, -1, 1, 0)),
    "T": ((0, 0), (1, 1, 0, 1)),
}
_TOKEN = re.compile(r"\s*([abST])(\^-1|'|\^\+?1)?\s*")


@dataclass(frozen=True)
class Word:
    """A word in a, S, T (and b = S a S^-1 as shorthand) and their inverses.

    Letters are ``(symbol, +1 | -1)``. String syntax: ``"aS"``, ``"T^-1 a"``
    or ``"T'a"``.
    """

    letters: tuple[tuple[str, int], ...] = ()

    @classmethod
    def parse(cls, text: str) -> Word:
        letters, pos = [], 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"bad word {text!r} at position {pos}")
            sign = -1 if m.group(2) in ("^-1", "'") else 1
            letters.append((m.group(1), sign))
            pos = m.end()
        return cls(tuple(letters))

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple((s, -e) for s, e in reversed(self.letters)))

    def __str__(self):
        return "".join(s + ("^-1" if e < 0 else "") for s, e in self.letters) or "e"

    def evaluate(self, G: FiniteGroup) -> int:
        """Index of the word's image under reduction into ``G``."""
        if isinstance(G, ProductGroup):
            return int(G.join(self.evaluate(G.left), self.evaluate(G.right)))
        if isinstance(G, Subgroup):
            return int(G.local(self.evaluate(G.parent)))
        out = 0
        for sym, e in self.letters:
            v, g = LETTERS[sym]
            x = G.make(v, g)
            out = int(G.mul(out, x if e > 0 else G.inv(x)))
        return out


def reduce_word(w: Word | str, G: FiniteGroup) -> int:
    if isinstance(w, str):
        w = Word.parse(w)
    return w.evaluate(G)


def generator_words(m: int) -> list[Word]:
    """[aS, T, e, ..., e] of length m."""
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    return [Word.parse("aS"), Word.parse("T")] + [Word()] * (m - 2)


def generator_tuple(G: FiniteGroup, m: int) -> list[int]:
    return [w.evaluate(G) for w in generator_words(m)]


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
