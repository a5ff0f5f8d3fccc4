"""Exact 2-cocycles with values in a ring or in Z/L (phases exp(2 pi i v / L)).

Cocycles are vectorized callables on element-index arrays. Nothing here
touches floating point.
"""

from __future__ import annotations

import json
import math
import weakref
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .groups import (
    FiniteGroup,
    IndexedGroup,
    ProductGroup,
    Subgroup,
    VectorGroup,
    describe,
    generated_subgroup,
    linear_subgroup,
    translation_subgroup,
)
from .rings import FiniteRing
from .snf import SmithForm, smith_normal_form, solve_mod

EXHAUSTIVE_CAP = 10**8
DECIDE_CAP = 2000
INVARIANCE_EXHAUSTIVE_MAX = 2 * 10**7


class CocycleError(ValueError):
    pass


@dataclass
class AdditiveCocycle:
    """c: G x G -> (R, +) with trivial action."""

    group: FiniteGroup
    ring: FiniteRing
    fn: Callable

    def __call__(self, x, y):
        return self.fn(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))


@dataclass
class PhaseCocycle:
    """c: G x G -> Z/L, read as the phase exp(2 pi i c / L)."""

    group: FiniteGroup
    order: int
    fn: Callable
    label: str = ""

    def __call__(self, x, y):
        out = self.fn(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))
        return np.asarray(out, dtype=np.int64) % self.order

    def table(self) -> np.ndarray:
        idx = self.group.all_indices()
        return self(idx[:, None], idx[None, :])

    @classmethod
    def from_table(cls, group: FiniteGroup, order: int, table, label: str = "table") -> PhaseCocycle:
        table = np.asarray(table, dtype=np.int64) % order
        if table.shape != (group.size, group.size):
            raise CocycleError(f"table shape {table.shape} does not match group order {group.size}")
        return cls(group, order, lambda x, y: table[x, y], label=label)

    @classmethod
    def trivial(cls, group: FiniteGroup, order: int = 1) -> PhaseCocycle:
        return cls(group, order, lambda x, y: np.zeros(np.broadcast(x, y).shape, dtype=np.int64), label="trivial")

    def is_trivial(self) -> bool:
        return not self.table().any()

    def to_json(self) -> str:
        return json.dumps(
            {"order": self.order, "group": self.group.descriptor(), "values": self.table().tolist()},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> PhaseCocycle:
        data = json.loads(text)
        group = group_from_descriptor(data["group"])
        return cls.from_table(group, int(data["order"]), data["values"], label="json")


def group_from_descriptor(desc: dict) -> FiniteGroup:
    if "ring" in desc:
        return IndexedGroup.from_descriptor(desc)
    if "vectors" in desc:
        return VectorGroup(FiniteRing.from_descriptor(desc["vectors"]))
    if "product" in desc:
        left, right = desc["product"]
        return ProductGroup(group_from_descriptor(left), group_from_descriptor(right))
    if "subgroup" in desc:
        parent = group_from_descriptor(desc["of"])
        return named_subgroup(parent, desc["subgroup"])
    raise CocycleError(f"cannot rebuild group from {desc}")


# -- constructions -------------------------------------------------------------


def symplectic_cocycle(ring: FiniteRing) -> AdditiveCocycle:
    """c((x, y), (z, t)) = x t - y z on R^2."""
    V = VectorGroup(ring)
    q = ring.size

    def fn(u, v):
        x, y = np.divmod(u, q)
        z, t = np.divmod(v, q)
        return ring.sub(ring.mul(x, t), ring.mul(y, z))

    return AdditiveCocycle(V, ring, fn)


def check_invariance(c: AdditiveCocycle, G: IndexedGroup, samples: int = 10**5, seed: int = 0) -> bool:
    """c(g.a, g.b) == c(a, b) for g in SL2(R), a, b in R^2."""
    s, n = G.sl2_size, G.ring.size**2
    if s * n * n <= INVARIANCE_EXHAUSTIVE_MAX:
        j = np.arange(s)[:, None, None]
        a = np.arange(n)[None, :, None]
        b = np.arange(n)[None, None, :]
    else:
        rng = np.random.default_rng(seed)
        j, a, b = rng.integers(0, s, samples), rng.integers(0, n, samples), rng.integers(0, n, samples)
    return bool(np.array_equal(c(G.act(j, a), G.act(j, b)), np.broadcast_to(c(a, b), np.broadcast(j, a, b).shape)))


def extend_to_semidirect(c: AdditiveCocycle, G: IndexedGroup, check: bool = True) -> AdditiveCocycle:
    """c((a, g), (b, h)) = c(a, g.b) on R^2 x| SL2(R)."""
    if not isinstance(c.group, VectorGroup) or c.group.ring != G.ring:
        raise CocycleError("cocycle must live on R^2 for the ring of G")
    if check and not check_invariance(c, G):
        raise CocycleError("cocycle is not SL2-invariant")

    def fn(x, y):
        v1, j1 = G.split(x)
        v2, _ = G.split(y)
        return c(v1, G.act(j1, v2))

    return AdditiveCocycle(G, c.ring, fn)


def phase_family(c: AdditiveCocycle) -> PhaseCocycle:
    """exp(2 pi i c / k) for a Z/k-valued cocycle, as an order-k phase cocycle."""
    if c.ring.kind != "zmod":
        raise CocycleError("phase_family needs Z/k coefficients; use character_compose")
    k = c.ring.n
    return PhaseCocycle(c.group, k, c.fn, label=f"c_{k}")


@dataclass
class Character:
    """Additive character R -> Z/L given by its value table."""

    ring: FiniteRing
    order: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64) % self.order
        if self.values.shape != (self.ring.size,):
            raise CocycleError("character table has the wrong length")
        r = self.ring.elements()
        lhs = self.values[self.ring.add(r[:, None], r[None, :])]
        if not np.array_equal(lhs, (self.values[:, None] + self.values[None, :]) % self.order):
            raise CocycleError("map is not additive")

    def __call__(self, x):
        return self.values[x]

    @classmethod
    def canonical(cls, ring: FiniteRing) -> Character:
        """x -> x on Z/k."""
        if ring.kind != "zmod":
            raise CocycleError("canonical character needs Z/k")
        return cls(ring, ring.n, np.arange(ring.n))

    @classmethod
    def trivial(cls, ring: FiniteRing) -> Character:
        return cls(ring, 1, np.zeros(ring.size, dtype=np.int64))

    @classmethod
    def coefficient_functional(cls, ring: FiniteRing, weights) -> Character:
        """x -> sum_i w_i * coeff_i(x), valued in Z/char(R)."""
        p = ring.characteristic
        w = list(weights) + [0] * (ring.degree - len(weights))
        vals = [sum(wi * ci for wi, ci in zip(w, ring.coeffs(x))) % p for x in range(ring.size)]
        return cls(ring, p, np.array(vals, dtype=np.int64))

    def descriptor(self) -> dict:
        return {"order": self.order, "values": self.values.tolist()}


def character_compose(c: AdditiveCocycle, chi: Character) -> PhaseCocycle:
    if chi.ring != c.ring:
        raise CocycleError("character is defined on a different ring")
    return PhaseCocycle(c.group, chi.order, lambda x, y: chi(c(x, y)), label="chi o c")


def standard_phase_cocycle(G: IndexedGroup, chi: Character | None = None) -> PhaseCocycle:
    """The extended symplectic cocycle on G, pushed to phases by ``chi``.

    Without ``chi`` the ring must be Z/k and the result is the order-k family.
    """
    c = extend_to_semidirect(symplectic_cocycle(G.ring), G)
    return phase_family(c) if chi is None else character_compose(c, chi)


def tensor_cocycle(c1: PhaseCocycle, c2: PhaseCocycle) -> PhaseCocycle:
    """Cocycle of pi_1 (x) conj(pi_2): c1 - c2 on G1 x G2, order lcm(L1, L2)."""
    L = c1.order * c2.order // math.gcd(c1.order, c2.order)
    s1, s2 = L // c1.order, L // c2.order
    G = ProductGroup(c1.group, c2.group)

    def fn(x, y):
        a1, b1 = G.split(x)
        a2, b2 = G.split(y)
        return c1(a1, a2) * s1 - c2(b1, b2) * s2

    return PhaseCocycle(G, L, fn, label=f"{c1.label}*conj({c2.label})")


# -- checks ----------------------------------------------------------------------


@dataclass
class IdentityReport:
    passed: bool
    mode: str
    checked: int
    violation: tuple[int, int, int] | None = None
    seed: int | None = None

    def summary(self) -> dict:
        out = {"passed": self.passed, "mode": self.mode, "checked": self.checked}
        if self.seed is not None:
            out["seed"] = self.seed
        if self.violation is not None:
            out["violation"] = list(self.violation)
        return out


def cocycle_identity_check(
    c: PhaseCocycle, mode: str = "exhaustive", n: int = 10**6, seed: int = 0, cap: int = EXHAUSTIVE_CAP
) -> IdentityReport:
    """c(g,h) + c(gh,k) == c(g,hk) + c(h,k) (mod L), exactly."""
    G, L = c.group, c.order
    N = G.size
    if mode == "exhaustive":
        if N**3 > cap:
            raise CocycleError(f"|G|^3 = {N**3} exceeds exhaustive cap {cap}")
        idx = G.all_indices()
        small = N * N <= 4 * 10**6
        M = G.mul_table() if small else None
        T = c.table() if small else None
        for g in range(N):
            h, k = idx[:, None], idx[None, :]
            if small:
                gh, hk = M[g][:, None], M[:, :]
                lhs = T[g][:, None] + T[gh, k]
                rhs = T[g][hk] + T[h, k]
            else:
                gh, hk = G.mul(g, h), G.mul(h, k)
                lhs = c(g, h) + c(gh, k)
                rhs = c(g, hk) + c(h, k)
            bad = np.flatnonzero(((lhs - rhs) % L).ravel())
            if len(bad):
                hi, ki = divmod(int(bad[0]), N)
                return IdentityReport(False, mode, g * N * N + int(bad[0]) + 1, (g, hi, ki))
        return IdentityReport(True, mode, N**3)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        done, chunk = 0, 2**18
        while done < n:
            size = min(chunk, n - done)
            g, h, k = (rng.integers(0, N, size) for _ in range(3))
            lhs = c(g, h) + c(G.mul(g, h), k)
            rhs = c(g, G.mul(h, k)) + c(h, k)
            bad = np.flatnonzero((lhs - rhs) % L)
            if len(bad):
                i = int(bad[0])
                return IdentityReport(False, mode, done + i + 1, (int(g[i]), int(h[i]), int(k[i])), seed)
            done += size
        return IdentityReport(True, mode, n, seed=seed)
    raise ValueError(f"unknown mode {mode!r}")


def is_normalized(c: PhaseCocycle) -> bool:
    idx = c.group.all_indices()
    return not c(0, idx).any() and not c(idx, 0).any()


# -- restriction and symmetry -------------------------------------------------------


def named_subgroup(G: FiniteGroup, name: str) -> Subgroup:
    if name == "translations":
        return translation_subgroup(G)
    if name == "linear":
        return linear_subgroup(G)
    raise CocycleError(f"unknown subgroup {name!r}")


def restrict(c: PhaseCocycle, sub) -> PhaseCocycle:
    """Restriction to a named subgroup, a ``Subgroup``, or an explicit element list."""
    if isinstance(sub, str):
        H = named_subgroup(c.group, sub)
    elif isinstance(sub, Subgroup):
        if sub.parent is not c.group:
            raise CocycleError("subgroup belongs to a different group")
        H = sub
    else:
        H = Subgroup(c.group, sub)  # raises if not closed
    members = H.members
    return PhaseCocycle(H, c.order, lambda x, y: c(members[x], members[y]), label=f"{c.label}|{H.name}")


@dataclass
class SymmetryResult:
    symmetric: bool
    witness: tuple[int, int] | None = None
    values: tuple[int, int] | None = None


def symmetry_test(c: PhaseCocycle) -> SymmetryResult:
    """Find (g, h) with c(g,h) != c(h,g) on an abelian group.

    Pairs are scanned with g running upward and h < g, so on (Z/k)^2 the
    first hit is g = (1,0), h = (0,1).
    """
    G = c.group
    if not G.is_abelian:
        raise CocycleError("symmetry test needs an abelian group")
    T = c.table()
    diff = np.tril(T != T.T, k=-1)
    bad = np.argwhere(diff)
    if len(bad) == 0:
        return SymmetryResult(True)
    g, h = (int(v) for v in bad[0])
    return SymmetryResult(False, (g, h), (int(T[g, h]), int(T[h, g])))


# -- coboundary decision -------------------------------------------------------------


class CoboundarySystem:
    """Per-group data for deciding b(g) + b(h) - b(gh) = c(g,h) (mod L).

    A BFS spanning tree over a generating set expresses each b(x) as
    n_x . beta - gamma_x, with beta the values on the generators. The tree
    equations then hold identically and every equation (g, h) becomes
    (n_g + n_h - n_gh) . beta = c(g,h) + gamma_g + gamma_h - gamma_gh.
    Duplicate coefficient rows are merged (their right-hand sides must
    agree) and the distinct rows are put in Smith normal form once.
    """

    def __init__(self, G: FiniteGroup):
        self.group = G
        N = G.size
        self.gens = _greedy_generators(G)
        r = len(self.gens)
        counts = np.zeros((N, r), dtype=np.int64)
        visited = np.zeros(N, dtype=bool)
        visited[0] = True
        self.levels = []  # (nodes, parents, generator slot)
        frontier = np.array([0], dtype=np.int64) if r else np.array([], dtype=np.int64)
        while len(frontier):
            nodes, parents, slots = [], [], []
            for slot, s in enumerate(self.gens):
                cand = G.mul(frontier, s)
                cand, first = np.unique(cand, return_index=True)
                keep = ~visited[cand]
                cand, first = cand[keep], first[keep]
                visited[cand] = True
                nodes.append(cand)
                parents.append(frontier[first])
                slots.append(np.full(len(cand), slot))
            nodes, parents, slots = map(np.concatenate, (nodes, parents, slots))
            counts[nodes] = counts[parents]
            counts[nodes, slots] += 1
            self.levels.append((nodes, parents, slots))
            frontier = nodes
        self.counts = counts
        idx = G.all_indices()
        prod = G.mul(idx[:, None], idx[None, :]).ravel()
        self.products = prod
        rows = (counts[:, None, :] + counts[None, :, :]).reshape(N * N, r) - counts[prod]
        uniq, first, inverse = np.unique(rows, axis=0, return_index=True, return_inverse=True)
        self.first = first
        self.inverse = inverse.ravel()
        self.coefficients = uniq
        self.form: SmithForm = smith_normal_form(uniq.tolist()) if r else smith_normal_form([[0]] * len(uniq))

    def offsets(self, c: PhaseCocycle) -> np.ndarray:
        """gamma_x for the tree parametrization."""
        gamma = np.zeros(self.group.size, dtype=np.int64)
        gens = np.asarray(self.gens, dtype=np.int64)
        for nodes, parents, slots in self.levels:
            gamma[nodes] = (gamma[parents] + c(parents, gens[slots])) % c.order
        return gamma

    def solve(self, c: PhaseCocycle) -> np.ndarray | None:
        G, L, N = self.group, c.order, self.group.size
        gamma = self.offsets(c)
        idx = G.all_indices()
        rhs = (c(idx[:, None], idx[None, :]).ravel() + gamma.repeat(N) + np.tile(gamma, N) - gamma[self.products]) % L
        rep = rhs[self.first]
        if ((rhs - rep[self.inverse]) % L).any():
            return None
        beta = solve_mod(self.form, rep.tolist(), L)
        if beta is None:
            return None
        if not self.gens:
            return (-gamma) % L
        return (self.counts @ np.asarray(beta, dtype=np.int64) - gamma) % L


def _greedy_generators(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    covered = np.zeros(G.size, dtype=bool)
    covered[0] = True
    for x in range(G.size):
        if not covered[x]:
            gens.append(x)
            covered[generated_subgroup(G, gens).members] = True
            if covered.all():
                break
    return gens


_SYSTEMS: "weakref.WeakKeyDictionary[FiniteGroup, CoboundarySystem]" = weakref.WeakKeyDictionary()


def coboundary_system(G: FiniteGroup) -> CoboundarySystem:
    system = _SYSTEMS.get(G)
    if system is None:
        system = _SYSTEMS[G] = CoboundarySystem(G)
    return system


@dataclass
class CoboundaryCertificate:
    coboundary: bool
    witness: np.ndarray | None = None
    reason: str | None = None  # "SymmetryViolation" | "UnsolvableSystem"
    pair: tuple[int, int] | None = None
    shift: int = 0  # constant subtracted to normalize c(e, e) to 0
    method: str = "snf"

    @property
    def verdict(self) -> str:
        return "Coboundary" if self.coboundary else "NotCoboundary"

    def summary(self, G: FiniteGroup | None = None) -> dict:
        out = {"verdict": self.verdict, "method": self.method}
        if self.reason:
            out["reason"] = self.reason
        if self.pair is not None:
            out["pair"] = [describe(G, x) for x in self.pair] if G is not None else list(self.pair)
        if self.shift:
            out["normalization_shift"] = self.shift
        return out


def coboundary_of(G: FiniteGroup, b, order: int) -> PhaseCocycle:
    """(g, h) -> b(g) + b(h) - b(gh) (mod order)."""
    b = np.asarray(b, dtype=np.int64) % order
    return PhaseCocycle(G, order, lambda x, y: b[x] + b[y] - b[G.mul(x, y)], label="db")


def coboundary_decide(
    c: PhaseCocycle, cap: int = DECIDE_CAP, fast_path: bool = True
) -> CoboundaryCertificate:
    """Decide exactly whether c = db for some b: G -> Z/L."""
    G, L = c.group, c.order
    if G.size > cap:
        raise CocycleError(f"|G| = {G.size} exceeds decision cap {cap}")
    shift = int(c(0, 0))
    cn = c if shift == 0 else PhaseCocycle(G, L, lambda x, y: c(x, y) - shift, label=c.label)
    if fast_path and G.is_abelian:
        sym = symmetry_test(cn)
        if not sym.symmetric:
            return CoboundaryCertificate(False, reason="SymmetryViolation", pair=sym.witness, shift=shift, method="symmetry")
    b = coboundary_system(G).solve(cn)
    if b is None:
        return CoboundaryCertificate(False, reason="UnsolvableSystem", shift=shift)
    b = (b + shift) % L
    if not np.array_equal(coboundary_of(G, b, L).table(), c.table()):
        raise AssertionError("coboundary witness failed verification")
    return CoboundaryCertificate(True, witness=b, shift=shift)
