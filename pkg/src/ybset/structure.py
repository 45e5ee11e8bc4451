"""The finite quotient ``G^0`` of the structure group, the lattice of its
kernel, the abelian invariant A with its bijective cocycle, and bundles over a
solution (blow-ups).

Elements of ``M = Aut(X) x| Z^X`` are pairs ``(s, t)`` of a permutation and an
integer vector, multiplied as ``(s1, t1)(s2, t2) = (s1 s2, s2^-1 . t1 + t2)``
where ``(s . t)[s(y)] = t[y]``.  Generator x maps to ``(f_x^-1, e_x)``.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, prod
from typing import Optional

import numpy as np

from .constructions import AbelianGroup, cyclic_solution
from .core import CanonicalKey, SolutionTable, canonical_form, validate
from .errors import (
    DomainError,
    FaithfulnessError,
    InternalInvariantViolation,
    ResourceError,
    StructureError,
    budget,
)
from .lattice import HermiteBasis, hnf_sublattices, smith_normal_form
from .taxonomy import is_irretractable, retraction


class NonGeneratingWarning(UserWarning):
    """The images of X do not generate the datum's group."""


def _act_inv(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``s^-1 . v``, i.e. ``(s^-1 . v)[z] = v[s(z)]``."""
    return v[..., s]


def _act(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[..., s] = v
    return out


@dataclass
class StructureData:
    n: int
    elements: np.ndarray  # (m, n) permutations, row 0 is the identity
    generator_images: np.ndarray  # x -> row index of f_x^-1
    cocycle: np.ndarray  # (m, n) lift of pi-bar along the search words
    gamma_basis: list  # Hermite rows spanning L = pi(Gamma)
    invariant_factors: list  # SNF diagonal, d_1 | ... | d_n
    snf_q: list = field(repr=False)  # column transform: coordinates = v Q mod d
    parent: np.ndarray = field(repr=False)  # search tree: (parent index, generator)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def index_of(self) -> dict:
        return {row.tobytes(): i for i, row in enumerate(self.elements)}

    @cached_property
    def mult(self) -> np.ndarray:
        """``mult[i, j]`` is the index of ``elements[i] o elements[j]``."""
        E = self.elements
        m = len(E)
        out = np.empty((m, m), dtype=np.int64)
        for i in range(m):
            comp = E[i][E]  # row j: E[i] o E[j]
            for j in range(m):
                out[i, j] = self.index_of[comp[j].tobytes()]
        return out

    @cached_property
    def inverse_index(self) -> np.ndarray:
        return np.argmax(self.mult == 0, axis=1)

    @cached_property
    def group(self) -> AbelianGroup:
        ds = [d for d in self.invariant_factors if d != 1] or [1]
        return AbelianGroup(tuple(ds))

    def coordinates(self, vecs) -> np.ndarray:
        """Indices in ``group`` of the classes of integer vectors mod L."""
        v = np.asarray(vecs, dtype=object).reshape(-1, self.n)
        Q = np.array(self.snf_q, dtype=object)
        c = v.dot(Q)
        keep = [i for i, d in enumerate(self.invariant_factors) if d != 1]
        ds = [self.invariant_factors[i] for i in keep]
        if not keep:
            return np.zeros(len(v), dtype=np.int64)
        coords = np.array([[int(row[i]) % d for i, d in zip(keep, ds)] for row in c], dtype=np.int64)
        return self.group.indices(coords)

    def in_lattice(self, vec) -> bool:
        return self.coordinates([vec])[0] == 0

    @cached_property
    def pi_bar(self) -> np.ndarray:
        """Element index -> index of its cocycle value in A."""
        return self.coordinates(self.cocycle)

    def cocycle_ok(self) -> bool:
        """``pi(g1 g2) = g2^-1 . pi(g1) + pi(g2)`` modulo L, on every pair."""
        m = self.order
        M = self.mult
        for i in range(m):
            lhs = self.cocycle[M[i]]  # rows j: pi(g_i g_j)
            rhs = np.array([_act_inv(self.elements[j], self.cocycle[i]) for j in range(m)]) + self.cocycle
            if np.any(self.coordinates(lhs - rhs) != 0):
                return False
        return True

    def transitive(self) -> bool:
        reach = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g in self.elements[self.generator_images]:
                y = int(g[x])
                if y not in reach:
                    reach.add(y)
                    frontier.append(y)
        return len(reach) == self.n


def compute_structure(s: SolutionTable) -> StructureData:
    """Breadth-first closure of ``{f_x^-1}`` with cocycle values and the
    Schreier-type lattice generators of ``pi(Gamma)``."""
    n = s.n
    sig = np.asarray(s.sigma)
    limit = budget("structure")
    ident = np.arange(n, dtype=np.int64)
    elements = [ident]
    cocycle = [np.zeros(n, dtype=np.int64)]
    parent = [(-1, -1)]
    index = {ident.tobytes(): 0}
    lat = HermiteBasis(n)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        g = elements[i]
        for x in range(n):
            h = g[sig[x]]  # rho(g) o rho(x)
            val = _act_inv(sig[x], cocycle[i]).copy()
            val[x] += 1
            key = h.tobytes()
            j = index.get(key)
            if j is None:
                if len(elements) >= limit:
                    raise ResourceError(f"|G^0| exceeds the structure budget {limit}")
                index[key] = len(elements)
                elements.append(h)
                cocycle.append(val)
                parent.append((i, x))
                queue.append(len(elements) - 1)
            else:
                diff = val - cocycle[j]
                if np.any(diff):
                    lat.add(diff)
    elements_arr = np.array(elements, dtype=np.int64)
    # L is stable under G^0; close it so the generators certainly span
    changed = True
    while changed:
        changed = False
        for row in lat.basis():
            for x in range(n):
                if lat.add(_act(sig[x], np.array(row, dtype=object))):
                    changed = True
    if not lat.full_rank:
        raise InternalInvariantViolation("lattice of the kernel is not of full rank")
    basis = lat.basis()
    diag, _, Q = smith_normal_form(basis)
    factors = [abs(d) for d in diag]
    if prod(factors) != len(elements):
        raise InternalInvariantViolation(f"|A| = {prod(factors)} but |G^0| = {len(elements)}")
    gens = np.array([index[np.ascontiguousarray(sig[x]).tobytes()] for x in range(n)], dtype=np.int64)
    return StructureData(
        n=n,
        elements=elements_arr,
        generator_images=gens,
        cocycle=np.array(cocycle, dtype=np.int64),
        gamma_basis=basis,
        invariant_factors=factors,
        snf_q=Q,
        parent=np.array(parent, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# Finite groups given by multiplication tables
# ---------------------------------------------------------------------------


def _identity_of(mult: np.ndarray) -> int:
    m = len(mult)
    for e in range(m):
        if np.array_equal(mult[e], np.arange(m)) and np.array_equal(mult[:, e], np.arange(m)):
            return e
    raise StructureError("multiplication table has no identity")


def _closure(mult: np.ndarray, gens) -> set:
    e = _identity_of(mult)
    seen = {e}
    frontier = [e]
    gens = list(gens)
    while frontier:
        a = frontier.pop()
        for g in gens:
            b = int(mult[a, g])
            if b not in seen:
                seen.add(b)
                frontier.append(b)
    return seen


def derived_series(mult: np.ndarray, members=None) -> list:
    """Sizes along ``G > G' > G'' > ...`` until it stabilizes."""
    m = len(mult)
    e = _identity_of(mult)
    inv = np.array([int(np.flatnonzero(mult[a] == e)[0]) for a in range(m)])
    cur = sorted(members) if members is not None else list(range(m))
    sizes = [len(cur)]
    while True:
        comms = {int(mult[mult[a, b], mult[inv[a], inv[b]]]) for a in cur for b in cur}
        nxt = sorted(_closure(mult, comms))
        if len(nxt) == len(cur):
            return sizes
        cur = nxt
        sizes.append(len(cur))


def is_solvable(d) -> bool:
    """Derived series reaches the trivial group; accepts structure data, a
    cocycle datum, or a bare multiplication table."""
    if isinstance(d, StructureData):
        mult = d.mult
    elif isinstance(d, CocycleDatum):
        mult = np.asarray(d.group)
    else:
        mult = np.asarray(d)
    return derived_series(mult)[-1] == 1


# ---------------------------------------------------------------------------
# Degree-k monoid elements
# ---------------------------------------------------------------------------


def monoid_count(s: SolutionTable, k: int) -> int:
    """Distinct elements of M that are products of exactly k generators."""
    n = s.n
    sig = np.asarray(s.sigma)
    layer = {(np.arange(n).tobytes(), np.zeros(n, dtype=np.int64).tobytes())}
    limit = budget("monoid")
    for _ in range(k):
        nxt = set()
        for pk, tk in layer:
            p = np.frombuffer(pk, dtype=np.int64)
            t = np.frombuffer(tk, dtype=np.int64)
            for x in range(n):
                val = _act_inv(sig[x], t).copy()
                val[x] += 1
                nxt.add((p[sig[x]].tobytes(), val.tobytes()))
            if len(nxt) > limit:
                raise ResourceError("monoid layer exceeds the budget")
        layer = nxt
    return len(layer)


def expected_monoid_count(n: int, k: int) -> int:
    return comb(k + n - 1, k)


# ---------------------------------------------------------------------------
# Cocycle data
# ---------------------------------------------------------------------------


@dataclass
class CocycleDatum:
    """Group (multiplication table), A, action on A (automorphism tables), pi."""

    group: np.ndarray
    A: AbelianGroup
    action: np.ndarray  # (m, |A|): action[g][a] = rho(g)(a)
    pi: np.ndarray  # (m,): element -> A index

    @property
    def order(self) -> int:
        return len(self.group)

    @cached_property
    def identity(self) -> int:
        return _identity_of(self.group)

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.array([int(np.flatnonzero(self.group[a] == self.identity)[0]) for a in range(self.order)])

    @cached_property
    def pi_inv(self) -> np.ndarray:
        return np.argsort(self.pi)

    def problems(self) -> list:
        """Every violated datum axiom, as text (empty means valid)."""
        out = []
        G = np.asarray(self.group)
        m = len(G)
        if G.shape != (m, m) or G.min() < 0 or G.max() >= m:
            return ["group table malformed"]
        try:
            e = self.identity
        except StructureError:
            return ["group has no identity"]
        if m <= 400:
            left = G[G[:, :, None], np.arange(m)[None, None, :]]  # (ab)c
            right = G[np.arange(m)[:, None, None], G[None, :, :]]  # a(bc)
            if not np.array_equal(left, right):
                out.append("group is not associative")
        if not all(np.any(G[a] == e) for a in range(m)):
            out.append("some element has no inverse")
        nA = self.A.order
        act = np.asarray(self.action)
        if act.shape != (m, nA):
            return out + ["action table malformed"]
        add = self.A.add_table()
        for g in range(m):
            if len(np.unique(act[g])) != nA:
                out.append(f"rho({g}) is not bijective")
                break
            if not np.array_equal(act[g][add], add[act[g][:, None], act[g][None, :]]):
                out.append(f"rho({g}) is not additive")
                break
        for g in range(m):
            for h in range(m):
                if not np.array_equal(act[G[g, h]], act[g][act[h]]):
                    out.append(f"rho is not multiplicative at ({g}, {h})")
                    return out
        pi = np.asarray(self.pi)
        if len(pi) != m or sorted(pi.tolist()) != list(range(nA)):
            out.append("pi is not a bijection onto A")
            return out
        inv = self.inverse
        lhs = pi[G]
        # rhs[g, h] = rho(h)^-1 pi(g) + pi(h)
        rhs = add[act[inv][np.arange(m)[None, :], pi[:, None]], pi[None, :]]
        if not np.array_equal(lhs, rhs):
            out.append("cocycle law fails")
        return out

    def is_valid(self) -> bool:
        return not self.problems()


def datum_from_solution(s: SolutionTable) -> CocycleDatum:
    d = compute_structure(s)
    A = d.group
    m = d.order
    pi = d.pi_bar
    if sorted(pi.tolist()) != list(range(A.order)):
        raise InternalInvariantViolation("pi-bar is not bijective")
    # rho(g) on A: a = pi-bar(h) is the class of cocycle[h]
    action = np.empty((m, A.order), dtype=np.int64)
    for g in range(m):
        moved = _act(d.elements[g], d.cocycle.astype(object))
        action[g, pi] = d.coordinates(moved)
    return CocycleDatum(group=d.mult, A=A, action=action, pi=pi)


def set_structure(s: SolutionTable):
    """The action of the datum's group on X and the map X -> A that
    regenerate s via :func:`solution_from_datum`."""
    d = compute_structure(s)
    unit = np.eye(s.n, dtype=np.int64)
    return d.elements.copy(), d.coordinates(unit)


def solution_from_datum(d: CocycleDatum, x_set: int, action_on_x, phi) -> SolutionTable:
    """``f_y^-1 = rho'(pi^-1(phi(y)))`` on X, assembled into a solution."""
    act_x = np.asarray(action_on_x, dtype=np.int64)
    phi = np.asarray(phi, dtype=np.int64)
    m = d.order
    if act_x.shape != (m, x_set) or phi.shape != (x_set,):
        raise StructureError("action_on_x must be (|G|, |X|) and phi must have |X| entries")
    G = d.group
    for g in range(m):
        if sorted(act_x[g].tolist()) != list(range(x_set)):
            raise StructureError(f"rho'({g}) is not a permutation of X")
    for g in range(m):
        for h in range(m):
            if not np.array_equal(act_x[G[g, h]], act_x[g][act_x[h]]):
                raise StructureError(f"rho' is not an action at ({g}, {h})")
    act_a = np.asarray(d.action)
    for g in range(m):
        if not np.array_equal(phi[act_x[g]], act_a[g][phi]):
            raise StructureError(f"phi does not intertwine the actions of element {g}")
    hs = d.pi_inv[phi]
    if len(_closure(G, set(int(h) for h in hs))) != m:
        warnings.warn("phi(X) does not generate the group", NonGeneratingWarning, stacklevel=2)
    s = SolutionTable.from_sigma(act_x[hs])
    rep = validate(s)
    if not rep.ok:
        raise StructureError(f"set-structure yields a table that fails {rep.first_failure()}")
    return s


# ---------------------------------------------------------------------------
# Bundles and blow-ups
# ---------------------------------------------------------------------------


@dataclass
class BundleSpec:
    base: SolutionTable
    total_size: int
    projection: np.ndarray  # Y -> X
    gen_action: np.ndarray  # (|X|, |Y|): rho_x as a permutation of Y

    def __post_init__(self):
        self.projection = np.asarray(self.projection, dtype=np.int64)
        self.gen_action = np.asarray(self.gen_action, dtype=np.int64)

    def check(self, require_faithful: bool = True) -> None:
        X, nY = self.base, self.total_size
        p, rho = self.projection, self.gen_action
        if p.shape != (nY,) or rho.shape != (X.n, nY):
            raise StructureError("bundle arrays have the wrong shape")
        if set(p.tolist()) != set(range(X.n)):
            raise StructureError("projection is not surjective")
        sig = np.asarray(X.sigma)
        for x in range(X.n):
            if sorted(rho[x].tolist()) != list(range(nY)):
                raise StructureError(f"rho_{x} is not a permutation")
            if not np.array_equal(p[rho[x]], sig[x][p]):
                raise StructureError(f"rho_{x} does not cover f_{x}^-1")
        for x in range(X.n):
            for y in range(X.n):
                u, v = X(x, y)
                if not np.array_equal(rho[x][rho[y]], rho[u][rho[v]]):
                    raise StructureError(f"relation {x}*{y} = {u}*{v} fails in the action")
        if require_faithful:
            for x in range(X.n):
                for y in range(x + 1, X.n):
                    if np.array_equal(rho[x], rho[y]):
                        raise FaithfulnessError(f"rho_{x} = rho_{y}: the bundle is not faithful")

    def is_faithful(self) -> bool:
        rows = {r.tobytes() for r in self.gen_action}
        return len(rows) == self.base.n

    def to_json(self) -> dict:
        return {"projection": self.projection.tolist(), "gen_action": self.gen_action.tolist()}


def blow_up(b: BundleSpec) -> SolutionTable:
    """The solution on Y with ``f_z^-1 = rho_{p(z)}``."""
    b.check(require_faithful=True)
    s = SolutionTable.from_sigma(b.gen_action[b.projection])
    rep = validate(s)
    if not rep.ok:
        raise InternalInvariantViolation(f"blow-up fails {rep.first_failure()}")
    return s


def extract_bundle(y: SolutionTable) -> BundleSpec:
    """Bundle over the retraction, acting by ``f_z^-1`` of any lift z."""
    if is_irretractable(y):
        raise DomainError("an irretractable solution is not a blow-up of a smaller one")
    base, proj = retraction(y)
    sig = np.asarray(y.sigma)
    lifts = [int(np.flatnonzero(proj == c)[0]) for c in range(base.n)]
    return BundleSpec(base, y.n, proj.copy(), sig[lifts].copy())


def bundles_isomorphic(b1: BundleSpec, b2: BundleSpec) -> bool:
    """Is there a bijection of total spaces commuting with projections and
    actions, over an isomorphism of the bases?"""
    if b1.total_size != b2.total_size or b1.base.n != b2.base.n:
        return False
    nY = b1.total_size
    r1, r2 = b1.gen_action, b2.gen_action
    p1, p2 = b1.projection, b2.projection

    def extend(chi, psi, y0, z0):
        chi, psi = chi.copy(), psi.copy()
        stack = [(y0, z0)]
        while stack:
            y, z = stack.pop()
            if chi[y] >= 0:
                if chi[y] != z:
                    return None
                continue
            if z in chi:
                return None
            bx, bz = p1[y], p2[z]
            if psi[bx] >= 0 and psi[bx] != bz:
                return None
            if psi[bx] < 0:
                if bz in psi:
                    return None
                psi[bx] = bz
            chi[y] = z
            for x in range(b1.base.n):
                if psi[x] >= 0:
                    stack.append((int(r1[x][y]), int(r2[psi[x]][z])))
        return chi, psi

    def search(chi, psi):
        if np.all(chi >= 0):
            ok = all(psi[x] >= 0 and np.array_equal(chi[r1[x]], r2[psi[x]][chi]) for x in range(b1.base.n))
            ok = ok and np.array_equal(b1.base.s1, _relabel_tab(b2.base.s1, psi)) if ok else False
            return ok
        y = int(np.flatnonzero(chi < 0)[0])
        for z in range(nY):
            if z in chi:
                continue
            res = extend(chi, psi, y, z)
            if res is not None and search(*res):
                return True
        return False

    return search(-np.ones(nY, dtype=np.int64), -np.ones(b1.base.n, dtype=np.int64))


def _relabel_tab(tab2: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Pull a base table of b2 back along psi: ``psi^-1(tab2[psi x, psi y])``."""
    inv = np.argsort(psi)
    return inv[tab2[np.ix_(psi, psi)]]


# ---------------------------------------------------------------------------
# Blow-ups of the cyclic solution
# ---------------------------------------------------------------------------


def _gamma_coords(basis: list, vec) -> list:
    """Coordinates of ``vec`` in the (nonsingular) lattice basis, exactly."""
    from fractions import Fraction

    import sympy

    B = sympy.Matrix(basis)
    sol = sympy.Matrix([list(vec)]) * B.inv()
    out = []
    for v in sol:
        fr = Fraction(int(v.p), int(v.q))
        if fr.denominator != 1:
            raise InternalInvariantViolation(f"{list(vec)} is not in the lattice")
        out.append(int(fr))
    return out


def cyclic_bundle(m: int, gamma_basis: list, shift, fiber: int) -> BundleSpec:
    """Bundle ``G x_Gamma Z`` over the cyclic solution on Z/m.

    ``shift(c)`` gives the translation of the fiber Z = {0..fiber-1} by the
    lattice vector with coordinates c in ``gamma_basis``; it must be an
    additive transitive action (a surjection of Gamma onto an abelian group
    whose elements are the fiber points, with ``shift(c)`` as a permutation).
    """
    base = cyclic_solution(m)
    d = compute_structure(base)
    if d.order != m:
        raise InternalInvariantViolation("cyclic base should have |G^0| = m")
    sig = np.asarray(base.sigma)
    E, P = d.elements, d.cocycle
    nY = m * fiber
    gen = np.empty((m, nY), dtype=np.int64)
    for x in range(m):
        for i in range(m):
            s = sig[x][E[i]]  # sigma_x o rho_i
            t = _act_inv(E[i], np.eye(m, dtype=np.int64)[x]) + P[i]
            j = d.index_of[np.ascontiguousarray(s).tobytes()]
            gamma = t - P[j]
            move = shift(_gamma_coords(gamma_basis, gamma))
            for z in range(fiber):
                gen[x, i * fiber + z] = j * fiber + move[z]
    proj = np.array([E[i][0] for i in range(m) for _ in range(fiber)], dtype=np.int64)
    return BundleSpec(base, nY, proj, gen)


def standard_gamma_basis(m: int) -> list:
    """A basis of ``{b in Z^m : sum b = 0 mod m}``: ``e_0 - e_i`` and ``(1, ..., 1)``."""
    rows = []
    for i in range(m - 1, 0, -1):
        r = [0] * m
        r[0], r[i] = 1, -1
        rows.append(r)
    rows.append([1] * m)
    return rows


def hom_bundle(m: int, images, fiber: int, gamma_basis: Optional[list] = None) -> BundleSpec:
    """Bundle from a homomorphism Gamma -> Z/fiber given on a basis."""
    basis = gamma_basis if gamma_basis is not None else standard_gamma_basis(m)
    imgs = [int(v) % fiber for v in images]

    def shift(c):
        k = sum(ci * hi for ci, hi in zip(c, imgs)) % fiber
        return [(z + k) % fiber for z in range(fiber)]

    return cyclic_bundle(m, basis, shift, fiber)


def cyclic_blowups(m: int, fiber: int) -> list:
    """Blow-ups of the cyclic solution on Z/m with transitive fibers of the
    given size, one per isomorphism class, in canonical-key order."""
    if m < 2 or fiber < 1:
        raise DomainError("need m >= 2 and fiber >= 1")
    base = cyclic_solution(m)
    d = compute_structure(base)
    basis = d.gamma_basis
    keys = set()
    for H in hnf_sublattices(len(basis), fiber):
        hb = HermiteBasis(len(basis))
        for row in H:
            hb.add(row)
        reps = [tuple(v) for v in np.ndindex(*[H[j][j] for j in range(len(basis))])]
        where = {r: k for k, r in enumerate(reps)}

        def shift(c, hb=hb, reps=reps, where=where):
            return [where[tuple(hb.reduce([a + b for a, b in zip(r, c)]))] for r in reps]

        b = cyclic_bundle(m, basis, shift, fiber)
        b.check(require_faithful=False)
        if not b.is_faithful():
            continue
        keys.add(canonical_form(blow_up(b)))
    return [k.table() for k in sorted(keys)]
