"""Finitely generated abelian groups and their functor calculus.

Groups live in invariant-factor coordinates (d_1 | d_2 | ... with 0 for
an infinite cyclic factor, free factors last).  Presentations keep both
Smith change-of-basis matrices so elements can be transported between
user generators and canonical coordinates; tensor, Tor, exterior and
symmetric squares are built as explicit presentations with evaluators.

The two checkers at the bottom compare, by exhaustive enumeration over
small groups, a kernel computed elementwise against its closed
description: one for the wedge/tensor kernel identity through the
torsion-product connecting map, one for the kernel of the quadratic map
a -> binom(m,2) * (a (x) a) on m-torsion.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from math import gcd, prod
from typing import Iterable, Sequence

from .intlinalg import IntLattice, lattice_from_rows, smith_normal_form

DEFAULT_ENUM_CAP = 4096


class AbelianError(ValueError):
    pass


@dataclass(frozen=True)
class FgAb:
    """Z/d_1 + Z/d_2 + ... in invariant-factor form.

    invariants: each d >= 2 or d = 0 (infinite cyclic); nonzero factors
    ascend by divisibility and precede the zeros.  Elements are integer
    tuples reduced mod the factors.
    """

    invariants: tuple[int, ...]

    def __post_init__(self):
        prev = None
        seen_zero = False
        for d in self.invariants:
            if d == 1 or d < 0:
                raise AbelianError("invariant factors must be 0 or >= 2")
            if d == 0:
                seen_zero = True
                continue
            if seen_zero:
                raise AbelianError("free factors must come last")
            if prev is not None and d % prev:
                raise AbelianError("invariant factors must form a divisibility chain")
            prev = d

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def is_finite(self) -> bool:
        return 0 not in self.invariants

    @property
    def size(self) -> int:
        if not self.is_finite:
            raise AbelianError("infinite group")
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.rank:
            raise AbelianError("coordinate length mismatch")
        return tuple(x % d if d else x for x, d in zip(vec, self.invariants))

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, a, b):
        return self.reduce([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.reduce([x - y for x, y in zip(a, b)])

    def neg(self, a):
        return self.reduce([-x for x in a])

    def smul(self, k: int, a):
        return self.reduce([k * x for x in a])

    def basis(self) -> list[tuple[int, ...]]:
        out = []
        for i in range(self.rank):
            v = [0] * self.rank
            v[i] = 1
            out.append(tuple(v))
        return out

    def order_of(self, a) -> int:
        """Additive order; 0 means infinite."""
        a = self.reduce(a)
        out = 1
        for x, d in zip(a, self.invariants):
            if d == 0:
                if x:
                    return 0
                continue
            out = out * (d // gcd(d, x)) // gcd(out, d // gcd(d, x))
        return out

    def elements(self, cap: int = DEFAULT_ENUM_CAP):
        if not self.is_finite:
            raise AbelianError("cannot enumerate an infinite group")
        if self.size > cap:
            raise AbelianError(f"enumeration over {self.size} elements exceeds cap {cap}")
        return iproduct(*[range(d) for d in self.invariants])

    def torsion_elements(self, m: int, cap: int = DEFAULT_ENUM_CAP):
        """All a with m*a = 0.  For m = 0 this is the whole (finite) group."""
        if m == 0:
            yield from self.elements(cap)
            return
        ranges = []
        for d in self.invariants:
            if d == 0:
                ranges.append([0])
                continue
            g = gcd(d, m)
            step = d // g
            ranges.append(range(0, d, step))
        total = 1
        for r in ranges:
            total *= len(r)
        if total > cap:
            raise AbelianError(f"torsion enumeration exceeds cap {cap}")
        yield from iproduct(*ranges)

    def span(self, gens: Iterable[tuple[int, ...]], cap: int = DEFAULT_ENUM_CAP) -> frozenset:
        """Subgroup generated by the given elements, as an element set."""
        gens = [self.reduce(g) for g in gens]
        found = {self.zero()}
        frontier = [self.zero()]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = self.add(cur, g)
                if nxt not in found:
                    if len(found) >= cap:
                        raise AbelianError("span enumeration exceeds cap")
                    found.add(nxt)
                    frontier.append(nxt)
        return frozenset(found)

    def __str__(self):
        if not self.invariants:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z/{d}" for d in self.invariants)


ZERO_GROUP = FgAb(())


def Z(n: int = 0) -> FgAb:
    """Z/n (n = 0 gives the integers, n = 1 the zero group)."""
    if n == 1:
        return ZERO_GROUP
    return FgAb((n,))


class Presentation:
    """Z^rank modulo the row span of a relation matrix.

    Keeps the Smith column transforms so that push (generator
    coordinates to canonical) and lift (canonical to generator
    coordinates) are exact mutual sections.
    """

    def __init__(self, relations: Sequence[Sequence[int]], rank: int):
        self.rank = rank
        diag, V, Vinv = smith_normal_form(relations, rank)
        keep = [i for i in range(rank) if diag[i] != 1]
        nonzero = sorted([diag[i] for i in keep if diag[i] != 0])
        invariants = tuple(nonzero) + (0,) * sum(1 for i in keep if diag[i] == 0)
        order = sorted(keep, key=lambda i: (diag[i] == 0, diag[i]))
        self._keep = order
        self.group = FgAb(invariants)
        self._V = V
        self._Vinv = Vinv

    def push(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.rank:
            raise AbelianError("generator coordinate length mismatch")
        full = [
            sum(vec[i] * self._V[i][j] for i in range(self.rank))
            for j in range(self.rank)
        ]
        return self.group.reduce([full[i] for i in self._keep])

    def lift(self, elem: Sequence[int]) -> list[int]:
        full = [0] * self.rank
        for c, i in zip(elem, self._keep):
            full[i] = c
        return [
            sum(full[i] * self._Vinv[i][j] for i in range(self.rank))
            for j in range(self.rank)
        ]


def from_presentation(relations: Sequence[Sequence[int]], rank: int) -> Presentation:
    return Presentation(relations, rank)


def fgab_from_diagonal(divisors: Sequence[int]) -> Presentation:
    """Presentation of + Z/divisors[i] on its natural generators."""
    rels = []
    for i, d in enumerate(divisors):
        if d:
            row = [0] * len(divisors)
            row[i] = d
            rels.append(row)
    return Presentation(rels, len(divisors))


class AbHom:
    """Homomorphism between FgAb groups, as images of the canonical basis."""

    def __init__(self, dom: FgAb, cod: FgAb, rows: Sequence[Sequence[int]]):
        if len(rows) != dom.rank:
            raise AbelianError("need one image row per domain basis vector")
        self.dom = dom
        self.cod = cod
        self.rows = [cod.reduce(r) for r in rows]
        for d, row in zip(dom.invariants, self.rows):
            if d and any(cod.smul(d, row)):
                raise AbelianError("map does not respect the relations")

    def __call__(self, elem: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.cod.rank
        for c, row in zip(elem, self.rows):
            if c:
                out = [x + c * y for x, y in zip(out, row)]
        return self.cod.reduce(out)

    def compose(self, inner: "AbHom") -> "AbHom":
        """self o inner."""
        if inner.cod is not self.dom and inner.cod != self.dom:
            raise AbelianError("composition mismatch")
        return AbHom(inner.dom, self.cod, [self(r) for r in inner.rows])

    def image_set(self, cap: int = DEFAULT_ENUM_CAP) -> frozenset:
        return self.cod.span(self.rows, cap)

    def kernel_set(self, cap: int = DEFAULT_ENUM_CAP) -> frozenset:
        return frozenset(a for a in self.dom.elements(cap) if not any(self(a)))


# -- subgroups given by generators -------------------------------------------


class SubgroupData:
    """A subgroup B of an FgAb A, with its own invariant-factor structure."""

    def __init__(self, ambient: FgAb, gens: Sequence[Sequence[int]]):
        self.ambient = ambient
        r = ambient.rank
        rows = [list(ambient.reduce(g)) for g in gens]
        for i, d in enumerate(ambient.invariants):
            if d:
                rel = [0] * r
                rel[i] = d
                rows.append(rel)
        if not rows:
            rows = []
        self._lattice = lattice_from_rows(rows, r) if rows else IntLattice(r)
        basis = self._lattice.basis_rows()
        self._basis = basis
        rels = []
        for i, d in enumerate(ambient.invariants):
            if not d:
                continue
            v = [0] * r
            v[i] = d
            residual, coeffs = self._lattice.reduce_with_coeffs(v)
            if any(residual):
                raise AbelianError("ambient relations must lie in the subgroup lattice")
            rels.append(coeffs)
        self.presentation = Presentation(rels, len(basis))
        self.group = self.presentation.group

    def contains(self, vec: Sequence[int]) -> bool:
        return self._lattice.contains(list(vec))

    def coords(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Coordinates in the subgroup of an ambient vector lying in it."""
        residual, coeffs = self._lattice.reduce_with_coeffs(list(vec))
        if any(residual):
            raise AbelianError("vector is not in the subgroup")
        return self.presentation.push(coeffs)

    def inclusion(self) -> AbHom:
        rows = []
        for b in self.group.basis():
            gen_coords = self.presentation.lift(b)
            vec = [0] * self.ambient.rank
            for c, row in zip(gen_coords, self._basis):
                if c:
                    vec = [x + c * y for x, y in zip(vec, row)]
            rows.append(self.ambient.reduce(vec))
        return AbHom(self.group, self.ambient, rows)

    def element_set(self, cap: int = DEFAULT_ENUM_CAP) -> frozenset:
        incl = self.inclusion()
        return frozenset(incl(b) for b in self.group.elements(cap))


# -- binary functors ----------------------------------------------------------


class TensorProduct:
    """A (x) B with the universal bilinear evaluator."""

    def __init__(self, A: FgAb, B: FgAb):
        self.A, self.B = A, B
        divisors = [gcd(a, b) for a in A.invariants for b in B.invariants]
        self.presentation = fgab_from_diagonal(divisors)
        self.group = self.presentation.group

    def pair(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        a = self.A.reduce(a)
        b = self.B.reduce(b)
        vec = [a[i] * b[j] for i in range(self.A.rank) for j in range(self.B.rank)]
        return self.presentation.push(vec)

    def hom_from_left(self, f: AbHom, target: "TensorProduct") -> AbHom:
        """f (x) id : A (x) B -> A' (x) B for f : A -> A' (same B)."""
        gen_images = []
        for i in range(self.A.rank):
            fa = f.rows[i]
            for j in range(self.B.rank):
                eb = [0] * self.B.rank
                eb[j] = 1
                gen_images.append(target.pair(fa, eb))
        return hom_on_generators(self.presentation, gen_images, self.group, target.group)


def tensor(A: FgAb, B: FgAb) -> TensorProduct:
    return TensorProduct(A, B)


def hom_on_generators(pres: Presentation, gen_images: Sequence[Sequence[int]], dom: FgAb, cod: FgAb) -> AbHom:
    """Build dom -> cod from images of the presentation's generators."""
    rows = []
    for k in range(dom.rank):
        basis_vec = [0] * dom.rank
        basis_vec[k] = 1
        gen_coords = pres.lift(basis_vec)
        out = [0] * cod.rank
        for c, img in zip(gen_coords, gen_images):
            if c:
                out = [x + c * y for x, y in zip(out, img)]
        rows.append(cod.reduce(out))
    return AbHom(dom, cod, rows)


class TorProduct:
    """Tor_1(A, B): pairs of torsion factors, with the triple evaluator.

    Generators are indexed by pairs (i, j) of finite factors of A and B;
    the pair (i, j) carries Z/gcd(d_i, e_j).  A class <a, k, b> with
    k*a = 0 and k*b = 0 evaluates to the coordinates
    c_ij = (k*a_i/d_i) * b_j / (e_j/g_ij)  mod g_ij.
    """

    def __init__(self, A: FgAb, B: FgAb):
        self.A, self.B = A, B
        self.pairs = [
            (i, j)
            for i in range(A.rank)
            if A.invariants[i]
            for j in range(B.rank)
            if B.invariants[j]
        ]
        divisors = [gcd(A.invariants[i], B.invariants[j]) for i, j in self.pairs]
        self.presentation = fgab_from_diagonal(divisors)
        self.group = self.presentation.group

    def triple(self, a: Sequence[int], k: int, b: Sequence[int]) -> tuple[int, ...]:
        a = self.A.reduce(a)
        b = self.B.reduce(b)
        if any(self.A.smul(k, a)) or any(self.B.smul(k, b)):
            raise AbelianError("invalid triple: k must kill both entries")
        vec = []
        for i, j in self.pairs:
            d = self.A.invariants[i]
            e = self.B.invariants[j]
            g = gcd(d, e)
            ka = k * a[i]
            if ka % d:
                raise AbelianError("triple evaluation failed divisibility")
            y = (ka // d * b[j]) % e
            step = e // g
            if y % step:
                raise AbelianError("triple evaluation failed divisibility")
            vec.append((y // step) % g)
        return self.presentation.push(vec)

    def generators(self):
        """Generating triples (a, k, b) with their index pair."""
        out = []
        for idx, (i, j) in enumerate(self.pairs):
            d = self.A.invariants[i]
            e = self.B.invariants[j]
            g = gcd(d, e)
            a = [0] * self.A.rank
            a[i] = 1
            b = [0] * self.B.rank
            b[j] = e // g
            out.append((idx, tuple(a), d, tuple(b)))
        return out

    def generator_elements(self):
        out = []
        for idx, a, k, b in self.generators():
            vec = [0] * len(self.pairs)
            vec[idx] = 1
            out.append(self.presentation.push(vec))
        return out


def tor1(A: FgAb, B: FgAb) -> TorProduct:
    return TorProduct(A, B)


class ExteriorSquare:
    """A ^ A = (A (x) A) / <a (x) a>, with nu and the injective ell."""

    def __init__(self, A: FgAb):
        self.A = A
        r = A.rank
        self.tensorAA = tensor(A, A)
        rels = []
        for i in range(r):
            for j in range(r):
                g = gcd(A.invariants[i], A.invariants[j])
                if g:
                    row = [0] * (r * r)
                    row[i * r + j] = g
                    rels.append(row)
        for i in range(r):
            row = [0] * (r * r)
            row[i * r + i] = 1
            rels.append(row)
        for i in range(r):
            for j in range(i + 1, r):
                row = [0] * (r * r)
                row[i * r + j] = 1
                row[j * r + i] = 1
                rels.append(row)
        self.presentation = Presentation(rels, r * r)
        self.group = self.presentation.group

    def wedge(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        a = self.A.reduce(a)
        b = self.A.reduce(b)
        r = self.A.rank
        vec = [a[i] * b[j] for i in range(r) for j in range(r)]
        return self.presentation.push(vec)

    def nu(self) -> AbHom:
        """A (x) A -> A ^ A, a (x) b -> a ^ b."""
        r = self.A.rank
        gen_images = []
        for i in range(r):
            for j in range(r):
                vec = [0] * (r * r)
                vec[i * r + j] = 1
                gen_images.append(self.presentation.push(vec))
        return hom_on_generators(
            self.tensorAA.presentation, gen_images, self.tensorAA.group, self.group
        )

    def ell(self) -> AbHom:
        """A ^ A -> A (x) A, a ^ b -> a (x) b - b (x) a."""
        r = self.A.rank
        gen_images = []
        for i in range(r):
            for j in range(r):
                ei = [0] * r
                ei[i] = 1
                ej = [0] * r
                ej[j] = 1
                fwd = self.tensorAA.pair(ei, ej)
                bwd = self.tensorAA.pair(ej, ei)
                gen_images.append(self.tensorAA.group.sub(fwd, bwd))
        return hom_on_generators(self.presentation, gen_images, self.group, self.tensorAA.group)


def exterior_square(A: FgAb) -> ExteriorSquare:
    return ExteriorSquare(A)


class SymmetricSquare:
    """SP^2(A) = (A (x) A) / <a (x) b - b (x) a>, with the symmetrized pair."""

    def __init__(self, A: FgAb):
        self.A = A
        r = A.rank
        rels = []
        for i in range(r):
            for j in range(r):
                g = gcd(A.invariants[i], A.invariants[j])
                if g:
                    row = [0] * (r * r)
                    row[i * r + j] = g
                    rels.append(row)
        for i in range(r):
            for j in range(i + 1, r):
                row = [0] * (r * r)
                row[i * r + j] = 1
                row[j * r + i] = -1
                rels.append(row)
        self.presentation = Presentation(rels, r * r)
        self.group = self.presentation.group

    def pair(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        a = self.A.reduce(a)
        b = self.A.reduce(b)
        r = self.A.rank
        vec = [a[i] * b[j] for i in range(r) for j in range(r)]
        return self.presentation.push(vec)


def symmetric_square(A: FgAb) -> SymmetricSquare:
    return SymmetricSquare(A)


# -- the connecting map of 0 -> B -> A -> A/B -> 0, tensored with A/B ---------


class ConnectingTau:
    """tau : Tor_1(A/B, A/B) -> (A/B) (x) B for a subgroup B of A.

    On triples <a-bar, k, b-bar> the map sends the class to
    a-bar (x) (k*b), with k*b computed in A (it lands in B).
    """

    def __init__(self, A: FgAb, b_gens: Sequence[Sequence[int]]):
        self.A = A
        self.B = SubgroupData(A, b_gens)
        rels = [list(g) for g in b_gens]
        for i, d in enumerate(A.invariants):
            if d:
                row = [0] * A.rank
                row[i] = d
                rels.append(row)
        self.q_pres = Presentation(rels, A.rank)
        self.Q = self.q_pres.group
        self.tor = tor1(self.Q, self.Q)
        self.target = tensor(self.Q, self.B.group)
        self.hom = self._build_hom()

    def quotient_map(self) -> AbHom:
        rows = [self.q_pres.push(list(b)) for b in self.A.basis()]
        return AbHom(self.A, self.Q, rows)

    def tau_on_triple(self, abar, k: int, bbar) -> tuple[int, ...]:
        lift_b = self.q_pres.lift(self.Q.reduce(bbar))
        kb = [k * x for x in lift_b]
        b_coords = self.B.coords(self.A.reduce(kb))
        return self.target.pair(abar, b_coords)

    def _build_hom(self) -> AbHom:
        gen_images = []
        for idx, a, k, b in self.tor.generators():
            gen_images.append(self.tau_on_triple(a, k, b))
        return hom_on_generators(
            self.tor.presentation, gen_images, self.tor.group, self.target.group
        )


def connecting_tau(A: FgAb, b_gens: Sequence[Sequence[int]]) -> ConnectingTau:
    return ConnectingTau(A, b_gens)


# -- quadratic torsion map -----------------------------------------------------


class TorsionSquareMap:
    """a -> 1 (x) binom(m, 2) * (a (x) a) on the m-torsion of A.

    Applied pointwise; nothing about additivity is assumed, so the
    kernel is found by enumerating the m-torsion subgroup.
    """

    def __init__(self, A: FgAb, m: int, cap: int = DEFAULT_ENUM_CAP):
        if m < 0:
            raise AbelianError("m must be >= 0")
        if m == 0 and not A.is_finite:
            raise AbelianError("m = 0 needs a finite group to enumerate")
        self.A = A
        self.m = m
        self.sp2 = symmetric_square(A)
        self.R = Z(m)
        self.target = tensor(self.R, self.sp2.group)
        self.cap = cap

    def domain_elements(self):
        return self.A.torsion_elements(self.m, self.cap)

    def __call__(self, a: Sequence[int]) -> tuple[int, ...]:
        c = self.m * (self.m - 1) // 2
        sq = self.sp2.group.smul(c, self.sp2.pair(a, a))
        one = self.R.reduce([1]) if self.R.rank else self.R.zero()
        return self.target.pair(one, sq)

    def kernel_set(self) -> frozenset:
        return frozenset(a for a in self.domain_elements() if not any(self(a)))


def tau3(A: FgAb, m: int, cap: int = DEFAULT_ENUM_CAP) -> TorsionSquareMap:
    return TorsionSquareMap(A, m, cap)


# -- checkers ------------------------------------------------------------------


@dataclass
class CheckReport:
    ok: bool
    detail: dict

    def __bool__(self):
        return self.ok


def relation_lattice(group: FgAb) -> IntLattice:
    lat = IntLattice(group.rank)
    for i, d in enumerate(group.invariants):
        if d:
            row = [0] * group.rank
            row[i] = d
            lat.add(row)
    return lat


def subgroup_lattice(group: FgAb, gens: Iterable[Sequence[int]]) -> IntLattice:
    """Preimage lattice in Z^rank of the subgroup the elements generate."""
    lat = relation_lattice(group)
    for g in gens:
        lat.add(list(group.reduce(g)))
    return lat


def hom_kernel_lattice(f: AbHom) -> IntLattice:
    """Preimage lattice of Ker(f) in the domain's coordinates."""
    from .intlinalg import preimage_lattice

    if f.cod.rank == 0:
        lat = IntLattice(f.dom.rank)
        for i in range(f.dom.rank):
            row = [0] * f.dom.rank
            row[i] = 1
            lat.add(row)
        return lat
    pre = preimage_lattice([list(r) for r in f.rows], relation_lattice(f.cod))
    for i, d in enumerate(f.dom.invariants):
        if d:
            row = [0] * f.dom.rank
            row[i] = d
            pre.add(row)
    return pre


def hom_preimage_lattice(f: AbHom, target: IntLattice) -> IntLattice:
    """Preimage lattice of a subgroup lattice of the codomain."""
    from .intlinalg import preimage_lattice

    if f.cod.rank == 0:
        return hom_kernel_lattice(f)
    pre = preimage_lattice([list(r) for r in f.rows], target)
    for i, d in enumerate(f.dom.invariants):
        if d:
            row = [0] * f.dom.rank
            row[i] = d
            pre.add(row)
    return pre


def check_wedge_kernel_identity(
    A: FgAb, b_gens: Sequence[Sequence[int]], cap: int = DEFAULT_ENUM_CAP
) -> CheckReport:
    """Ker((q x id) . ell) against nu((q x id)^(-1) Im(tau)) inside A ^ A.

    Every map involved is additive, so both sides are computed as
    subgroup lattices of the exterior square and compared canonically;
    no element enumeration is needed even when tensor squares are huge.
    """
    if not A.is_finite:
        raise AbelianError("checker needs a finite group")
    ct = connecting_tau(A, b_gens)
    Q = ct.Q
    B = ct.B
    wedge = exterior_square(A)
    t_AA = wedge.tensorAA
    t_QA = tensor(Q, A)
    qmap = ct.quotient_map()
    q_tensor_id_AA = t_AA.hom_from_left(qmap, t_QA)
    composite = q_tensor_id_AA.compose(wedge.ell())
    lhs = hom_kernel_lattice(composite)

    im_tau = subgroup_lattice(ct.target.group, ct.hom.rows)
    t_AB = tensor(A, B.group)
    q_tensor_id_AB = t_AB.hom_from_left(qmap, ct.target)
    incl = B.inclusion()
    pre = hom_preimage_lattice(q_tensor_id_AB, im_tau)
    # nu on A (x) B: a (x) b -> a ^ incl(b)
    gen_images = []
    for i in range(A.rank):
        for j in range(B.group.rank):
            ei = [0] * A.rank
            ei[i] = 1
            ej = [0] * B.group.rank
            ej[j] = 1
            gen_images.append(wedge.wedge(ei, incl(ej)))
    nu_AB = hom_on_generators(t_AB.presentation, gen_images, t_AB.group, wedge.group)
    rhs = relation_lattice(wedge.group)
    for row in pre.basis_rows():
        rhs.add(list(nu_AB(t_AB.group.reduce(row))))

    ok = lhs.canonical() == rhs.canonical()
    witnesses = []
    if not ok:
        for row in lhs.basis_rows():
            if not rhs.contains(row):
                witnesses.append(tuple(wedge.group.reduce(row)))
        for row in rhs.basis_rows():
            if not lhs.contains(row):
                witnesses.append(tuple(wedge.group.reduce(row)))
    return CheckReport(
        ok,
        {
            "lhs_rank": len(lhs.canonical()),
            "rhs_rank": len(rhs.canonical()),
            "witnesses": witnesses[:8],
            "wedge": str(wedge.group),
        },
    )


def check_torsion_square_kernel(A: FgAb, m: int, cap: int = DEFAULT_ENUM_CAP) -> CheckReport:
    """Enumerated Ker(tau3) against its closed description.

    Odd m: the whole m-torsion.  Even m (including 0): the product of
    the doubles inside the m-torsion and the (m/2)-torsion.
    """
    if not A.is_finite:
        raise AbelianError("checker needs a finite group")
    tmap = tau3(A, m, cap)
    kernel = tmap.kernel_set()
    torsion = frozenset(A.torsion_elements(m, cap))
    if m % 2 == 1:
        formula = torsion
    else:
        doubles = frozenset(A.smul(2, a) for a in A.elements(cap))
        part1 = torsion & doubles
        part2 = frozenset(A.torsion_elements(m // 2, cap)) if m else torsion
        formula = A.span(list(part1 | part2), cap) if (part1 or part2) else frozenset({A.zero()})
    ok = kernel == formula
    witnesses = sorted(kernel ^ formula)[:8]
    return CheckReport(
        ok,
        {
            "kernel_size": len(kernel),
            "formula_size": len(formula),
            "witnesses": witnesses,
        },
    )


def fgab_subgroups(A: FgAb, cap: int = DEFAULT_ENUM_CAP) -> list[frozenset]:
    """All subgroups of a finite group, as element sets.

    Join closure of the cyclic subgroups; deterministic order by size
    then sorted members.
    """
    if not A.is_finite:
        raise AbelianError("subgroup enumeration needs a finite group")
    cyclics = {A.span([a], cap) for a in A.elements(cap)}
    found = set(cyclics)
    frontier = list(found)
    while frontier:
        nxt = []
        for s in frontier:
            for c in cyclics:
                if c <= s:
                    continue
                j = A.span(list(s | c), cap)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def all_invariant_shapes(max_size: int) -> list[tuple[int, ...]]:
    """Every invariant-factor chain with group order 2..max_size."""
    shapes: list[tuple[int, ...]] = []

    def extend(chain: tuple[int, ...], size: int):
        last = chain[-1]
        k = last
        while size * k <= max_size:
            if k % last == 0:
                shapes.append(chain + (k,))
                extend(chain + (k,), size * k)
            k += 1

    for d in range(2, max_size + 1):
        shapes.append((d,))
        extend((d,), d)
    shapes.sort(key=lambda s: (prod(s), len(s), s))
    return shapes
