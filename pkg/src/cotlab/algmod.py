"""Finite-dimensional GF(p)-algebras, their modules, and the homological engine.

An algebra is given by structure constants c[i][j] (the coordinate vector
of b_i * b_j) plus the coordinates of 1.  A left module is a tuple of
action matrices, one per algebra basis element, acting on column
vectors; a right module obeys the mirrored law act(i) @ act(j) =
act(b_j * b_i).  On top of that sit Hom/tensor/dual constructions,
short exact sequences with pullback and pushout, and Ext computed from
iterated syzygies of the rank-(dim M) free presentation.

The Ext machinery at the bottom is written against a small "engine"
protocol (hom bases, free presentations, lifts, pushouts) so the functor
category can reuse it verbatim with natural transformations in place of
module maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .linalg import (
    FpMatrix,
    SubspaceBasis,
    block_diag,
    hstack,
    kernel_basis,
    quotient_space,
    row_reduce,
    solve_linear,
    span_basis,
    vstack,
)


class Algebra:
    """Associative unital GF(p)-algebra by structure constants."""

    __slots__ = ("p", "dim", "struct", "unit")

    def __init__(self, p: int, struct: Sequence[Sequence[Sequence[int]]], unit: Sequence[int]):
        self.p = p
        self.struct = tuple(
            tuple(tuple(int(x) % p for x in cell) for cell in row) for row in struct
        )
        self.dim = len(self.struct)
        self.unit = tuple(int(x) % p for x in unit)
        if len(self.unit) != self.dim:
            raise ValueError("unit vector has wrong length")
        for row in self.struct:
            if len(row) != self.dim or any(len(cell) != self.dim for cell in row):
                raise ValueError("structure tensor has wrong shape")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Algebra)
            and self.p == other.p
            and self.struct == other.struct
            and self.unit == other.unit
        )

    def __hash__(self) -> int:
        return hash((self.p, self.struct, self.unit))

    def __repr__(self) -> str:
        return f"Algebra(p={self.p}, dim={self.dim})"

    def mult_vec(self, x: Sequence[int], y: Sequence[int]) -> tuple:
        p = self.p
        out = [0] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                f = (xi * yj) % p
                cell = self.struct[i][j]
                for k, c in enumerate(cell):
                    if c:
                        out[k] = (out[k] + f * c) % p
        return tuple(out)

    def basis_vec(self, i: int) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.dim))

    def left_mult_operator(self, x: Sequence[int]) -> FpMatrix:
        cols = [self.mult_vec(x, self.basis_vec(j)) for j in range(self.dim)]
        return FpMatrix(self.p, list(zip(*cols)) if cols else [], cols=self.dim)

    def right_mult_operator(self, y: Sequence[int]) -> FpMatrix:
        cols = [self.mult_vec(self.basis_vec(i), y) for i in range(self.dim)]
        return FpMatrix(self.p, list(zip(*cols)) if cols else [], cols=self.dim)

    def regular_module(self) -> "LeftModule":
        acts = tuple(self.left_mult_operator(self.basis_vec(i)) for i in range(self.dim))
        return LeftModule(self, self.dim, acts)

    def regular_right_module(self) -> "RightModule":
        acts = tuple(self.right_mult_operator(self.basis_vec(i)) for i in range(self.dim))
        return RightModule(self, self.dim, acts)


def validate_algebra(alg: Algebra) -> list:
    """Report-style check of associativity and the unit laws."""
    problems = []
    n = alg.dim
    for i in range(n):
        for j in range(n):
            left = alg.struct[i][j]
            for k in range(n):
                lhs = alg.mult_vec(left, alg.basis_vec(k))
                rhs = alg.mult_vec(alg.basis_vec(i), alg.struct[j][k])
                if lhs != rhs:
                    problems.append(f"associativity fails at basis triple ({i},{j},{k})")
    for i in range(n):
        e = alg.basis_vec(i)
        if alg.mult_vec(alg.unit, e) != e:
            problems.append(f"left unit law fails at basis element {i}")
        if alg.mult_vec(e, alg.unit) != e:
            problems.append(f"right unit law fails at basis element {i}")
    return problems


def opposite_algebra(alg: Algebra) -> Algebra:
    struct = [[alg.struct[j][i] for j in range(alg.dim)] for i in range(alg.dim)]
    return Algebra(alg.p, struct, alg.unit)


# -- modules ----------------------------------------------------------------


class LeftModule:
    """Left module: act(b_i b_j) = act(b_i) @ act(b_j), act(1) = id."""

    __slots__ = ("algebra", "dim", "action")

    def __init__(self, algebra: Algebra, dim: int, action: Sequence[FpMatrix]):
        self.algebra = algebra
        self.dim = dim
        self.action = tuple(action)
        if len(self.action) != algebra.dim:
            raise ValueError("need one action matrix per algebra basis element")
        for m in self.action:
            if m.rows != dim or m.cols != dim:
                raise ValueError("action matrix has wrong shape")

    @staticmethod
    def zero(algebra: Algebra) -> "LeftModule":
        z = FpMatrix.zeros(algebra.p, 0, 0)
        return LeftModule(algebra, 0, tuple(z for _ in range(algebra.dim)))

    def act_vec(self, avec: Sequence[int]) -> FpMatrix:
        p = self.algebra.p
        out = FpMatrix.zeros(p, self.dim, self.dim)
        for i, c in enumerate(avec):
            if c % p:
                out = out + self.action[i].scale(c)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LeftModule)
            and self.algebra == other.algebra
            and self.dim == other.dim
            and self.action == other.action
        )

    def __hash__(self) -> int:
        return hash((self.algebra, self.dim, self.action))

    def __repr__(self) -> str:
        return f"LeftModule(dim={self.dim} over dim-{self.algebra.dim} algebra)"


class RightModule:
    """Right module: act(b_i) @ act(b_j) = act(b_j b_i)."""

    __slots__ = ("algebra", "dim", "action")

    def __init__(self, algebra: Algebra, dim: int, action: Sequence[FpMatrix]):
        self.algebra = algebra
        self.dim = dim
        self.action = tuple(action)

    def as_left_over_opposite(self) -> LeftModule:
        return LeftModule(opposite_algebra(self.algebra), self.dim, self.action)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RightModule)
            and self.algebra == other.algebra
            and self.dim == other.dim
            and self.action == other.action
        )

    def __hash__(self) -> int:
        return hash((self.algebra, self.dim, self.action))


class Bimodule:
    """(left_alg, right_alg)-bimodule; the two actions must commute."""

    __slots__ = ("left_alg", "right_alg", "dim", "left_action", "right_action")

    def __init__(self, left_alg, right_alg, dim, left_action, right_action):
        self.left_alg = left_alg
        self.right_alg = right_alg
        self.dim = dim
        self.left_action = tuple(left_action)
        self.right_action = tuple(right_action)


def validate_left_module(m: LeftModule) -> list:
    problems = []
    alg = m.algebra
    if not m.act_vec(alg.unit) == FpMatrix.identity(alg.p, m.dim):
        problems.append("unit does not act as the identity")
    for i in range(alg.dim):
        for j in range(alg.dim):
            if m.action[i] @ m.action[j] != m.act_vec(alg.struct[i][j]):
                problems.append(f"action fails multiplicativity at ({i},{j})")
    return problems


def validate_right_module(m: RightModule) -> list:
    return validate_left_module(m.as_left_over_opposite())


def validate_bimodule(b: Bimodule) -> list:
    problems = []
    left = LeftModule(b.left_alg, b.dim, b.left_action)
    problems += [f"left: {s}" for s in validate_left_module(left)]
    right = RightModule(b.right_alg, b.dim, b.right_action)
    problems += [f"right: {s}" for s in validate_right_module(right)]
    for i in range(b.left_alg.dim):
        for j in range(b.right_alg.dim):
            if b.left_action[i] @ b.right_action[j] != b.right_action[j] @ b.left_action[i]:
                problems.append(f"actions do not commute at ({i},{j})")
    return problems


class ModuleMap:
    """Intertwiner between left modules over the same algebra."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: LeftModule, target: LeftModule, matrix: FpMatrix):
        if matrix.rows != target.dim or matrix.cols != source.dim:
            raise ValueError("matrix shape disagrees with module dims")
        self.source = source
        self.target = target
        self.matrix = matrix

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModuleMap)
            and self.source == other.source
            and self.target == other.target
            and self.matrix == other.matrix
        )

    def is_intertwiner(self) -> bool:
        for i in range(self.source.algebra.dim):
            if self.matrix @ self.source.action[i] != self.target.action[i] @ self.matrix:
                return False
        return True

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix)

    def __repr__(self) -> str:
        return f"ModuleMap({self.source.dim}->{self.target.dim})"


def identity_map(m: LeftModule) -> ModuleMap:
    return ModuleMap(m, m, FpMatrix.identity(m.algebra.p, m.dim))


def zero_map(source: LeftModule, target: LeftModule) -> ModuleMap:
    return ModuleMap(source, target, FpMatrix.zeros(source.algebra.p, target.dim, source.dim))


@dataclass(frozen=True)
class SesRecord:
    """Short exact sequence left >-> middle ->> right."""

    left: LeftModule
    middle: LeftModule
    right: LeftModule
    inj: ModuleMap
    surj: ModuleMap


def validate_ses(e: SesRecord) -> list:
    problems = []
    if not e.inj.is_intertwiner():
        problems.append("inj is not a module map")
    if not e.surj.is_intertwiner():
        problems.append("surj is not a module map")
    if e.inj.matrix.rank() != e.left.dim:
        problems.append("inj is not injective")
    if e.surj.matrix.rank() != e.right.dim:
        problems.append("surj is not surjective")
    if not (e.surj.matrix @ e.inj.matrix).is_zero():
        problems.append("surj o inj is nonzero")
    if e.middle.dim != e.left.dim + e.right.dim:
        problems.append("middle dimension breaks rank additivity")
    return problems


# -- hom spaces and affine solves -------------------------------------------


def _flatten(matrix: FpMatrix) -> list:
    return [x for row in matrix.entries for x in row]


def _unflatten(p: int, vec: Sequence[int], rows: int, cols: int) -> FpMatrix:
    return FpMatrix(p, [vec[i * cols : (i + 1) * cols] for i in range(rows)], cols=cols)


def _intertwiner_system(p, t_dim, s_dim, source_acts, target_acts):
    """Rows of the homogeneous system in vec(T), T a t_dim x s_dim matrix."""
    rows = []
    n_unknowns = t_dim * s_dim
    for a_src, a_tgt in zip(source_acts, target_acts):
        for r in range(t_dim):
            for c in range(s_dim):
                row = [0] * n_unknowns
                # (T @ a_src)[r][c] = sum_k T[r][k] a_src[k][c]
                for k in range(s_dim):
                    v = a_src.entries[k][c]
                    if v:
                        row[r * s_dim + k] = (row[r * s_dim + k] + v) % p
                # -(a_tgt @ T)[r][c] = -sum_k a_tgt[r][k] T[k][c]
                for k in range(t_dim):
                    v = a_tgt.entries[r][k]
                    if v:
                        row[k * s_dim + c] = (row[k * s_dim + c] - v) % p
                if any(row):
                    rows.append(row)
    return rows, n_unknowns


def hom_basis(source: LeftModule, target: LeftModule) -> list:
    """Basis of the space of module maps source -> target."""
    if source.algebra != target.algebra:
        raise ValueError("modules live over different algebras")
    p = source.algebra.p
    if source.dim == 0 or target.dim == 0:
        return []
    rows, n = _intertwiner_system(p, target.dim, source.dim, source.action, target.action)
    if not rows:
        mat = FpMatrix.identity(p, n)
        basis_rows = mat.entries
    else:
        kb = kernel_basis(FpMatrix(p, rows, cols=n))
        basis_rows = kb.basis.entries
    return [
        ModuleMap(source, target, _unflatten(p, list(v), target.dim, source.dim))
        for v in basis_rows
    ]


def solve_module_map(
    source: LeftModule,
    target: LeftModule,
    lhs: Optional[FpMatrix] = None,
    rhs: Optional[FpMatrix] = None,
) -> Optional[ModuleMap]:
    """Find some module map T: source -> target with lhs @ T = rhs.

    With lhs/rhs omitted returns the zero map.  Free parameters are
    pinned to zero, so the answer is deterministic.
    """
    p = source.algebra.p
    t_dim, s_dim = target.dim, source.dim
    if s_dim == 0 or t_dim == 0:
        if lhs is not None and rhs is not None and not rhs.is_zero():
            return None
        return zero_map(source, target)
    rows, n = _intertwiner_system(p, t_dim, s_dim, source.action, target.action)
    rhs_col = [0] * len(rows)
    if lhs is not None:
        if rhs is None or lhs.cols != t_dim:
            raise ValueError("affine condition shape mismatch")
        for r in range(lhs.rows):
            for c in range(s_dim):
                row = [0] * n
                for k in range(t_dim):
                    v = lhs.entries[r][k]
                    if v:
                        row[k * s_dim + c] = v
                rows.append(row)
                rhs_col.append(rhs.entries[r][c])
    if not rows:
        return zero_map(source, target)
    a = FpMatrix(p, rows, cols=n)
    b = FpMatrix.column(p, rhs_col)
    x = solve_linear(a, b)
    if x is None:
        return None
    return ModuleMap(source, target, _unflatten(p, [r[0] for r in x.entries], t_dim, s_dim))


def map_coords(basis: Sequence[ModuleMap], m: ModuleMap) -> tuple:
    """Coordinates of m in the given hom basis (must lie in the span)."""
    p = m.matrix.p
    flat_dim = m.matrix.rows * m.matrix.cols
    if not basis:
        if not m.matrix.is_zero():
            raise ValueError("map is not in the span of an empty basis")
        return ()
    cols = FpMatrix(p, [
        [b.matrix.entries[i][j] for b in basis]
        for i in range(m.matrix.rows)
        for j in range(m.matrix.cols)
    ], cols=len(basis)) if flat_dim else FpMatrix.zeros(p, 0, len(basis))
    target = FpMatrix.column(p, _flatten(m.matrix)) if flat_dim else FpMatrix.zeros(p, 0, 1)
    x = solve_linear(cols, target)
    if x is None:
        raise ValueError("map is not in the span of the basis")
    return tuple(r[0] for r in x.entries)


# -- submodules, quotients, sums --------------------------------------------


def submodule(m: LeftModule, rows: SubspaceBasis) -> tuple:
    """(module on the subspace, inclusion map). Rows must span an invariant subspace."""
    p = m.algebra.p
    incl = rows.basis.transpose()
    acts = []
    for a in m.action:
        sol = solve_linear(incl, a @ incl)
        if sol is None:
            raise ValueError("subspace is not invariant under the action")
        acts.append(sol)
    sub = LeftModule(m.algebra, rows.dim, tuple(acts))
    return sub, ModuleMap(sub, m, incl)


def quotient_module(m: LeftModule, rows: SubspaceBasis) -> tuple:
    """(quotient module, projection map, section matrix)."""
    proj, sec = quotient_space(m.dim, rows)
    acts = tuple(proj @ a @ sec for a in m.action)
    q = LeftModule(m.algebra, proj.rows, acts)
    return q, ModuleMap(m, q, proj), sec


def direct_sum_modules(mods: Sequence[LeftModule]) -> tuple:
    """(sum, injections, projections) with blocks in the given order."""
    if not mods:
        raise ValueError("empty direct sum needs an algebra")
    alg = mods[0].algebra
    p = alg.p
    total = sum(m.dim for m in mods)
    acts = tuple(
        block_diag(p, [m.action[i] for m in mods]) for i in range(alg.dim)
    )
    s = LeftModule(alg, total, acts)
    injs, projs = [], []
    off = 0
    for m in mods:
        inj_rows = [[0] * m.dim for _ in range(total)]
        proj_rows = [[0] * total for _ in range(m.dim)]
        for i in range(m.dim):
            inj_rows[off + i][i] = 1
            proj_rows[i][off + i] = 1
        injs.append(ModuleMap(m, s, FpMatrix(p, inj_rows, cols=m.dim)))
        projs.append(ModuleMap(s, m, FpMatrix(p, proj_rows, cols=total)))
        off += m.dim
    return s, injs, projs


# -- tensor, dual, restriction ----------------------------------------------


def tensor_right_left(mr: RightModule, nl: LeftModule) -> tuple:
    """(dimension, surjection) of M tensor_A N as a GF(p)-space.

    Index order is m-major: e_m (x) e_n sits at m * dim(N) + n.
    """
    if mr.algebra != nl.algebra:
        raise ValueError("tensor factors live over different algebras")
    alg = mr.algebra
    p = alg.p
    amb = mr.dim * nl.dim
    rels = []
    for i in range(alg.dim):
        ra = mr.action[i]
        la = nl.action[i]
        for a in range(mr.dim):
            for b in range(nl.dim):
                row = [0] * amb
                for a2 in range(mr.dim):
                    v = ra.entries[a2][a]
                    if v:
                        row[a2 * nl.dim + b] = (row[a2 * nl.dim + b] + v) % p
                for b2 in range(nl.dim):
                    v = la.entries[b2][b]
                    if v:
                        row[a * nl.dim + b2] = (row[a * nl.dim + b2] - v) % p
                if any(row):
                    rels.append(row)
    sb = span_basis(p, rels, amb)
    proj, _sec = quotient_space(amb, sb)
    return proj.rows, proj


def tensor_bimodule_module(h: Bimodule, m: LeftModule) -> tuple:
    """H tensor_A M for an (L, A)-bimodule H: (left L-module, proj, sec)."""
    if h.right_alg != m.algebra:
        raise ValueError("bimodule right algebra disagrees with module algebra")
    p = h.left_alg.p
    amb = h.dim * m.dim
    rels = []
    for i in range(m.algebra.dim):
        ra = h.right_action[i]
        la = m.action[i]
        for a in range(h.dim):
            for b in range(m.dim):
                row = [0] * amb
                for a2 in range(h.dim):
                    v = ra.entries[a2][a]
                    if v:
                        row[a2 * m.dim + b] = (row[a2 * m.dim + b] + v) % p
                for b2 in range(m.dim):
                    v = la.entries[b2][b]
                    if v:
                        row[a * m.dim + b2] = (row[a * m.dim + b2] - v) % p
                if any(row):
                    rels.append(row)
    sb = span_basis(p, rels, amb)
    proj, sec = quotient_space(amb, sb)
    idm = FpMatrix.identity(p, m.dim)
    acts = tuple(proj @ la.kron(idm) @ sec for la in h.left_action)
    return LeftModule(h.left_alg, proj.rows, acts), proj, sec


def dual_left(m: LeftModule) -> RightModule:
    """GF(p)-dual of a left module, with the transposed right action."""
    return RightModule(m.algebra, m.dim, tuple(a.transpose() for a in m.action))


def dual_right(mr: RightModule) -> LeftModule:
    return LeftModule(mr.algebra, mr.dim, tuple(a.transpose() for a in mr.action))


def hom_space_module(
    p: int,
    carrier_dim: int,
    a_left_action: Sequence[FpMatrix],
    m: LeftModule,
    b_algebra: Algebra,
    b_right_action: Sequence[FpMatrix],
) -> tuple:
    """Hom_A(C, M) as a left B-module: (module, basis of maps C -> M).

    C carries a left A-action (matching M's algebra) and a right
    B-action (so b.phi = phi o R_b is a left B-action on the hom space).
    """
    alg = m.algebra
    if carrier_dim == 0 or m.dim == 0:
        basis = []
    else:
        rows = []
        n = m.dim * carrier_dim
        for la, ma in zip(a_left_action, m.action):
            for r in range(m.dim):
                for c in range(carrier_dim):
                    row = [0] * n
                    for k in range(carrier_dim):
                        v = la.entries[k][c]
                        if v:
                            row[r * carrier_dim + k] = (row[r * carrier_dim + k] + v) % p
                    for k in range(m.dim):
                        v = ma.entries[r][k]
                        if v:
                            row[k * carrier_dim + c] = (row[k * carrier_dim + c] - v) % p
                    if any(row):
                        rows.append(row)
        if rows:
            kb = kernel_basis(FpMatrix(p, rows, cols=n))
            basis = [
                _unflatten(p, list(v), m.dim, carrier_dim) for v in kb.basis.entries
            ]
        else:
            basis = [
                _unflatten(
                    p,
                    [1 if t == s else 0 for t in range(n)],
                    m.dim,
                    carrier_dim,
                )
                for s in range(n)
            ]
    dim = len(basis)
    if dim == 0:
        return LeftModule.zero(b_algebra), []
    flat_cols = FpMatrix(
        p, [[ _flatten(b)[i] for b in basis] for i in range(m.dim * carrier_dim)],
        cols=dim,
    )
    acts = []
    for j in range(b_algebra.dim):
        rb = b_right_action[j]
        images = []
        for b in basis:
            images.append(_flatten(b @ rb))
        img = FpMatrix(p, [[images[t][i] for t in range(dim)] for i in range(m.dim * carrier_dim)], cols=dim)
        coords = solve_linear(flat_cols, img)
        if coords is None:
            raise ValueError("hom space is not closed under the right action")
        acts.append(coords)
    return LeftModule(b_algebra, dim, tuple(acts)), basis


class AlgebraMorphism:
    """Unital algebra morphism f: source -> target as a coordinate matrix."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: Algebra, target: Algebra, matrix: FpMatrix):
        if matrix.rows != target.dim or matrix.cols != source.dim:
            raise ValueError("morphism matrix has wrong shape")
        self.source = source
        self.target = target
        self.matrix = matrix

    def apply(self, vec: Sequence[int]) -> tuple:
        col = self.matrix @ FpMatrix.column(self.source.p, vec)
        return tuple(r[0] for r in col.entries)

    def validate(self) -> list:
        problems = []
        if self.apply(self.source.unit) != self.target.unit:
            problems.append("unit is not preserved")
        for i in range(self.source.dim):
            for j in range(self.source.dim):
                lhs = self.apply(self.source.struct[i][j])
                rhs = self.target.mult_vec(
                    self.apply(self.source.basis_vec(i)), self.apply(self.source.basis_vec(j))
                )
                if lhs != rhs:
                    problems.append(f"multiplicativity fails at ({i},{j})")
        return problems


def restrict_module(n: LeftModule, f: AlgebraMorphism) -> LeftModule:
    """Restriction of scalars along f: source acts through its image."""
    if n.algebra != f.target:
        raise ValueError("module is not over the morphism target")
    acts = tuple(n.act_vec(f.apply(f.source.basis_vec(i))) for i in range(f.source.dim))
    return LeftModule(f.source, n.dim, acts)


def target_as_bimodule(f: AlgebraMorphism) -> Bimodule:
    """The target algebra as a (target, source)-bimodule via f."""
    s, t = f.source, f.target
    left = tuple(t.left_mult_operator(t.basis_vec(i)) for i in range(t.dim))
    right = tuple(t.right_mult_operator(f.apply(s.basis_vec(i))) for i in range(s.dim))
    return Bimodule(t, s, t.dim, left, right)


def induced_module(m: LeftModule, f: AlgebraMorphism) -> tuple:
    """target (x)_source M: (module over target, proj, sec)."""
    return tensor_bimodule_module(target_as_bimodule(f), m)


def coinduced_module(m: LeftModule, f: AlgebraMorphism) -> tuple:
    """Hom_source(target, M): (module over target, basis of maps)."""
    s, t = f.source, f.target
    left_on_t = tuple(t.left_mult_operator(f.apply(s.basis_vec(i))) for i in range(s.dim))
    right_on_t = tuple(t.right_mult_operator(t.basis_vec(j)) for j in range(t.dim))
    return hom_space_module(t.p, t.dim, left_on_t, m, t, right_on_t)


# -- presentations and splitting ---------------------------------------------


def free_presentation(m: LeftModule) -> SesRecord:
    """K >-> F ->> M with F free of rank dim M, generator i -> basis vector i."""
    alg = m.algebra
    p = alg.p
    if m.dim == 0:
        z = LeftModule.zero(alg)
        zm = zero_map(z, z)
        return SesRecord(z, z, z, zm, zero_map(z, z))
    copies = [alg.regular_module() for _ in range(m.dim)]
    free, _injs, _projs = direct_sum_modules(copies)
    # basis (copy i, algebra basis j) maps to b_j . e_i
    cols = []
    for i in range(m.dim):
        for j in range(alg.dim):
            cols.append(m.action[j].col(i))
    surj_matrix = FpMatrix(p, list(zip(*cols)), cols=free.dim)
    surj = ModuleMap(free, m, surj_matrix)
    kb = kernel_basis(surj_matrix)
    k, incl = submodule(free, kb)
    return SesRecord(k, free, m, incl, surj)


def lift_through_epi(epi: ModuleMap, g: ModuleMap) -> ModuleMap:
    """Some lambda with epi o lambda = g (g.source must be projective enough)."""
    lam = solve_module_map(g.source, epi.source, lhs=epi.matrix, rhs=g.matrix)
    if lam is None:
        raise ValueError("no lift exists")
    return lam


def factor_through_mono(mono: ModuleMap, g: ModuleMap) -> ModuleMap:
    """The unique u with mono o u = g (image of g must lie in the image of mono)."""
    sol = solve_linear(mono.matrix, g.matrix)
    if sol is None:
        raise ValueError("map does not factor through the mono")
    return ModuleMap(g.source, mono.source, sol)


def section_of_epi(surj: ModuleMap) -> Optional[ModuleMap]:
    """A module-map section s with surj o s = id, or None."""
    p = surj.matrix.p
    ident = FpMatrix.identity(p, surj.target.dim)
    return solve_module_map(surj.target, surj.source, lhs=surj.matrix, rhs=ident)


def is_split_exact(e: SesRecord) -> bool:
    return section_of_epi(e.surj) is not None


def is_projective_module(m: LeftModule) -> bool:
    if m.dim == 0:
        return True
    return is_split_exact(free_presentation(m))


def is_injective_module(m: LeftModule) -> bool:
    """Injectivity via GF(p)-duality: the dual must be projective over A^op."""
    if m.dim == 0:
        return True
    return is_projective_module(dual_left(m).as_left_over_opposite())


def injective_copresentation(m: LeftModule) -> ModuleMap:
    """A monomorphism of m into an injective module (dual of a free cover)."""
    dual = dual_left(m).as_left_over_opposite()
    pres = free_presentation(dual)
    # dualizing F ->> dual(m) gives m = m** >-> dual(F), an injective module
    env = dual_right(RightModule(m.algebra, pres.middle.dim, pres.middle.action))
    mono = ModuleMap(m, env, pres.surj.matrix.transpose())
    return mono


# -- pushout / pullback -------------------------------------------------------


def pushout_ses(e: SesRecord, f: ModuleMap) -> SesRecord:
    """Pushout of e along f: e.left -> N'; new sequence N' >-> Q ->> e.right."""
    if f.source != e.left:
        raise ValueError("pushout map must start at the left term")
    p = e.left.algebra.p
    nprime = f.target
    d, (inj_b, inj_n), (proj_b, proj_n) = _sum2(e.middle, nprime)
    rel_rows = []
    for k in range(e.left.dim):
        col_b = e.inj.matrix.col(k)
        col_n = f.matrix.col(k)
        rel_rows.append(list(col_b) + [(-x) % p for x in col_n])
    sb = span_basis(p, rel_rows, d.dim) if rel_rows else SubspaceBasis(d.dim, FpMatrix.zeros(p, 0, d.dim))
    q, proj, sec = quotient_module(d, sb)
    inj_new = ModuleMap(nprime, q, proj.matrix @ inj_n.matrix)
    surj_new = ModuleMap(q, e.right, e.surj.matrix @ proj_b.matrix @ sec)
    return SesRecord(nprime, q, e.right, inj_new, surj_new)


def pullback_ses(e: SesRecord, g: ModuleMap) -> SesRecord:
    """Pullback of e along g: C' -> e.right; new sequence e.left >-> P ->> C'."""
    if g.target != e.right:
        raise ValueError("pullback map must end at the right term")
    p = e.left.algebra.p
    cprime = g.source
    d, (inj_b, inj_c), (proj_b, proj_c) = _sum2(e.middle, cprime)
    test = hstack(e.surj.matrix, -g.matrix)  # rows: e.right.dim, cols: d.dim
    kb = kernel_basis(test)
    sub, incl = submodule(d, kb)
    inj_new = factor_through_mono(incl, ModuleMap(e.left, d, inj_b.matrix @ e.inj.matrix))
    surj_new = ModuleMap(sub, cprime, proj_c.matrix @ incl.matrix)
    return SesRecord(e.left, sub, cprime, inj_new, surj_new)


def _sum2(a: LeftModule, b: LeftModule) -> tuple:
    s, injs, projs = direct_sum_modules([a, b])
    return s, tuple(injs), tuple(projs)


def base_change_ses(e: SesRecord, f: ModuleMap, side: str) -> SesRecord:
    """Spec-facing pullback/pushout dispatch."""
    if side == "pushout":
        return pushout_ses(e, f)
    if side == "pullback":
        return pullback_ses(e, f)
    raise ValueError(f"unknown side {side!r}")


# -- the engine protocol and Ext ---------------------------------------------


class ModuleEngine:
    """Homological primitives of A-Mod in the shape the Ext engine expects."""

    def __init__(self, algebra: Algebra):
        self.algebra = algebra

    def hom_basis(self, x, y):
        return hom_basis(x, y)

    def map_coords(self, basis, m):
        return map_coords(basis, m)

    def map_combination(self, basis, coords, source, target):
        p = self.algebra.p
        out = FpMatrix.zeros(p, target.dim, source.dim)
        for c, b in zip(coords, basis):
            if c % p:
                out = out + b.matrix.scale(c)
        return ModuleMap(source, target, out)

    def free_presentation(self, x):
        return free_presentation(x)

    def compose(self, g, f):
        return g.compose(f)

    def identity(self, x):
        return identity_map(x)

    def pushout(self, ses, f):
        return pushout_ses(ses, f)

    def pullback(self, ses, g):
        return pullback_ses(ses, g)

    def lift_through_epi(self, epi, g):
        return lift_through_epi(epi, g)

    def factor_through_mono(self, mono, g):
        return factor_through_mono(mono, g)

    def is_split(self, ses):
        return is_split_exact(ses)

    def is_zero_obj(self, x):
        return x.dim == 0


class ExtSpace:
    """Ext^n(source, target) as a quotient of a cocycle space.

    Classes are coordinate tuples relative to a fixed syzygy
    presentation chain; `chain_for` turns a class into a spliced list of
    short exact sequences (rightmost first) and `class_of_chain` lifts
    an arbitrary such list back to coordinates.
    """

    def __init__(self, eng, source, target, degree: int):
        if degree < 1:
            raise ValueError("Ext degree must be >= 1")
        self.eng = eng
        self.source = source
        self.target = target
        self.degree = degree
        self.pres = []
        cur = source
        for _ in range(degree):
            ses = eng.free_presentation(cur)
            self.pres.append(ses)
            cur = ses.left
        self.omega = cur
        self.cocycle_space = eng.hom_basis(self.omega, target)
        k = len(self.cocycle_space)
        p = self._p()
        cob_rows = []
        if k:
            free_homs = eng.hom_basis(self.pres[-1].middle, target)
            for g in free_homs:
                restricted = eng.compose(g, self.pres[-1].inj)
                cob_rows.append(list(eng.map_coords(self.cocycle_space, restricted)))
        sb = span_basis(p, cob_rows, k) if cob_rows else SubspaceBasis(k, FpMatrix.zeros(p, 0, k))
        self.proj, self.sec = quotient_space(k, sb)
        self.dim = self.proj.rows

    def _p(self) -> int:
        return getattr(self.eng, "p", None) or self.eng.algebra.p

    def class_of(self, cocycle) -> tuple:
        coords = self.eng.map_coords(self.cocycle_space, cocycle)
        col = self.proj @ FpMatrix.column(self._p(), list(coords))
        return tuple(r[0] for r in col.entries)

    def cocycle(self, cls: Sequence[int]):
        col = self.sec @ FpMatrix.column(self._p(), list(cls))
        coords = tuple(r[0] for r in col.entries)
        return self.eng.map_combination(self.cocycle_space, coords, self.omega, self.target)

    def basis_classes(self) -> list:
        return [
            tuple(1 if j == i else 0 for j in range(self.dim)) for i in range(self.dim)
        ]

    def chain_for(self, cls: Sequence[int]) -> list:
        """Spliced SES list, rightmost (ending at source) first."""
        c = self.cocycle(cls)
        chain = list(self.pres[:-1])
        chain.append(self.eng.pushout(self.pres[-1], c))
        return chain

    def class_of_chain(self, chain: Sequence) -> tuple:
        if len(chain) != self.degree:
            raise ValueError("chain length disagrees with Ext degree")
        eng = self.eng
        u = eng.identity(self.source)
        for t, e in enumerate(chain):
            lam = eng.lift_through_epi(e.surj, eng.compose(u, self.pres[t].surj))
            u = eng.factor_through_mono(e.inj, eng.compose(lam, self.pres[t].inj))
        return self.class_of(u)


def ext_group(m: LeftModule, n_mod: LeftModule, degree: int) -> ExtSpace:
    """Ext^degree(m, n_mod) over the common algebra."""
    if m.algebra != n_mod.algebra:
        raise ValueError("Ext needs modules over the same algebra")
    return ExtSpace(ModuleEngine(m.algebra), m, n_mod, degree)


def ext_to_ses(space: ExtSpace, cls: Sequence[int]) -> SesRecord:
    """Degree-1 class to a representing short exact sequence."""
    if space.degree != 1:
        raise ValueError("only degree-1 classes are representable as one sequence")
    return space.chain_for(cls)[0]


def ses_to_class(space: ExtSpace, e: SesRecord) -> tuple:
    """Class coordinates of a short exact sequence with matching ends."""
    if space.degree != 1:
        raise ValueError("only degree-1 sequences can be classified here")
    if e.right != space.source or e.left != space.target:
        raise ValueError("end terms do not match the Ext space")
    return space.class_of_chain([e])


def tor_dim(mr: RightModule, nl: LeftModule) -> int:
    """dim Tor_1(M, N) from the free presentation of N."""
    if mr.algebra != nl.algebra:
        raise ValueError("Tor needs matching algebras")
    pres = free_presentation(nl)
    if nl.dim == 0 or mr.dim == 0:
        return 0
    dim_k, proj_k = tensor_right_left(mr, pres.left)
    dim_f, proj_f = tensor_right_left(mr, pres.middle)
    p = mr.algebra.p
    # induced map M (x) K -> M (x) F on the balanced quotients
    amb_map = FpMatrix.identity(p, mr.dim).kron(pres.inj.matrix)
    _pk, sec_k = quotient_space(mr.dim * pres.left.dim, _rows_of_kernel(proj_k))
    induced = proj_f @ amb_map @ sec_k
    return dim_k - induced.rank()


def _rows_of_kernel(proj: FpMatrix) -> SubspaceBasis:
    return kernel_basis(proj)
