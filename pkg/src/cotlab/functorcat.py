"""The category of additive GF(p)-linear functors on a finite enriched category.

A functor X assigns to each object A a module over its endomorphism
algebra and to each hom basis element a structure matrix X(A) -> X(B);
natural transformations are per-object matrices satisfying the
naturality squares.  On top of this sit:

  * the induced functors q_A (tensor with Hom(A,-)), p_A (maps out of
    Hom(-,A)) and the stalk s_A,
  * their one-sided inverses c_A (cokernel of the incoming action) and
    k_A (kernel of the outgoing coaction), together with the relation
    presentations whose cokernel/kernel the canonical maps factor
    through,
  * adjunction units, counits and hom-transpose bijections,
  * an equivalence with modules over the category algebra, and
  * a homological engine (free presentations, pushouts, pullbacks,
    lifts) with the same shape as the module one, so Ext of functors is
    computed by the identical syzygy machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .algmod import (
    Algebra,
    LeftModule,
    ModuleMap,
    free_presentation,
    hom_space_module,
    identity_map,
    submodule,
    tensor_bimodule_module,
    validate_left_module,
)
from .encat import CategoryAlgebra, EnrichedCategory, endo_algebra, hom_bimodule
from .linalg import (
    FpMatrix,
    SubspaceBasis,
    block_diag,
    hstack,
    kernel_basis,
    quotient_space,
    solve_linear,
    span_basis,
    vstack,
)


class AddFunctor:
    """Object-indexed modules with structure maps, one per hom basis element."""

    __slots__ = ("cat", "dims", "act", "_modules", "_hash")

    def __init__(self, cat: EnrichedCategory, dims: Dict[str, int], act: Dict[Tuple[str, str], Sequence[FpMatrix]]):
        self.cat = cat
        self.dims = {a: int(dims.get(a, 0)) for a in cat.objects}
        norm = {}
        for a in cat.objects:
            for b in cat.objects:
                d = cat.hom_dim(a, b)
                if not d:
                    continue
                mats = act.get((a, b))
                if mats is None:
                    mats = tuple(
                        FpMatrix.zeros(cat.p, self.dims[b], self.dims[a]) for _ in range(d)
                    )
                else:
                    mats = tuple(mats)
                    if len(mats) != d:
                        raise ValueError(f"block ({a},{b}) needs {d} matrices")
                    for m in mats:
                        if m.rows != self.dims[b] or m.cols != self.dims[a]:
                            raise ValueError(f"block ({a},{b}) matrix has wrong shape")
                norm[(a, b)] = mats
        self.act = norm
        self._modules = None
        self._hash = None

    def value(self, a: str) -> LeftModule:
        if self._modules is None:
            mods = {}
            for obj in self.cat.objects:
                mods[obj] = LeftModule(
                    endo_algebra(self.cat, obj), self.dims[obj], self.act[(obj, obj)]
                )
            self._modules = mods
        return self._modules[a]

    def map_for(self, a: str, b: str, vec: Sequence[int]) -> FpMatrix:
        """The structure matrix X(a) -> X(b) of a hom-space element."""
        p = self.cat.p
        out = FpMatrix.zeros(p, self.dims[b], self.dims[a])
        for k, c in enumerate(vec):
            if c % p:
                out = out + self.act[(a, b)][k].scale(c)
        return out

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return self.total_dim() == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AddFunctor)
            and self.cat == other.cat
            and self.dims == other.dims
            and self.act == other.act
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(
                (
                    self.cat,
                    tuple(sorted(self.dims.items())),
                    tuple(sorted(self.act.items())),
                )
            )
        return self._hash

    def __repr__(self) -> str:
        dims = ", ".join(f"{a}:{self.dims[a]}" for a in self.cat.objects)
        return f"AddFunctor({dims})"


class NatTrans:
    """Natural transformation as one matrix per object."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: AddFunctor, target: AddFunctor, components: Dict[str, FpMatrix]):
        self.source = source
        self.target = target
        comp = {}
        for a in source.cat.objects:
            m = components.get(a)
            if m is None:
                m = FpMatrix.zeros(source.cat.p, target.dims[a], source.dims[a])
            if m.rows != target.dims[a] or m.cols != source.dims[a]:
                raise ValueError(f"component at {a} has wrong shape")
            comp[a] = m
        self.components = comp

    def compose(self, other: "NatTrans") -> "NatTrans":
        """self after other."""
        return NatTrans(
            other.source,
            self.target,
            {a: self.components[a] @ other.components[a] for a in self.components},
        )

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NatTrans)
            and self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )

    def __repr__(self) -> str:
        return f"NatTrans({self.source!r} => {self.target!r})"


def identity_nat(x: AddFunctor) -> NatTrans:
    return NatTrans(x, x, {a: FpMatrix.identity(x.cat.p, x.dims[a]) for a in x.cat.objects})


def zero_nat(x: AddFunctor, y: AddFunctor) -> NatTrans:
    return NatTrans(x, y, {})


def zero_functor(cat: EnrichedCategory) -> AddFunctor:
    return AddFunctor(cat, {}, {})


def validate_functor(x: AddFunctor) -> list:
    """Identity, composition, and per-object module axioms; [] means pass."""
    problems = []
    cat = x.cat
    for a in cat.objects:
        ident = x.map_for(a, a, cat.ids[a])
        if ident != FpMatrix.identity(cat.p, x.dims[a]):
            problems.append(f"identity of {a} does not act as the identity matrix")
    for a in cat.objects:
        for b in cat.objects:
            if not cat.hom_dim(a, b):
                continue
            for c in cat.objects:
                if not cat.hom_dim(b, c):
                    continue
                for fi in range(cat.hom_dim(a, b)):
                    for gi in range(cat.hom_dim(b, c)):
                        gf = cat.compose_vec(
                            a,
                            b,
                            c,
                            tuple(1 if t == gi else 0 for t in range(cat.hom_dim(b, c))),
                            tuple(1 if t == fi else 0 for t in range(cat.hom_dim(a, b))),
                        )
                        lhs = x.act[(b, c)][gi] @ x.act[(a, b)][fi]
                        rhs = x.map_for(a, c, gf)
                        if lhs != rhs:
                            problems.append(
                                f"composition fails at ({a},{b},{c}) basis ({fi},{gi})"
                            )
    for a in cat.objects:
        for s in validate_left_module(x.value(a)):
            problems.append(f"value at {a}: {s}")
    return problems


def validate_nat(alpha: NatTrans) -> list:
    problems = []
    x, y = alpha.source, alpha.target
    cat = x.cat
    for a in cat.objects:
        for b in cat.objects:
            for k in range(cat.hom_dim(a, b)):
                lhs = alpha.components[b] @ x.act[(a, b)][k]
                rhs = y.act[(a, b)][k] @ alpha.components[a]
                if lhs != rhs:
                    problems.append(f"naturality fails at block ({a},{b}) basis {k}")
    return problems


# -- the joint linear system for natural transformations ----------------------


def _nat_layout(x: AddFunctor, y: AddFunctor):
    offsets = {}
    total = 0
    for a in x.cat.objects:
        offsets[a] = total
        total += y.dims[a] * x.dims[a]
    return offsets, total


def _nat_system_rows(x: AddFunctor, y: AddFunctor):
    cat = x.cat
    p = cat.p
    offsets, total = _nat_layout(x, y)
    rows = []
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d or (y.dims[b] * x.dims[a]) == 0:
                continue
            for k in range(d):
                xa = x.act[(a, b)][k]
                yb = y.act[(a, b)][k]
                # alpha_b @ xa - yb @ alpha_a = 0, entrywise (r, c)
                for r in range(y.dims[b]):
                    for c in range(x.dims[a]):
                        row = [0] * total
                        base_b = offsets[b]
                        for t in range(x.dims[b]):
                            v = xa.entries[t][c]
                            if v:
                                idx = base_b + r * x.dims[b] + t
                                row[idx] = (row[idx] + v) % p
                        base_a = offsets[a]
                        for t in range(y.dims[a]):
                            v = yb.entries[r][t]
                            if v:
                                idx = base_a + t * x.dims[a] + c
                                row[idx] = (row[idx] - v) % p
                        if any(row):
                            rows.append(row)
    return offsets, total, rows


def _nat_from_flat(x: AddFunctor, y: AddFunctor, offsets, flat) -> NatTrans:
    comps = {}
    for a in x.cat.objects:
        r, c = y.dims[a], x.dims[a]
        base = offsets[a]
        comps[a] = FpMatrix(
            x.cat.p,
            [flat[base + i * c : base + (i + 1) * c] for i in range(r)],
            cols=c,
        )
    return NatTrans(x, y, comps)


def _nat_packed_rows(x: AddFunctor, y: AddFunctor):
    """GF(2) fast path: the naturality system as packed integer rows."""
    cat = x.cat
    offsets, total = _nat_layout(x, y)
    rows = []
    for a in cat.objects:
        xda = x.dims[a]
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            ydb = y.dims[b]
            if not d or ydb * xda == 0:
                continue
            base_b = offsets[b]
            base_a = offsets[a]
            xdb = x.dims[b]
            yda = y.dims[a]
            for k in range(d):
                xa = x.act[(a, b)][k].entries
                yb = y.act[(a, b)][k].entries
                for r in range(ydb):
                    ybr = yb[r]
                    for c in range(xda):
                        row = 0
                        for t in range(xdb):
                            if xa[t][c]:
                                row ^= 1 << (base_b + r * xdb + t)
                        for t in range(yda):
                            if ybr[t]:
                                row ^= 1 << (base_a + t * xda + c)
                        if row:
                            rows.append(row)
    return offsets, total, rows


def nat_dim(x: AddFunctor, y: AddFunctor) -> int:
    """dim Nat(x, y) without materializing a basis."""
    if x.cat.p == 2:
        from .linalg import rank_packed

        _offsets, total, rows = _nat_packed_rows(x, y)
        return total - rank_packed(rows, total)
    return len(nat_space(x, y))


def nat_space(x: AddFunctor, y: AddFunctor) -> list:
    """Basis of the space of natural transformations x => y."""
    if x.cat != y.cat:
        raise ValueError("functors live on different categories")
    if x.cat.p == 2:
        from .linalg import kernel_packed

        offsets, total, rows = _nat_packed_rows(x, y)
        if total == 0:
            return []
        kern = kernel_packed(rows, total)
        return [
            _nat_from_flat(x, y, offsets, [(v >> j) & 1 for j in range(total)])
            for v in kern
        ]
    offsets, total, rows = _nat_system_rows(x, y)
    if total == 0:
        return []
    if rows:
        kb = kernel_basis(FpMatrix(x.cat.p, rows, cols=total))
        flats = [list(v) for v in kb.basis.entries]
    else:
        flats = [[1 if j == i else 0 for j in range(total)] for i in range(total)]
    return [_nat_from_flat(x, y, offsets, f) for f in flats]


def solve_nat(
    x: AddFunctor,
    y: AddFunctor,
    conditions: Sequence[Tuple[str, FpMatrix, FpMatrix]] = (),
) -> Optional[NatTrans]:
    """A natural transformation with lhs @ alpha_A = rhs per condition, or None."""
    p = x.cat.p
    if p == 2:
        return _solve_nat_gf2(x, y, conditions)
    offsets, total, rows = _nat_system_rows(x, y)
    rhs_col = [0] * len(rows)
    for (a, lhs, rhs) in conditions:
        base = offsets[a]
        for r in range(lhs.rows):
            for c in range(x.dims[a]):
                row = [0] * total
                for t in range(y.dims[a]):
                    v = lhs.entries[r][t]
                    if v:
                        row[base + t * x.dims[a] + c] = v
                rows.append(row)
                rhs_col.append(rhs.entries[r][c])
    if total == 0:
        if any(v % p for v in rhs_col):
            return None
        return zero_nat(x, y)
    if not rows:
        return zero_nat(x, y)
    sol = solve_linear(FpMatrix(p, rows, cols=total), FpMatrix.column(p, rhs_col))
    if sol is None:
        return None
    return _nat_from_flat(x, y, offsets, [r[0] for r in sol.entries])


def _solve_nat_gf2(x, y, conditions) -> Optional[NatTrans]:
    from .linalg import solve_affine_packed

    offsets, total, rows = _nat_packed_rows(x, y)
    rhs_bit = 1 << total
    aug = list(rows)
    for (a, lhs, rhs) in conditions:
        base = offsets[a]
        xda = x.dims[a]
        for r in range(lhs.rows):
            lr = lhs.entries[r]
            for c in range(xda):
                row = 0
                for t in range(y.dims[a]):
                    if lr[t]:
                        row ^= 1 << (base + t * xda + c)
                if rhs.entries[r][c]:
                    row ^= rhs_bit
                if row:
                    aug.append(row)
    sol = solve_affine_packed(aug, total)
    if sol is None:
        return None
    return _nat_from_flat(x, y, offsets, sol)


def nat_coords(basis: Sequence[NatTrans], alpha: NatTrans) -> tuple:
    p = alpha.source.cat.p
    flat = []
    for a in alpha.source.cat.objects:
        flat.extend(v for row in alpha.components[a].entries for v in row)
    if not basis:
        if any(flat):
            raise ValueError("transformation outside the empty span")
        return ()
    cols = []
    for b in basis:
        f = []
        for a in b.source.cat.objects:
            f.extend(v for row in b.components[a].entries for v in row)
        cols.append(f)
    mat = FpMatrix(p, list(zip(*cols)), cols=len(basis)) if flat else FpMatrix.zeros(p, 0, len(basis))
    target = FpMatrix.column(p, flat) if flat else FpMatrix.zeros(p, 0, 1)
    sol = solve_linear(mat, target)
    if sol is None:
        raise ValueError("transformation outside the span of the basis")
    return tuple(r[0] for r in sol.entries)


# -- evaluation and induced functors ------------------------------------------


def eval_at(x: AddFunctor, a: str) -> LeftModule:
    """X(a) with its endomorphism-algebra action."""
    if a not in x.cat.objects:
        raise KeyError(f"unknown object {a!r}")
    return x.value(a)


def _require_zero_trace_at(cat: EnrichedCategory, a: str):
    for b in cat.objects:
        if b == a:
            continue
        tensor = cat.comp_tensor(a, b, a)
        for row in tensor:
            for cell in row:
                if any(cell):
                    raise ValueError(
                        f"zero-trace hypothesis fails through {b}; stalk machinery at {a} unavailable"
                    )


@lru_cache(maxsize=None)
def stalk_functor(cat: EnrichedCategory, a: str, m: LeftModule) -> AddFunctor:
    """Value m at a, zero elsewhere; needs the zero-trace hypothesis."""
    _require_zero_trace_at(cat, a)
    if m.algebra != endo_algebra(cat, a):
        raise ValueError("module is not over the endomorphism algebra")
    dims = {obj: (m.dim if obj == a else 0) for obj in cat.objects}
    act = {(a, a): m.action}
    return AddFunctor(cat, dims, act)


@lru_cache(maxsize=None)
def _q_functor_data(cat: EnrichedCategory, a: str, m: LeftModule):
    p = cat.p
    values = {}
    tensor_data = {}
    for b in cat.objects:
        mod, proj, sec = tensor_bimodule_module(hom_bimodule(cat, a, b), m)
        values[b] = mod
        tensor_data[b] = (proj, sec)
    dims = {b: values[b].dim for b in cat.objects}
    act = {}
    idm = FpMatrix.identity(p, m.dim)
    for b in cat.objects:
        for c in cat.objects:
            d = cat.hom_dim(b, c)
            if not d:
                continue
            mats = []
            for k in range(d):
                post = cat.postcompose_matrix(
                    a, b, c, tuple(1 if t == k else 0 for t in range(d))
                )
                amb = post.kron(idm)
                mats.append(tensor_data[c][0] @ amb @ tensor_data[b][1])
            act[(b, c)] = tuple(mats)
    functor = AddFunctor(cat, dims, act)
    return functor, tensor_data


def q_functor(cat: EnrichedCategory, a: str, m: LeftModule) -> AddFunctor:
    """Hom(a,-) tensored with m over the endomorphism algebra of a."""
    if m.algebra != endo_algebra(cat, a):
        raise ValueError("module is not over the endomorphism algebra")
    return _q_functor_data(cat, a, m)[0]


@lru_cache(maxsize=None)
def _p_functor_data(cat: EnrichedCategory, a: str, m: LeftModule):
    p = cat.p
    values = {}
    bases = {}
    for b in cat.objects:
        bim = hom_bimodule(cat, b, a)  # Hom(b,a): left end(a), right end(b)
        mod, basis = hom_space_module(
            p, bim.dim, bim.left_action, m, endo_algebra(cat, b), bim.right_action
        )
        values[b] = mod
        bases[b] = basis
    dims = {b: values[b].dim for b in cat.objects}
    act = {}
    for b in cat.objects:
        for c in cat.objects:
            d = cat.hom_dim(b, c)
            if not d:
                continue
            mats = []
            for k in range(d):
                pre = cat.precompose_matrix(
                    b, c, a, tuple(1 if t == k else 0 for t in range(d))
                )
                # Hom(c,a) -> Hom(b,a); p(b) ni Phi -> Phi o pre in p(c)
                mats.append(
                    _coords_in_basis(
                        p,
                        [phi @ pre for phi in bases[b]],
                        bases[c],
                        values[c].dim,
                        values[b].dim,
                    )
                )
            act[(b, c)] = tuple(mats)
    functor = AddFunctor(cat, dims, act)
    return functor, bases


def p_functor(cat: EnrichedCategory, a: str, m: LeftModule) -> AddFunctor:
    """Module maps from Hom(-,a) into m."""
    if m.algebra != endo_algebra(cat, a):
        raise ValueError("module is not over the endomorphism algebra")
    return _p_functor_data(cat, a, m)[0]


def _coords_in_basis(p, images, basis, dim_target, dim_source) -> FpMatrix:
    """Matrix sending basis elements to the coordinates of their images."""
    if dim_target == 0 or dim_source == 0:
        return FpMatrix.zeros(p, dim_target, dim_source)
    flat_cols = FpMatrix(
        p,
        [[_flat(b)[i] for b in basis] for i in range(len(_flat(basis[0])))],
        cols=dim_target,
    )
    img = FpMatrix(
        p,
        [[_flat(im)[i] for im in images] for i in range(len(_flat(images[0])))],
        cols=dim_source,
    )
    sol = solve_linear(flat_cols, img)
    if sol is None:
        raise ValueError("image left the span of the basis")
    return sol


def _flat(m: FpMatrix) -> list:
    return [v for row in m.entries for v in row]


def induced_functor(kind: str, cat: EnrichedCategory, a: str, m: LeftModule) -> AddFunctor:
    """Spec-facing dispatch for the q / p / s constructions."""
    if kind == "q":
        return q_functor(cat, a, m)
    if kind == "p":
        return p_functor(cat, a, m)
    if kind == "s":
        return stalk_functor(cat, a, m)
    raise ValueError(f"unknown induced functor kind {kind!r}")


# -- c and k ------------------------------------------------------------------


def _incoming_eval_matrix(x: AddFunctor, b: str, a: str, sec_b: FpMatrix) -> FpMatrix:
    """Hom(b,a) (x) X(b) (balanced) -> X(a), via the structure maps."""
    cat = x.cat
    p = cat.p
    d = cat.hom_dim(b, a)
    cols = []
    for k in range(d):
        mk = x.act[(b, a)][k]
        for v in range(x.dims[b]):
            cols.append(mk.col(v))
    if cols:
        amb = FpMatrix(p, list(zip(*cols)), cols=len(cols)) if x.dims[a] else FpMatrix.zeros(p, 0, len(cols))
    else:
        amb = FpMatrix.zeros(p, x.dims[a], 0)
    return amb @ sec_b


@lru_cache(maxsize=None)
def reduced_at_c(x: AddFunctor, a: str):
    """(c_a(X), quotient map X(a) ->> c_a(X))."""
    cat = x.cat
    _require_zero_trace_at(cat, a)
    p = cat.p
    m_a = x.value(a)
    image_rows = []
    for b in cat.objects:
        if b == a or not cat.hom_dim(b, a):
            continue
        mod, proj, sec = tensor_bimodule_module(hom_bimodule(cat, b, a), x.value(b))
        w = _incoming_eval_matrix(x, b, a, sec)
        for j in range(w.cols):
            image_rows.append(list(w.col(j)))
    from .algmod import quotient_module

    sb = span_basis(p, image_rows, x.dims[a])
    cmod, qmap, _sec = quotient_module(m_a, sb)
    return cmod, qmap


@lru_cache(maxsize=None)
def reduced_at_k(x: AddFunctor, a: str):
    """(k_a(X), inclusion k_a(X) >-> X(a))."""
    cat = x.cat
    _require_zero_trace_at(cat, a)
    p = cat.p
    rows = []
    for b in cat.objects:
        if b == a:
            continue
        for k in range(cat.hom_dim(a, b)):
            rows.extend(list(r) for r in x.act[(a, b)][k].entries)
    m_a = x.value(a)
    if rows:
        kb = kernel_basis(FpMatrix(p, rows, cols=x.dims[a]))
    else:
        kb = SubspaceBasis(x.dims[a], FpMatrix.identity(p, x.dims[a]))
    kmod, incl = submodule(m_a, kb)
    return kmod, incl


def reduced_at(kind: str, x: AddFunctor, a: str):
    if kind == "c":
        return reduced_at_c(x, a)
    if kind == "k":
        return reduced_at_k(x, a)
    raise ValueError(f"unknown reduction kind {kind!r}")


# -- relation presentations ----------------------------------------------------


@dataclass(frozen=True)
class RelationPresentation:
    """Everything the canonical factorizations at one object are made of."""

    obj: str
    incoming_dim: int          # dim of the balanced sum over b != a of Hom(b,a) (x) X(b)
    eval_matrix: FpMatrix      # incoming sum -> X(a)
    relation_rows: tuple       # rows spanning the image of the relation map
    coker_module: LeftModule
    coker_to_value: ModuleMap
    outgoing_dim: int          # dim of the product over b != a of Hom_{end(b)}(Hom(a,b), X(b))
    equation_rows: tuple       # rows cutting out ker(mu) inside the product
    ker_module: LeftModule
    value_to_ker: ModuleMap


@lru_cache(maxsize=None)
def _coker_phi_data(x: AddFunctor, a: str):
    cat = x.cat
    _require_zero_trace_at(cat, a)
    p = cat.p
    others = [b for b in cat.objects if b != a and cat.hom_dim(b, a) and x.dims[b]]
    pieces = {}
    for b in others:
        mod, proj, sec = tensor_bimodule_module(hom_bimodule(cat, b, a), x.value(b))
        pieces[b] = (mod, proj, sec)
    from .algmod import direct_sum_modules, quotient_module

    if others:
        total, injs, projs = direct_sum_modules([pieces[b][0] for b in others])
        inj_of = {b: injs[i] for i, b in enumerate(others)}
    else:
        total = LeftModule.zero(endo_algebra(cat, a))
        inj_of = {}

    def into_total(b, amb_vec):
        col = pieces[b][1] @ FpMatrix.column(p, amb_vec)
        col = inj_of[b].matrix @ col
        return [r[0] for r in col.entries]

    rel_rows = []
    # h1 - h2: g' (x) X(f)(x) - (g' o f) (x) x, over b' carrying g': b' -> a
    # and b != a, b' carrying f: b -> b' and x in X(b).  Either slot may hit
    # a zero summand; the other still contributes a relation.
    for b2 in cat.objects:  # b2 carries g' in Hom(b2, a)
        if b2 == a:
            continue
        dg = cat.hom_dim(b2, a)
        if not dg:
            continue
        for b in cat.objects:
            if b in (a, b2) or not cat.hom_dim(b, b2) or not x.dims[b]:
                continue
            df = cat.hom_dim(b, b2)
            for gi in range(dg):
                gvec = tuple(1 if t == gi else 0 for t in range(dg))
                for fi in range(df):
                    fvec = tuple(1 if t == fi else 0 for t in range(df))
                    gf = cat.compose_vec(b, b2, a, gvec, fvec)
                    for xv in range(x.dims[b]):
                        row = [0] * total.dim
                        if b2 in pieces:
                            # h1: g' (x) X(f)(x) in the b2 piece
                            fx = x.act[(b, b2)][fi].col(xv)
                            amb1 = [0] * (dg * x.dims[b2])
                            for t, v in enumerate(fx):
                                amb1[gi * x.dims[b2] + t] = v
                            row = into_total(b2, amb1)
                        if b in pieces:
                            # h2: (g' o f) (x) x in the b piece
                            amb2 = [0] * (cat.hom_dim(b, a) * x.dims[b])
                            for t, v in enumerate(gf):
                                amb2[t * x.dims[b] + xv] = v
                            row2 = into_total(b, amb2)
                            row = [(u - v) % p for u, v in zip(row, row2)]
                        if any(row):
                            rel_rows.append(row)
    # nu: g (x) X(l)(y) for l: a -> b, y in X(a)
    for b in others:
        db = cat.hom_dim(b, a)
        dl = cat.hom_dim(a, b)
        for gi in range(db):
            for li in range(dl):
                ly = x.act[(a, b)][li]
                for yv in range(x.dims[a]):
                    col = ly.col(yv)
                    amb = [0] * (db * x.dims[b])
                    for t, v in enumerate(col):
                        amb[gi * x.dims[b] + t] = v
                    row = into_total(b, amb)
                    if any(row):
                        rel_rows.append(row)

    sb = span_basis(p, rel_rows, total.dim)
    coker, cproj, csec = quotient_module(total, sb)
    # the evaluation map U -> X(a), factored through the cokernel
    if others:
        eval_matrix = _incoming_eval_matrix(x, others[0], a, pieces[others[0]][2])
        for b in others[1:]:
            eval_matrix = hstack(eval_matrix, _incoming_eval_matrix(x, b, a, pieces[b][2]))
    else:
        eval_matrix = FpMatrix.zeros(p, x.dims[a], 0)
    induced = ModuleMap(coker, x.value(a), eval_matrix @ csec)
    return RelationData(
        total=total,
        relation_rows=tuple(tuple(r) for r in rel_rows),
        coker=coker,
        coker_to_value=induced,
        eval_matrix=eval_matrix,
    )


@dataclass(frozen=True)
class RelationData:
    total: LeftModule
    relation_rows: tuple
    coker: LeftModule
    coker_to_value: ModuleMap
    eval_matrix: FpMatrix


def coker_phi(x: AddFunctor, a: str):
    """(coker of the relation map, induced map into X(a))."""
    data = _coker_phi_data(x, a)
    return data.coker, data.coker_to_value


@lru_cache(maxsize=None)
def _ker_mu_data(x: AddFunctor, a: str):
    cat = x.cat
    _require_zero_trace_at(cat, a)
    p = cat.p
    ra = endo_algebra(cat, a)
    others = [b for b in cat.objects if b != a and cat.hom_dim(a, b) and x.dims[b]]
    pieces = {}
    for b in others:
        bim = hom_bimodule(cat, a, b)  # Hom(a,b): left end(b), right end(a)
        mod, basis = hom_space_module(
            p, bim.dim, bim.left_action, x.value(b), ra, bim.right_action
        )
        pieces[b] = (mod, basis)
    from .algmod import direct_sum_modules

    if others:
        total, injs, projs = direct_sum_modules([pieces[b][0] for b in others])
        off = {}
        cursor = 0
        for b in others:
            off[b] = cursor
            cursor += pieces[b][0].dim
    else:
        total = LeftModule.zero(ra)
        off = {}

    eq_rows = []
    # t1 - t2: X(f)(phi_b(h)) = phi_b2(f o h) in X(b2), f: b -> b2, h: a -> b.
    # The equation exists whenever X(b2) is nonzero; either phi slot may be
    # forced zero by an empty hom space, leaving a constraint on the other.
    for b in cat.objects:
        if b == a:
            continue
        dh = cat.hom_dim(a, b)
        if not dh:
            continue
        for b2 in cat.objects:
            if b2 in (a, b) or not x.dims[b2]:
                continue
            df = cat.hom_dim(b, b2)
            if not df:
                continue
            for hi in range(dh):
                hvec = tuple(1 if t == hi else 0 for t in range(dh))
                for fi in range(df):
                    fvec = tuple(1 if t == fi else 0 for t in range(df))
                    fh = cat.compose_vec(a, b, b2, fvec, hvec)
                    xf = x.act[(b, b2)][fi]
                    for r in range(x.dims[b2]):
                        row = [0] * total.dim
                        if b in pieces:
                            for t, phi in enumerate(pieces[b][1]):
                                val = 0
                                col = phi.col(hi)
                                for s, v in enumerate(col):
                                    if v:
                                        val = (val + xf.entries[r][s] * v) % p
                                if val:
                                    row[off[b] + t] = (row[off[b] + t] + val) % p
                        if b2 in pieces:
                            for t, phi in enumerate(pieces[b2][1]):
                                val = 0
                                for hcol, coef in enumerate(fh):
                                    if coef:
                                        val = (val + coef * phi.entries[r][hcol]) % p
                                if val:
                                    row[off[b2] + t] = (row[off[b2] + t] - val) % p
                        if any(row):
                            eq_rows.append(row)
    # tau: X(g)(phi_b(h)) = 0 for g: b -> a
    for b in others:
        dh = cat.hom_dim(a, b)
        dg = cat.hom_dim(b, a)
        if not dg:
            continue
        for hi in range(dh):
            for gi in range(dg):
                xg = x.act[(b, a)][gi]
                for r in range(x.dims[a]):
                    row = [0] * total.dim
                    for t, phi in enumerate(pieces[b][1]):
                        val = 0
                        col = phi.col(hi)
                        for s, v in enumerate(col):
                            if v:
                                val = (val + xg.entries[r][s] * v) % p
                        if val:
                            row[off[b] + t] = val
                    if any(row):
                        eq_rows.append(row)

    if eq_rows:
        kb = kernel_basis(FpMatrix(p, eq_rows, cols=total.dim))
    else:
        kb = SubspaceBasis(total.dim, FpMatrix.identity(p, total.dim))
    kermod, incl = submodule(total, kb)
    # psi: X(a) -> total coordinates, one column per basis vector of X(a)
    cols = []
    for j in range(x.dims[a]):
        vec = [0] * total.dim
        for b in others:
            dh = cat.hom_dim(a, b)
            phi_j_flat = []
            for r in range(x.dims[b]):
                for h in range(dh):
                    phi_j_flat.append(x.act[(a, b)][h].entries[r][j])
            basis = pieces[b][1]
            if basis:
                flat_cols = FpMatrix(
                    p,
                    [[_flat(bb)[i] for bb in basis] for i in range(len(_flat(basis[0])))],
                    cols=len(basis),
                )
                sol = solve_linear(flat_cols, FpMatrix.column(p, phi_j_flat))
                if sol is None:
                    raise ValueError("psi image left the hom-space span")
                for t in range(len(basis)):
                    vec[off[b] + t] = sol.entries[t][0]
        cols.append(vec)
    psi_matrix = (
        FpMatrix(p, list(zip(*cols)), cols=x.dims[a])
        if total.dim
        else FpMatrix.zeros(p, 0, x.dims[a])
    )
    sol = solve_linear(incl.matrix, psi_matrix)
    if sol is None:
        raise ValueError("psi does not factor through ker(mu)")
    value_to_ker = ModuleMap(x.value(a), kermod, sol)
    return KerMuData(
        total=total,
        equation_rows=tuple(tuple(r) for r in eq_rows),
        ker=kermod,
        value_to_ker=value_to_ker,
        psi_matrix=psi_matrix,
    )


@dataclass(frozen=True)
class KerMuData:
    total: LeftModule
    equation_rows: tuple
    ker: LeftModule
    value_to_ker: ModuleMap
    psi_matrix: FpMatrix


def ker_mu(x: AddFunctor, a: str):
    """(ker of the corelation map, induced map from X(a))."""
    data = _ker_mu_data(x, a)
    return data.ker, data.value_to_ker


def relation_presentation(x: AddFunctor, a: str) -> RelationPresentation:
    cdata = _coker_phi_data(x, a)
    kdata = _ker_mu_data(x, a)
    return RelationPresentation(
        obj=a,
        incoming_dim=cdata.total.dim,
        eval_matrix=cdata.eval_matrix,
        relation_rows=cdata.relation_rows,
        coker_module=cdata.coker,
        coker_to_value=cdata.coker_to_value,
        outgoing_dim=kdata.total.dim,
        equation_rows=kdata.equation_rows,
        ker_module=kdata.ker,
        value_to_ker=kdata.value_to_ker,
    )


# -- short exact sequences of functors -----------------------------------------


@dataclass(frozen=True)
class FunctorSes:
    """Levelwise short exact sequence left >-> middle ->> right."""

    left: AddFunctor
    middle: AddFunctor
    right: AddFunctor
    inj: NatTrans
    surj: NatTrans


def validate_functor_ses(e: FunctorSes) -> list:
    problems = []
    problems += [f"inj: {s}" for s in validate_nat(e.inj)]
    problems += [f"surj: {s}" for s in validate_nat(e.surj)]
    for a in e.left.cat.objects:
        if e.inj.components[a].rank() != e.left.dims[a]:
            problems.append(f"inj not injective at {a}")
        if e.surj.components[a].rank() != e.right.dims[a]:
            problems.append(f"surj not surjective at {a}")
        if not (e.surj.components[a] @ e.inj.components[a]).is_zero():
            problems.append(f"surj o inj nonzero at {a}")
        if e.middle.dims[a] != e.left.dims[a] + e.right.dims[a]:
            problems.append(f"rank additivity fails at {a}")
    return problems


def direct_sum_functors(xs: Sequence[AddFunctor]):
    """(sum, injections, projections) with blocks in the given order."""
    if not xs:
        raise ValueError("empty functor direct sum needs a category")
    cat = xs[0].cat
    p = cat.p
    dims = {a: sum(x.dims[a] for x in xs) for a in cat.objects}
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            act[(a, b)] = tuple(
                block_diag(p, [x.act[(a, b)][k] for x in xs]) for k in range(d)
            )
    total = AddFunctor(cat, dims, act)
    injs, projs = [], []
    for i, x in enumerate(xs):
        comps_in, comps_out = {}, {}
        for a in cat.objects:
            off = sum(y.dims[a] for y in xs[:i])
            rows_in = [[0] * x.dims[a] for _ in range(dims[a])]
            rows_out = [[0] * dims[a] for _ in range(x.dims[a])]
            for t in range(x.dims[a]):
                rows_in[off + t][t] = 1
                rows_out[t][off + t] = 1
            comps_in[a] = FpMatrix(p, rows_in, cols=x.dims[a])
            comps_out[a] = FpMatrix(p, rows_out, cols=dims[a])
        injs.append(NatTrans(x, total, comps_in))
        projs.append(NatTrans(total, x, comps_out))
    return total, injs, projs


def kernel_subfunctor(alpha: NatTrans):
    """(kernel functor, levelwise inclusion)."""
    x = alpha.source
    cat = x.cat
    p = cat.p
    incl_cols = {}
    dims = {}
    for a in cat.objects:
        m = alpha.components[a]
        if m.rows == 0:
            kb = SubspaceBasis(x.dims[a], FpMatrix.identity(p, x.dims[a]))
        else:
            kb = kernel_basis(m)
        incl_cols[a] = kb.basis.transpose()
        dims[a] = kb.dim
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            mats = []
            for k in range(d):
                sol = solve_linear(incl_cols[b], x.act[(a, b)][k] @ incl_cols[a])
                if sol is None:
                    raise ValueError("kernel is not a subfunctor")
                mats.append(sol)
            act[(a, b)] = tuple(mats)
    ker = AddFunctor(cat, dims, act)
    incl = NatTrans(ker, x, incl_cols)
    return ker, incl


def image_subfunctor(alpha: NatTrans):
    """(image functor, levelwise inclusion into the target)."""
    y = alpha.target
    cat = y.cat
    p = cat.p
    incl_cols = {}
    dims = {}
    for a in cat.objects:
        m = alpha.components[a]
        sb = span_basis(p, [list(m.col(j)) for j in range(m.cols)], y.dims[a])
        incl_cols[a] = sb.basis.transpose()
        dims[a] = sb.dim
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            mats = []
            for k in range(d):
                sol = solve_linear(incl_cols[b], y.act[(a, b)][k] @ incl_cols[a])
                if sol is None:
                    raise ValueError("image is not a subfunctor")
                mats.append(sol)
            act[(a, b)] = tuple(mats)
    img = AddFunctor(cat, dims, act)
    return img, NatTrans(img, y, incl_cols)


def cokernel_functor(alpha: NatTrans):
    """(cokernel functor, levelwise projection)."""
    y = alpha.target
    cat = y.cat
    p = cat.p
    projs, secs = {}, {}
    for a in cat.objects:
        m = alpha.components[a]
        image_rows = [list(m.col(j)) for j in range(m.cols)]
        sb = span_basis(p, image_rows, y.dims[a])
        proj, sec = quotient_space(y.dims[a], sb)
        projs[a] = proj
        secs[a] = sec
    dims = {a: projs[a].rows for a in cat.objects}
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            act[(a, b)] = tuple(
                projs[b] @ y.act[(a, b)][k] @ secs[a] for k in range(d)
            )
    q = AddFunctor(cat, dims, act)
    return q, NatTrans(y, q, projs)


# -- the K / C series ----------------------------------------------------------


def q_map_functor(cat: EnrichedCategory, a: str, u: ModuleMap) -> NatTrans:
    """q_a applied to a module map."""
    src, sdata = _q_functor_data(cat, a, u.source)
    tgt, tdata = _q_functor_data(cat, a, u.target)
    comps = {}
    for b in cat.objects:
        d = cat.hom_dim(a, b)
        ident = FpMatrix.identity(cat.p, d)
        comps[b] = tdata[b][0] @ ident.kron(u.matrix) @ sdata[b][1]
    return NatTrans(src, tgt, comps)


def s_map_functor(cat: EnrichedCategory, a: str, u: ModuleMap) -> NatTrans:
    src = stalk_functor(cat, a, u.source)
    tgt = stalk_functor(cat, a, u.target)
    return NatTrans(src, tgt, {a: u.matrix})


def p_map_functor(cat: EnrichedCategory, a: str, u: ModuleMap) -> NatTrans:
    src, sbases = _p_functor_data(cat, a, u.source)
    tgt, tbases = _p_functor_data(cat, a, u.target)
    comps = {}
    for b in cat.objects:
        images = [u.matrix @ phi for phi in sbases[b]]
        comps[b] = _coords_in_basis(
            cat.p, images, tbases[b], tgt.dims[b], src.dims[b]
        ) if src.dims[b] or tgt.dims[b] else FpMatrix.zeros(cat.p, 0, 0)
    return NatTrans(src, tgt, comps)


def c_map_induced(alpha: NatTrans, a: str) -> ModuleMap:
    """c_a applied to a natural transformation."""
    cx, qx = reduced_at_c(alpha.source, a)
    cy, qy = reduced_at_c(alpha.target, a)
    sec = solve_linear(qx.matrix, FpMatrix.identity(alpha.source.cat.p, cx.dim))
    return ModuleMap(cx, cy, (qy.matrix @ alpha.components[a]) @ sec)


def k_map_induced(alpha: NatTrans, a: str) -> ModuleMap:
    """k_a applied to a natural transformation."""
    kx, ix = reduced_at_k(alpha.source, a)
    ky, iy = reduced_at_k(alpha.target, a)
    sol = solve_linear(iy.matrix, alpha.components[a] @ ix.matrix)
    if sol is None:
        raise ValueError("kernel is not preserved")
    return ModuleMap(kx, ky, sol)


def counit_q_ev(cat: EnrichedCategory, a: str, x: AddFunctor) -> NatTrans:
    """The canonical q_a(X(a)) => X."""
    qf, tdata = _q_functor_data(cat, a, x.value(a))
    comps = {}
    for b in cat.objects:
        d = cat.hom_dim(a, b)
        cols = []
        for k in range(d):
            mk = x.act[(a, b)][k]
            for v in range(x.dims[a]):
                cols.append(mk.col(v))
        if cols:
            amb = (
                FpMatrix(cat.p, list(zip(*cols)), cols=len(cols))
                if x.dims[b]
                else FpMatrix.zeros(cat.p, 0, len(cols))
            )
        else:
            amb = FpMatrix.zeros(cat.p, x.dims[b], 0)
        comps[b] = amb @ tdata[b][1]
    return NatTrans(qf, x, comps)


def unit_q_ev(cat: EnrichedCategory, a: str, m: LeftModule) -> ModuleMap:
    """m -> q_a(m)(a), v -> class of 1 (x) v."""
    qf, tdata = _q_functor_data(cat, a, m)
    d = cat.hom_dim(a, a)
    rows = [[0] * m.dim for _ in range(d * m.dim)]
    for g, coef in enumerate(cat.ids[a]):
        if coef:
            for v in range(m.dim):
                rows[g * m.dim + v][v] = coef
    amb = FpMatrix(cat.p, rows, cols=m.dim)
    return ModuleMap(m, qf.value(a), tdata[a][0] @ amb)


def unit_ev_p(cat: EnrichedCategory, a: str, x: AddFunctor) -> NatTrans:
    """The canonical X => p_a(X(a))."""
    pf, bases = _p_functor_data(cat, a, x.value(a))
    comps = {}
    for b in cat.objects:
        d = cat.hom_dim(b, a)
        images = []
        for j in range(x.dims[b]):
            cols = [x.act[(b, a)][g].col(j) for g in range(d)]
            images.append(
                FpMatrix(cat.p, list(zip(*cols)) if x.dims[a] else [], cols=d)
                if cols
                else FpMatrix.zeros(cat.p, x.dims[a], 0)
            )
        if x.dims[b] and pf.dims[b]:
            comps[b] = _coords_in_basis(cat.p, images, bases[b], pf.dims[b], x.dims[b])
        else:
            comps[b] = FpMatrix.zeros(cat.p, pf.dims[b], x.dims[b])
    return NatTrans(x, pf, comps)


def counit_ev_p(cat: EnrichedCategory, a: str, m: LeftModule) -> ModuleMap:
    """p_a(m)(a) -> m, phi -> phi(identity)."""
    pf, bases = _p_functor_data(cat, a, m)
    idcol = FpMatrix.column(cat.p, cat.ids[a])
    cols = [phi @ idcol for phi in bases[a]]
    mat = (
        FpMatrix(cat.p, [[c.entries[r][0] for c in cols] for r in range(m.dim)], cols=len(cols))
        if cols
        else FpMatrix.zeros(cat.p, m.dim, 0)
    )
    return ModuleMap(pf.value(a), m, mat)


def unit_c_s(x: AddFunctor, a: str) -> NatTrans:
    """X => s_a(c_a(X)), the quotient at a and zero elsewhere."""
    cmod, qmap = reduced_at_c(x, a)
    tgt = stalk_functor(x.cat, a, cmod)
    return NatTrans(x, tgt, {a: qmap.matrix})


def counit_c_s(cat: EnrichedCategory, a: str, m: LeftModule) -> ModuleMap:
    """c_a(s_a(m)) -> m, inverse of the trivial quotient."""
    st = stalk_functor(cat, a, m)
    cmod, qmap = reduced_at_c(st, a)
    return ModuleMap(cmod, m, _left_inverse(qmap.matrix))


def unit_s_k(cat: EnrichedCategory, a: str, m: LeftModule) -> ModuleMap:
    """m -> k_a(s_a(m)), inverse of the trivial inclusion."""
    st = stalk_functor(cat, a, m)
    kmod, incl = reduced_at_k(st, a)
    sol = solve_linear(incl.matrix, FpMatrix.identity(cat.p, m.dim))
    if sol is None:
        raise ValueError("stalk kernel is not everything")
    return ModuleMap(m, kmod, sol)


def counit_s_k(x: AddFunctor, a: str) -> NatTrans:
    """s_a(k_a(X)) => X, the inclusion at a and zero elsewhere."""
    kmod, incl = reduced_at_k(x, a)
    src = stalk_functor(x.cat, a, kmod)
    return NatTrans(src, x, {a: incl.matrix})


def _left_inverse(m: FpMatrix) -> FpMatrix:
    """Left inverse of a square full-rank matrix (equals the inverse)."""
    inv = solve_linear(m, FpMatrix.identity(m.p, m.rows))
    if inv is None:
        raise ValueError("matrix is not invertible")
    return inv


def series_kc(cat: EnrichedCategory, a: str, m: LeftModule):
    """(K, C, K >-> q_a(m) ->> s_a(m), s_a(m) >-> p_a(m) ->> C)."""
    qf = q_functor(cat, a, m)
    st = stalk_functor(cat, a, m)
    pf = p_functor(cat, a, m)
    # counit of (q_a, ev_a) at the stalk: scalar multiplication at a, 0 elsewhere
    eps_all = counit_q_ev(cat, a, st)
    # its source is q_a(st(a)) = q_a(m) since st(a) = m
    kfun, incl = kernel_subfunctor(eps_all)
    ses1 = FunctorSes(kfun, qf, st, incl, eps_all)
    eta = unit_ev_p(cat, a, st)
    cfun, proj = cokernel_functor(eta)
    ses2 = FunctorSes(st, pf, cfun, eta, proj)
    return kfun, cfun, ses1, ses2


# -- adjunction data -----------------------------------------------------------


@dataclass(frozen=True)
class AdjunctionData:
    pair: str
    obj: str
    nat_basis: tuple
    hom_basis: tuple
    transpose: FpMatrix  # nat coordinates -> hom coordinates
    unit: object
    counit: object

    @property
    def is_bijection(self) -> bool:
        return (
            self.transpose.rows == self.transpose.cols
            and self.transpose.rank() == self.transpose.rows
        )


def adjunction_data(cat: EnrichedCategory, pair: str, a: str, m: LeftModule, x: AddFunctor) -> AdjunctionData:
    """Unit/counit components plus the hom-transpose bijection for one pair.

    q_ev: Nat(q_a(m), X) = Hom(m, X(a));   ev_p: Nat(X, p_a(m)) = Hom(X(a), m)
    c_s:  Hom(c_a(X), m) = Nat(X, s_a(m)); s_k:  Nat(s_a(m), X) = Hom(m, k_a(X))
    """
    from .algmod import hom_basis as module_hom_basis
    from .algmod import map_coords as module_map_coords

    p = cat.p
    if pair == "q_ev":
        nats = nat_space(q_functor(cat, a, m), x)
        homs = module_hom_basis(m, x.value(a))
        unit = unit_q_ev(cat, a, m)
        cols = [
            list(module_map_coords(homs, ModuleMap(m, x.value(a), n.components[a] @ unit.matrix)))
            for n in nats
        ]
        counit = counit_q_ev(cat, a, x)
    elif pair == "ev_p":
        nats = nat_space(x, p_functor(cat, a, m))
        homs = module_hom_basis(x.value(a), m)
        counit = counit_ev_p(cat, a, m)
        cols = [
            list(module_map_coords(homs, ModuleMap(x.value(a), m, counit.matrix @ n.components[a])))
            for n in nats
        ]
        unit = unit_ev_p(cat, a, x)
    elif pair == "c_s":
        cmod, qmap = reduced_at_c(x, a)
        homs = module_hom_basis(cmod, m)
        st = stalk_functor(cat, a, m)
        nats = nat_space(x, st)
        # here the transpose runs Hom -> Nat
        cols = [
            list(nat_coords(nats, NatTrans(x, st, {a: h.matrix @ qmap.matrix})))
            for h in homs
        ]
        tr = (
            FpMatrix(p, list(zip(*cols)), cols=len(cols))
            if cols and nats
            else FpMatrix.zeros(p, len(nats), len(homs))
        )
        return AdjunctionData(pair, a, tuple(nats), tuple(homs), tr, unit_c_s(x, a), counit_c_s(cat, a, m))
    elif pair == "s_k":
        st = stalk_functor(cat, a, m)
        nats = nat_space(st, x)
        kmod, incl = reduced_at_k(x, a)
        homs = module_hom_basis(m, kmod)
        cols = []
        for n in nats:
            sol = solve_linear(incl.matrix, n.components[a])
            if sol is None:
                raise ValueError("stalk transformation does not land in the kernel")
            cols.append(list(module_map_coords(homs, ModuleMap(m, kmod, sol))))
        unit = unit_s_k(cat, a, m)
        counit = counit_s_k(x, a)
        tr = (
            FpMatrix(p, list(zip(*cols)), cols=len(cols))
            if cols and homs
            else FpMatrix.zeros(p, len(homs), len(nats))
        )
        return AdjunctionData(pair, a, tuple(nats), tuple(homs), tr, unit, counit)
    else:
        raise ValueError(f"unknown adjunction pair {pair!r}")
    tr = (
        FpMatrix(p, list(zip(*cols)), cols=len(cols))
        if cols and homs
        else FpMatrix.zeros(p, len(homs), len(nats))
    )
    return AdjunctionData(pair, a, tuple(nats), tuple(homs), tr, unit, counit)


# -- the category-algebra bridge ------------------------------------------------


def functor_to_module(calg: CategoryAlgebra, cat: EnrichedCategory, x: AddFunctor) -> LeftModule:
    """The block-graded module over the category algebra carried by a functor."""
    p = cat.p
    offs = {}
    total = 0
    for a in cat.objects:
        offs[a] = total
        total += x.dims[a]
    acts = []
    lam = calg.algebra
    for idx in range(lam.dim):
        a, b, k = calg.block_of(idx)
        rows = [[0] * total for _ in range(total)]
        blk = x.act[(a, b)][k]
        for r in range(x.dims[b]):
            for c in range(x.dims[a]):
                rows[offs[b] + r][offs[a] + c] = blk.entries[r][c]
        acts.append(FpMatrix(p, rows, cols=total))
    return LeftModule(lam, total, tuple(acts))


def module_to_functor(calg: CategoryAlgebra, cat: EnrichedCategory, m: LeftModule) -> AddFunctor:
    """Inverse bridge: split a category-algebra module along the identity idempotents."""
    p = cat.p
    lam = calg.algebra
    basis_cols = {}
    dims = {}
    for a in cat.objects:
        vec = [0] * lam.dim
        off = calg.offsets[(a, a)]
        for t, v in enumerate(cat.ids[a]):
            vec[off + t] = v
        e_a = m.act_vec(vec)
        image_rows = [list(e_a.col(j)) for j in range(e_a.cols)]
        sb = span_basis(p, image_rows, m.dim)
        basis_cols[a] = sb.basis.transpose()
        dims[a] = sb.dim
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            mats = []
            for k in range(d):
                flat = m.action[calg.flat_index(a, b, k)]
                sol = solve_linear(basis_cols[b], flat @ basis_cols[a])
                if sol is None:
                    raise ValueError("module is not block graded")
                mats.append(sol)
            act[(a, b)] = tuple(mats)
    return AddFunctor(cat, dims, act)


def nat_to_module_map(calg: CategoryAlgebra, cat: EnrichedCategory, alpha: NatTrans) -> ModuleMap:
    src = functor_to_module(calg, cat, alpha.source)
    tgt = functor_to_module(calg, cat, alpha.target)
    p = cat.p
    rows = [[0] * src.dim for _ in range(tgt.dim)]
    so = to_ = 0
    s_off, t_off = {}, {}
    for a in cat.objects:
        s_off[a] = so
        t_off[a] = to_
        so += alpha.source.dims[a]
        to_ += alpha.target.dims[a]
    for a in cat.objects:
        blk = alpha.components[a]
        for r in range(blk.rows):
            for c in range(blk.cols):
                rows[t_off[a] + r][s_off[a] + c] = blk.entries[r][c]
    return ModuleMap(src, tgt, FpMatrix(p, rows, cols=src.dim))


def functor_ses_to_module_ses(calg: CategoryAlgebra, cat: EnrichedCategory, e: FunctorSes):
    from .algmod import SesRecord

    return SesRecord(
        functor_to_module(calg, cat, e.left),
        functor_to_module(calg, cat, e.middle),
        functor_to_module(calg, cat, e.right),
        nat_to_module_map(calg, cat, e.inj),
        nat_to_module_map(calg, cat, e.surj),
    )


# -- the functor-side homological engine ----------------------------------------


def functor_free_presentation(x: AddFunctor) -> FunctorSes:
    """K >-> P ->> X with P a sum of q_a of free covers of the values."""
    cat = x.cat
    p = cat.p
    summands = []
    data = []
    for a in cat.objects:
        if not x.dims[a]:
            continue
        pres = free_presentation(x.value(a))
        qf, tdata = _q_functor_data(cat, a, pres.middle)
        summands.append(qf)
        data.append((a, pres, tdata))
    if not summands:
        z = zero_functor(cat)
        zn = zero_nat(z, z)
        return FunctorSes(z, z, x, zn, zero_nat(z, x))
    total, injs, projs = direct_sum_functors(summands)
    comps = {}
    for b in cat.objects:
        pieces = []
        for (a, pres, tdata) in data:
            d = cat.hom_dim(a, b)
            cols = []
            for k in range(d):
                mk = x.act[(a, b)][k]
                for v in range(pres.middle.dim):
                    cols.append((mk @ pres.surj.matrix).col(v))
            if cols:
                amb = (
                    FpMatrix(p, list(zip(*cols)), cols=len(cols))
                    if x.dims[b]
                    else FpMatrix.zeros(p, 0, len(cols))
                )
            else:
                amb = FpMatrix.zeros(p, x.dims[b], 0)
            pieces.append(amb @ tdata[b][1])
        comp = pieces[0]
        for w in pieces[1:]:
            comp = hstack(comp, w)
        comps[b] = comp
    alpha = NatTrans(total, x, comps)
    ker, incl = kernel_subfunctor(alpha)
    return FunctorSes(ker, total, x, incl, alpha)


def pushout_functor_ses(e: FunctorSes, f: NatTrans) -> FunctorSes:
    """Levelwise pushout of e along f: e.left => N'."""
    if f.source != e.left:
        raise ValueError("pushout map must start at the left term")
    cat = e.left.cat
    p = cat.p
    nprime = f.target
    projs, secs = {}, {}
    for a in cat.objects:
        d_mid, d_n = e.middle.dims[a], nprime.dims[a]
        rel_rows = []
        for k in range(e.left.dims[a]):
            rel_rows.append(
                list(e.inj.components[a].col(k))
                + [(-v) % p for v in f.components[a].col(k)]
            )
        sb = span_basis(p, rel_rows, d_mid + d_n)
        proj, sec = quotient_space(d_mid + d_n, sb)
        projs[a] = proj
        secs[a] = sec
    dims = {a: projs[a].rows for a in cat.objects}
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            act[(a, b)] = tuple(
                projs[b]
                @ block_diag(p, [e.middle.act[(a, b)][k], nprime.act[(a, b)][k]])
                @ secs[a]
                for k in range(d)
            )
    q = AddFunctor(cat, dims, act)
    inj_comps, surj_comps = {}, {}
    for a in cat.objects:
        d_mid, d_n = e.middle.dims[a], nprime.dims[a]
        emb = vstack(FpMatrix.zeros(p, d_mid, d_n), FpMatrix.identity(p, d_n))
        inj_comps[a] = projs[a] @ emb
        pick = hstack(FpMatrix.identity(p, d_mid), FpMatrix.zeros(p, d_mid, d_n))
        surj_comps[a] = e.surj.components[a] @ pick @ secs[a]
    return FunctorSes(
        nprime, q, e.right, NatTrans(nprime, q, inj_comps), NatTrans(q, e.right, surj_comps)
    )


def pullback_functor_ses(e: FunctorSes, g: NatTrans) -> FunctorSes:
    """Levelwise pullback of e along g: C' => e.right."""
    if g.target != e.right:
        raise ValueError("pullback map must end at the right term")
    cat = e.left.cat
    p = cat.p
    cprime = g.source
    incls = {}
    for a in cat.objects:
        test = hstack(e.surj.components[a], -g.components[a])
        kb = kernel_basis(test)
        incls[a] = kb.basis.transpose()
    dims = {a: incls[a].cols for a in cat.objects}
    act = {}
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if not d:
                continue
            mats = []
            for k in range(d):
                big = block_diag(p, [e.middle.act[(a, b)][k], cprime.act[(a, b)][k]])
                sol = solve_linear(incls[b], big @ incls[a])
                if sol is None:
                    raise ValueError("pullback is not a subfunctor")
                mats.append(sol)
            act[(a, b)] = tuple(mats)
    pb = AddFunctor(cat, dims, act)
    inj_comps, surj_comps = {}, {}
    for a in cat.objects:
        d_mid = e.middle.dims[a]
        d_c = cprime.dims[a]
        top = vstack(e.inj.components[a], FpMatrix.zeros(p, d_c, e.left.dims[a]))
        sol = solve_linear(incls[a], top)
        if sol is None:
            raise ValueError("left term does not land in the pullback")
        inj_comps[a] = sol
        pick = hstack(FpMatrix.zeros(p, d_c, d_mid), FpMatrix.identity(p, d_c))
        surj_comps[a] = pick @ incls[a]
    return FunctorSes(
        e.left, pb, cprime, NatTrans(e.left, pb, inj_comps), NatTrans(pb, cprime, surj_comps)
    )


class FunctorEngine:
    """Functor-category face of the generic Ext engine."""

    def __init__(self, cat: EnrichedCategory):
        self.cat = cat
        self.p = cat.p

    def hom_basis(self, x, y):
        return nat_space(x, y)

    def map_coords(self, basis, alpha):
        return nat_coords(basis, alpha)

    def map_combination(self, basis, coords, source, target):
        p = self.p
        comps = {
            a: FpMatrix.zeros(p, target.dims[a], source.dims[a])
            for a in self.cat.objects
        }
        for c, b in zip(coords, basis):
            if c % p:
                for a in self.cat.objects:
                    comps[a] = comps[a] + b.components[a].scale(c)
        return NatTrans(source, target, comps)

    def free_presentation(self, x):
        return functor_free_presentation(x)

    def compose(self, g, f):
        return g.compose(f)

    def identity(self, x):
        return identity_nat(x)

    def pushout(self, ses, f):
        return pushout_functor_ses(ses, f)

    def pullback(self, ses, g):
        return pullback_functor_ses(ses, g)

    def lift_through_epi(self, epi, g):
        conds = [
            (a, epi.components[a], g.components[a]) for a in self.cat.objects
        ]
        lam = solve_nat(g.source, epi.source, conds)
        if lam is None:
            raise ValueError("no lift exists")
        return lam

    def factor_through_mono(self, mono, g):
        comps = {}
        for a in self.cat.objects:
            sol = solve_linear(mono.components[a], g.components[a])
            if sol is None:
                raise ValueError("map does not factor through the mono")
            comps[a] = sol
        return NatTrans(g.source, mono.source, comps)

    def is_split(self, ses):
        ident = [
            (a, ses.surj.components[a], FpMatrix.identity(self.p, ses.right.dims[a]))
            for a in self.cat.objects
        ]
        return solve_nat(ses.right, ses.middle, ident) is not None

    def is_zero_obj(self, x):
        return x.is_zero()


def functor_ext(x: AddFunctor, y: AddFunctor, degree: int):
    """Ext^degree in the functor category, via the shared syzygy engine."""
    from .algmod import ExtSpace

    if x.cat != y.cat:
        raise ValueError("functors live on different categories")
    return ExtSpace(FunctorEngine(x.cat), x, y, degree)


def is_projective_functor(x: AddFunctor) -> bool:
    """Splitting of the canonical projective cover by induced functors."""
    return FunctorEngine(x.cat).is_split(functor_free_presentation(x))


def functor_injective_copresentation(x: AddFunctor) -> FunctorSes:
    """X >-> E ->> coker with E a product of p_a of injective covers."""
    from .algmod import injective_copresentation

    cat = x.cat
    summands = []
    monos = []
    for a in cat.objects:
        if not x.dims[a]:
            continue
        mono = injective_copresentation(x.value(a))
        pf = p_functor(cat, a, mono.target)
        eta = unit_ev_p(cat, a, x)
        step = p_map_functor(cat, a, mono)
        summands.append(pf)
        monos.append(step.compose(eta))
    if not summands:
        z = zero_functor(cat)
        return FunctorSes(x, z, z, zero_nat(x, z), zero_nat(z, z))
    total, injs, projs = direct_sum_functors(summands)
    comps = {}
    for b in cat.objects:
        piece = monos[0].components[b]
        for m in monos[1:]:
            piece = vstack(piece, m.components[b])
        comps[b] = piece
    iota = NatTrans(x, total, comps)
    cok, proj = cokernel_functor(iota)
    return FunctorSes(x, total, cok, iota, proj)


def is_injective_functor(x: AddFunctor) -> bool:
    """Splitting of the canonical embedding into induced injectives.

    X is injective iff X >-> E splits; a section of the cokernel
    projection exists exactly when a retraction of the embedding does.
    """
    e = functor_injective_copresentation(x)
    if e.middle.is_zero():
        return x.is_zero()
    cat = x.cat
    sec = solve_nat(
        e.right,
        e.middle,
        [
            (a, e.surj.components[a], FpMatrix.identity(cat.p, e.right.dims[a]))
            for a in cat.objects
        ],
    )
    return sec is not None
