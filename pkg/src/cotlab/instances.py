"""Constructors for concrete categories and exhaustive test universes.

The shipped shapes are: truncated chain categories (functors are bounded
chain complexes), the divisibility-window category on {1..N} with
Hom(n, m) nonzero iff m <= n <= 2m, Morita-context categories with zero
trace ideals (formal triangular matrix rings as the M = 0 case),
one-object categories, and scalar-restriction handles along an algebra
morphism.  Enumeration routines list modules and functors up to
isomorphism with deterministic output order.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence

from .algmod import (
    Algebra,
    AlgebraMorphism,
    Bimodule,
    LeftModule,
    hom_basis,
    validate_algebra,
    validate_left_module,
)
from .encat import EnrichedCategory, endo_algebra, validate_category
from .functorcat import AddFunctor, nat_space, validate_functor
from .linalg import FpMatrix


class BoundExceeded(RuntimeError):
    """An enumeration or search space grew past its documented cap."""


# -- named algebras ------------------------------------------------------------


def gf(p: int) -> Algebra:
    return Algebra(p, [[[1]]], [1])


def dual_numbers(p: int = 2) -> Algebra:
    """F_p[x]/(x^2), basis (1, x)."""
    return Algebra(p, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], [1, 0])


def upper_triangular(p: int = 2) -> Algebra:
    """2x2 upper triangular matrices, basis (e11, e22, e12)."""
    z = [0, 0, 0]
    e11, e22, e12 = [1, 0, 0], [0, 1, 0], [0, 0, 1]
    struct = [
        [e11, z, e12],
        [z, e22, z],
        [z, e12, z],
    ]
    return Algebra(p, struct, [1, 1, 0])


def algebra_by_name(name: str, p: int) -> Algebra:
    if name in ("gf", "field"):
        return gf(p)
    if name == "dual_numbers":
        return dual_numbers(p)
    if name == "upper_triangular":
        return upper_triangular(p)
    raise KeyError(f"unknown algebra name {name!r}")


def simple_over_dual_numbers(p: int = 2) -> LeftModule:
    a = dual_numbers(p)
    return LeftModule(a, 1, (FpMatrix.identity(p, 1), FpMatrix.zeros(p, 1, 1)))


# -- categories ----------------------------------------------------------------


def scalar_category(p: int, objects: Sequence[str], has_hom: Callable[[str, str], bool]) -> EnrichedCategory:
    """Hom spaces of dimension <= 1 with scalar multiplication as composition.

    Composites into an absent hom space are the forced zero map; the
    validator is responsible for confirming this choice is associative
    for the given support.
    """
    hom = {}
    for a in objects:
        for b in objects:
            hom[(a, b)] = 1 if (a == b or has_hom(a, b)) else 0
    comp = {}
    for a in objects:
        for b in objects:
            if not hom[(a, b)]:
                continue
            for c in objects:
                if not hom[(b, c)]:
                    continue
                target = ((1,),) if hom[(a, c)] else ((),)
                comp[(a, b, c)] = (target,)
    ids = {a: (1,) for a in objects}
    return EnrichedCategory(p, objects, hom, comp, ids)


def chain_category(p: int, length: int) -> EnrichedCategory:
    """Objects 0..length; morphisms i -> i-1; functors are chain complexes."""
    objects = [str(i) for i in range(length + 1)]
    return scalar_category(
        p, objects, lambda a, b: int(a) == int(b) + 1
    )


def fib_category(p: int, max_object: int) -> EnrichedCategory:
    """Objects 1..max_object with Hom(n, m) nonzero iff m <= n <= 2m."""
    objects = [str(i) for i in range(1, max_object + 1)]
    return scalar_category(
        p, objects, lambda a, b: int(b) <= int(a) <= 2 * int(b)
    )


def morita_category(t: Algebra, s: Algebra, n: Optional[Bimodule], m: Optional[Bimodule]) -> EnrichedCategory:
    """Two objects a, b with End(a) = t, End(b) = s, Hom(a,b) = n, Hom(b,a) = m.

    Trace ideals are forced to zero: composites a -> b -> a and
    b -> a -> b vanish, which is exactly the shape the stalk machinery
    needs.
    """
    p = t.p
    n_dim = n.dim if n is not None else 0
    m_dim = m.dim if m is not None else 0
    if n is not None and (n.left_alg != s or n.right_alg != t):
        raise ValueError("Hom(a,b) must be an (S, T)-bimodule")
    if m is not None and (m.left_alg != t or m.right_alg != s):
        raise ValueError("Hom(b,a) must be a (T, S)-bimodule")
    objects = ("a", "b")
    hom = {("a", "a"): t.dim, ("b", "b"): s.dim, ("a", "b"): n_dim, ("b", "a"): m_dim}
    comp = {
        ("a", "a", "a"): t.struct,
        ("b", "b", "b"): s.struct,
    }

    def col(mat: FpMatrix, j: int) -> tuple:
        return tuple(mat.entries[r][j] for r in range(mat.rows))

    if n is not None and n_dim:
        comp[("a", "a", "b")] = tuple(
            tuple(col(n.right_action[f], g) for f in range(t.dim)) for g in range(n_dim)
        )
        comp[("a", "b", "b")] = tuple(
            tuple(col(n.left_action[g], f) for f in range(n_dim)) for g in range(s.dim)
        )
    if m is not None and m_dim:
        comp[("b", "b", "a")] = tuple(
            tuple(col(m.right_action[f], g) for f in range(s.dim)) for g in range(m_dim)
        )
        comp[("b", "a", "a")] = tuple(
            tuple(col(m.left_action[g], f) for f in range(m_dim)) for g in range(t.dim)
        )
    ids = {"a": t.unit, "b": s.unit}
    return EnrichedCategory(p, objects, hom, comp, ids)


def triangular_category(p: int = 2) -> EnrichedCategory:
    """Two objects with one arrow a -> b; the 2x2 triangular matrix shape."""
    k = gf(p)
    one = FpMatrix.identity(p, 1)
    n = Bimodule(k, k, 1, (one,), (one,))
    return morita_category(k, k, n, None)


def morita_dual_numbers_category(p: int = 2) -> EnrichedCategory:
    """Zero-trace Morita shape with End(a) = F_p[x]/(x^2), End(b) = F_p."""
    t = dual_numbers(p)
    s = gf(p)
    one = FpMatrix.identity(p, 1)
    zero = FpMatrix.zeros(p, 1, 1)
    # Hom(a,b) = F_p as an (S, T)-bimodule: x acts by zero on the right
    n = Bimodule(s, t, 1, (one,), (one, zero))
    return morita_category(t, s, n, None)


def one_object_category(alg: Algebra) -> EnrichedCategory:
    objects = ("*",)
    hom = {("*", "*"): alg.dim}
    comp = {("*", "*", "*"): alg.struct}
    return EnrichedCategory(alg.p, objects, hom, comp, {"*": alg.unit})


def augmentation_morphism(p: int = 2) -> AlgebraMorphism:
    """F_p[x]/(x^2) -> F_p sending x to 0."""
    return AlgebraMorphism(dual_numbers(p), gf(p), FpMatrix(p, [[1, 0]]))


def build_instance(spec: dict):
    """Build a category or an algebra-morphism handle from a plain dict."""
    kind = spec.get("kind")
    p = int(spec.get("p", spec.get("prime", 2)))
    if kind == "chain":
        return chain_category(p, int(spec["length"]))
    if kind == "fib":
        return fib_category(p, int(spec["maxObject"]))
    if kind == "oneObject":
        return one_object_category(algebra_by_name(spec["algebra"], p))
    if kind == "triangular":
        return triangular_category(p)
    if kind == "morita":
        t = algebra_by_name(spec.get("T", "dual_numbers"), p)
        s = algebra_by_name(spec.get("S", "gf"), p)
        if spec.get("T", "dual_numbers") == "dual_numbers" and spec.get("S", "gf") == "gf":
            return morita_dual_numbers_category(p)
        if t == gf(p) and s == gf(p):
            return triangular_category(p)
        raise ValueError("unsupported morita parameters; supply explicit bimodules in code")
    if kind == "ringMor":
        name = spec.get("name", "augmentation")
        if name == "augmentation":
            return augmentation_morphism(p)
        raise ValueError(f"unknown ring morphism {name!r}")
    raise ValueError(f"unknown instance kind {kind!r}")


# -- module enumeration ---------------------------------------------------------


def _all_matrices(p: int, d: int) -> list:
    if p ** (d * d) > 4096:
        raise BoundExceeded(f"matrix scan p^{d * d} too large")
    out = []
    for flat in itertools.product(range(p), repeat=d * d):
        out.append(FpMatrix(p, [flat[i * d : (i + 1) * d] for i in range(d)], cols=d))
    return out


def _module_structures(alg: Algebra, d: int):
    """DFS over unital action tuples with incremental constraint checks."""
    p = alg.p
    if d == 0:
        yield LeftModule.zero(alg)
        return
    cands = _all_matrices(p, d)
    n = alg.dim
    # pair (i, j) checkable at level k when i, j <= k and the support of
    # struct[i][j] is contained in 0..k
    schedule = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            support = [t for t, v in enumerate(alg.struct[i][j]) if v]
            level = max([i, j] + support)
            schedule[level].append((i, j))
    unit_level = max(
        [t for t, v in enumerate(alg.unit) if v], default=0
    )
    ident = FpMatrix.identity(p, d)

    acts: list = [None] * n

    def act_vec(vec):
        out = FpMatrix.zeros(p, d, d)
        for t, c in enumerate(vec):
            if c % p:
                out = out + acts[t].scale(c)
        return out

    def dfs(level):
        if level == n:
            yield LeftModule(alg, d, tuple(acts))
            return
        for cand in cands:
            acts[level] = cand
            ok = True
            if level == unit_level:
                vec = alg.unit
                if all(t <= level for t, v in enumerate(vec) if v):
                    if act_vec(vec) != ident:
                        ok = False
            if ok:
                for (i, j) in schedule[level]:
                    if acts[i] @ acts[j] != act_vec(alg.struct[i][j]):
                        ok = False
                        break
            if ok:
                yield from dfs(level + 1)
        acts[level] = None

    yield from dfs(0)


def modules_isomorphic(m: LeftModule, n: LeftModule, cap: int = 1 << 16) -> bool:
    """Search the hom space for an invertible intertwiner."""
    if m.dim != n.dim:
        return False
    if m.dim == 0:
        return True
    if m == n:
        return True
    basis = hom_basis(m, n)
    h = len(basis)
    if h == 0:
        return False
    p = m.algebra.p
    if p ** h > cap:
        raise BoundExceeded(f"isomorphism search p^{h} too large")
    for coeffs in itertools.product(range(p), repeat=h):
        if not any(coeffs):
            continue
        total = FpMatrix.zeros(p, m.dim, m.dim)
        for c, b in zip(coeffs, basis):
            if c:
                total = total + b.matrix.scale(c)
        if total.rank() == m.dim:
            return True
    return False


def _module_key(m: LeftModule) -> tuple:
    return (m.dim, tuple(a.rank() for a in m.action))


@lru_cache(maxsize=None)
def enumerate_modules(alg: Algebra, max_dim: int) -> tuple:
    """All left modules of dimension <= max_dim, one per isomorphism class.

    Deterministic: representatives are first-found in scan order.
    """
    reps: List[LeftModule] = []
    buckets: Dict[tuple, list] = {}
    for d in range(max_dim + 1):
        for cand in _module_structures(alg, d):
            key = _module_key(cand)
            bucket = buckets.setdefault(key, [])
            if any(modules_isomorphic(cand, r) for r in bucket):
                continue
            bucket.append(cand)
            reps.append(cand)
    return tuple(reps)


# -- functor enumeration ---------------------------------------------------------


def _block_order(cat: EnrichedCategory):
    idx = {a: i for i, a in enumerate(cat.objects)}
    blocks = [
        (a, b)
        for a in cat.objects
        for b in cat.objects
        if a != b and cat.hom_dim(a, b)
    ]
    blocks.sort(key=lambda ab: (abs(idx[ab[0]] - idx[ab[1]]), idx[ab[0]], idx[ab[1]]))
    return blocks


def _composition_schedule(cat: EnrichedCategory, blocks):
    """For each block position, the (x, y, z) triples newly checkable there."""
    pos = {blk: t for t, blk in enumerate(blocks)}

    def when(blk):
        # diagonal blocks are known before the scan starts
        if blk[0] == blk[1]:
            return -1
        if blk not in pos:
            return None  # zero hom space: nothing to assign
        return pos[blk]

    schedule = [[] for _ in range(len(blocks))]
    objs = cat.objects
    for x in objs:
        for y in objs:
            if not cat.hom_dim(x, y):
                continue
            for z in objs:
                if not cat.hom_dim(y, z):
                    continue
                if x == y and y == z:
                    continue
                t1 = when((x, y))
                t2 = when((y, z))
                tensor = cat.comp_tensor(x, y, z)
                tensor_zero = all(all(not any(cell) for cell in row) for row in tensor)
                t3 = -1 if (x == z or tensor_zero) else when((x, z))
                times = [t for t in (t1, t2, t3) if t is not None]
                level = max(times)
                if level >= 0:
                    schedule[level].append((x, y, z))
    return schedule


def _check_triple(cat, x_dims, acts_of, x, y, z) -> bool:
    p = cat.p
    tensor = cat.comp_tensor(x, y, z)
    acts_xy = acts_of(x, y)
    acts_yz = acts_of(y, z)
    acts_xz = None
    for fi in range(cat.hom_dim(x, y)):
        mf = acts_xy[fi]
        for gi in range(cat.hom_dim(y, z)):
            gf = tensor[gi][fi]
            lhs = acts_yz[gi] @ mf
            nz = [(t, c) for t, c in enumerate(gf) if c % p]
            if not nz:
                if not lhs.is_zero():
                    return False
                continue
            if acts_xz is None:
                acts_xz = acts_of(x, z)
            if len(nz) == 1 and nz[0][1] == 1:
                if lhs != acts_xz[nz[0][0]]:
                    return False
                continue
            rhs = FpMatrix.zeros(p, x_dims[z], x_dims[x])
            for t, c in nz:
                rhs = rhs + acts_xz[t].scale(c)
            if lhs != rhs:
                return False
    return True


@lru_cache(maxsize=None)
def _rect_matrices(p: int, rows: int, cols: int) -> tuple:
    cell = rows * cols
    if p ** cell > 4096:
        raise BoundExceeded(f"block scan p^{cell} too large")
    out = []
    for flat in itertools.product(range(p), repeat=cell):
        out.append(FpMatrix(p, [flat[i * cols : (i + 1) * cols] for i in range(rows)], cols=cols))
    return tuple(out)


def _raw_functors(cat: EnrichedCategory, max_dim: int):
    """Every functor with per-object dimension <= max_dim, in scan order.

    Yields (dims dict, module choice tuple, assigned block dict); callers
    build AddFunctor values lazily.
    """
    blocks = _block_order(cat)
    schedule = _composition_schedule(cat, blocks)
    per_object = {}
    for a in cat.objects:
        alg = endo_algebra(cat, a)
        by_dim = {}
        for m in enumerate_modules(alg, max_dim):
            by_dim.setdefault(m.dim, []).append(m)
        per_object[a] = by_dim

    objs = cat.objects
    nblocks = len(blocks)
    for dims in itertools.product(range(max_dim + 1), repeat=len(objs)):
        dim_of = dict(zip(objs, dims))
        choices = [per_object[a].get(dim_of[a], []) for a in objs]
        if any(not c for c in choices):
            continue
        # hoist per-level option lists for this dim tuple
        level_options = []
        for (a, b) in blocks:
            d = cat.hom_dim(a, b)
            mats = _rect_matrices(cat.p, dim_of[b], dim_of[a])
            if len(mats) ** d > 1 << 20:
                raise BoundExceeded("functor block scan too large")
            level_options.append(tuple(itertools.product(mats, repeat=d)))
        for mods_idx in itertools.product(*[range(len(c)) for c in choices]):
            mod_of = {a: per_object[a][dim_of[a]][i] for a, i in zip(objs, mods_idx)}
            assigned: Dict[tuple, tuple] = {}

            def acts_of(u, v):
                if u == v:
                    return mod_of[u].action
                return assigned[(u, v)]

            def dfs(level):
                if level == nblocks:
                    yield dim_of, mods_idx, dict(assigned)
                    return
                key = blocks[level]
                checks = schedule[level]
                for opt in level_options[level]:
                    assigned[key] = opt
                    ok = True
                    for (x, y, z) in checks:
                        if not _check_triple(cat, dim_of, acts_of, x, y, z):
                            ok = False
                            break
                    if ok:
                        yield from dfs(level + 1)
                del assigned[key]

            if nblocks:
                yield from dfs(0)
            else:
                yield dim_of, mods_idx, {}


def functors_isomorphic(x: AddFunctor, y: AddFunctor, cap: int = 1 << 18) -> bool:
    """Search the natural-transformation space for an objectwise-invertible one."""
    if x.dims != y.dims:
        return False
    if x == y:
        return True
    if x.total_dim() == 0:
        return True
    if x.cat.p == 2:
        return _functors_isomorphic_gf2(x, y, cap)
    basis = nat_space(x, y)
    h = len(basis)
    if h == 0:
        return False
    p = x.cat.p
    if p ** h > cap:
        raise BoundExceeded(f"functor isomorphism search p^{h} too large")
    objs = [a for a in x.cat.objects if x.dims[a]]
    for coeffs in itertools.product(range(p), repeat=h):
        if not any(coeffs):
            continue
        good = True
        for a in objs:
            total = FpMatrix.zeros(p, y.dims[a], x.dims[a])
            for c, b in zip(coeffs, basis):
                if c:
                    total = total + b.components[a].scale(c)
            if total.rank() != x.dims[a]:
                good = False
                break
        if good:
            return True
    return False


def _functors_isomorphic_gf2(x: AddFunctor, y: AddFunctor, cap: int) -> bool:
    from cotlab.functorcat import _nat_packed_rows
    from cotlab.linalg import kernel_packed, rank_packed

    offsets, total, rows = _nat_packed_rows(x, y)
    if total == 0:
        return True
    kern = kernel_packed(rows, total)
    h = len(kern)
    if h == 0:
        return False
    objs = [(offsets[a], x.dims[a]) for a in x.cat.objects if x.dims[a]]

    def invertible(v) -> bool:
        for off, d in objs:
            mask = (1 << d) - 1
            if d == 1:
                if not (v >> off) & 1:
                    return False
            elif d == 2:
                r0 = (v >> off) & 3
                r1 = (v >> (off + 2)) & 3
                if not r0 or not r1 or r0 == r1:
                    return False
            else:
                rws = [(v >> (off + r * d)) & mask for r in range(d)]
                if rank_packed(rws, d) != d:
                    return False
        return True

    space = 1 << h
    limit = min(space, cap)
    combo = 0
    for i in range(1, limit):
        combo ^= kern[(i & -i).bit_length() - 1]
        if invertible(combo):
            return True
    if space <= limit:
        return False
    # search budget exhausted without a verdict: compare Krull-Schmidt
    # decompositions instead (summands have small endomorphism spaces)
    return _isomorphic_by_decomposition(x, y)


def _first_vector_outside(p, kernel_rows, span_rows, ambient):
    """First kernel basis vector not inside the given span, or None."""
    from cotlab.linalg import FpMatrix as _M, solve_linear

    if not kernel_rows:
        return None
    if not span_rows:
        return list(kernel_rows[0])
    cols = _M(p, list(zip(*span_rows)), cols=len(span_rows))
    for v in kernel_rows:
        if solve_linear(cols, _M.column(p, list(v))) is None:
            return list(v)
    return None


def _peel_stalk(x: AddFunctor):
    """Split off a one-dimensional stalk summand at a field fiber, if any."""
    from cotlab.linalg import kernel_basis, span_basis, solve_linear

    cat = x.cat
    p = cat.p
    for a in cat.objects:
        if not x.dims[a] or cat.hom_dim(a, a) != 1:
            continue
        if x.act[(a, a)][0] != FpMatrix.identity(p, x.dims[a]):
            continue
        out_rows = []
        for b in cat.objects:
            if b == a:
                continue
            for k in range(cat.hom_dim(a, b)):
                out_rows.extend(list(r) for r in x.act[(a, b)][k].entries)
        if out_rows:
            kb = kernel_basis(FpMatrix(p, out_rows, cols=x.dims[a]))
            kern_rows = [list(r) for r in kb.basis.entries]
        else:
            kern_rows = [
                [1 if j == i else 0 for j in range(x.dims[a])] for i in range(x.dims[a])
            ]
        in_rows = []
        for b in cat.objects:
            if b == a:
                continue
            for k in range(cat.hom_dim(b, a)):
                m = x.act[(b, a)][k]
                in_rows.extend(list(m.col(j)) for j in range(m.cols))
        in_span = span_basis(p, in_rows, x.dims[a])
        v = _first_vector_outside(p, kern_rows, [list(r) for r in in_span.basis.entries], x.dims[a])
        if v is None:
            continue
        # complement W containing the incoming image with v outside
        w_rows = [list(r) for r in in_span.basis.entries]
        for j in range(x.dims[a]):
            e = [1 if t == j else 0 for t in range(x.dims[a])]
            trial = w_rows + [e]
            sb = span_basis(p, trial, x.dims[a])
            if sb.dim == len(w_rows):
                continue
            if _first_vector_outside(p, [v], [list(r) for r in sb.basis.entries], x.dims[a]) is None:
                continue  # adding e would swallow v
            w_rows = [list(r) for r in sb.basis.entries]
        # new basis: v followed by W
        u_cols = FpMatrix(p, list(zip(*([v] + w_rows))), cols=x.dims[a])
        u_inv = solve_linear(u_cols, FpMatrix.identity(p, x.dims[a]))
        # conjugate the blocks at a and drop the first coordinate
        rest_dims = dict(x.dims)
        rest_dims[a] = x.dims[a] - 1
        rest_act = {}
        for s in cat.objects:
            for t in cat.objects:
                d = cat.hom_dim(s, t)
                if not d:
                    continue
                mats = []
                for k in range(d):
                    m = x.act[(s, t)][k]
                    if s == a:
                        m = m @ u_cols
                        m = FpMatrix(p, [row[1:] for row in m.entries], cols=rest_dims[a])
                    if t == a:
                        m = u_inv @ m
                        m = FpMatrix(p, list(m.entries[1:]), cols=m.cols)
                    mats.append(m)
                rest_act[(s, t)] = tuple(mats)
        from cotlab.encat import endo_algebra as _endo

        stalk_dims = {o: (1 if o == a else 0) for o in cat.objects}
        stalk_act = {(a, a): (FpMatrix.identity(p, 1),)}
        stalk = AddFunctor(cat, stalk_dims, stalk_act)
        rest = AddFunctor(cat, rest_dims, rest_act)
        return [stalk, rest]
    return None


def _try_split(x: AddFunctor):
    """One step of direct-sum splitting, or None if none was found."""
    from cotlab.functorcat import NatTrans, image_subfunctor, kernel_subfunctor, nat_space

    peeled = _peel_stalk(x)
    if peeled is not None:
        return peeled
    ends = nat_space(x, x)
    total = x.total_dim()
    candidates = list(ends)
    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            candidates.append(
                NatTrans(
                    x,
                    x,
                    {
                        a: ends[i].components[a] + ends[j].components[a]
                        for a in x.cat.objects
                    },
                )
            )
    for f in candidates:
        power = f
        for _ in range(total):
            nxt = power.compose(power)
            same = all(
                (nxt.components[a]).rank() == power.components[a].rank()
                for a in x.cat.objects
            )
            power = nxt
            if same:
                break
        ranks = sum(power.components[a].rank() for a in x.cat.objects)
        if 0 < ranks < total:
            img, _ = image_subfunctor(power)
            ker, _ = kernel_subfunctor(power)
            return [img, ker]
    h = len(ends)
    if h > 16:
        raise BoundExceeded(f"cannot certify indecomposability with end dim {h}")
    # exhaustive idempotent scan certifies indecomposability
    ident = {a: FpMatrix.identity(x.cat.p, x.dims[a]) for a in x.cat.objects}
    for coeffs in itertools.product(range(x.cat.p), repeat=h):
        if not any(coeffs):
            continue
        comps = {a: FpMatrix.zeros(x.cat.p, x.dims[a], x.dims[a]) for a in x.cat.objects}
        for c, b in zip(coeffs, ends):
            if c:
                comps = {a: comps[a] + b.components[a].scale(c) for a in comps}
        if all(comps[a] @ comps[a] == comps[a] for a in comps):
            if all(comps[a].is_zero() for a in comps):
                continue
            if all(comps[a] == ident[a] for a in comps):
                continue
            from cotlab.functorcat import NatTrans

            e = NatTrans(x, x, comps)
            img, _ = image_subfunctor(e)
            one_minus = NatTrans(
                x, x, {a: ident[a] - comps[a] for a in comps}
            )
            ker, _ = image_subfunctor(one_minus)
            return [img, ker]
    return None


def functor_summands(x: AddFunctor) -> list:
    """Indecomposable direct summands (not deduplicated)."""
    work = [x]
    out = []
    while work:
        z = work.pop()
        total = z.total_dim()
        if total == 0:
            continue
        if total == 1:
            out.append(z)
            continue
        split = _try_split(z)
        if split is None:
            out.append(z)
        else:
            work.extend(split)
    return out


def _isomorphic_by_decomposition(x: AddFunctor, y: AddFunctor) -> bool:
    xs = functor_summands(x)
    ys = functor_summands(y)
    if len(xs) != len(ys):
        return False
    remaining = list(ys)
    for sx in xs:
        hit = None
        for i, sy in enumerate(remaining):
            if functors_isomorphic(sx, sy, cap=1 << 12):
                hit = i
                break
        if hit is None:
            return False
        remaining.pop(hit)
    return True


@lru_cache(maxsize=32)
def enumerate_functors(cat: EnrichedCategory, per_object_max_dim: int) -> tuple:
    """All functors with per-object dimension <= bound, up to natural isomorphism.

    Raw structures are deduplicated inside buckets keyed by cheap
    invariants (dims, value-module classes, block and composite rank
    profiles); within a bucket an explicit invertible natural
    transformation is searched.  When every value is at most a line
    (over GF(2)) the base-change group is trivial and raw structures
    are already canonical.
    """
    objs = cat.objects
    per_object = {}
    for a in objs:
        by_dim = {}
        for m in enumerate_modules(endo_algebra(cat, a), per_object_max_dim):
            by_dim.setdefault(m.dim, []).append(m)
        per_object[a] = by_dim
    nondiag = [
        (a, b) for a in objs for b in objs if a != b and cat.hom_dim(a, b)
    ]
    comp_pairs = [
        ((a, b), (b2, c))
        for (a, b) in nondiag
        for (b2, c) in nondiag
        if b2 == b
    ]
    rank_cache: Dict[int, int] = {}
    pair_cache: Dict[tuple, int] = {}

    def rank_of(m: FpMatrix) -> int:
        r = rank_cache.get(id(m))
        if r is None:
            r = m.rank()
            rank_cache[id(m)] = r
        return r

    def pair_rank(m2: FpMatrix, m1: FpMatrix) -> int:
        k = (id(m2), id(m1))
        r = pair_cache.get(k)
        if r is None:
            r = (m2 @ m1).rank()
            pair_cache[k] = r
        return r

    reps: List[AddFunctor] = []
    buckets: Dict[tuple, list] = {}
    for dim_of, mods_idx, assigned in _raw_functors(cat, per_object_max_dim):
        act = {(a, a): per_object[a][dim_of[a]][i].action for a, i in zip(objs, mods_idx)}
        act.update(assigned)
        dims_t = tuple(dim_of[a] for a in objs)
        if cat.p == 2 and all(d <= 1 for d in dims_t):
            reps.append(AddFunctor(cat, dim_of, act))
            continue
        singles = tuple(
            tuple(rank_of(m) for m in assigned[blk]) for blk in nondiag
        )
        pairs = tuple(
            pair_rank(m2, m1)
            for (blk1, blk2) in comp_pairs
            for m1 in assigned[blk1]
            for m2 in assigned[blk2]
        )
        key = (dims_t, mods_idx, singles, pairs)
        bucket = buckets.setdefault(key, [])
        cand = AddFunctor(cat, dim_of, act)
        if any(functors_isomorphic(cand, r) for r in bucket):
            continue
        bucket.append(cand)
        reps.append(cand)
    return tuple(reps)


# -- random instances -------------------------------------------------------------


_PROFILES = {
    "tiny": {"max_objects": 3, "max_hom": 1, "max_functor_dim": 2, "functors": 3},
    "small": {"max_objects": 4, "max_hom": 1, "max_functor_dim": 2, "functors": 4},
}


def random_instance(seed: int, size_profile: str = "tiny", retry_cap: int = 200):
    """Deterministic validator-passing category plus a few functors on it.

    Rejection sampling over scalar categories with random acyclic hom
    support; raises BoundExceeded after the retry cap.
    """
    if size_profile not in _PROFILES:
        raise ValueError(f"unknown profile {size_profile!r}")
    prof = _PROFILES[size_profile]
    rng = random.Random(seed)
    for _ in range(retry_cap):
        n_obj = rng.randint(1, prof["max_objects"])
        objects = [str(i) for i in range(n_obj)]
        support = set()
        for i in range(n_obj):
            for j in range(i):
                # arrows only from higher to lower index keeps the support acyclic
                if rng.random() < 0.6:
                    support.add((objects[i], objects[j]))
        cat = scalar_category(2, objects, lambda a, b: (a, b) in support)
        if validate_category(cat, require_zero_trace=True):
            continue
        functors = _random_functors(cat, rng, prof)
        return cat, functors
    raise BoundExceeded("random instance retry cap exceeded")


def _random_functors(cat: EnrichedCategory, rng: random.Random, prof: dict) -> list:
    out = []
    tries = 0
    while len(out) < prof["functors"] and tries < 500:
        tries += 1
        dims = {a: rng.randint(0, prof["max_functor_dim"]) for a in cat.objects}
        act = {}
        for a in cat.objects:
            for b in cat.objects:
                if a == b or not cat.hom_dim(a, b):
                    continue
                mats = []
                for _ in range(cat.hom_dim(a, b)):
                    mats.append(
                        FpMatrix(
                            cat.p,
                            [
                                [rng.randrange(cat.p) for _ in range(dims[a])]
                                for _ in range(dims[b])
                            ],
                            cols=dims[a],
                        )
                    )
                act[(a, b)] = tuple(mats)
        for a in cat.objects:
            act[(a, a)] = (FpMatrix.identity(cat.p, dims[a]),)
        try:
            cand = AddFunctor(cat, dims, act)
        except ValueError:
            continue
        if not validate_functor(cand):
            out.append(cand)
    return out
