"""Finite bimodule-enriched small categories over GF(p).

A category here is a finite object list, a dimension for every hom
space, composition tensors, and identity coordinates.  The composition
tensor is indexed comp[(A, B, C)][g][f] = coordinates of g o f in
Hom(A, C), for f in the basis of Hom(A, B) and g in the basis of
Hom(B, C).  Validation covers associativity, the unit laws, the
bimodule structure of every hom space, and (optionally) the zero-trace
condition that composites through a different object vanish, which is
what makes stalk functors functorial downstream.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Sequence, Tuple

from .algmod import Algebra, Bimodule, validate_bimodule
from .linalg import FpMatrix, span_basis


class EnrichedCategory:
    __slots__ = ("p", "objects", "hom", "comp", "ids", "_hash")

    def __init__(
        self,
        p: int,
        objects: Sequence[str],
        hom: Dict[Tuple[str, str], int],
        comp: Dict[Tuple[str, str, str], Sequence[Sequence[Sequence[int]]]],
        ids: Dict[str, Sequence[int]],
    ):
        self.p = p
        self.objects = tuple(objects)
        full_hom = {}
        for a in self.objects:
            for b in self.objects:
                full_hom[(a, b)] = int(hom.get((a, b), 0))
        self.hom = full_hom
        norm = {}
        for key, tensor in comp.items():
            norm[key] = tuple(
                tuple(tuple(int(x) % p for x in cell) for cell in row) for row in tensor
            )
        self.comp = norm
        self.ids = {a: tuple(int(x) % p for x in v) for a, v in ids.items()}
        self._hash = None

    def hom_dim(self, a: str, b: str) -> int:
        return self.hom[(a, b)]

    def comp_tensor(self, a: str, b: str, c: str):
        """comp[(a,b,c)][g][f], zero-filled when absent."""
        key = (a, b, c)
        if key in self.comp:
            return self.comp[key]
        dg, df, dt = self.hom_dim(b, c), self.hom_dim(a, b), self.hom_dim(a, c)
        return tuple(tuple((0,) * dt for _ in range(df)) for _ in range(dg))

    def compose_vec(self, a: str, b: str, c: str, gvec, fvec) -> tuple:
        """Coordinates of g o f for g in Hom(b,c), f in Hom(a,b)."""
        p = self.p
        tensor = self.comp_tensor(a, b, c)
        out = [0] * self.hom_dim(a, c)
        for gi, gc in enumerate(gvec):
            if not gc % p:
                continue
            row = tensor[gi]
            for fi, fc in enumerate(fvec):
                if not fc % p:
                    continue
                cell = row[fi]
                m = (gc * fc) % p
                for k, v in enumerate(cell):
                    if v:
                        out[k] = (out[k] + m * v) % p
        return tuple(out)

    def postcompose_matrix(self, a: str, b: str, c: str, gvec) -> FpMatrix:
        """Hom(a,b) -> Hom(a,c), f -> g o f."""
        cols = [
            self.compose_vec(a, b, c, gvec, _unit(self.hom_dim(a, b), fi))
            for fi in range(self.hom_dim(a, b))
        ]
        return _from_cols(self.p, cols, self.hom_dim(a, c))

    def precompose_matrix(self, a: str, b: str, c: str, fvec) -> FpMatrix:
        """Hom(b,c) -> Hom(a,c), g -> g o f."""
        cols = [
            self.compose_vec(a, b, c, _unit(self.hom_dim(b, c), gi), fvec)
            for gi in range(self.hom_dim(b, c))
        ]
        return _from_cols(self.p, cols, self.hom_dim(a, c))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EnrichedCategory)
            and self.p == other.p
            and self.objects == other.objects
            and self.hom == other.hom
            and self.comp == other.comp
            and self.ids == other.ids
        )

    def __hash__(self) -> int:
        if self._hash is None:
            key = (
                self.p,
                self.objects,
                tuple(sorted(self.hom.items())),
                tuple(sorted(self.comp.items())),
                tuple(sorted(self.ids.items())),
            )
            self._hash = hash(key)
        return self._hash

    def __repr__(self) -> str:
        return f"EnrichedCategory(p={self.p}, objects={list(self.objects)})"


def _unit(n: int, i: int) -> tuple:
    return tuple(1 if j == i else 0 for j in range(n))


def _from_cols(p: int, cols, nrows: int) -> FpMatrix:
    if not cols:
        return FpMatrix.zeros(p, nrows, 0)
    if nrows == 0:
        return FpMatrix.zeros(p, 0, len(cols))
    return FpMatrix(p, list(zip(*cols)), cols=len(cols))


def validate_category(cat: EnrichedCategory, require_zero_trace: bool = False) -> list:
    """Report-style validation; empty list means pass."""
    problems = []
    objs = cat.objects
    for a in objs:
        if a not in cat.ids or len(cat.ids[a]) != cat.hom_dim(a, a):
            problems.append(f"identity coordinates missing or wrong length at {a}")
    # tensor shapes
    for (a, b, c), tensor in cat.comp.items():
        if len(tensor) != cat.hom_dim(b, c):
            problems.append(f"comp[{a}|{b}|{c}] has wrong g-extent")
            continue
        for row in tensor:
            if len(row) != cat.hom_dim(a, b) or any(
                len(cell) != cat.hom_dim(a, c) for cell in row
            ):
                problems.append(f"comp[{a}|{b}|{c}] has wrong f-extent or cell length")
                break
    if problems:
        return problems
    # unit laws
    for a in objs:
        for b in objs:
            d = cat.hom_dim(a, b)
            for fi in range(d):
                f = _unit(d, fi)
                if cat.compose_vec(a, b, b, cat.ids[b], f) != f:
                    problems.append(f"left unit law fails on Hom({a},{b}) basis {fi}")
                if cat.compose_vec(a, a, b, f, cat.ids[a]) != f:
                    problems.append(f"right unit law fails on Hom({a},{b}) basis {fi}")
    # associativity over all object quadruples and basis triples
    for a in objs:
        for b in objs:
            if not cat.hom_dim(a, b):
                continue
            for c in objs:
                if not cat.hom_dim(b, c):
                    continue
                for d in objs:
                    if not cat.hom_dim(c, d):
                        continue
                    for fi in range(cat.hom_dim(a, b)):
                        f = _unit(cat.hom_dim(a, b), fi)
                        for gi in range(cat.hom_dim(b, c)):
                            g = _unit(cat.hom_dim(b, c), gi)
                            gf = cat.compose_vec(a, b, c, g, f)
                            for hi in range(cat.hom_dim(c, d)):
                                h = _unit(cat.hom_dim(c, d), hi)
                                lhs = cat.compose_vec(a, c, d, h, gf)
                                hg = cat.compose_vec(b, c, d, h, g)
                                rhs = cat.compose_vec(a, b, d, hg, f)
                                if lhs != rhs:
                                    problems.append(
                                        f"associativity fails at ({a},{b},{c},{d}) basis ({fi},{gi},{hi})"
                                    )
    # each hom space is a bimodule over (end(target), end(source))
    if not problems:
        for a in objs:
            for b in objs:
                if not cat.hom_dim(a, b):
                    continue
                bim = hom_bimodule(cat, a, b)
                for s in validate_bimodule(bim):
                    problems.append(f"Hom({a},{b}) bimodule: {s}")
    if require_zero_trace:
        problems += zero_trace_violations(cat)
    return problems


def zero_trace_violations(cat: EnrichedCategory) -> list:
    """Brute check that comp[(b,a,b)] vanishes for all a != b."""
    problems = []
    for a in cat.objects:
        for b in cat.objects:
            if a == b:
                continue
            tensor = cat.comp_tensor(b, a, b)
            for gi, row in enumerate(tensor):
                for fi, cell in enumerate(row):
                    if any(cell):
                        problems.append(
                            f"zero-trace fails: Hom({a},{b}) o Hom({b},{a}) hits Hom({b},{b}) at ({gi},{fi})"
                        )
    return problems


@lru_cache(maxsize=None)
def endo_algebra(cat: EnrichedCategory, a: str) -> Algebra:
    """The endomorphism algebra of an object, with composition as product."""
    if a not in cat.objects:
        raise KeyError(f"unknown object {a!r}")
    d = cat.hom_dim(a, a)
    tensor = cat.comp_tensor(a, a, a)
    struct = [[tensor[i][j] for j in range(d)] for i in range(d)]
    return Algebra(cat.p, struct, cat.ids[a])


@lru_cache(maxsize=None)
def hom_bimodule(cat: EnrichedCategory, a: str, b: str) -> Bimodule:
    """Hom(a,b) as an (end(b), end(a))-bimodule."""
    rb = endo_algebra(cat, b)
    ra = endo_algebra(cat, a)
    d = cat.hom_dim(a, b)
    left = tuple(
        cat.postcompose_matrix(a, b, b, _unit(rb.dim, j)) for j in range(rb.dim)
    )
    right = tuple(
        cat.precompose_matrix(a, a, b, _unit(ra.dim, i)) for i in range(ra.dim)
    )
    return Bimodule(rb, ra, d, left, right)


class CategoryAlgebra:
    """The direct sum of all hom spaces with composition as multiplication."""

    __slots__ = ("algebra", "blocks", "offsets")

    def __init__(self, algebra: Algebra, blocks, offsets):
        self.algebra = algebra
        self.blocks = blocks  # ordered (source, target) pairs with hom dim > 0
        self.offsets = offsets  # (source, target) -> flat offset

    def flat_index(self, a: str, b: str, k: int) -> int:
        return self.offsets[(a, b)] + k

    def block_of(self, idx: int):
        """(source, target, local index) of a flat basis index."""
        for (a, b) in reversed(self.blocks):
            off = self.offsets[(a, b)]
            if idx >= off:
                return a, b, idx - off
        raise IndexError(idx)


def category_algebra(cat: EnrichedCategory) -> CategoryAlgebra:
    """Assemble the block-graded algebra of a finite category."""
    blocks = []
    offsets = {}
    total = 0
    for a in cat.objects:
        for b in cat.objects:
            d = cat.hom_dim(a, b)
            if d:
                blocks.append((a, b))
                offsets[(a, b)] = total
                total += d
    p = cat.p
    zero = (0,) * total
    struct = [[zero for _ in range(total)] for _ in range(total)]
    for (c, d_) in blocks:  # y in Hom(c, d_)
        for (a2, b2) in blocks:  # x in Hom(a2, b2); product x.y needs d_ == a2
            if d_ != a2:
                continue
            tensor = cat.comp_tensor(c, a2, b2)
            if not cat.hom_dim(c, b2):
                continue
            for xk in range(cat.hom_dim(a2, b2)):
                xi = offsets[(a2, b2)] + xk
                for yk in range(cat.hom_dim(c, d_)):
                    yi = offsets[(c, d_)] + yk
                    coords = tensor[xk][yk]
                    vec = [0] * total
                    off = offsets[(c, b2)]
                    for t, v in enumerate(coords):
                        vec[off + t] = v
                    struct[xi][yi] = tuple(vec)
    unit = [0] * total
    for a in cat.objects:
        if cat.hom_dim(a, a):
            off = offsets[(a, a)]
            for t, v in enumerate(cat.ids[a]):
                unit[off + t] = v
    return CategoryAlgebra(Algebra(p, struct, unit), tuple(blocks), offsets)


def chain_diagnostic(cat: EnrichedCategory, direction: str = "incoming"):
    """Longest distinct-object path with a not-identically-zero iterated composite.

    Finite categories satisfy the no-infinite-chain conditions trivially;
    this reports the witness depth for documentation.  `incoming` walks
    chains ... -> A2 -> A1 (composites land in Hom(A_k, A_1)),
    `outgoing` walks A1 -> A2 -> ... (composites in Hom(A_1, A_k)).
    """
    if direction not in ("incoming", "outgoing"):
        raise ValueError("direction must be 'incoming' or 'outgoing'")
    best = {"len": 0, "witness": (cat.objects[0],) if cat.objects else ()}

    def extend(path, span_rows, anchor):
        # span_rows: basis rows of the achievable-composite subspace
        last = path[-1]
        for nxt in cat.objects:
            if nxt in path:
                continue
            if direction == "incoming":
                d_new = cat.hom_dim(nxt, last)
                target_dim = cat.hom_dim(nxt, anchor)
            else:
                d_new = cat.hom_dim(last, nxt)
                target_dim = cat.hom_dim(anchor, nxt)
            if not d_new or not target_dim:
                continue
            vectors = []
            for s in span_rows:
                for fi in range(d_new):
                    f = _unit(d_new, fi)
                    if direction == "incoming":
                        # composite s o f in Hom(nxt, anchor)
                        vectors.append(cat.compose_vec(nxt, last, anchor, s, f))
                    else:
                        vectors.append(cat.compose_vec(anchor, last, nxt, f, s))
            sb = span_basis(cat.p, [list(v) for v in vectors], target_dim)
            if sb.dim == 0:
                continue
            new_path = path + (nxt,)
            arrows = len(new_path) - 1
            if arrows > best["len"]:
                best["len"] = arrows
                best["witness"] = new_path if direction == "outgoing" else tuple(reversed(new_path))
            extend(new_path, [list(r) for r in sb.basis.entries], anchor)

    for start in cat.objects:
        d = cat.hom_dim(start, start)
        if d == 0:
            continue
        extend((start,), [list(cat.ids[start])], start)
    return best["len"], best["witness"]
