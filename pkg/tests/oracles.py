"""Independent brute-force oracles used by the test suite.

Everything here computes expected values by a route disjoint from the
library's own (syzygy/presentation based) algorithms: extension groups
by upper-triangular cocycles modulo coboundaries, solvability by literal
enumeration, module listings by raw action-matrix scans.  Only the raw
linear algebra in `cotlab.linalg` is shared.
"""

from __future__ import annotations

import itertools

from cotlab.algmod import Algebra, LeftModule, validate_left_module
from cotlab.linalg import FpMatrix, span_basis


def ext1_dim_cocycle(m: LeftModule, n: LeftModule) -> int:
    """dim Ext^1(m, n) via block-triangular cocycles modulo coboundaries.

    An extension of m by n is a module structure [[act_n, beta], [0, act_m]];
    multiplicativity and unitality make the beta tuples a linear space Z,
    and change of splitting h contributes the coboundary beta_h(b) =
    act_n(b) h - h act_m(b).  The answer is dim Z - dim B.
    """
    alg = m.algebra
    p = alg.p
    dn, dm = n.dim, m.dim
    if dn == 0 or dm == 0:
        return 0
    cell = dn * dm  # one beta matrix per algebra basis element
    nvars = alg.dim * cell

    def beta_index(k, r, c):
        return k * cell + r * dm + c

    rows = []
    # act_n(b_i) beta_j + beta_i act_m(b_j) = sum_k struct[i][j][k] beta_k
    for i in range(alg.dim):
        ni = n.action[i]
        for j in range(alg.dim):
            mj = m.action[j]
            coef = alg.struct[i][j]
            for r in range(dn):
                for c in range(dm):
                    row = [0] * nvars
                    for t in range(dn):
                        v = ni.entries[r][t]
                        if v:
                            row[beta_index(j, t, c)] = (row[beta_index(j, t, c)] + v) % p
                    for t in range(dm):
                        v = mj.entries[t][c]
                        if v:
                            row[beta_index(i, r, t)] = (row[beta_index(i, r, t)] + v) % p
                    for k, ck in enumerate(coef):
                        if ck:
                            row[beta_index(k, r, c)] = (row[beta_index(k, r, c)] - ck) % p
                    if any(row):
                        rows.append(row)
    # unitality: sum_k unit_k beta_k = 0
    for r in range(dn):
        for c in range(dm):
            row = [0] * nvars
            for k, uk in enumerate(alg.unit):
                if uk:
                    row[beta_index(k, r, c)] = uk
            if any(row):
                rows.append(row)

    from cotlab.linalg import kernel_basis

    if rows:
        z = kernel_basis(FpMatrix(p, rows, cols=nvars))
        dim_z = z.dim
    else:
        dim_z = nvars

    cob = []
    for hr in range(dn):
        for hc in range(dm):
            vec = [0] * nvars
            for k in range(alg.dim):
                na, ma = n.action[k], m.action[k]
                # (act_n h - h act_m) for h = e_{hr,hc}
                for r in range(dn):
                    v = na.entries[r][hr]
                    if v:
                        vec[beta_index(k, r, hc)] = (vec[beta_index(k, r, hc)] + v) % p
                for c in range(dm):
                    v = ma.entries[hc][c]
                    if v:
                        vec[beta_index(k, hr, c)] = (vec[beta_index(k, hr, c)] - v) % p
            cob.append(vec)
    dim_b = span_basis(p, cob, nvars).dim if cob else 0
    return dim_z - dim_b


def all_modules_raw(alg: Algebra, dim: int):
    """Every unital module structure on GF(p)^dim, by literal scan.

    Feasible only for tiny dims; used to validate the library's smarter
    enumeration and the Ext oracle itself.
    """
    p = alg.p
    if dim == 0:
        yield LeftModule.zero(alg)
        return
    cells = dim * dim
    for flat in itertools.product(range(p), repeat=cells * alg.dim):
        acts = []
        for k in range(alg.dim):
            chunk = flat[k * cells : (k + 1) * cells]
            acts.append(FpMatrix(p, [chunk[i * dim : (i + 1) * dim] for i in range(dim)], cols=dim))
        cand = LeftModule(alg, dim, tuple(acts))
        if not validate_left_module(cand):
            yield cand


def count_quotient_classes(p: int, z_rows, b_rows, nvars) -> int:
    """|Z / B| by counting, for literal tiny cross-checks."""
    dim_z = span_basis(p, z_rows, nvars).dim if z_rows else 0
    dim_b = span_basis(p, b_rows, nvars).dim if b_rows else 0
    return p ** (dim_z - dim_b)
