"""The two exponential-twisting functors, Cartier descent and gauge search.

The forward direction sends a nilpotent Higgs sheaf (E, theta) to a flat
sheaf: per chart, A_i = sum_j F(Theta_j) * (dt_i-coefficient of
zeta(1 (x) dt_j)); per overlap, transition F(T) followed by the truncated
exponential of the Higgs field contracted with the lifting homotopy h.

The converse direction adds zeta(psi) to a connection with nilpotent
p-curvature psi, twists the transitions by trunc_exp(h(psi)), solves for a
flat frame of the resulting p-curvature-zero connection, expresses psi in
that frame (entries land in p-th-power exponents), and divides exponents
by p to descend.

The sign of the p-curvature of the forward output relative to the
Frobenius-pulled-back Higgs field is convention-dependent; it is measured
by `p_curvature_sign`, not hard-coded.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .atlas import (
    Atlas,
    jacobian_beta_in_alpha,
    h_pair,
    lift_on_overlap,
    pull_beta_function,
    zeta_form,
)
from .linalg import nullspace_mod_p
from .report import Report, timed
from .ring import (
    LaurentPoly,
    PolyMatrix,
    VarSpec,
    monomial_sort_key,
    monomials_in_box,
    trunc_exp,
)
from .sheaves import (
    FlatSheaf,
    HiggsSheaf,
    PCurvature,
    check_flat,
    check_higgs,
    higgs_exponent,
    nilpotency_exponent,
    p_curvature,
)


class TransformError(ValueError):
    pass


class DegreeBoundExceeded(TransformError):
    pass


# ---------- helpers ----------


def zeta_coeffs(vars: VarSpec, images: dict[str, LaurentPoly]) -> list[list[LaurentPoly]]:
    """Z[j][i] = coefficient of dt_i in zeta(1 (x) dt_j)."""
    return [list(zeta_form(vars, images, c).coeffs) for c in vars.names]


def default_degree_bound(rank: int, p: int, *matrix_groups) -> int:
    deg = 0
    for group in matrix_groups:
        for m in group:
            deg = max(deg, m.max_abs_degree())
    return deg + p * rank


def relabel_poly(f: LaurentPoly, p: int) -> LaurentPoly:
    """Divide every exponent by p; the input must have p-divisible exponents."""
    out = {}
    for exps, c in f.terms.items():
        if any(e % p != 0 for e in exps):
            raise TransformError(
                f"descended entry '{f}' has an exponent not divisible by {p}"
            )
        out[tuple(e // p for e in exps)] = c
    return LaurentPoly(f.vars, f.modulus, out)


def relabel_matrix(m: PolyMatrix, p: int) -> PolyMatrix:
    return m.map_entries(lambda f: relabel_poly(f, p))


# ---------- the forward functor ----------


def canonical_connection(E: HiggsSheaf) -> FlatSheaf:
    """The flat sheaf on the Frobenius pullback of a zero-Higgs sheaf."""
    if not E.is_zero_field():
        raise TransformError("canonical connection requires a zero Higgs field")
    atlas = E.atlas
    conn = {
        chart: [PolyMatrix.zero(E.rank, E.rank, atlas.chart_vars(chart), atlas.ctx.p)
                for _ in atlas.chart_vars(chart).names]
        for chart in atlas.charts
    }
    transitions = {pair: t.frobenius() for pair, t in E.transitions.items()}
    return FlatSheaf(atlas, E.rank, conn, transitions)


def inverse_cartier(E: HiggsSheaf, lift_choice: dict[str, int] | None = None) -> FlatSheaf:
    """Twist the canonical connection by the divided Frobenius of the field."""
    atlas = E.atlas
    ctx = atlas.ctx
    rep = check_higgs(E)
    if not rep.ok():
        raise TransformError(
            "input is not a valid nilpotent Higgs sheaf: "
            + "; ".join(e.check for e in rep.failures())
        )
    higgs_exponent(E)  # raises if the nilpotency bound p-1 is exceeded
    conn: dict[str, list[PolyMatrix]] = {}
    for chart_name, chart in atlas.charts.items():
        lift = atlas.lift_for(chart_name, lift_choice)
        z = zeta_coeffs(chart.vars, lift.images)
        thetas_f = [m.frobenius() for m in E.fields[chart_name]]
        mats = []
        for i in range(chart.vars.arity):
            acc = PolyMatrix.zero(E.rank, E.rank, chart.vars, ctx.p)
            for j in range(chart.vars.arity):
                if not z[j][i].is_zero():
                    acc = acc + thetas_f[j].scale(z[j][i])
            mats.append(acc)
        conn[chart_name] = mats
    transitions: dict[tuple[str, str], PolyMatrix] = {}
    for pair, ov in atlas.overlaps.items():
        img_a = lift_on_overlap(atlas, ov, atlas.lift_for(ov.alpha, lift_choice))
        img_b = lift_on_overlap(atlas, ov, atlas.lift_for(ov.beta, lift_choice))
        twist = PolyMatrix.zero(E.rank, E.rank, ov.alpha_vars, ctx.p)
        for j, u in enumerate(ov.alpha_vars.names):
            h = h_pair(ov.alpha_vars, img_a, img_b, u)
            if h.is_zero():
                continue
            theta_f = E.fields[ov.alpha][j].extend_vars(ov.alpha_vars).frobenius()
            twist = twist + theta_f.scale(h)
        g = trunc_exp(twist, ctx)
        transitions[pair] = E.transitions[pair].frobenius() @ g
    return FlatSheaf(atlas, E.rank, conn, transitions)


def p_curvature_sign(E: HiggsSheaf, psi: PCurvature) -> int | None:
    """Measure the global sign in psi = sign * (Frobenius pullback of theta).

    Returns None when every component is zero (no sign information), raises
    when any chart disagrees with a single global sign.
    """
    sign: int | None = None
    for chart, mats in E.fields.items():
        for i, theta in enumerate(mats):
            expected = theta.frobenius()
            got = psi.comps[chart][i]
            if expected.is_zero() and got.is_zero():
                continue
            if got == expected:
                s = 1
            elif got == -expected:
                s = -1
            else:
                raise TransformError(
                    f"p-curvature on {chart!r} coordinate {i} is neither "
                    f"+/- the pulled-back field: got {got}, field {expected}"
                )
            if sign is None:
                sign = s
            elif sign != s:
                raise TransformError("p-curvature sign is not globally consistent")
    return sign


# ---------- Cartier descent ----------


@dataclass
class DescentResult:
    frames: dict[str, PolyMatrix]                       # columns are flat sections
    rank: int
    transitions: dict[tuple[str, str], PolyMatrix]      # descended (exponents / p)
    pre_relabel: dict[tuple[str, str], PolyMatrix]      # witness before relabeling


def _shift_scale(poly: LaurentPoly, shift: tuple[int, ...], scale: int) -> LaurentPoly:
    return LaurentPoly(
        poly.vars,
        poly.modulus,
        {tuple(e - s for e, s in zip(exps, shift)): c * scale for exps, c in poly.terms.items()},
    )


def _normalize_column(col: list[LaurentPoly], p: int) -> list[LaurentPoly]:
    """Scale by a unit so the simplest term has coefficient 1 and exponents in [0, p)."""
    terms = [
        (monomial_sort_key(e), k, e, c)
        for k, poly in enumerate(col)
        for e, c in poly.terms.items()
    ]
    if not terms:
        return col
    _, _, e_star, c_star = min(terms)
    vars = col[0].vars
    shift = []
    for i, name in enumerate(vars.names):
        s = p * (e_star[i] // p)
        if not vars.allows_negative(name):
            min_e = min(t[2][i] for t in terms)
            s = min(s, p * (min_e // p))
        shift.append(s)
    scale = pow(c_star, p - 2, p)
    return [_shift_scale(x, tuple(shift), scale) for x in col]


def _solve_flat_frame(H: FlatSheaf, chart: str, bound: int) -> PolyMatrix | None:
    """Unit-determinant matrix of flat columns within the exponent box, or None."""
    atlas = H.atlas
    p = atlas.ctx.p
    vars = atlas.chart_vars(chart)
    r = H.rank
    monos = monomials_in_box(vars, bound)
    unknowns = [(m, k) for m in monos for k in range(r)]
    col_of = {u: i for i, u in enumerate(unknowns)}
    rows: dict[tuple, dict[int, int]] = {}

    def put(key, col, coeff):
        row = rows.setdefault(key, {})
        row[col] = (row.get(col, 0) + coeff) % p

    mats = H.conn[chart]
    for ci, name in enumerate(vars.names):
        A = mats[ci]
        vi = vars.index(name)
        for (m, k) in unknowns:
            col = col_of[(m, k)]
            if m[vi] != 0:  # derivative of the monomial
                e = list(m)
                e[vi] -= 1
                put((ci, k, tuple(e)), col, m[vi] % p)
            for l in range(r):
                a = A.entries[l][k]
                for exps_a, c_a in a.terms.items():
                    e = tuple(x + y for x, y in zip(exps_a, m))
                    put((ci, l, e), col, c_a)

    row_keys = sorted(rows)
    matrix = np.zeros((max(len(row_keys), 1), len(unknowns)), dtype=np.int64)
    for ri, key in enumerate(row_keys):
        for col, coeff in rows[key].items():
            matrix[ri, col] = coeff
    basis = nullspace_mod_p(matrix, p)
    if len(basis) < r:
        return None

    def column_of(vec) -> list[LaurentPoly]:
        per_entry: list[dict[tuple[int, ...], int]] = [dict() for _ in range(r)]
        for idx, coeff in enumerate(vec):
            if coeff:
                m, k = unknowns[idx]
                per_entry[k][m] = int(coeff)
        return [LaurentPoly(vars, p, t) for t in per_entry]

    columns = [column_of(v) for v in basis]
    for combo in itertools.islice(itertools.combinations(range(len(columns)), r), 200000):
        cand = PolyMatrix([[columns[c][k] for c in combo] for k in range(r)])
        if cand.det().is_unit():
            cols = [_normalize_column([cand.entries[k][j] for k in range(r)], p)
                    for j in range(r)]
            return PolyMatrix([[cols[j][k] for j in range(r)] for k in range(r)])
    return None


def flat_sections(H: FlatSheaf, degree_bound: int | None = None) -> DescentResult:
    """Frames of flat sections plus the descended transition matrices."""
    atlas = H.atlas
    p = atlas.ctx.p
    psi = p_curvature(H)
    if not psi.is_zero():
        raise TransformError("flat-section descent requires zero p-curvature")
    if degree_bound is None:
        degree_bound = default_degree_bound(
            H.rank, p, *H.conn.values(), H.transitions.values()
        )
    frames: dict[str, PolyMatrix] = {}
    for chart in atlas.charts:
        frame = _solve_flat_frame(H, chart, degree_bound)
        if frame is None:
            frame = _solve_flat_frame(H, chart, degree_bound + p)  # one escalation
        if frame is None:
            raise DegreeBoundExceeded(
                f"no unimodular flat frame on chart {chart!r} within degree "
                f"bound {degree_bound + p}"
            )
        vars = atlas.chart_vars(chart)
        for i, name in enumerate(vars.names):
            nabla = frame.deriv(name) + H.conn[chart][i] @ frame
            if not nabla.is_zero():
                raise TransformError(f"frame on {chart!r} is not flat: {nabla}")
        if not frame.det().is_unit():
            raise TransformError(f"frame on {chart!r} is not unimodular")
        frames[chart] = frame
    transitions: dict[tuple[str, str], PolyMatrix] = {}
    pre_relabel: dict[tuple[str, str], PolyMatrix] = {}
    for pair, ov in atlas.overlaps.items():
        s_a = frames[ov.alpha].extend_vars(ov.alpha_vars)
        s_b = frames[ov.beta].map_entries(lambda f: pull_beta_function(ov, f))
        descended = s_b.inverse_unit_det() @ H.transitions[pair] @ s_a
        pre_relabel[pair] = descended
        transitions[pair] = relabel_matrix(descended, p)
    return DescentResult(frames, H.rank, transitions, pre_relabel)


# ---------- the converse functor ----------


def check_fhiggs_gluing(
    atlas: Atlas,
    rank: int,
    comps: dict[str, list[PolyMatrix]],
    transitions: dict[tuple[str, str], PolyMatrix],
) -> Report:
    """Do Frobenius-twisted field components commute with the given gluing."""
    report = Report()
    for pair, ov in atlas.overlaps.items():
        t_mat = transitions[pair]
        t_inv = t_mat.inverse_unit_det()
        jac = jacobian_beta_in_alpha(ov)
        beta_mats = [
            comps[ov.beta][j].map_entries(lambda f: pull_beta_function(ov, f))
            for j in range(ov.beta_vars.arity)
        ]
        ok = True
        witness: tuple[str, ...] = ()
        for i, u in enumerate(ov.alpha_vars.names):
            lhs = comps[ov.alpha][i].extend_vars(ov.alpha_vars)
            rhs = PolyMatrix.zero(rank, rank, ov.alpha_vars, atlas.ctx.p)
            for j in range(ov.beta_vars.arity):
                factor = jac.entries[j][i].frobenius()
                if factor.is_zero():
                    continue
                rhs = rhs + (t_inv @ beta_mats[j] @ t_mat).scale(factor)
            if lhs != rhs:
                ok = False
                witness = (f"coordinate {u}: alpha side {lhs}", f"glued beta side {rhs}")
                break
        report.add(f"psi gluing[{pair[0]}|{pair[1]}]", ok, witness)
    return report


def untwist(
    H: FlatSheaf, lift_choice: dict[str, int] | None = None
) -> tuple[FlatSheaf, PCurvature]:
    """The p-curvature-killing connection and gluing, before descent."""
    atlas = H.atlas
    ctx = atlas.ctx
    rep = check_flat(H)
    if not rep.ok():
        raise TransformError(
            "input is not a valid flat sheaf: " + "; ".join(e.check for e in rep.failures())
        )
    psi = p_curvature(H)
    exps = [nilpotency_exponent(mats, ctx.p - 1) for mats in psi.comps.values()]
    if any(e is None for e in exps):
        raise TransformError(f"p-curvature is not nilpotent of exponent <= {ctx.p - 1}")

    conn: dict[str, list[PolyMatrix]] = {}
    for chart_name, chart in atlas.charts.items():
        lift = atlas.lift_for(chart_name, lift_choice)
        z = zeta_coeffs(chart.vars, lift.images)
        psis = psi.comps[chart_name]
        mats = []
        for i in range(chart.vars.arity):
            acc = H.conn[chart_name][i]
            for j in range(chart.vars.arity):
                if not z[j][i].is_zero():
                    acc = acc + psis[j].scale(z[j][i])
            mats.append(acc)
        conn[chart_name] = mats
    transitions: dict[tuple[str, str], PolyMatrix] = {}
    for pair, ov in atlas.overlaps.items():
        img_a = lift_on_overlap(atlas, ov, atlas.lift_for(ov.alpha, lift_choice))
        img_b = lift_on_overlap(atlas, ov, atlas.lift_for(ov.beta, lift_choice))
        twist = PolyMatrix.zero(H.rank, H.rank, ov.alpha_vars, ctx.p)
        for j, u in enumerate(ov.alpha_vars.names):
            h = h_pair(ov.alpha_vars, img_a, img_b, u)
            if h.is_zero():
                continue
            psi_j = psi.comps[ov.alpha][j].extend_vars(ov.alpha_vars)
            twist = twist + psi_j.scale(h)
        j_mat = trunc_exp(twist, ctx)
        transitions[pair] = H.transitions[pair] @ j_mat
    return FlatSheaf(atlas, H.rank, conn, transitions), psi


def cartier(
    H: FlatSheaf,
    lift_choice: dict[str, int] | None = None,
    degree_bound: int | None = None,
) -> HiggsSheaf:
    """Untwist a nilpotent flat sheaf and descend along its flat sections."""
    atlas = H.atlas
    ctx = atlas.ctx
    untwisted, psi = untwist(H, lift_choice)
    inner = check_flat(untwisted)
    if not inner.ok():
        raise TransformError(
            "untwisted connection fails its gluing checks: "
            + "; ".join(e.check for e in inner.failures())
        )
    if not p_curvature(untwisted).is_zero():
        raise TransformError("untwisted connection has nonzero p-curvature")
    glue = check_fhiggs_gluing(atlas, H.rank, psi.comps, untwisted.transitions)
    if not glue.ok():
        raise TransformError("p-curvature does not commute with the twisted gluing")

    descent = flat_sections(untwisted, degree_bound)
    fields: dict[str, list[PolyMatrix]] = {}
    for chart_name, chart in atlas.charts.items():
        s = descent.frames[chart_name]
        s_inv = s.inverse_unit_det()
        fields[chart_name] = [
            relabel_matrix(s_inv @ psi.comps[chart_name][j] @ s, ctx.p)
            for j in range(chart.vars.arity)
        ]
    out = HiggsSheaf(atlas, H.rank, fields, descent.transitions)
    out_rep = check_higgs(out)
    if not out_rep.ok():
        raise TransformError(
            "descended Higgs sheaf fails its checks: "
            + "; ".join(e.check for e in out_rep.failures())
        )
    return out


# ---------- gauge comparison ----------


@dataclass
class GaugeWitness:
    gauges: dict[str, PolyMatrix]


def verify_gauge_witness(sheaf1, sheaf2, gauges: dict[str, PolyMatrix], flat: bool) -> bool:
    atlas = sheaf1.atlas
    mats1 = sheaf1.conn if flat else sheaf1.fields
    mats2 = sheaf2.conn if flat else sheaf2.fields
    for chart in atlas.charts:
        g = gauges[chart]
        if not g.det().is_unit():
            return False
        vars = atlas.chart_vars(chart)
        g_inv = g.inverse_unit_det()
        for i, name in enumerate(vars.names):
            lhs = g @ mats1[chart][i] @ g_inv
            if flat:
                lhs = lhs - g.deriv(name) @ g_inv
            if lhs != mats2[chart][i]:
                return False
    for pair, ov in atlas.overlaps.items():
        g_a = gauges[ov.alpha].extend_vars(ov.alpha_vars)
        g_b = gauges[ov.beta].map_entries(lambda f: pull_beta_function(ov, f))
        if g_b @ sheaf1.transitions[pair] != sheaf2.transitions[pair] @ g_a:
            return False
    return True


def _gauge_solution_space(sheaf1, sheaf2, bound: int, flat: bool):
    """Nullspace basis of the intertwining constraints, as per-chart matrices."""
    atlas = sheaf1.atlas
    p = atlas.ctx.p
    r = sheaf1.rank
    mats1 = sheaf1.conn if flat else sheaf1.fields
    mats2 = sheaf2.conn if flat else sheaf2.fields

    unknowns: list[tuple[str, tuple[int, ...], int, int]] = []
    for chart in sorted(atlas.charts):
        vars = atlas.chart_vars(chart)
        for m in monomials_in_box(vars, bound):
            for i in range(r):
                for j in range(r):
                    unknowns.append((chart, m, i, j))
    col_of = {u: idx for idx, u in enumerate(unknowns)}
    rows: dict[tuple, dict[int, int]] = {}

    def put(key, col, coeff):
        row = rows.setdefault(key, {})
        row[col] = (row.get(col, 0) + coeff) % p

    def add_matrix_terms(key_prefix, mat: PolyMatrix, col):
        for a in range(mat.rows):
            for b in range(mat.cols):
                for exps, c in mat.entries[a][b].terms.items():
                    put(key_prefix + (a, b, exps), col, c)

    for chart in sorted(atlas.charts):
        vars = atlas.chart_vars(chart)
        for m in monomials_in_box(vars, bound):
            for i in range(r):
                for j in range(r):
                    col = col_of[(chart, m, i, j)]
                    basis = PolyMatrix.zero(r, r, vars, p)
                    entries = [list(row) for row in basis.entries]
                    entries[i][j] = LaurentPoly.monomial(vars, p, 1, m)
                    basis = PolyMatrix(entries)
                    for k, name in enumerate(vars.names):
                        res = basis @ mats1[chart][k] - mats2[chart][k] @ basis
                        if flat:
                            res = res - basis.deriv(name)
                        add_matrix_terms(("chart", chart, k), res, col)
    for pair, ov in atlas.overlaps.items():
        t1, t2 = sheaf1.transitions[pair], sheaf2.transitions[pair]
        for m in monomials_in_box(atlas.chart_vars(ov.alpha), bound):
            for i in range(r):
                for j in range(r):
                    col = col_of[(ov.alpha, m, i, j)]
                    mono = LaurentPoly.monomial(
                        atlas.chart_vars(ov.alpha), p, 1, m
                    ).extend_vars(ov.alpha_vars)
                    entries = [
                        [
                            mono if (a, b) == (i, j)
                            else LaurentPoly.zero(ov.alpha_vars, p)
                            for b in range(r)
                        ]
                        for a in range(r)
                    ]
                    basis = PolyMatrix(entries)
                    add_matrix_terms(("overlap", pair), -(t2 @ basis), col)
        for m in monomials_in_box(atlas.chart_vars(ov.beta), bound):
            for i in range(r):
                for j in range(r):
                    col = col_of[(ov.beta, m, i, j)]
                    mono = LaurentPoly.monomial(atlas.chart_vars(ov.beta), p, 1, m)
                    pulled = pull_beta_function(ov, mono)
                    entries = [
                        [
                            pulled if (a, b) == (i, j)
                            else LaurentPoly.zero(ov.alpha_vars, p)
                            for b in range(r)
                        ]
                        for a in range(r)
                    ]
                    basis = PolyMatrix(entries)
                    add_matrix_terms(("overlap", pair), basis @ t1, col)

    row_keys = sorted(rows, key=repr)
    matrix = np.zeros((max(len(row_keys), 1), len(unknowns)), dtype=np.int64)
    for ri, key in enumerate(row_keys):
        for col, coeff in rows[key].items():
            matrix[ri, col] = coeff
    basis_vecs = nullspace_mod_p(matrix, p)

    def vec_to_gauges(vec) -> dict[str, PolyMatrix]:
        out = {}
        for chart in sorted(atlas.charts):
            vars = atlas.chart_vars(chart)
            terms: list[list[dict]] = [[dict() for _ in range(r)] for _ in range(r)]
            for idx, coeff in enumerate(vec):
                if coeff:
                    c_chart, m, i, j = unknowns[idx]
                    if c_chart == chart:
                        terms[i][j][m] = int(coeff)
            out[chart] = PolyMatrix(
                [[LaurentPoly(vars, p, terms[i][j]) for j in range(r)] for i in range(r)]
            )
        return out

    return [vec_to_gauges(v) for v in basis_vecs]


def _combine(gauge_basis, coeffs, atlas, r):
    p = atlas.ctx.p
    out = {}
    for chart in sorted(atlas.charts):
        vars = atlas.chart_vars(chart)
        acc = PolyMatrix.zero(r, r, vars, p)
        for c, gb in zip(coeffs, gauge_basis):
            if c:
                acc = acc + gb[chart].scale(c)
        out[chart] = acc
    return out


def gauge_compare(
    sheaf1,
    sheaf2,
    degree_bound: int | None = None,
    seed: int = 0,
    trials: int = 500,
    flat: bool = False,
) -> GaugeWitness | None:
    """Search for a unit-determinant intertwiner; None means inconclusive."""
    atlas = sheaf1.atlas
    p = atlas.ctx.p
    if sheaf1.rank != sheaf2.rank:
        return None
    r = sheaf1.rank
    identity = {c: PolyMatrix.identity(r, atlas.chart_vars(c), p) for c in atlas.charts}
    if verify_gauge_witness(sheaf1, sheaf2, identity, flat):
        return GaugeWitness(identity)
    mats1 = sheaf1.conn if flat else sheaf1.fields
    mats2 = sheaf2.conn if flat else sheaf2.fields
    if degree_bound is None:
        degree_bound = default_degree_bound(
            r, p, *mats1.values(), *mats2.values(),
            sheaf1.transitions.values(), sheaf2.transitions.values(),
        )
    basis = _gauge_solution_space(sheaf1, sheaf2, degree_bound, flat)
    dim = len(basis)
    if dim == 0:
        return None

    def try_candidate(coeffs) -> GaugeWitness | None:
        gauges = _combine(basis, coeffs, atlas, r)
        if all(g.det().is_unit() for g in gauges.values()):
            if verify_gauge_witness(sheaf1, sheaf2, gauges, flat):
                return GaugeWitness(gauges)
        return None

    total = p ** dim
    if total <= 200_000:
        for n in range(1, total):
            coeffs = []
            x = n
            for _ in range(dim):
                coeffs.append(x % p)
                x //= p
            first = next(c for c in coeffs if c)
            if first != 1:  # one representative per scalar class
                continue
            found = try_candidate(tuple(coeffs))
            if found:
                return found
        return None
    rng = random.Random(seed)
    for _ in range(trials):
        coeffs = tuple(rng.randrange(p) for _ in range(dim))
        if not any(coeffs):
            continue
        found = try_candidate(coeffs)
        if found:
            return found
    return None


# ---------- round trip ----------


def roundtrip_check(
    E: HiggsSheaf,
    lift_choice: dict[str, int] | None = None,
    degree_bound: int | None = None,
    seed: int = 0,
) -> tuple[Report, HiggsSheaf]:
    """Compose the two functors and compare against the sign-flipped input."""
    report = Report()
    with timed() as t:
        H = inverse_cartier(E, lift_choice)
        E_rt = cartier(H, lift_choice, degree_bound)
    target = E.negated()
    exact = E_rt == target
    report.add("round trip equals sign-flipped input exactly", exact, (), t.elapsed)
    if not exact:
        with timed() as t:
            witness = gauge_compare(E_rt, target, degree_bound=degree_bound, seed=seed)
        report.entries.pop()  # exactness failed; replace by the gauge check
        report.add(
            "round trip gauge-isomorphic to sign-flipped input",
            witness is not None,
            () if witness else ("no unit-determinant intertwiner found",),
            t.elapsed,
        )
    return report, E_rt
