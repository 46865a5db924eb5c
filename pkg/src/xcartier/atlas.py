"""Charts, overlaps, Frobenius liftings and their divided-Frobenius data.

An overlap stores its localized coordinate systems on both sides plus the
coordinate change in both directions, each with a mod-p**2 lift:

    alpha_vars  -- the alpha chart's names with extra inversions (the
                   canonical coordinates of the overlap ring)
    beta_vars   -- likewise for the beta side
    beta_in_alpha[w] -- the beta coordinate w as a function of alpha_vars
    alpha_in_beta[u] -- the alpha coordinate u as a function of beta_vars

A Frobenius lifting assigns to each chart coordinate a mod-p**2 image
congruent to its p-th power.  `lift_on_overlap` transports a lifting from
either chart to the overlap ring, which is where the homotopy h between two
liftings and its two defining identities are checked:

    d(h_ab) = zeta_a - zeta_b          (coboundary identity)
    h_ab + h_bc = h_ac                 (cocycle identity)
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .report import Report, timed
from .ring import (
    LaurentPoly,
    OneForm,
    PolyMatrix,
    PrimeContext,
    VarSpec,
    d,
    divide_by_p,
)


class AtlasError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    name: str
    vars: VarSpec


@dataclass(frozen=True)
class SubstPair:
    """One coordinate image: its mod-p expression and a mod-p**2 lift."""

    poly: LaurentPoly
    lift: LaurentPoly

    def __post_init__(self):
        if self.lift.reduce_mod(self.poly.modulus) != self.poly:
            raise AtlasError(
                f"lift '{self.lift}' does not reduce to '{self.poly}' mod {self.poly.modulus}"
            )


@dataclass(frozen=True)
class Overlap:
    alpha: str
    beta: str
    alpha_vars: VarSpec
    beta_vars: VarSpec
    beta_in_alpha: dict[str, SubstPair]
    alpha_in_beta: dict[str, SubstPair]

    @property
    def pair(self) -> tuple[str, str]:
        return (self.alpha, self.beta)


@dataclass(frozen=True)
class FrobLift:
    """Images F(t_i) mod p**2 of one chart's coordinates, F(t_i) = t_i^p mod p."""

    chart: str
    images: dict[str, LaurentPoly]


@dataclass
class Atlas:
    ctx: PrimeContext
    charts: dict[str, Chart] = field(default_factory=dict)
    overlaps: dict[tuple[str, str], Overlap] = field(default_factory=dict)
    lifts: dict[str, list[FrobLift]] = field(default_factory=dict)

    def add_chart(self, name: str, vars: VarSpec) -> Chart:
        if name in self.charts:
            raise AtlasError(f"duplicate chart name {name!r}")
        if "," in name or "|" in name:
            raise AtlasError(f"chart name {name!r} may not contain ',' or '|'")
        chart = Chart(name, vars)
        self.charts[name] = chart
        self.lifts.setdefault(name, [])
        return chart

    def add_overlap(self, overlap: Overlap) -> None:
        for c in (overlap.alpha, overlap.beta):
            if c not in self.charts:
                raise AtlasError(f"overlap references unknown chart {c!r}")
        self.overlaps[overlap.pair] = overlap

    def add_lift(self, lift: FrobLift) -> None:
        if lift.chart not in self.charts:
            raise AtlasError(f"lift references unknown chart {lift.chart!r}")
        self.lifts[lift.chart].append(lift)

    def chart_vars(self, name: str) -> VarSpec:
        return self.charts[name].vars

    def lift_for(self, chart: str, choice: dict[str, int] | None = None) -> FrobLift:
        idx = 0 if choice is None else choice.get(chart, 0)
        lifts = self.lifts.get(chart, [])
        if idx >= len(lifts):
            raise AtlasError(f"chart {chart!r} has no Frobenius lifting #{idx}")
        return lifts[idx]

    def validate(self) -> None:
        p, p2 = self.ctx.p, self.ctx.p2
        for name, lifts in self.lifts.items():
            if not lifts:
                raise AtlasError(f"chart {name!r} has no Frobenius lifting")
            vars = self.charts[name].vars
            for lift in lifts:
                if set(lift.images) != set(vars.names):
                    raise AtlasError(f"lift on {name!r} must cover coordinates {vars.names}")
                for coord, img in lift.images.items():
                    if img.modulus != p2 or img.vars != vars:
                        raise AtlasError(f"lift image of {coord!r} on {name!r}: wrong ring")
                    expected = LaurentPoly.var(vars, p, coord) ** p
                    if img.reduce_mod(p) != expected:
                        raise AtlasError(
                            f"lift image of {coord!r} on {name!r} is '{img}', "
                            f"not congruent to {coord}^{p} mod {p}"
                        )
        for ov in self.overlaps.values():
            self._validate_overlap(ov)

    def _validate_overlap(self, ov: Overlap) -> None:
        a_chart, b_chart = self.charts[ov.alpha], self.charts[ov.beta]
        if ov.alpha_vars.names != a_chart.vars.names:
            raise AtlasError(f"overlap {ov.pair}: alpha-side names must match chart {ov.alpha!r}")
        if ov.beta_vars.names != b_chart.vars.names:
            raise AtlasError(f"overlap {ov.pair}: beta-side names must match chart {ov.beta!r}")
        if set(ov.beta_in_alpha) != set(b_chart.vars.names):
            raise AtlasError(f"overlap {ov.pair}: beta_in_alpha must cover {b_chart.vars.names}")
        if set(ov.alpha_in_beta) != set(a_chart.vars.names):
            raise AtlasError(f"overlap {ov.pair}: alpha_in_beta must cover {a_chart.vars.names}")
        # mutual inversion on coordinates, at both modulus levels
        for level in (1, 2):
            def pick(sp: SubstPair) -> LaurentPoly:
                return sp.poly if level == 1 else sp.lift

            b_map = {w: pick(sp) for w, sp in ov.beta_in_alpha.items()}
            a_map = {u: pick(sp) for u, sp in ov.alpha_in_beta.items()}
            m = self.ctx.p if level == 1 else self.ctx.p2
            for u in a_chart.vars.names:
                back = a_map[u].subst(b_map, ov.alpha_vars)
                if back != LaurentPoly.var(ov.alpha_vars, m, u):
                    raise AtlasError(
                        f"overlap {ov.pair}: coordinate {u!r} does not round-trip "
                        f"(got '{back}' mod {m})"
                    )
            for w in b_chart.vars.names:
                back = b_map[w].subst(a_map, ov.beta_vars)
                if back != LaurentPoly.var(ov.beta_vars, m, w):
                    raise AtlasError(
                        f"overlap {ov.pair}: coordinate {w!r} does not round-trip "
                        f"(got '{back}' mod {m})"
                    )
        jac = jacobian_beta_in_alpha(ov)
        if not jac.det().is_unit():
            raise AtlasError(f"overlap {ov.pair}: coordinate-change Jacobian is not a unit")


# ---------- coordinate changes ----------


def jacobian_beta_in_alpha(ov: Overlap) -> PolyMatrix:
    """J[j][i] = d(w_j)/d(u_i) on alpha-side coordinates."""
    rows = []
    for w in ov.beta_vars.names:
        expr = ov.beta_in_alpha[w].poly
        rows.append([expr.deriv(u) for u in ov.alpha_vars.names])
    return PolyMatrix(rows)


def pull_beta_function(ov: Overlap, f: LaurentPoly) -> LaurentPoly:
    """Express a function on the beta chart in alpha-side overlap coordinates."""
    images = {w: sp.poly for w, sp in ov.beta_in_alpha.items()}
    return f.subst(images, ov.alpha_vars)


def change_chart_form(form: OneForm, ov: Overlap, direction: str) -> OneForm:
    """Rewrite a 1-form across the overlap, transforming by the Jacobian."""
    if direction == "alpha_to_beta":
        src, dst = ov.alpha_vars, ov.beta_vars
        exprs = {u: ov.alpha_in_beta[u].poly for u in src.names}
    elif direction == "beta_to_alpha":
        src, dst = ov.beta_vars, ov.alpha_vars
        exprs = {w: ov.beta_in_alpha[w].poly for w in src.names}
    else:
        raise AtlasError(f"unknown direction {direction!r}")
    if form.vars.names != src.names:
        raise AtlasError("form does not live on the source side of this overlap")
    coeffs_sub = [
        form.coeffs[i].extend_vars(src).subst(exprs, dst) for i in range(src.arity)
    ]
    out = []
    for j, nj in enumerate(dst.names):
        acc = LaurentPoly.zero(dst, form.coeffs[0].modulus)
        for i, ni in enumerate(src.names):
            acc = acc + coeffs_sub[i] * exprs[ni].deriv(nj)
        out.append(acc)
    return OneForm(dst, tuple(out))


def change_chart_matrix(mat: PolyMatrix, ov: Overlap, direction: str) -> PolyMatrix:
    """Rewrite a matrix of functions across the overlap (no Jacobian factor)."""
    if direction == "alpha_to_beta":
        exprs = {u: ov.alpha_in_beta[u].poly for u in ov.alpha_vars.names}
        return mat.extend_vars(ov.alpha_vars).subst(exprs, ov.beta_vars)
    if direction == "beta_to_alpha":
        exprs = {w: ov.beta_in_alpha[w].poly for w in ov.beta_vars.names}
        return mat.extend_vars(ov.beta_vars).subst(exprs, ov.alpha_vars)
    raise AtlasError(f"unknown direction {direction!r}")


# ---------- divided Frobenius and homotopies ----------


def zeta_form(vars: VarSpec, images: dict[str, LaurentPoly], coord: str) -> OneForm:
    """zeta(1 (x) dt_coord) = d(F(t_coord))/p as a mod-p 1-form."""
    img = images[coord]
    coeffs = tuple(divide_by_p(img.deriv(name)) for name in vars.names)
    return OneForm(vars, coeffs)


def zeta_apply(vars: VarSpec, images: dict[str, LaurentPoly], fform) -> OneForm:
    """O-linear extension: zeta(sum g_i (x) dt_i) = sum g_i * zeta(1 (x) dt_i)."""
    from .ring import char_of_modulus

    p, _ = char_of_modulus(next(iter(images.values())).modulus)
    zero = LaurentPoly.zero(vars, p)
    out = OneForm(vars, tuple(zero for _ in vars.names))
    for i, name in enumerate(vars.names):
        if not fform.coeffs[i].is_zero():
            out = out + zeta_form(vars, images, name).scale(fform.coeffs[i])
    return out


def h_pair(
    vars: VarSpec,
    images_a: dict[str, LaurentPoly],
    images_b: dict[str, LaurentPoly],
    coord: str,
) -> LaurentPoly:
    """h_ab(1 (x) dt_coord) = (F_a(t) - F_b(t))/p as a mod-p function."""
    return divide_by_p(images_a[coord] - images_b[coord])


def lift_on_overlap(atlas: Atlas, ov: Overlap, lift: FrobLift) -> dict[str, LaurentPoly]:
    """Transport a chart lifting to the overlap: images of alpha-side coords.

    For a lifting on the alpha chart this is just localization.  For one on
    the beta chart, each alpha coordinate u is written in beta coordinates
    mod p**2, pushed through the lifted Frobenius there, and pulled back.
    """
    p, p2 = atlas.ctx.p, atlas.ctx.p2
    if lift.chart == ov.alpha:
        out = {u: img.extend_vars(ov.alpha_vars) for u, img in lift.images.items()}
    elif lift.chart == ov.beta:
        frob_images = {w: img.extend_vars(ov.beta_vars) for w, img in lift.images.items()}
        back = {w: sp.lift for w, sp in ov.beta_in_alpha.items()}
        out = {}
        for u in ov.alpha_vars.names:
            expr = ov.alpha_in_beta[u].lift  # u as function of beta coords, mod p**2
            pushed = expr.subst(frob_images, ov.beta_vars)
            out[u] = pushed.subst(back, ov.alpha_vars)
    else:
        raise AtlasError(f"lifting on {lift.chart!r} does not live on overlap {ov.pair}")
    for u, img in out.items():
        expected = LaurentPoly.var(ov.alpha_vars, p, u) ** p
        if img.reduce_mod(p) != expected:
            raise AtlasError(
                f"transported lifting is corrupt: image of {u!r} is '{img}' mod {p2}"
            )
    return out


def _domains_with_lifts(atlas: Atlas, min_lifts: int = 2):
    """Yield (label, vars, [(tag, images)]) for charts and overlaps."""
    for name, chart in atlas.charts.items():
        lifts = atlas.lifts.get(name, [])
        if len(lifts) >= min_lifts:
            yield (
                f"chart:{name}",
                chart.vars,
                [(f"{name}#{i}", lift.images) for i, lift in enumerate(lifts)],
            )
    for ov in atlas.overlaps.values():
        collected = []
        for side in (ov.alpha, ov.beta):
            for i, lift in enumerate(atlas.lifts.get(side, [])):
                collected.append((f"{side}#{i}", lift_on_overlap(atlas, ov, lift)))
        if len(collected) >= min_lifts:
            yield (f"overlap:{ov.alpha}|{ov.beta}", ov.alpha_vars, collected)


def verify_deligne_illusie(atlas: Atlas) -> Report:
    """Check both homotopy identities for all lift pairs and triples."""
    report = Report()
    found_any = False
    for label, vars, lifted in _domains_with_lifts(atlas):
        found_any = True
        n = len(lifted)
        zetas = {
            tag: {c: zeta_form(vars, images, c) for c in vars.names}
            for tag, images in lifted
        }
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                tag_a, img_a = lifted[i]
                tag_b, img_b = lifted[j]
                with timed() as t:
                    ok = True
                    witness: tuple[str, ...] = ()
                    for c in vars.names:
                        h = h_pair(vars, img_a, img_b, c)
                        lhs = d(h)
                        rhs = zetas[tag_a][c] - zetas[tag_b][c]
                        if lhs != rhs:
                            ok = False
                            witness = (f"d h({c}) = {lhs}", f"zeta_a - zeta_b = {rhs}")
                            break
                        h_back = h_pair(vars, img_b, img_a, c)
                        if h_back != -h:
                            ok = False
                            witness = (f"h_ab({c}) = {h}", f"h_ba({c}) = {h_back}")
                            break
                report.add(
                    f"{label}: d(h) = zeta difference [{tag_a},{tag_b}]",
                    ok, witness, t.elapsed,
                )
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if len({i, j, k}) < 3:
                        continue
                    tag_a, img_a = lifted[i]
                    tag_b, img_b = lifted[j]
                    tag_c, img_c = lifted[k]
                    with timed() as t:
                        ok = True
                        witness = ()
                        for c in vars.names:
                            lhs = h_pair(vars, img_a, img_b, c) + h_pair(vars, img_b, img_c, c)
                            rhs = h_pair(vars, img_a, img_c, c)
                            if lhs != rhs:
                                ok = False
                                witness = (f"h_ab+h_bc ({c}) = {lhs}", f"h_ac ({c}) = {rhs}")
                                break
                    report.add(
                        f"{label}: cocycle [{tag_a},{tag_b},{tag_c}]", ok, witness, t.elapsed
                    )
    if not found_any:
        report.skip("no lift pairs available", "atlas has a single lifting per domain")
    return report
