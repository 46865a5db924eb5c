"""JSON scene format: prime, atlas, optional sheaf, metadata.

Scenes are the only wire format.  Polynomials are strings in the canonical
text syntax, matrices are row-major string arrays, transitions are keyed by
the ordered chart pair "alpha,beta".  Parsing validates every structural
invariant (odd prime, lifting reductions, overlap round trips, sheaf
integrability/nilpotency/gluing) and rejects bad scenes with a field path
in the diagnostic; emission is canonical, so emit(parse(emit(x))) == emit(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .atlas import Atlas, AtlasError, FrobLift, Overlap, SubstPair
from .ring import LaurentPoly, PolyMatrix, PrimeContext, RingError, VarSpec
from .sheaves import FlatSheaf, HiggsSheaf, SheafError, check_flat, check_higgs


class SceneError(ValueError):
    pass


@dataclass
class Scene:
    ctx: PrimeContext
    atlas: Atlas
    sheaf: HiggsSheaf | FlatSheaf | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.ctx.p


def _poly(text, vars: VarSpec, modulus: int, where: str) -> LaurentPoly:
    if not isinstance(text, str):
        raise SceneError(f"{where}: expected a polynomial string, got {text!r}")
    try:
        return LaurentPoly.parse(text, vars, modulus)
    except RingError as exc:
        raise SceneError(f"{where}: {exc}") from exc


def _matrix(strings, rank: int, vars: VarSpec, modulus: int, where: str) -> PolyMatrix:
    if not isinstance(strings, list) or len(strings) != rank * rank:
        raise SceneError(f"{where}: expected {rank * rank} row-major polynomial strings")
    entries = [
        [_poly(strings[i * rank + j], vars, modulus, f"{where}[{i},{j}]") for j in range(rank)]
        for i in range(rank)
    ]
    return PolyMatrix(entries)


def parse_scene(text: str) -> Scene:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SceneError("top level must be a JSON object")
    try:
        ctx = PrimeContext(int(data.get("p")))
    except (TypeError, ValueError) as exc:
        raise SceneError(f"p: {exc}") from exc
    p, p2 = ctx.p, ctx.p2

    atlas_data = data.get("atlas")
    if not isinstance(atlas_data, dict):
        raise SceneError("atlas: missing or not an object")
    atlas = Atlas(ctx)
    for idx, chart in enumerate(atlas_data.get("charts", [])):
        where = f"atlas.charts[{idx}]"
        try:
            vars = VarSpec.make(chart["coords"], chart.get("inverted", []))
            atlas.add_chart(chart["name"], vars)
        except (KeyError, TypeError, RingError, AtlasError) as exc:
            raise SceneError(f"{where}: {exc}") from exc
    for idx, ov in enumerate(atlas_data.get("overlaps", [])):
        where = f"atlas.overlaps[{idx}]"
        try:
            alpha, beta = ov["alpha"], ov["beta"]
            a_chart, b_chart = atlas.charts[alpha], atlas.charts[beta]
            a_vars = a_chart.vars.with_inverted(ov.get("alpha_inverted", []))
            b_vars = b_chart.vars.with_inverted(ov.get("beta_inverted", []))

            def pair(entry, vars, wh) -> SubstPair:
                return SubstPair(
                    _poly(entry["poly"], vars, p, wh + ".poly"),
                    _poly(entry["lift"], vars, p2, wh + ".lift"),
                )

            beta_in_alpha = {
                w: pair(e, a_vars, f"{where}.beta_in_alpha[{w}]")
                for w, e in ov["beta_in_alpha"].items()
            }
            alpha_in_beta = {
                u: pair(e, b_vars, f"{where}.alpha_in_beta[{u}]")
                for u, e in ov["alpha_in_beta"].items()
            }
            atlas.add_overlap(
                Overlap(alpha, beta, a_vars, b_vars, beta_in_alpha, alpha_in_beta)
            )
        except SceneError:
            raise
        except (KeyError, TypeError, RingError, AtlasError) as exc:
            raise SceneError(f"{where}: {exc}") from exc
    for idx, lift in enumerate(atlas_data.get("lifts", [])):
        where = f"atlas.lifts[{idx}]"
        try:
            chart = atlas.charts[lift["chart"]]
            images = {
                coord: _poly(img, chart.vars, p2, f"{where}.images[{coord}]")
                for coord, img in lift["images"].items()
            }
            atlas.add_lift(FrobLift(lift["chart"], images))
        except SceneError:
            raise
        except (KeyError, TypeError, RingError, AtlasError) as exc:
            raise SceneError(f"{where}: {exc}") from exc
    try:
        atlas.validate()
    except (RingError, AtlasError) as exc:
        raise SceneError(f"atlas: {exc}") from exc

    sheaf = None
    sheaf_data = data.get("sheaf")
    if sheaf_data is not None:
        if not isinstance(sheaf_data, dict):
            raise SceneError("sheaf: not an object")
        kind = sheaf_data.get("kind")
        if kind not in ("higgs", "flat"):
            raise SceneError(f"sheaf.kind: expected 'higgs' or 'flat', got {kind!r}")
        try:
            rank = int(sheaf_data["rank"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneError(f"sheaf.rank: {exc}") from exc
        matrices = {}
        for chart_name, per_coord in sheaf_data.get("matrices", {}).items():
            if chart_name not in atlas.charts:
                raise SceneError(f"sheaf.matrices: unknown chart {chart_name!r}")
            vars = atlas.chart_vars(chart_name)
            mats = []
            for coord in vars.names:
                if coord not in per_coord:
                    raise SceneError(
                        f"sheaf.matrices[{chart_name}]: missing coordinate {coord!r}"
                    )
                mats.append(
                    _matrix(per_coord[coord], rank, vars, p,
                            f"sheaf.matrices[{chart_name}][{coord}]")
                )
            matrices[chart_name] = mats
        transitions = {}
        for key, strings in sheaf_data.get("transitions", {}).items():
            names = key.split(",")
            if len(names) != 2 or tuple(names) not in atlas.overlaps:
                raise SceneError(f"sheaf.transitions: unknown overlap key {key!r}")
            ov = atlas.overlaps[tuple(names)]
            transitions[tuple(names)] = _matrix(
                strings, rank, ov.alpha_vars, p, f"sheaf.transitions[{key}]"
            )
        try:
            if kind == "higgs":
                sheaf = HiggsSheaf(atlas, rank, matrices, transitions)
                rep = check_higgs(sheaf)
            else:
                sheaf = FlatSheaf(atlas, rank, matrices, transitions)
                rep = check_flat(sheaf)
        except (SheafError, RingError) as exc:
            raise SceneError(f"sheaf: {exc}") from exc
        if not rep.ok():
            raise SceneError(
                "sheaf: invariants fail: "
                + "; ".join(e.check + (f" ({'; '.join(e.witness)})" if e.witness else "")
                            for e in rep.failures())
            )

    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise SceneError("metadata: not an object")
    return Scene(ctx, atlas, sheaf, metadata)


def scene_to_dict(scene: Scene) -> dict:
    atlas = scene.atlas
    charts = [
        {
            "name": chart.name,
            "coords": list(chart.vars.names),
            "inverted": sorted(chart.vars.inverted),
        }
        for chart in atlas.charts.values()
    ]
    overlaps = []
    for ov in atlas.overlaps.values():
        a_chart = atlas.charts[ov.alpha]
        b_chart = atlas.charts[ov.beta]
        overlaps.append(
            {
                "alpha": ov.alpha,
                "beta": ov.beta,
                "alpha_inverted": sorted(ov.alpha_vars.inverted - a_chart.vars.inverted),
                "beta_inverted": sorted(ov.beta_vars.inverted - b_chart.vars.inverted),
                "beta_in_alpha": {
                    w: {"poly": str(sp.poly), "lift": str(sp.lift)}
                    for w, sp in ov.beta_in_alpha.items()
                },
                "alpha_in_beta": {
                    u: {"poly": str(sp.poly), "lift": str(sp.lift)}
                    for u, sp in ov.alpha_in_beta.items()
                },
            }
        )
    lifts = [
        {"chart": chart, "images": {c: str(img) for c, img in lift.images.items()}}
        for chart, chart_lifts in atlas.lifts.items()
        for lift in chart_lifts
    ]
    out: dict = {"p": scene.p}
    if scene.metadata:
        out["metadata"] = scene.metadata
    out["atlas"] = {"charts": charts, "overlaps": overlaps, "lifts": lifts}
    if scene.sheaf is not None:
        sheaf = scene.sheaf
        kind = "higgs" if isinstance(sheaf, HiggsSheaf) else "flat"
        per_chart = sheaf.fields if kind == "higgs" else sheaf.conn
        matrices = {
            chart: {
                coord: [str(m.entries[i][j]) for i in range(sheaf.rank) for j in range(sheaf.rank)]
                for coord, m in zip(atlas.chart_vars(chart).names, mats)
            }
            for chart, mats in per_chart.items()
        }
        transitions = {
            f"{a},{b}": [str(t.entries[i][j]) for i in range(sheaf.rank) for j in range(sheaf.rank)]
            for (a, b), t in sheaf.transitions.items()
        }
        out["sheaf"] = {
            "kind": kind,
            "rank": sheaf.rank,
            "matrices": matrices,
            "transitions": transitions,
        }
    return out


def emit_scene(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"
