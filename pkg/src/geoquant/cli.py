"""Command line front end.

    geoquant bracket "q1^2*p1" "p1"
    geoquant quantize model.json
    geoquant check-dirac model.json --degree 3
    geoquant spectrum model.json --cutoff 10
    geoquant cohomology nerve.json
    geoquant classify-metalinear nerve.json
    geoquant simms --kmax 10 --case both
    geoquant report --all

Model files are JSON::

    {"phase_space": {"kind": "complex", "n": 1}, "hbar": "1",
     "potential": "holo_adapted", "observables": {"H": "z1*zb1/2"},
     "representation": "bargmann", "cutoff": 3, "halfform": true}

``potential`` may also be ``{"custom": {"q1": "-p1"}}`` (coefficients of the
coordinate differentials).  Nerve files hold ``vertices``, ``simplices``
and optionally ``transitions`` (``"a,b": "1/2"`` edge primitives).

Exit status: 0 all checks pass, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cech import Nerve, Ring, chern_cocycle, cohomology, euler_characteristic, metalinear_class_count
from .errors import GeoQuantError, ParseError
from .fock import FockBasis, corrected_operator, matrix_of, spectrum
from .polar import (
    REPRESENTATIONS, PolarizationSpec, preserves_polarization, reduce_op, reduced_space,
    representation_table,
)
from .prequant import PrequantContext, dirac_sweep, gauge_shift_check, prequant_op
from .simms import metalinear_report
from .symexpr import (
    Z_KIND, ZBAR_KIND, Expr, monomials_upto, p, parse_expr, q, render_scalar, var_from_name,
)
from .symplect import ChartKind, ChartModel, OneForm, hamiltonian_vf, poisson, potential

WARNINGS = {
    "gauge-phase-sign": (
        "under theta -> theta + d(alpha) the wavefunction picks up exp(-i*alpha/hbar); "
        "the source writes exp(+i*alpha/hbar), which does not intertwine the two operators "
        "with nabla = X + (i/hbar)*theta(X)"),
    "momentum-operator-sign": (
        "with theta = q dp the operators are O_q = i*hbar*d/dp and O_p = -i*hbar*d/dq + p; "
        "the source prints both with the opposite sign"),
    "halfform-prefactor": (
        "the half-form term of the corrected operator is taken as -i*hbar*L(X_f) on the "
        "half-form; the source writes i*L(X_f), which does not give the (N + n/2)*hbar levels"),
    "simms-2piH": (
        "on the Bohr-Sommerfeld leaves 2*pi*H = pi*r^2 (H = r^2/2), not 2*pi*r^2 as printed "
        "in the source; with pi*r^2 leaf k has eigenvalue k"),
}


class InputError(Exception):
    """Bad command line or file contents (exit status 2)."""


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return None


def _where(path, text, key) -> str:
    line = _line_of(text, key) if text else None
    return f"{path}:{line}" if line else str(path)


def _rational(value, what) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{what}: {value!r} is not a rational number") from None


@dataclass
class ModelFile:
    kind: ChartKind = ChartKind.REAL_CANONICAL
    n: int = 1
    hbar: Fraction = Fraction(1)
    potential_spec: object = None
    observables: dict = field(default_factory=dict)
    representation: str | None = None
    cutoff: int | None = None
    halfform: bool = False
    source: str = "<builtin>"

    @property
    def chart(self) -> ChartModel:
        return ChartModel.real(self.n) if self.kind is ChartKind.REAL_CANONICAL else ChartModel.complex(self.n)

    @property
    def polarization(self) -> PolarizationSpec | None:
        return None if self.representation is None else PolarizationSpec.from_representation(self.representation, self.n)

    def potential(self, chart=None):
        chart = chart or self.chart
        spec = self.potential_spec
        if spec is None:
            P = self.polarization
            if P is not None:
                return reduced_space(P).adapted_theta
            spec = "canonical" if self.kind is ChartKind.REAL_CANONICAL else "holo_adapted"
        if isinstance(spec, dict):
            return potential(OneForm({var_from_name(k): parse_expr(v) for k, v in spec.items()}), chart)
        return potential(spec, chart)

    def echo(self) -> dict:
        spec = self.potential_spec
        return {
            "phase_space": {"kind": self.kind.value, "n": self.n},
            "hbar": str(self.hbar),
            "potential": spec if spec is not None else self.potential().name,
            "observables": {k: str(v) for k, v in self.observables.items()},
            "representation": self.representation,
            "cutoff": self.cutoff,
            "halfform": self.halfform,
        }

    @classmethod
    def load(cls, path) -> "ModelFile":
        if str(path).startswith("builtin:"):
            return builtin_model(str(path)[len("builtin:"):])
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"{path}: {e.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
        return cls.from_dict(data, str(path), text)

    @classmethod
    def from_dict(cls, data, source="<model>", text="") -> "ModelFile":
        if not isinstance(data, dict):
            raise InputError(f"{source}: a model file is a JSON object")
        unknown = set(data) - {"phase_space", "hbar", "potential", "observables",
                               "representation", "cutoff", "halfform"}
        if unknown:
            key = sorted(unknown)[0]
            raise InputError(f"{_where(source, text, key)}: unknown field {key!r}")
        m = cls(source=source)
        ps = data.get("phase_space", {})
        try:
            m.kind = ChartKind(ps.get("kind", "real"))
            m.n = int(ps.get("n", 1))
        except (ValueError, AttributeError, TypeError):
            raise InputError(f"{_where(source, text, 'phase_space')}: phase_space needs "
                             "kind 'real' or 'complex' and a positive n") from None
        if m.n < 1:
            raise InputError(f"{_where(source, text, 'phase_space')}: n must be positive")
        m.hbar = _rational(data.get("hbar", "1"), _where(source, text, "hbar"))
        if m.hbar <= 0:
            raise InputError(f"{_where(source, text, 'hbar')}: hbar must be positive")
        rep = data.get("representation")
        if rep == "prequant":
            rep = None              # bare prequantum operators, no polarization
        if rep is not None:
            if rep not in REPRESENTATIONS:
                raise InputError(f"{_where(source, text, 'representation')}: unknown representation "
                                 f"{rep!r} (choose from {', '.join(sorted(REPRESENTATIONS))}, prequant)")
            if PolarizationSpec.from_representation(rep, 1).chart.kind is not m.kind:
                raise InputError(f"{_where(source, text, 'representation')}: representation {rep!r} "
                                 f"does not live on the {m.kind.value} chart")
        m.representation = rep
        pot = data.get("potential")
        if isinstance(pot, dict):
            if set(pot) != {"custom"} or not isinstance(pot["custom"], dict):
                raise InputError(f"{_where(source, text, 'potential')}: custom potentials are "
                                 '{"custom": {"q1": "...", ...}}')
            pot = {str(k): str(v) for k, v in pot["custom"].items()}
        m.potential_spec = pot
        obs = data.get("observables")
        if obs is None:
            obs = default_observables(m.kind, m.n)
        if not isinstance(obs, dict):
            raise InputError(f"{_where(source, text, 'observables')}: observables must map names to expressions")
        chart = m.chart
        for name, src in obs.items():
            try:
                f = parse_expr(str(src))
                chart.check_expr(f)
            except GeoQuantError as e:
                raise InputError(f"{_where(source, text, name)}: observable {name}: {e}") from None
            m.observables[str(name)] = f
        cutoff = data.get("cutoff")
        if cutoff is not None:
            if not isinstance(cutoff, int) or isinstance(cutoff, bool) or cutoff < 0:
                raise InputError(f"{_where(source, text, 'cutoff')}: cutoff must be a non-negative integer")
        m.cutoff = cutoff
        hf = data.get("halfform", False)
        if not isinstance(hf, bool):
            raise InputError(f"{_where(source, text, 'halfform')}: halfform must be true or false")
        m.halfform = hf
        try:
            m.potential(chart)
        except (GeoQuantError, ValueError) as e:
            raise InputError(f"{_where(source, text, 'potential')}: {e}") from None
        return m


def default_observables(kind: ChartKind, n: int) -> dict:
    out = {}
    if kind is ChartKind.REAL_CANONICAL:
        for j in range(1, n + 1):
            out[f"q{j}" if n > 1 else "q"] = f"q{j}"
            out[f"p{j}" if n > 1 else "p"] = f"p{j}"
        out["H"] = " + ".join(f"(p{j}^2 + q{j}^2)/2" for j in range(1, n + 1))
    else:
        for j in range(1, n + 1):
            out[f"z{j}" if n > 1 else "z"] = f"z{j}"
            out[f"zb{j}" if n > 1 else "zb"] = f"zb{j}"
        out["H"] = " + ".join(f"z{j}*zb{j}/2" for j in range(1, n + 1))
    return out


BUILTIN_MODELS = {
    "canonical": {"phase_space": {"kind": "real", "n": 1}, "potential": "canonical"},
    "schrodinger": {"phase_space": {"kind": "real", "n": 1}, "representation": "schrodinger"},
    "momentum": {"phase_space": {"kind": "real", "n": 1}, "representation": "momentum"},
    "bargmann": {"phase_space": {"kind": "complex", "n": 1}, "representation": "bargmann"},
    "oscillator": {"phase_space": {"kind": "complex", "n": 1}, "representation": "bargmann",
                   "observables": {"H": "z1*zb1/2"}, "cutoff": 3, "halfform": True},
}


def builtin_model(name: str) -> ModelFile:
    try:
        return ModelFile.from_dict(BUILTIN_MODELS[name], f"builtin:{name}")
    except KeyError:
        raise InputError(f"no builtin model {name!r} (choose from {', '.join(sorted(BUILTIN_MODELS))})") from None


def _hbar_override(model: ModelFile, args) -> Fraction:
    if getattr(args, "hbar", None) is None:
        return model.hbar
    h = _rational(args.hbar, "--hbar")
    if h <= 0:
        raise InputError("--hbar must be positive")
    return h


def _load_nerve(path) -> tuple:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        N = Nerve.from_json(data)
    except GeoQuantError as e:
        raise InputError(f"{path}: {e}") from None
    return N, data.get("transitions"), text


def _edge_labels(N: Nerve, key: str):
    by_str = {str(v): v for v in N.vertices}
    parts = [s.strip() for s in key.split(",")]
    if len(parts) != 2 or any(s not in by_str for s in parts):
        raise InputError(f"transition key {key!r} is not an edge 'a,b' of the nerve")
    return by_str[parts[0]], by_str[parts[1]]


# subcommands ---------------------------------------------------------------

def cmd_bracket(args) -> tuple:
    try:
        f, g = parse_expr(args.f), parse_expr(args.g)
    except ParseError as e:
        raise InputError(str(e)) from None
    used = f.variables() | g.variables()
    kind = args.kind
    if kind is None:
        kind = "complex" if any(v.kind in (Z_KIND, ZBAR_KIND) for v in used) else "real"
    n = args.n or max([v.index for v in used if not v.is_named] or [1])
    chart = ChartModel.real(n) if kind == "real" else ChartModel.complex(n)
    try:
        chart.check_expr(f)
        chart.check_expr(g)
    except GeoQuantError as e:
        raise InputError(str(e)) from None
    result = {
        "chart": {"kind": chart.kind.value, "n": n},
        "f": str(f), "g": str(g),
        "bracket": str(poisson(f, g, chart)),
        "X_f": hamiltonian_vf(f, chart).as_diffop().render(),
        "X_g": hamiltonian_vf(g, chart).as_diffop().render(),
    }
    return result, True, []


def _warnings_for(model: ModelFile, halfform: bool = False) -> list:
    codes = []
    th = model.potential()
    if model.representation == "momentum" or th.name == "momentum":
        codes.append("momentum-operator-sign")
    if halfform:
        codes.append("halfform-prefactor")
    return codes


def cmd_quantize(args) -> tuple:
    model = ModelFile.load(args.model or "builtin:schrodinger")
    hbar = None if args.hbar is None else _hbar_override(model, args)
    if model.representation is None:
        ctx = PrequantContext(model.chart, model.potential(), hbar)
        rows = {name: {"observable": str(f), "operator": prequant_op(f, ctx).render()}
                for name, f in model.observables.items()}
        result = {"model": model.echo(), "potential": model.potential().name, "prequantum": rows}
        return result, True, _warnings_for(model)
    theta = model.potential() if model.potential_spec is not None else None
    table = representation_table(model.polarization, model.observables, hbar=hbar, theta=theta)
    result = {
        "model": model.echo(),
        "representation": model.representation,
        "polarization": model.polarization.kind.value,
        "table": {row.name: row.to_dict() for row in table},
    }
    return result, True, _warnings_for(model)


def cmd_check_dirac(args) -> tuple:
    model = ModelFile.load(args.model or "builtin:canonical")
    ctx = PrequantContext(model.chart, model.potential(), _hbar_override(model, args))
    if args.degree < 0:
        raise InputError("--degree must be non-negative")
    report = dirac_sweep(ctx, args.degree)
    result = {"model": model.echo(), "sweep": report.to_dict()}
    return result, report.holds, _warnings_for(model)


def _observable_spectrum(model: ModelFile, name: str, f: Expr, hbar: Fraction, cutoff: int) -> dict:
    P = model.polarization
    R = reduced_space(P)
    if not preserves_polarization(f, P):
        return {"observable": str(f), "quantizable": False}
    ctx = PrequantContext(P.chart, R.adapted_theta, hbar)
    if model.halfform:
        D = corrected_operator(f, P, hbar)
    else:
        D = reduce_op(prequant_op(f, ctx), R)
    M = matrix_of(D, FockBasis(model.n, cutoff))
    spec = spectrum(M)
    out = {"observable": str(f), "quantizable": True, "operator": D.render(), **spec.to_dict()}
    if spec.exact:
        out["in_units_of_hbar"] = [
            {"value": render_scalar(v / hbar), "multiplicity": m} for v, m in spec.eigenvalues]
    return out


def cmd_spectrum(args) -> tuple:
    model = ModelFile.load(args.model or "builtin:oscillator")
    if model.representation != "bargmann":
        raise InputError(f"{model.source}: spectrum needs representation 'bargmann'")
    cutoff = args.cutoff if args.cutoff is not None else model.cutoff
    if cutoff is None:
        raise InputError(f"{model.source}: no cutoff given (model field 'cutoff' or --cutoff)")
    if cutoff < 0:
        raise InputError("--cutoff must be non-negative")
    hbar = _hbar_override(model, args)
    names = [args.observable] if args.observable else (
        ["H"] if "H" in model.observables else list(model.observables))
    spectra = {}
    for name in names:
        if name not in model.observables:
            raise InputError(f"{model.source}: no observable named {name!r}")
        spectra[name] = _observable_spectrum(model, name, model.observables[name], hbar, cutoff)
    result = {"model": model.echo(), "hbar": str(hbar), "cutoff": cutoff,
              "halfform": model.halfform, "spectra": spectra}
    return result, True, _warnings_for(model, model.halfform)


_RINGS = {"Z": Ring.INT, "Q": Ring.RAT, "Z2": Ring.Z2}


def cmd_cohomology(args) -> tuple:
    N, transitions, _ = _load_nerve(args.nerve)
    rings = list(_RINGS) if args.ring == "all" else [args.ring]
    top = max(N.dimension, 0)
    groups = {r: [cohomology(N, k, _RINGS[r]).to_dict() for k in range(top + 1)] for r in rings}
    chi_h, chi_cells = euler_characteristic(N)
    result = {
        "nerve": {"vertices": len(N.vertices), "dimension": N.dimension,
                  "simplex_counts": [N.count(k) for k in range(top + 1)]},
        "cohomology": groups,
        "euler_characteristic": {"from_cohomology": chi_h, "from_simplices": chi_cells},
    }
    ok = chi_h == chi_cells
    if transitions is not None:
        if not isinstance(transitions, dict):
            raise InputError(f"{args.nerve}: 'transitions' must map 'a,b' to rationals")
        f = {_edge_labels(N, k): _rational(v, f"{args.nerve}: transitions[{k!r}]")
             for k, v in transitions.items()}
        try:
            chern = chern_cocycle(f, N)
        except GeoQuantError as e:
            raise InputError(f"{args.nerve}: {e}") from None
        result["chern"] = chern.to_dict()
        ok = ok and chern.integral and chern.closed
    return result, ok, []


def cmd_classify_metalinear(args) -> tuple:
    N, _, _ = _load_nerve(args.nerve)
    h1 = cohomology(N, 1, Ring.Z2)
    result = {"H1_Z2": h1.to_dict(), "metalinear_classes": metalinear_class_count(N)}
    return result, True, []


def cmd_simms(args) -> tuple:
    if args.kmax < 0:
        raise InputError("--kmax must be non-negative")
    cases = ("trivial", "nontrivial") if args.case == "both" else (args.case,)
    report = metalinear_report(args.kmax, cases)
    warnings = [w["code"] for w in report.pop("warnings")]
    ok = report["same_pde"] and report["class_count"] == 2 and all(
        c["two_set_cocycle"] and c["triangle_cocycle"] and not c["smooth_solution"]["exists"]
        for c in report["cases"].values())
    return report, ok, warnings


def _suite(degree: int) -> tuple:
    """Built-in checks of the standard examples; (results, all passed, warning codes)."""
    checks = {}
    for name in ("canonical", "momentum", "symmetric"):
        ctx = PrequantContext.build("real", 1, name, Fraction(1))
        checks[f"dirac/{name}"] = dirac_sweep(ctx, degree).to_dict()
    ctx = PrequantContext.build("real", 1, "canonical")
    gauge = [gauge_shift_check(f, a, ctx)
             for f in monomials_upto((q(1), p(1)), 2) for a in monomials_upto((q(1), p(1)), 3)]
    checks["gauge_shift"] = {"holds": all(r.holds for r in gauge), "pairs_checked": len(gauge)}

    sym = PrequantContext.build("real", 1, "symmetric", None)
    H = (Expr.var(q(1)) ** 2 + Expr.var(p(1)) ** 2) / 2
    checks["symmetric_operators"] = {
        "O_q": prequant_op(Expr.var(q(1)), sym).render(),
        "O_H": prequant_op(H, sym).render(),
    }
    for rep in ("schrodinger", "momentum", "bargmann"):
        m = builtin_model(rep)
        table = representation_table(m.polarization, m.observables)
        checks[f"quantize/{rep}"] = {row.name: row.to_dict() for row in table}
    osc = builtin_model("oscillator")
    for hf in (False, True):
        osc.halfform = hf
        checks[f"spectrum/oscillator{'/halfform' if hf else ''}"] = _observable_spectrum(
            osc, "H", osc.observables["H"], Fraction(1), 3)
    tet, tri = Nerve.tetrahedron_boundary(), Nerve.triangle()
    checks["cech/tetrahedron"] = [str(cohomology(tet, k, Ring.INT)) for k in range(3)]
    checks["cech/triangle_H1_Z2"] = str(cohomology(tri, 1, Ring.Z2))
    checks["cech/metalinear_classes"] = metalinear_class_count(tri)
    simms = metalinear_report(10)
    codes = [w["code"] for w in simms.pop("warnings")]
    checks["simms"] = simms

    ok = (all(checks[f"dirac/{n}"]["holds"] for n in ("canonical", "momentum", "symmetric"))
          and checks["gauge_shift"]["holds"]
          and checks["cech/tetrahedron"] == ["Z", "0", "Z"]
          and checks["cech/metalinear_classes"] == 2
          and simms["same_pde"] and simms["class_count"] == 2)
    return checks, ok, ["gauge-phase-sign", "momentum-operator-sign", "halfform-prefactor"] + codes


def cmd_report(args) -> tuple:
    if not args.all and not args.model:
        raise InputError("report needs --all or a model file")
    results, ok, codes = {}, True, []
    if args.all:
        results["standard"], ok, codes = _suite(args.degree)
    if args.model:
        model = ModelFile.load(args.model)
        ns = argparse.Namespace(model=args.model, hbar=args.hbar, degree=args.degree,
                                cutoff=args.cutoff, observable=None)
        part = {}
        for key, fn in (("quantize", cmd_quantize), ("check_dirac", cmd_check_dirac)):
            r, good, w = fn(ns)
            part[key], ok, codes = r, ok and good, codes + w
        if model.representation == "bargmann" and (model.cutoff is not None or args.cutoff is not None):
            r, good, w = cmd_spectrum(ns)
            part["spectrum"], ok, codes = r, ok and good, codes + w
        results["model"] = part
    return results, ok, codes


# output --------------------------------------------------------------------

def build_report(command: str, result, ok: bool, codes) -> dict:
    return {
        "tool": "geoquant",
        "version": __version__,
        "command": command,
        "status": "pass" if ok else "fail",
        "result": result,
        "warnings": [{"code": c, "message": WARNINGS[c]} for c in sorted(set(codes))],
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_text(report: dict) -> str:
    """Flattened ``path: value`` lines, derived from the JSON document."""
    lines = []

    def walk(prefix, node):
        if isinstance(node, dict):
            if not node:
                lines.append(f"{prefix}: {{}}")
            for k in sorted(node, key=str):
                walk(f"{prefix}.{k}" if prefix else str(k), node[k])
        elif isinstance(node, list):
            if not node:
                lines.append(f"{prefix}: []")
            for i, v in enumerate(node):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix}: {json.dumps(node, ensure_ascii=False) if not isinstance(node, str) else node}")

    walk("", json.loads(render_json(report)))
    return "\n".join(lines) + "\n"


COMMANDS = {
    "bracket": cmd_bracket,
    "quantize": cmd_quantize,
    "check-dirac": cmd_check_dirac,
    "spectrum": cmd_spectrum,
    "cohomology": cmd_cohomology,
    "classify-metalinear": cmd_classify_metalinear,
    "simms": cmd_simms,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the report to FILE instead of stdout")
    common.add_argument("--hbar", help="override hbar (positive rational)")

    ap = argparse.ArgumentParser(prog="geoquant", description="Exact geometric quantization checks.")
    ap.add_argument("--version", action="version", version=f"geoquant {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bracket", parents=[common], help="Poisson bracket and Hamiltonian fields")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--kind", choices=("real", "complex"))
    s.add_argument("--n", type=int)

    s = sub.add_parser("quantize", parents=[common], help="operator table of a model")
    s.add_argument("model", nargs="?")

    s = sub.add_parser("check-dirac", parents=[common], help="exhaustive Dirac-rule sweep")
    s.add_argument("model", nargs="?")
    s.add_argument("--degree", type=int, default=3)

    s = sub.add_parser("spectrum", parents=[common], help="Fock-space spectrum")
    s.add_argument("model", nargs="?")
    s.add_argument("--cutoff", type=int)
    s.add_argument("--observable")

    s = sub.add_parser("cohomology", parents=[common], help="Cech cohomology of a nerve file")
    s.add_argument("nerve")
    s.add_argument("--ring", choices=("Z", "Q", "Z2", "all"), default="all")

    s = sub.add_parser("classify-metalinear", parents=[common], help="count metalinear classes")
    s.add_argument("nerve")

    s = sub.add_parser("simms", parents=[common], help="oscillator with the circle polarization")
    s.add_argument("--kmax", type=int, default=10)
    s.add_argument("--case", choices=("trivial", "nontrivial", "both"), default="both")

    s = sub.add_parser("report", parents=[common], help="run several checks at once")
    s.add_argument("model", nargs="?")
    s.add_argument("--all", action="store_true")
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--cutoff", type=int)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        result, ok, codes = COMMANDS[args.command](args)
    except InputError as e:
        print(f"geoquant: error: {e}", file=stderr)
        return 2
    except GeoQuantError as e:
        print(f"geoquant: error: {e}", file=stderr)
        return 2
    report = build_report(args.command, result, ok, codes)
    text = render_text(report) if args.format == "text" else render_json(report)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as e:
            print(f"geoquant: error: {args.out}: {e.strerror}", file=stderr)
            return 2
    else:
        stdout.write(text)
    if not ok:
        print(f"geoquant: {args.command}: check failed{_failure_hint(result)}", file=stderr)
    return 0 if ok else 1


def _failure_hint(result) -> str:
    sweep = result.get("sweep") if isinstance(result, dict) else None
    if sweep and sweep.get("counterexamples"):
        c = sweep["counterexamples"][0]
        return f" (first counterexample: f = {c['f']}, g = {c['g']})"
    chern = result.get("chern") if isinstance(result, dict) else None
    if chern and not chern["integral"]:
        bad = next(k for k, v in sorted(chern["alpha"].items()) if "/" in v)
        return f" (non-integral triple sum on {bad})"
    return ""


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
