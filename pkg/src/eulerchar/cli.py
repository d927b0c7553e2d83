"""Command-line interface: request ingestion, dispatch, report emission.

Input for `analyze` is a UTF-8 JSON document (file or stdin) with
schema_version 1; the schema is described in docs/schema.md.  All big
integers in reports are serialized as decimal strings so no consumer can
lose precision; exponents stay small and remain JSON numbers.

Exit codes: 0 hypotheses all PASS/ASSUMED, 1 malformed input (with a
JSON-pointer diagnostic), 2 some hypothesis FAILed (report still emitted),
3 chi suppressed because the torsion input is not exact.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .curves import (
    WeierstrassModel,
    count_points,
    reduce_model,
    torsion_bound_over_F,
)
from .cyclotomic import field_degree, splitting
from .euler import (
    AbelianVarietyInput,
    EulerCharReport,
    ExternalArithmetic,
    ReductionFact,
    analyze,
    corank_report,
    local_data_at,
    tau_p,
)
from .finite_fields import fq_create
from .tate import euler_factor_at_one

SCHEMA_VERSION = 1


class RequestError(ValueError):
    """Malformed analysis request; carries a JSON-pointer-style path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# -- request parsing -----------------------------------------------------------------


def _require(obj: dict, path: str, allowed: set[str], required: set[str]):
    if not isinstance(obj, dict):
        raise RequestError(path, "expected an object")
    for key in obj:
        if key not in allowed:
            raise RequestError(f"{path}/{key}", "unknown key")
    for key in required:
        if key not in obj:
            raise RequestError(f"{path}/{key}", "missing required key")


def _parse_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise RequestError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise RequestError(path, f"expected an integer >= {minimum}, got {value}")
    return value


def _parse_rational(value, path: str) -> Fraction:
    if isinstance(value, bool):
        raise RequestError(path, "expected a decimal string or integer")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise RequestError(path, f"not a rational number: {value!r}") from None
    raise RequestError(path, f"expected a decimal string, got {value!r}")


def _parse_curve(value, path: str) -> WeierstrassModel:
    if not isinstance(value, list) or len(value) != 5:
        raise RequestError(path, "expected a list of five a-invariants")
    coeffs = [_parse_rational(v, f"{path}/{i}") for i, v in enumerate(value)]
    return WeierstrassModel.from_rationals(coeffs)


def _parse_external(obj, path: str) -> ExternalArithmetic:
    allowed = {
        "sha_p_order",
        "selmer_finite",
        "lambda_torsion_certificate",
        "torsion_p_override",
        "sigma_index_R",
        "no_p_torsion_certificate",
    }
    _require(obj, path, allowed, set())
    def boolean(key, default=False):
        v = obj.get(key, default)
        if not isinstance(v, bool):
            raise RequestError(f"{path}/{key}", "expected a boolean")
        return v

    sha = obj.get("sha_p_order", 1)
    sha = _parse_int(sha, f"{path}/sha_p_order", minimum=1)
    override = obj.get("torsion_p_override")
    if override is not None:
        override = _parse_int(override, f"{path}/torsion_p_override", minimum=1)
    sigma = obj.get("sigma_index_R")
    if sigma is not None:
        sigma = _parse_int(sigma, f"{path}/sigma_index_R", minimum=1)
    return ExternalArithmetic(
        sha_p_order=sha,
        selmer_finite=boolean("selmer_finite"),
        lambda_torsion_certificate=boolean("lambda_torsion_certificate"),
        torsion_p_override=override,
        sigma_index_R=sigma,
        no_p_torsion_certificate=boolean("no_p_torsion_certificate"),
    )


def _parse_abelian_variety(obj, path: str) -> AbelianVarietyInput:
    _require(obj, path, {"dimension", "factors", "reduction_table"}, {"dimension"})
    dim = _parse_int(obj["dimension"], f"{path}/dimension", minimum=1)
    factors = ()
    if "factors" in obj:
        raw = obj["factors"]
        if not isinstance(raw, list):
            raise RequestError(f"{path}/factors", "expected a list of curves")
        factors = tuple(
            _parse_curve(c, f"{path}/factors/{i}") for i, c in enumerate(raw)
        )
    table = ()
    if "reduction_table" in obj:
        raw = obj["reduction_table"]
        if not isinstance(raw, list):
            raise RequestError(f"{path}/reduction_table", "expected a list")
        rows = []
        for i, row in enumerate(raw):
            rpath = f"{path}/reduction_table/{i}"
            _require(row, rpath, {"prime", "potentially_good", "good"},
                     {"prime", "potentially_good", "good"})
            prime = _parse_int(row["prime"], f"{rpath}/prime", minimum=2)
            pg, good = row["potentially_good"], row["good"]
            if not isinstance(pg, bool) or not isinstance(good, bool):
                raise RequestError(rpath, "flags must be booleans")
            rows.append(ReductionFact(prime, pg, good))
        table = tuple(rows)
    if not factors and not table:
        raise RequestError(path, "needs factors or a reduction_table")
    try:
        return AbelianVarietyInput(dimension=dim, factors=factors, reduction_table=table)
    except ValueError as exc:
        raise RequestError(path, str(exc)) from None


def parse_request(obj) -> dict:
    """Validate a raw analysis request; returns the parsed pieces."""
    allowed = {
        "schema_version",
        "curve",
        "prime",
        "base_field",
        "abelian_variety",
        "external",
        "target_chi_sigma_exponent",
        "samples",
        "precision_digits",
    }
    _require(obj, "", allowed, {"schema_version", "curve", "prime", "base_field", "abelian_variety"})
    version = _parse_int(obj["schema_version"], "/schema_version")
    if version != SCHEMA_VERSION:
        raise RequestError("/schema_version", f"unsupported version {version}")
    curve = _parse_curve(obj["curve"], "/curve")
    prime = _parse_int(obj["prime"], "/prime", minimum=2)
    conductor = _parse_int(obj["base_field"], "/base_field", minimum=1)
    variety = _parse_abelian_variety(obj["abelian_variety"], "/abelian_variety")
    external = _parse_external(obj.get("external", {}), "/external")
    target = obj.get("target_chi_sigma_exponent")
    if target is not None:
        target = _parse_int(target, "/target_chi_sigma_exponent")
    samples = _parse_int(obj.get("samples", 20), "/samples", minimum=1)
    precision = obj.get("precision_digits")
    if precision is not None:
        precision = _parse_int(precision, "/precision_digits", minimum=4)
    return {
        "curve": curve,
        "prime": prime,
        "conductor": conductor,
        "abelian_variety": variety,
        "external": external,
        "target_chi_sigma_exponent": target,
        "samples": samples,
        "precision_digits": precision,
    }


def canonical_request_dict(parsed: dict) -> dict:
    """The canonical serialized form of a parsed request (idempotent)."""
    curve = parsed["curve"]
    variety: AbelianVarietyInput = parsed["abelian_variety"]
    ext: ExternalArithmetic = parsed["external"]
    out = {
        "schema_version": SCHEMA_VERSION,
        "curve": [str(c) for c in curve.coefficients()],
        "prime": parsed["prime"],
        "base_field": parsed["conductor"],
        "abelian_variety": {
            "dimension": variety.dimension,
            "factors": [[str(c) for c in f.coefficients()] for f in variety.factors],
            "reduction_table": [
                {"prime": r.prime, "potentially_good": r.potentially_good, "good": r.good}
                for r in variety.reduction_table
            ],
        },
        "external": {
            "sha_p_order": ext.sha_p_order,
            "selmer_finite": ext.selmer_finite,
            "lambda_torsion_certificate": ext.lambda_torsion_certificate,
            "torsion_p_override": ext.torsion_p_override,
            "sigma_index_R": ext.sigma_index_R,
            "no_p_torsion_certificate": ext.no_p_torsion_certificate,
        },
        "target_chi_sigma_exponent": parsed["target_chi_sigma_exponent"],
        "samples": parsed["samples"],
        "precision_digits": parsed["precision_digits"],
    }
    return out


# -- report serialization --------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return str(x)


def report_to_dict(report: EulerCharReport) -> dict:
    if report.failed:
        status = "HYPOTHESIS_FAIL"
    elif report.suppressed:
        status = "NOT_EXACT"
    else:
        status = "OK"
    places = []
    for place, data in report.places:
        places.append(
            {
                "place": place.label,
                "ell": place.ell,
                "e": place.e,
                "f": place.f,
                "g": place.g,
                "q_v": str(data.q_v),
                "kodaira": data.kodaira.symbol,
                "c_v": str(data.c_v),
                "v_min_delta": data.v_min_delta,
                "reduction_class": data.reduction_class,
                "potentially_good": data.potentially_good,
                "N_v": None if data.N_v is None else str(data.N_v),
                "L_at_1": _frac_str(data.L_at_1),
            }
        )
    audit = [
        {
            "place": row.place.label,
            "q_v": str(row.q_v),
            "reduction_class": row.reduction_class,
            "L_at_1": _frac_str(row.L_at_1),
            "vp_L": row.vp_L,
            "contribution": row.contribution,
            "gamma_kernel_exponent": row.gamma_kernel_exponent,
        }
        for row in report.audit
    ]
    target = None
    if report.target_chi_sigma_exponent is not None:
        target = {
            "exponent": report.target_chi_sigma_exponent,
            "matches": report.chi_sigma_exponent == report.target_chi_sigma_exponent,
        }
    torsion = None
    if report.torsion is not None:
        torsion = {
            "p": report.torsion.p,
            "lower": str(report.torsion.lower),
            "upper": str(report.torsion.upper),
            "exact": report.torsion.exact,
            "source": report.torsion_source,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "status": status,
        "p": report.p,
        "conductor": report.conductor,
        "degree": report.degree,
        "hypotheses": [
            {"name": h.name, "status": h.status, "detail": h.detail}
            for h in report.hypotheses
        ],
        "M_rational": report.M_rational,
        "places": places,
        "torsion": torsion,
        "rho": {
            "base": report.p,
            "exponent": report.rho.exponent,
            "window": list(report.rho.window),
            "breakdown": report.rho.breakdown,
        },
        "chi_cyc": {"base": report.p, "exponent": report.chi_cyc_exponent},
        "chi_sigma": {"base": report.p, "exponent": report.chi_sigma_exponent},
        "target_chi_sigma": target,
        "audit": audit,
        "tau_p": report.tau,
        "corank": {
            "window": list(report.coranks.window),
            "sigma_index_R": report.coranks.sigma_index_R,
            "global_corank": report.coranks.global_corank,
            "local_corank": report.coranks.local_corank,
            "conjectural_rank": report.coranks.conjectural_rank,
        },
        "suppression_reason": report.suppression_reason,
    }


def render_text(doc: dict) -> str:
    lines = []
    lines.append(f"status: {doc['status']}")
    lines.append(
        f"p = {doc['p']}   conductor m = {doc['conductor']}   [F:Q] = {doc['degree']}"
    )
    lines.append("hypotheses:")
    for h in doc["hypotheses"]:
        lines.append(f"  {h['status']:<8} {h['name']}: {h['detail']}")
    lines.append(f"bad-tower primes: {doc['M_rational']}")
    lines.append("places:")
    header = f"  {'place':<7}{'q_v':>8}  {'kodaira':<6}{'c_v':>5}  {'class':<18}{'N_v':>8}  L(E,1)"
    lines.append(header)
    for pl in doc["places"]:
        lines.append(
            f"  {pl['place']:<7}{pl['q_v']:>8}  {pl['kodaira']:<6}{pl['c_v']:>5}  "
            f"{pl['reduction_class']:<18}{str(pl['N_v']):>8}  {pl['L_at_1']}"
        )
    t = doc["torsion"]
    if t is not None:
        lines.append(
            f"torsion over F: lower {t['lower']}, upper {t['upper']}, exact {t['exact']} ({t['source']})"
        )
    rho = doc["rho"]
    lines.append(
        f"rho: {rho['base']}^{rho['exponent']}  window {rho['window']}  breakdown {rho['breakdown']}"
    )
    lines.append(f"chi_cyc: {doc['chi_cyc']['base']}^{doc['chi_cyc']['exponent']}")
    lines.append(f"chi_sigma: {doc['chi_sigma']['base']}^{doc['chi_sigma']['exponent']}")
    if doc["target_chi_sigma"] is not None:
        tgt = doc["target_chi_sigma"]
        lines.append(f"target chi_sigma exponent: {tgt['exponent']} (matches: {tgt['matches']})")
    lines.append("audit (per-place |L_v|_p exponents):")
    for row in doc["audit"]:
        lines.append(
            f"  {row['place']:<7} q={row['q_v']:>7}  {row['reduction_class']:<18} "
            f"L={row['L_at_1']:<12} vp_L={row['vp_L']:>3}  contribution={row['contribution']:>2}"
            f"  gamma_exp={row['gamma_kernel_exponent']}"
        )
    lines.append(f"tau_p: {doc['tau_p']}")
    cor = doc["corank"]
    lines.append(
        f"corank window: {cor['window']}  sigma_index_R: {cor['sigma_index_R']}  "
        f"global: {cor['global_corank']}  local: {cor['local_corank']}  "
        f"conjectural rank: {cor['conjectural_rank']}"
    )
    if doc["suppression_reason"] is not None:
        lines.append(f"suppressed: {doc['suppression_reason']}")
    return "\n".join(lines)


def _emit(doc: dict, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        out.write(render_text(doc) + "\n")


# -- subcommands ------------------------------------------------------------------------


def _curve_from_arg(text: str) -> WeierstrassModel:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise RequestError("/curve", "expected five comma-separated a-invariants")
    return WeierstrassModel.from_rationals([Fraction(p) for p in parts])


def _cmd_analyze(args, out) -> int:
    if args.request == "-":
        raw = sys.stdin.read()
    else:
        with open(args.request, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: /: invalid JSON ({exc})", file=sys.stderr)
        return 1
    try:
        parsed = parse_request(obj)
    except RequestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.samples is not None:
        parsed["samples"] = args.samples
    if args.precision_digits is not None:
        parsed["precision_digits"] = args.precision_digits
    try:
        report = analyze(
            parsed["curve"],
            parsed["prime"],
            parsed["conductor"],
            parsed["abelian_variety"],
            parsed["external"],
            samples=parsed["samples"],
            precision=parsed["precision_digits"],
            target_chi_sigma_exponent=parsed["target_chi_sigma_exponent"],
        )
    except ValueError as exc:
        print(f"error: /: {exc}", file=sys.stderr)
        return 1
    doc = report_to_dict(report)
    _emit(doc, args.format, out)
    if report.failed:
        return 2
    if report.suppressed:
        return 3
    return 0


def _cmd_local(args, out) -> int:
    model = _curve_from_arg(args.curve)
    data = local_data_at(model, args.ell, args.conductor, precision=args.precision_digits)
    sp = splitting(args.ell, args.conductor)
    doc = {
        "place": {"ell": args.ell, "e": sp.e, "f": sp.f, "g": sp.g},
        "q_v": str(data.q_v),
        "kodaira": data.kodaira.symbol,
        "c_v": str(data.c_v),
        "v_min_delta": data.v_min_delta,
        "reduction_class": data.reduction_class,
        "potentially_good": data.potentially_good,
        "N_v": None if data.N_v is None else str(data.N_v),
        "euler_factor_at_1": _frac_str(euler_factor_at_one(data)),
    }
    if args.format == "json":
        _emit(doc, "json", out)
    else:
        for k, v in doc.items():
            out.write(f"{k}: {v}\n")
    return 0


def _cmd_splitting(args, out) -> int:
    sp = splitting(args.ell, args.conductor)
    doc = {
        "ell": sp.ell,
        "conductor": sp.m,
        "e": sp.e,
        "f": sp.f,
        "g": sp.g,
        "residue_field_size": str(sp.residue_size),
        "local_degree": sp.local_degree,
        "degree": field_degree(sp.m),
    }
    if args.format == "json":
        _emit(doc, "json", out)
    else:
        out.write(
            f"{sp.ell} in Q(mu_{sp.m}): e={sp.e} f={sp.f} g={sp.g} "
            f"(residue field F_{sp.residue_size})\n"
        )
    return 0


def _cmd_torsion(args, out) -> int:
    model = _curve_from_arg(args.curve)
    est = torsion_bound_over_F(model, args.prime, args.conductor, samples=args.samples)
    doc = {
        "p": est.p,
        "lower": str(est.lower),
        "upper": str(est.upper),
        "exact": est.exact,
    }
    if args.format == "json":
        _emit(doc, "json", out)
    else:
        out.write(
            f"p-primary torsion over Q(mu_{args.conductor}): lower {est.lower}, "
            f"upper {est.upper}, exact {est.exact}\n"
        )
    return 0


def _cmd_tau(args, out) -> int:
    model = _curve_from_arg(args.curve)
    value = tau_p(model, args.prime, args.conductor)
    doc = {"p": args.prime, "conductor": args.conductor, "tau_p": value}
    if args.format == "json":
        _emit(doc, "json", out)
    else:
        out.write(f"tau_{args.prime} over Q(mu_{args.conductor}) = {value}\n")
    return 0


def _cmd_coranks(args, out) -> int:
    model = _curve_from_arg(args.curve)
    tau = tau_p(model, args.prime, args.conductor)
    rep = corank_report(field_degree(args.conductor), tau, args.sigma_index)
    doc = {
        "tau_p": rep.tau,
        "degree": rep.degree,
        "window": list(rep.window),
        "sigma_index_R": rep.sigma_index_R,
        "global_corank": rep.global_corank,
        "local_corank": rep.local_corank,
        "conjectural_rank": rep.conjectural_rank,
    }
    if args.format == "json":
        _emit(doc, "json", out)
    else:
        out.write(
            f"tau={rep.tau} window={rep.window} global={rep.global_corank} "
            f"local={rep.local_corank} conjectural={rep.conjectural_rank}\n"
        )
    return 0


def _cmd_count(args, out) -> int:
    model = _curve_from_arg(args.curve)
    field = fq_create(args.ell, args.degree)
    n = count_points(reduce_model(model, field))
    doc = {"ell": args.ell, "degree": args.degree, "q": str(field.order), "count": str(n)}
    if args.format == "json":
        _emit(doc, "json", out)
    else:
        out.write(f"#E(F_{field.order}) = {n}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerchar",
        description="Euler characteristics of Selmer groups over division towers "
        "of cyclotomic fields: local reduction data, splitting, torsion, "
        "tau, coranks, and the full chi pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="text")

    p = sub.add_parser("analyze", help="run the full pipeline on a JSON request")
    p.add_argument("request", help="request file path, or - for stdin")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--precision-digits", type=int, default=None)
    common(p)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("local", help="Tate data and Euler factor at one place")
    p.add_argument("--curve", required=True, help="a1,a2,a3,a4,a6")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--conductor", type=int, default=1)
    p.add_argument("--precision-digits", type=int, default=None)
    common(p)
    p.set_defaults(fn=_cmd_local)

    p = sub.add_parser("splitting", help="(e, f, g) of a prime in Q(mu_m)")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--conductor", type=int, required=True)
    common(p)
    p.set_defaults(fn=_cmd_splitting)

    p = sub.add_parser("torsion", help="p-primary torsion bracket over Q(mu_m)")
    p.add_argument("--curve", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--conductor", type=int, default=1)
    p.add_argument("--samples", type=int, default=20)
    common(p)
    p.set_defaults(fn=_cmd_torsion)

    p = sub.add_parser("tau", help="sum of local degrees at supersingular places above p")
    p.add_argument("--curve", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--conductor", type=int, default=1)
    common(p)
    p.set_defaults(fn=_cmd_tau)

    p = sub.add_parser("coranks", help="corank window and tower predictions")
    p.add_argument("--curve", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--conductor", type=int, default=1)
    p.add_argument("--sigma-index", type=int, default=None)
    common(p)
    p.set_defaults(fn=_cmd_coranks)

    p = sub.add_parser("count", help="raw point count over F_{ell^f}")
    p.add_argument("--curve", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--degree", type=int, default=1)
    common(p)
    p.set_defaults(fn=_cmd_count)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except RequestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
