"""Verification command registry shared by the CLI and the HTTP service.

Each command declares a typed parameter schema (unknown keys are rejected)
and produces a :class:`~qtriag.reports.Report` whose residual names and
tolerances are pinned here.  Symbolic checks report integer counts of
surviving residual terms with tolerance 0; numeric checks report their
stated operator or relative tolerances.  All randomized checks consume the
explicit seed recorded in the report.
"""

from __future__ import annotations

import time

from .coeffs import Q, Scalar
from .exprparse import format_expr, parse_expr
from .ncpoly import NCExpr, normal_form
from .reports import Report


class CommandError(ValueError):
    """Unknown command or invalid parameters."""


PARAM_SCHEMAS: dict[str, dict[str, tuple[type, object]]] = {
    "nf": {"expr": (str, None)},
    "check-relations": {"max_ladder": (int, 5)},
    "check-coassoc": {"degree": (int, 2)},
    "check-flip": {"degree": (int, 2)},
    "cocycle": {"x": (float, 0.1), "samples": (int, 10_000)},
    "fintwist": {"n": (int, 5), "bichar": (object, "i^{ab}")},
    "spectrum": {"x": (float, 0.1), "trunc": (int, 50)},
    "qtorus": {"x": (float, 0.05), "trunc": (int, 64), "depth": (int, 3)},
    "witness": {"x": (float, 0.1), "y": (float, 0.2)},
}


def validate_params(command: str, params: dict) -> dict:
    if command not in PARAM_SCHEMAS:
        raise CommandError(f"unknown command {command!r}")
    schema = PARAM_SCHEMAS[command]
    unknown = set(params) - set(schema)
    if unknown:
        raise CommandError(f"unknown parameters for {command}: {sorted(unknown)}")
    out = {}
    for name, (typ, default) in schema.items():
        if name in params and params[name] is not None:
            value = params[name]
            if typ is not object:
                try:
                    value = typ(value)
                except (TypeError, ValueError) as exc:
                    raise CommandError(f"parameter {name}: {exc}") from exc
            out[name] = value
        elif default is not None:
            out[name] = default
        else:
            raise CommandError(f"missing required parameter {name!r} for {command}")
    return out


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------


def _run_nf(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .qgroup import build_qtriag

    expr = parse_expr(params["expr"])
    nf = normal_form(expr, build_qtriag().base)
    printed = format_expr(nf)
    roundtrip = parse_expr(printed)
    residuals = {"roundtrip_mismatch": 0.0 if roundtrip == nf else 1.0}
    tolerances = {"roundtrip_mismatch": 0.0}
    values = {"input": params["expr"], "normal_form": printed,
              "term_count": len(nf)}
    return residuals, tolerances, values


def _run_check_relations(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .qgroup import (
        build_qtriag,
        counit_candidate_check,
        derive_commutation_from_polar,
        derive_q_from_polar,
        q_ladder_engine,
        q_ladder_oracle,
        smoke_presentations,
        star_closure_check,
    )

    qt = build_qtriag()
    p = qt.base
    smoke = smoke_presentations()

    nf_abs = normal_form(NCExpr.word((("a", 1), ("bs", 1))), p)
    expect_abs = NCExpr.word((("bs", 1), ("a", 1)), coeff=Q)
    nf_asb = normal_form(NCExpr.word((("as", 1), ("b", 1))), p)
    expect_asb = NCExpr.word((("b", 1), ("as", 1)), coeff=Q.inverse())

    max_ladder = params["max_ladder"]
    ladder_mismatches = sum(
        1
        for m in range(max_ladder + 1)
        for n in range(max_ladder + 1)
        if q_ladder_engine(m, n, qt) != q_ladder_oracle(m, n, qt)
    )

    star_rep = star_closure_check(p)
    counit_rep = counit_candidate_check(qt)
    polar_q = derive_q_from_polar()
    polar_comm = derive_commutation_from_polar()

    residuals = {
        "confluence_qtriag": float(smoke["qtriag"]),
        "confluence_polar": float(smoke["polar"]),
        "star_closure_terms": float(star_rep.total_residual_terms),
        "nf_a_bstar_mismatch": 0.0 if nf_abs == expect_abs else 1.0,
        "nf_astar_b_mismatch": 0.0 if nf_asb == expect_asb else 1.0,
        "q_ladder_mismatches": float(ladder_mismatches),
        "polar_q_mismatch": 0.0 if polar_q == Q else 1.0,
        "polar_comm_mismatch": 0.0 if polar_comm == Scalar.one() else 1.0,
        "counit_candidate_terms": float(counit_rep.total_residual_terms),
    }
    tolerances = {name: 0.0 for name in residuals}
    values = {
        "q": str(Q),
        "polar_q_ratio": str(polar_q),
        "ladder_max_power": max_ladder,
        "rule_count": len(p.rules()),
        "counit_label": counit_rep.name,
    }
    return residuals, tolerances, values


def _run_check_coassoc(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .qgroup import build_qtriag, check_coproduct

    reports = check_coproduct(build_qtriag(), degree=params["degree"])
    residuals = {
        "hom_residual_terms": float(reports["hom"].total_residual_terms),
        "coassoc_residual_terms": float(reports["coassoc"].total_residual_terms),
    }
    tolerances = {name: 0.0 for name in residuals}
    values = {
        "hom_relations": [e.label for e in reports["hom"].entries],
        "coassoc_words": [e.label for e in reports["coassoc"].entries],
        "degree": params["degree"],
    }
    return residuals, tolerances, values


def _run_check_flip(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .qgroup import check_flip_symmetry, double_flip_is_identity

    reports = check_flip_symmetry(degree=params["degree"])
    residuals = {
        "flip_hom_terms": float(reports["hom"].total_residual_terms),
        "flip_coassoc_terms": float(reports["coassoc"].total_residual_terms),
        "double_flip_mismatch": 0.0 if double_flip_is_identity() else 1.0,
    }
    tolerances = {name: 0.0 for name in residuals}
    values = {"substitution": "s -> s^-1", "degree": params["degree"]}
    return residuals, tolerances, values


def _run_cocycle(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .grouplab import (
        PlaneBicharacter,
        ZxRBicharacter,
        antisymmetry_check,
        cocycle_check,
        lambda_constant,
    )

    x, samples = params["x"], params["samples"]
    zxr = ZxRBicharacter(x)
    plane = PlaneBicharacter(x)
    residuals = {
        "cocycle_zxr": cocycle_check(zxr, samples, seed)["max_residual"],
        "antisymmetry_zxr": antisymmetry_check(ZxRBicharacter, x, samples,
                                               seed)["max_residual"],
        "cocycle_plane": cocycle_check(plane, samples, seed)["max_residual"],
        "antisymmetry_plane": antisymmetry_check(PlaneBicharacter, x, samples,
                                                 seed)["max_residual"],
        "lambda_deviation": abs(lambda_constant(zxr) - 1.0),
    }
    tolerances = {
        "cocycle_zxr": 1e-12,
        "antisymmetry_zxr": 1e-12,
        "cocycle_plane": 1e-12,
        "antisymmetry_plane": 1e-12,
        "lambda_deviation": 0.0,
    }
    values = {"x": x, "samples": samples, "lambda": lambda_constant(zxr)}
    return residuals, tolerances, values


def _run_fintwist(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .fintwist import run_suite

    out = run_suite(n=params["n"], bichar=params["bichar"], seed=seed)
    tolerances = {
        "omega_unitarity": 1e-12,
        "cocycle": 1e-12,
        "coassoc": 1e-12,
        "haar_left": 1e-12,
        "haar_right": 1e-12,
        "pentagon": 1e-10,
        "pentagon_twisted": 1e-10,
        "control_cocycle_deficit": 0.0,
        "control_pentagon_deficit": 0.0,
    }
    return out["residuals"], tolerances, out["values"]


def _run_spectrum(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .spectra import build_modular, spectrum_report

    model = build_modular(params["x"], params["trunc"])
    rep = spectrum_report(model)
    residuals = {
        "eigenvalue_rel_error": rep["eigenvalue_rel_error"],
        "ratio_rel_error": rep["ratio_rel_error"],
        "monotone_violations": float(rep["monotone_violations"]),
    }
    tolerances = {
        "eigenvalue_rel_error": 1e-12,
        "ratio_rel_error": 1e-12,
        "monotone_violations": 0.0,
    }
    values = {k: rep[k] for k in ("spectrum", "ratio", "min_eigenvalue",
                                  "sweep_minima", "distinct_eigenvalues")}
    return residuals, tolerances, values


def _run_qtorus(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .spectra import build_qtorus, cross_validation, relation_residuals

    model = build_qtorus(params["x"], params["trunc"])
    rr = relation_residuals(model, depth=params["depth"])
    cv = cross_validation(model)
    residuals = {
        "interior_max": max(rr["interior"].values()),
        "crossval_max_rel_error": cv["max_rel_error"],
    }
    tolerances = {"interior_max": 1e-12, "crossval_max_rel_error": 1e-10}
    values = {
        "interior_residuals": rr["interior"],
        "boundary_residuals": rr["boundary"],
        "crossval": cv["table"],
        "depth": params["depth"],
    }
    return residuals, tolerances, values


def _run_witness(params: dict, seed: int) -> tuple[dict, dict, dict]:
    from .spectra import nonisomorphism_witness

    return {}, {}, nonisomorphism_witness(params["x"], params["y"])


_RUNNERS = {
    "nf": _run_nf,
    "check-relations": _run_check_relations,
    "check-coassoc": _run_check_coassoc,
    "check-flip": _run_check_flip,
    "cocycle": _run_cocycle,
    "fintwist": _run_fintwist,
    "spectrum": _run_spectrum,
    "qtorus": _run_qtorus,
    "witness": _run_witness,
}

COMMANDS = tuple(sorted(_RUNNERS))


def run_command(command: str, params: dict | None = None, seed: int = 42) -> Report:
    """Validate, dispatch, time, and package one verification command.

    Module errors are captured in the report's ``error`` field (the report
    then never passes); parameter errors raise :class:`CommandError`.
    """
    clean = validate_params(command, params or {})
    report = Report(command=command, params=_jsonable(clean), seed=seed)
    start = time.perf_counter()
    try:
        residuals, tolerances, values = _RUNNERS[command](clean, seed)
        report.residuals = {k: float(v) for k, v in residuals.items()}
        report.tolerances = tolerances
        report.values = _jsonable(values)
    except Exception as exc:        # surfaced, not swallowed: see Report.error
        report.error = f"{type(exc).__name__}: {exc}"
    report.timing_ms = (time.perf_counter() - start) * 1000.0
    return report


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
