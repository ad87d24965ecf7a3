"""Command-line front end: preset registry, scenario configs, report emission.

Configs are JSON documents with a scenario list; each scenario names an
action (preset id or inline weight matrix), a weight direction, a task and
task parameters.  One JSON report and one CSV table are written per
scenario; every verdict cites the named tolerance it was judged against.
Exit code 0 means all verdicts passed, 2 means at least one failed, 1 means
the configuration was rejected.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, presets
from .geometry import (
    ProjectivePoint,
    TangentVector,
    angle_to_ray,
    circle_normalization_residual,
    geometry_report,
    gm_det_identity_residual,
    moment_map,
    normal_space_basis,
    on_ray_points,
    random_point,
)
from .kernels import isotype_kernel_diag, level_kernel_residual
from .predictions import (
    gaussian_profile,
    predicted_dim_circle,
    predicted_dim_torus_exponent,
    predicted_leading_torus,
)
from .tolerances import PROFILES, Tolerances
from .verify import (
    DEFAULT_K_GRID,
    SweepPlan,
    fit_expansion,
    localization_sweep,
    offdiag_modulus_sweep,
    predicted_dim_torus_constant,
    ratio_sweep,
    scaling_sweep,
    simplex_pushforward_integral,
)
from .weights import (
    WeightedAction,
    isotype_dimension,
    validate_action,
    weight_partition_counts,
)

TASKS = (
    "dims",
    "kernel-diag",
    "asymptotics",
    "scaling",
    "localization",
    "dim-integral",
    "identities",
)


class ConfigError(ValueError):
    """Configuration rejected; message carries the path into the document."""


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _verdict(name, value, target, tolname, tol, ok) -> dict:
    return {
        "name": name,
        "pass": bool(ok),
        "value": value,
        "target": target,
        "tolerance_name": tolname,
        "tolerance": tol,
    }


def _within(value, target, tol) -> bool:
    scale = max(abs(target), 1e-300)
    return abs(value - target) <= tol * scale


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}: missing required key")
    return obj[key]


def _load_action(sc: dict, path: str) -> WeightedAction:
    if "preset" in sc and "weights" in sc:
        raise ConfigError(f"{path}: give either 'preset' or 'weights', not both")
    if "preset" in sc:
        pid = sc["preset"]
        if pid not in presets.REGISTRY:
            known = ", ".join(sorted(presets.REGISTRY))
            raise ConfigError(f"{path}.preset: unknown preset {pid!r} (known: {known})")
        return presets.REGISTRY[pid].action()
    if "weights" in sc:
        try:
            return validate_action(np.array(sc["weights"]))
        except ValueError as exc:
            raise ConfigError(f"{path}.weights: {exc}") from exc
    raise ConfigError(f"{path}: needs 'preset' or 'weights'")


def _load_varpi(sc: dict, a: WeightedAction, path: str) -> tuple[int, ...]:
    raw = _require(sc, "varpi", path)
    try:
        v = (int(raw),) if np.isscalar(raw) else tuple(int(x) for x in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.varpi: malformed weight vector: {raw!r}") from exc
    if len(v) != a.g:
        raise ConfigError(f"{path}.varpi: expected {a.g} components, got {len(v)}")
    if all(x == 0 for x in v):
        raise ConfigError(f"{path}.varpi: must be nonzero")
    return v


def _resolve_point(spec, a: WeightedAction, varpi, rng, path: str) -> ProjectivePoint:
    if spec == "on-ray":
        if a.g == 1:
            return random_point(a.d, rng)
        return on_ray_points(a, varpi, 1, rng)[0]
    if spec == "random":
        return random_point(a.d, rng)
    if isinstance(spec, dict) and "p" in spec:
        phases = spec.get("phases")
        try:
            return ProjectivePoint.from_p(spec["p"], phases)
        except ValueError as exc:
            raise ConfigError(f"{path}: bad point: {exc}") from exc
    raise ConfigError(f"{path}: point must be 'on-ray', 'random' or {{'p': [...]}}")


def _k_grid(params: dict, default, path: str) -> list[int]:
    grid = params.get("k_grid", list(default))
    try:
        ks = sorted(set(int(k) for k in grid))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.params.k_grid: {exc}") from exc
    if not ks or ks[0] <= 0:
        raise ConfigError(f"{path}.params.k_grid: needs positive integers")
    return ks


# ---------------------------------------------------------------------------
# Task runners (each returns rows, fits, quadrature, verdicts)
# ---------------------------------------------------------------------------


def _run_dims(a, varpi, params, tol: Tolerances, seed, path):
    k_min = int(params.get("k_min", 1))
    k_max = int(params.get("k_max", 50))
    step = int(params.get("k_step", 1))
    if k_min <= 0:
        raise ConfigError(f"{path}.params.k_min: must be positive")
    rows = []
    verdicts = []
    expected = params.get("expected_affine")
    all_match = True
    for k in range(k_min, k_max + 1, step):
        kv = tuple(k * c for c in varpi)
        dim = isotype_dimension(a, kv)
        row = {"k": k, "dim": dim}
        if expected is not None:
            want = int(expected[0]) + int(expected[1]) * k
            row["expected"] = want
            all_match &= dim == want
        rows.append(row)
    if expected is not None:
        verdicts.append(
            _verdict("dims-exact-affine", all_match, True, "exact", 0.0, all_match)
        )
    if params.get("fit_exponent"):
        grid = _k_grid({"k_grid": params.get("fit_k_grid", [1000 * 2**j for j in range(5)])}, (), path)
        dims = [isotype_dimension(a, tuple(k * c for c in varpi)) for k in grid]
        slope = float(np.polyfit(np.log(grid), np.log(dims), 1)[0])
        target = float(predicted_dim_torus_exponent(a, varpi)) if a.g > 1 else float(a.d)
        ok = abs(slope - target) <= tol.loglog_slope_abs
        verdicts.append(
            _verdict("dims-growth-exponent", slope, target, "loglog_slope_abs", tol.loglog_slope_abs, ok)
        )
    return rows, {}, {}, verdicts


def _run_kernel_diag(a, varpi, params, tol: Tolerances, seed, path):
    rng = np.random.default_rng(seed)
    ks = _k_grid(params, (10, 50, 250), path)
    specs = params.get("points", [{"p": None}])
    points = []
    for i, spec in enumerate(specs):
        if spec == {"p": None} or spec == "random":
            points.append(random_point(a.d, rng))
        else:
            points.append(_resolve_point(spec, a, varpi, rng, f"{path}.params.points[{i}]"))
    rows = []
    worst = 0.0
    for i, x in enumerate(points):
        theta = rng.uniform(0.0, 1.0, size=a.g)
        phases = np.exp(2j * math.pi * (a.W.astype(float).T @ theta))
        x_rot = ProjectivePoint(x.z * phases)
        for k in ks:
            kv = tuple(k * c for c in varpi)
            d0 = isotype_kernel_diag(a, kv, x)
            d1 = isotype_kernel_diag(a, kv, x_rot)
            if d0.is_zero() and d1.is_zero():
                rel = 0.0
                log10 = None
            elif d0.is_zero() or d1.is_zero():
                rel = math.inf
                log10 = None
            else:
                rel = abs(math.expm1(d1.logmag - d0.logmag))
                log10 = d0.logmag / math.log(10.0)
            worst = max(worst, rel)
            rows.append({"k": k, "point": i, "log10_diag": log10, "invariance_rel": rel})
    ok = worst <= tol.exact_identity
    return rows, {}, {}, [
        _verdict("diag-torus-invariance", worst, 0.0, "exact_identity", tol.exact_identity, ok)
    ]


def _run_asymptotics(a, varpi, params, tol: Tolerances, seed, path):
    rng = np.random.default_rng(seed)
    ks = _k_grid(params, DEFAULT_K_GRID, path)
    point = _resolve_point(params.get("point", "on-ray"), a, varpi, rng, f"{path}.params.point")
    form = params.get("form", "calD")
    L = int(params.get("L", 2))
    plan = SweepPlan.build(a, varpi, point, ks)
    rows_raw = ratio_sweep(plan, form=form)
    fit = fit_expansion([(r.k, r.ratio) for r in rows_raw], L=L, model=params.get("model", "inverse"))
    rows = [
        {
            "k": r.k,
            "exact_log10": r.exact.logmag / math.log(10.0),
            "predicted_log10": r.predicted.logmag / math.log(10.0),
            "ratio": r.ratio,
        }
        for r in rows_raw
    ]
    verdicts = []
    top = rows_raw[-1]
    verdicts.append(
        _verdict(
            "leading-term-ratio-top-k",
            top.ratio,
            1.0,
            "torus_ratio_rel",
            tol.torus_ratio_rel,
            _within(top.ratio, 1.0, tol.torus_ratio_rel),
        )
    )
    if math.isfinite(fit.residual_order_estimate):
        ok = fit.residual_order_estimate >= tol.residual_order_min
        verdicts.append(
            _verdict(
                "residual-order",
                fit.residual_order_estimate,
                1.0,
                "residual_order_min",
                tol.residual_order_min,
                ok,
            )
        )
    if "expected_B1" in params:
        b1 = float(fit.B[0])
        want = float(params["expected_B1"])
        ok = abs(b1 - want) <= tol.b1_abs
        verdicts.append(_verdict("fitted-B1", b1, want, "b1_abs", tol.b1_abs, ok))
    verdicts.append(
        _verdict("fit-stability", fit.stable, True, "stability_sigmas", tol.stability_sigmas, fit.stable)
    )
    fits = {
        "model": fit.model,
        "leading_ratio_limit": fit.leading_ratio_limit,
        "coefficients": [float(c) for c in fit.coefficients],
        "stderrs": [float(e) for e in fit.stderrs],
        "residual_order_estimate": fit.residual_order_estimate,
        "stable": fit.stable,
        "skipped_k": list(plan.skipped),
    }
    return rows, fits, {}, verdicts


def _run_scaling(a, varpi, params, tol: Tolerances, seed, path):
    if a.g == 1:
        raise ConfigError(f"{path}: scaling task needs a torus of rank >= 2")
    rng = np.random.default_rng(seed)
    ks = _k_grid(params, DEFAULT_K_GRID, path)
    point = _resolve_point(params.get("point", "on-ray"), a, varpi, rng, f"{path}.params.point")
    basis = normal_space_basis(a, point, varpi)
    idx = int(params.get("normal_index", 0))
    vnorm = float(params.get("v_norm", 1.0))
    v = TangentVector(point, vnorm * basis[idx])
    offdiag = bool(params.get("offdiag", False))
    if offdiag:
        v2 = TangentVector(point, -vnorm * basis[idx])
        rows_raw, target = offdiag_modulus_sweep(a, point, varpi, v, v2, ks)
        tolname, tval = "offdiag_rel", tol.offdiag_rel
    else:
        rows_raw, target = scaling_sweep(a, point, varpi, v, ks)
        tolname, tval = "scaling_rel", tol.scaling_rel
    rows = [
        {
            "k": r.k,
            "exact": r.ratio,
            "predicted": target,
            "ratio": r.ratio / target,
            "target": 1.0,
            "pass": _within(r.ratio, target, tval),
        }
        for r in rows_raw
    ]
    top = rows[-1]
    verdicts = [
        _verdict("profile-at-top-k", top["exact"], target, tolname, tval, top["pass"])
    ]
    if params.get("check_quadratic", False) and not offdiag:
        v2 = TangentVector(point, 2.0 * vnorm * basis[idx])
        rows2, _ = scaling_sweep(a, point, varpi, v2, [ks[-1]])
        got = -math.log(rows2[0].ratio)
        want = -4.0 * math.log(rows_raw[-1].ratio)
        ok = _within(got, want, tol.scaling_rel)
        verdicts.append(
            _verdict("quadratic-form-scaling", got, want, "scaling_rel", tol.scaling_rel, ok)
        )
    return rows, {"gaussian_target": target}, {}, verdicts


def _run_localization(a, varpi, params, tol: Tolerances, seed, path):
    rng = np.random.default_rng(seed)
    ks = _k_grid(params, DEFAULT_K_GRID, path)
    if "p0_grid" in params:
        if a.d != 1:
            raise ConfigError(f"{path}.params.p0_grid: only for actions on the projective line")
        labels = [float(x) for x in params["p0_grid"]]
        points = [ProjectivePoint.from_p([p0, 1.0 - p0]) for p0 in labels]
    else:
        specs = params.get("points")
        if not specs:
            raise ConfigError(f"{path}.params: needs p0_grid or points")
        points = [
            _resolve_point(s, a, varpi, rng, f"{path}.params.points[{i}]")
            for i, s in enumerate(specs)
        ]
        labels = list(range(len(points)))
    # the two-parameter decay model absorbs the (g-1)/2 * log k drift of the
    # on-ray series into a spurious rate of about (g-1)/2 * d(log k)/dk; the
    # no-decay classification cannot resolve below that floor on this grid
    kk = np.asarray(ks, dtype=float)
    slope_logk = float(np.cov(kk, np.log(kk))[0, 1] / np.var(kk, ddof=1))
    gamma_floor = max(tol.no_decay_gamma, (a.g - 1) * slope_logk)
    res = localization_sweep(a, varpi, points, ks, labels=labels, no_decay_gamma=gamma_floor)
    rows = []
    all_ok = True
    for m, row in zip(points, res):
        ang = angle_to_ray(moment_map(a, m), np.asarray(varpi, dtype=float))
        on_ray = ang <= tol.on_ray_angle
        if row.fit.all_zero:
            ok = True
        elif on_ray:
            ok = row.no_decay
        else:
            ok = row.fit.superpolynomial
        all_ok &= ok
        rows.append(
            {
                "s": row.label,
                "gamma": row.fit.gamma if not row.fit.all_zero else None,
                "r2": row.fit.r2,
                "all_zero": row.fit.all_zero,
                "on_ray": on_ray,
                "pass": ok,
            }
        )
    verdicts = [
        _verdict(
            "decay-sign-map", all_ok, True, "no_decay_gamma", tol.no_decay_gamma, all_ok
        )
    ]
    return rows, {}, {}, verdicts


def _run_dim_integral(a, varpi, params, tol: Tolerances, seed, path):
    samples = int(params.get("samples", 10**5))
    verdicts = []
    quad = {}
    if a.g == 1:
        value = predicted_dim_circle(a)
        d = a.d
        W = a.W[0].astype(float)

        def f(p):
            return (p @ W) ** (-(d + 1))

        mc = simplex_pushforward_integral(f, d, samples, seed)
        from .predictions import generic_stabilizer_order

        ell = generic_stabilizer_order(a)
        ok = abs(ell * mc.estimate - value) <= tol.mc_sigmas * ell * mc.stderr
        verdicts.append(
            _verdict("dim-constant-mc", ell * mc.estimate, value, "mc_sigmas", tol.mc_sigmas, ok)
        )
        quad = {"method": mc.method, "estimate": mc.estimate, "stderr": mc.stderr, "samples": mc.samples}
        k_ref = int(params.get("k_ref", 2000))
        dim = isotype_dimension(a, tuple(ell * k_ref * c for c in varpi))
        dev = abs(math.factorial(a.d) * dim / (ell * k_ref) ** a.d - value)
        ok = dev <= tol.dim_deviation_coeff / k_ref
        verdicts.append(
            _verdict("dim-finite-k-deviation", dev, 0.0, "dim_deviation_coeff", tol.dim_deviation_coeff / k_ref, ok)
        )
        rows = [{"quantity": "limit", "value": value}]
    else:
        epsilon = float(params.get("epsilon", 0.02))
        est = predicted_dim_torus_constant(a, varpi, epsilon=epsilon, samples=samples, seed=seed)
        expo = predicted_dim_torus_exponent(a, varpi)
        k_ref = int(params.get("k_ref", 10**4))
        norm_v = float(np.linalg.norm(np.asarray(varpi, dtype=float)))
        dim = isotype_dimension(a, tuple(k_ref * c for c in varpi))
        c_exact = dim * (norm_v * k_ref / math.pi) ** (-expo)
        band = max(tol.tube_rel * abs(c_exact), tol.mc_sigmas * est.stderr)
        ok = abs(est.estimate - c_exact) <= band
        verdicts.append(
            _verdict("dim-constant-tube", est.estimate, c_exact, "tube_rel", tol.tube_rel, ok)
        )
        quad = {
            "method": est.method,
            "estimate": est.estimate,
            "stderr": est.stderr,
            "samples": est.samples,
            "epsilon": epsilon,
            "hits": list(est.extras.get("hits", ())),
        }
        rows = [{"quantity": "exponent", "value": expo}, {"quantity": "constant_exact", "value": c_exact}]
    return rows, {}, quad, verdicts


def _run_identities(a, varpi, params, tol: Tolerances, seed, path):
    rng = np.random.default_rng(seed)
    n_points = int(params.get("n_points", 200))
    rows = []
    verdicts = []
    worst_id = 0.0
    for _ in range(n_points):
        p = rng.dirichlet(np.ones(a.n_coords))
        while p.min() < 1e-3:
            p = rng.dirichlet(np.ones(a.n_coords))
        m = ProjectivePoint.from_p(p, rng.uniform(0, 2 * math.pi, a.n_coords))
        if a.g == 1:
            worst_id = max(worst_id, circle_normalization_residual(a, m))
        else:
            worst_id = max(worst_id, gm_det_identity_residual(a, m))
    name = "circle-normalization" if a.g == 1 else "gram-determinant-identity"
    verdicts.append(
        _verdict(name, worst_id, 0.0, "exact_identity", tol.exact_identity, worst_id <= tol.exact_identity)
    )
    rows.append({"check": name, "worst_residual": worst_id})
    if a.g > 1:
        n_onray = int(params.get("n_onray", 50))
        pts = on_ray_points(a, varpi, n_onray, rng)
        worst = 0.0
        for m in pts:
            f1 = predicted_leading_torus(a, m, varpi, 100, form="calD")
            f2 = predicted_leading_torus(a, m, varpi, 100, form="veff")
            worst = max(worst, abs(abs(f1.ratio_to(f2)) - 1.0))
        verdicts.append(
            _verdict("form-agreement", worst, 0.0, "form_agreement", tol.form_agreement, worst <= tol.form_agreement)
        )
        rows.append({"check": "form-agreement", "worst_residual": worst})
    n_level = int(params.get("n_level_pairs", 10))
    worst_level = 0.0
    for _ in range(n_level):
        x = random_point(a.d, rng)
        y = ProjectivePoint(np.abs(random_point(a.d, rng).z).astype(complex) * np.exp(1j * np.angle(x.z)))
        n = int(rng.integers(0, 9))
        worst_level = max(worst_level, level_kernel_residual(a.d, n, x, y))
    verdicts.append(
        _verdict("level-kernel-residual", worst_level, 0.0, "level_residual", tol.level_residual, worst_level <= tol.level_residual)
    )
    rows.append({"check": "level-kernel-residual", "worst_residual": worst_level})
    n_part = int(params.get("n_partition", 8))
    ok_part = True
    for n in range(n_part + 1):
        counts = weight_partition_counts(a, n)
        ok_part &= sum(counts.values()) == math.comb(n + a.d, a.d)
    verdicts.append(_verdict("degree-partition", ok_part, True, "exact", 0.0, ok_part))
    rows.append({"check": "degree-partition", "worst_residual": 0.0 if ok_part else 1.0})
    return rows, {}, {}, verdicts


_RUNNERS = {
    "dims": _run_dims,
    "kernel-diag": _run_kernel_diag,
    "asymptotics": _run_asymptotics,
    "scaling": _run_scaling,
    "localization": _run_localization,
    "dim-integral": _run_dim_integral,
    "identities": _run_identities,
}


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def run_scenario(sc: dict, tol: Tolerances, seed: int, path: str) -> dict:
    name = _require(sc, "name", path)
    task = _require(sc, "task", path)
    if task not in TASKS:
        raise ConfigError(f"{path}.task: unknown task {task!r} (known: {', '.join(TASKS)})")
    a = _load_action(sc, path)
    varpi = _load_varpi(sc, a, path)
    params = sc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params: must be an object")
    sc_seed = int(sc.get("seed", seed))
    rows, fits, quad, verdicts = _RUNNERS[task](a, varpi, params, tol, sc_seed, path)
    return {
        "scenario": sc,
        "rows": rows,
        "fits": fits,
        "quadrature": quad,
        "verdicts": verdicts,
        "provenance": {
            "seed": sc_seed,
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        },
    }


def emit_profile_table(report: dict, out_path: Path) -> None:
    """CSV profile table for scaling or localization reports."""
    rows = report.get("rows", [])
    task = report.get("scenario", {}).get("task")
    if task == "scaling":
        header = ["k", "exact", "predicted", "ratio", "target", "pass"]
    elif task == "localization":
        header = ["s", "gamma", "r2", "all_zero", "on_ray", "pass"]
    else:
        raise ValueError("profile tables exist only for scaling/localization reports")
    _write_csv(out_path, header, rows)


def _write_csv(out_path: Path, header: list[str], rows: list[dict]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if row.get(h) is None else _fmt(row.get(h)) for h in header))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _emit_reports(report: dict, out_dir: Path) -> None:
    name = report["scenario"]["name"]
    (out_dir / f"{name}.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    task = report["scenario"].get("task")
    rows = report["rows"]
    if task in ("scaling", "localization"):
        emit_profile_table(report, out_dir / f"{name}.csv")
    else:
        header = sorted({k for row in rows for k in row}) if rows else []
        preferred = [h for h in ("k", "point", "s", "dim", "quantity", "check") if h in header]
        header = preferred + [h for h in header if h not in preferred]
        _write_csv(out_dir / f"{name}.csv", header, rows)


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    try:
        cfg_text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"config: cannot read {args.config}: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = json.loads(cfg_text)
    except json.JSONDecodeError as exc:
        print(f"config: invalid JSON: {exc}", file=sys.stderr)
        return 1
    try:
        scenarios = _require(cfg, "scenarios", "config")
        if not isinstance(scenarios, list) or not scenarios:
            raise ConfigError("config.scenarios: must be a nonempty list")
        tol = PROFILES[args.tolerance_profile]
        overrides = cfg.get("tolerances", {})
        if overrides:
            unknown = set(overrides) - set(tol.__dataclass_fields__)
            if unknown:
                raise ConfigError(f"config.tolerances: unknown names {sorted(unknown)}")
            tol = tol.replace(**{k: float(v) for k, v in overrides.items()})
        out_dir = Path(
            args.out
            or cfg.get("out_dir")
            or os.environ.get("SZEGOLAB_OUT", "reports")
        )
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        out_dir.mkdir(parents=True, exist_ok=True)

        def job(item):
            i, sc = item
            return run_scenario(sc, tol, seed, f"config.scenarios[{i}]")

        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                reports = list(pool.map(job, enumerate(scenarios)))
        else:
            reports = [job(item) for item in enumerate(scenarios)]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    all_pass = True
    for report in reports:
        _emit_reports(report, out_dir)
        for v in report["verdicts"]:
            all_pass &= v["pass"]
            status = "PASS" if v["pass"] else "FAIL"
            print(
                f"{status} {report['scenario']['name']} :: {v['name']} "
                f"(value={_fmt(v['value'])}, target={_fmt(v['target'])}, "
                f"{v['tolerance_name']}={_fmt(v['tolerance'])})"
            )
    return 0 if all_pass else 2


def cmd_list_presets(_args) -> int:
    rows = []
    for p in presets.list_presets():
        w = "; ".join(" ".join(str(x) for x in row) for row in p.W)
        tag = " [evaluation-only]" if p.evaluation_only else ""
        rows.append(f"{p.preset_id:20s} [{w}]{tag}\n    {p.note}")
    print("\n".join(rows))
    return 0


def cmd_explain(args) -> int:
    pid = args.preset
    if pid not in presets.REGISTRY:
        print(f"unknown preset {pid!r}", file=sys.stderr)
        return 1
    p = presets.REGISTRY[pid]
    a = p.action()
    print(f"preset:  {p.preset_id}")
    print(f"weights: {list(map(list, p.W))}")
    print(f"rank g = {a.g}, projective dimension d = {a.d}")
    print(f"certificate: {a.cert}")
    print(f"evaluation only: {p.evaluation_only}")
    print(f"note: {p.note}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="szegolab",
        description="weighted torus actions on projective space: exact isotype "
        "kernels vs predicted asymptotics",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run scenarios from a JSON config")
    runp.add_argument("--config", required=True)
    runp.add_argument("--out", default=None, help="output directory (default: env SZEGOLAB_OUT or 'reports')")
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--jobs", type=int, default=1)
    runp.add_argument("--tolerance-profile", choices=sorted(PROFILES), default="default")
    runp.set_defaults(func=cmd_run)
    lp = sub.add_parser("list-presets", help="print the preset registry")
    lp.set_defaults(func=cmd_list_presets)
    ep = sub.add_parser("explain", help="describe one preset")
    ep.add_argument("preset")
    ep.set_defaults(func=cmd_explain)
    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
