"""End-to-end runs: Hermite -> Rolle trajectory -> fits -> corrected reports."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import corrector, fitting, rolle
from .errors import ConfigError, RolleError
from .hermite import NodeSet, build_hermite, delta_true
from .target_function import DifferentiableFunction, lookup

log = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-10


@dataclass
class ExperimentConfig:
    function: str = "exp-sin"
    nodes: tuple = (0.0, 3 * math.pi / 2)
    xz_offset: float = rolle.DEFAULT_XZ_OFFSET
    samples: int = rolle.DEFAULT_SAMPLES
    # explicit step count / right margin; when either is set the solve runs
    # from x_z to x_n - margin in `steps` steps instead of the sample grid
    steps: Optional[int] = None
    margin: Optional[float] = None
    grid: int = rolle.DEFAULT_GRID
    degrees: tuple = (5, 7, 9, 11)
    spline: bool = True
    out: Optional[str] = None

    def validate(self) -> None:
        try:
            nodes = NodeSet(self.nodes)
        except RolleError as exc:
            raise ConfigError(str(exc)) from None
        spacing = min(b - a for a, b in zip(nodes.nodes, nodes.nodes[1:]))
        if not 0 < self.xz_offset < spacing:
            raise ConfigError(f"xz_offset must be in (0, {spacing}), got {self.xz_offset}")
        if self.margin is not None and not 0 < self.margin < spacing:
            raise ConfigError(f"margin must be in (0, {spacing}), got {self.margin}")
        if self.samples < 11:
            raise ConfigError("samples must be at least 11")
        if self.steps is not None and self.steps < 10:
            raise ConfigError("steps must be at least 10")
        if self.grid < 100:
            raise ConfigError("grid must be at least 100")
        if any(d < 0 for d in self.degrees):
            raise ConfigError("fit degrees must be non-negative")

    def echo(self) -> str:
        lines = []
        for fl in fields(self):
            if fl.name == "out":
                continue
            v = getattr(self, fl.name)
            if isinstance(v, (tuple, list)):
                v = ",".join(_fmt(u) for u in v)
            elif isinstance(v, float):
                v = _fmt(v)
            lines.append(f"{fl.name} = {'' if v is None else v}")
        return "\n".join(lines) + "\n"


class StageError(RolleError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ExperimentReport:
    status: str = "ok"
    hermite: dict = field(default_factory=dict)
    bootstrap: dict = field(default_factory=dict)
    trajectory: dict = field(default_factory=dict)
    fits: list = field(default_factory=list)
    spline: dict = field(default_factory=dict)
    integration: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict, repr=False)

    def fits_json(self) -> dict:
        return {
            "status": self.status,
            "hermite": self.hermite,
            "bootstrap": self.bootstrap,
            "trajectory": self.trajectory,
            "fits": self.fits,
            "spline": self.spline,
        }


def _fmt(v) -> str:
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def write_csv(path: Path, header: list[str], columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([f"{float(v):.17g}" for v in row])


def read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r]
    data = np.array(rows).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def run_experiment(cfg: ExperimentConfig, f: Optional[DifferentiableFunction] = None,
                   f_exact_integral: Optional[float] = None) -> ExperimentReport:
    """Run the whole pipeline; files go to ``cfg.out`` when it is set.

    Any failing stage is re-raised as :class:`StageError` after the outputs
    of earlier stages have been written.
    """
    cfg.validate()
    f = lookup(cfg.function) if f is None else f
    out = Path(cfg.out) if cfg.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.echo").write_text(cfg.echo())
    rep = ExperimentReport()
    nodes = NodeSet(cfg.nodes)
    a, b = nodes.lo, nodes.hi
    if f_exact_integral is None and f.antiderivative is not None:
        f_exact_integral = float(f.antiderivative(b) - f.antiderivative(a))

    def flush():
        if out is None:
            return
        _write_json(out / "fits.json", rep.fits_json())
        if rep.integration:
            _write_json(out / "integration.json", rep.integration)

    stage = "hermite"
    try:
        H = build_hermite(f, nodes)
        dense = np.linspace(a, b, 1001)
        dmax = float(np.max(np.abs(delta_true(f, H, dense))))
        fscale = float(np.max(np.abs(f.deriv(0, dense))))
        rep.hermite = {"coefficients": list(H.poly.coeffs), "max_error_dense": dmax}
        if f_exact_integral is not None:
            iH = H.poly.integrate(a, b)
            rep.integration = {"integral_f": f_exact_integral, "integral_H": iH,
                               "error_H": abs(f_exact_integral - iH)}
        if dmax <= DEGENERATE_TOL * (1 + fscale):
            rep.status = "degenerate"
            log.info("f is reproduced by its Hermite interpolant; nothing to correct")
            flush()
            return rep

        stage = "rolle"
        prob = rolle.RolleProblem.build(f, nodes)
        if cfg.spline:
            f.require_order(prob.top + 4, "spline error bound")
        x_z = a + cfg.xz_offset
        roots = rolle.bootstrap_xi(prob, x_z, cfg.grid)
        rep.bootstrap = {"x_z": x_z, "roots": roots}
        if cfg.steps is None and cfg.margin is None:
            h = (b - a) / cfg.samples
            if cfg.xz_offset >= h:
                raise ConfigError(f"xz_offset {cfg.xz_offset} must be below the grid step {h}; "
                                  "lower it, raise samples, or set steps/margin")
            steps, margin = rolle.sample_grid(nodes, x_z, cfg.samples)
        else:
            steps = cfg.steps if cfg.steps is not None else 100_000
            margin = cfg.margin if cfg.margin is not None else rolle.DEFAULT_MARGIN
        traj = rolle.select_branch(prob, x_z, roots, steps, margin)
        rep.bootstrap.update(accepted=traj.accepted_xi_z, rejected=list(traj.rejected_roots))
        xs, dt, dm, diff = corrector.error_curves(f, H, traj.xs, traj.xis)
        rep.hermite["max_error_rk_grid"] = float(np.max(np.abs(dt)))
        rep.trajectory = {
            "samples": len(traj), "h": traj.h, "x_start": traj.x_start, "x_end": traj.x_end,
            "truncated": traj.truncated, "min_denominator": traj.min_denominator_seen,
            "max_abs_difference": float(np.max(np.abs(diff))),
        }
        rep.arrays = {"xs": traj.xs, "xis": traj.xis, "delta_true": dt,
                      "delta_model": dm, "difference": diff}
        if out is not None:
            write_csv(out / "trajectory.csv", ["x", "xi"], [traj.xs, traj.xis])
            write_csv(out / "error_curves.csv", ["x", "delta_true", "delta_model", "difference"],
                      [xs, dt, dm, diff])

        stage = "fitting"
        g = fitting.rolle_samples(traj, prob)
        fit_integrals = {}
        for d in cfg.degrees:
            fr = fitting.fit_polynomial_ls(traj.xs, g, d)
            ca = corrector.corrected_polynomial(H, fr.h_xi)
            entry = fr.to_dict()
            entry["max_error"] = corrector.max_error(ca, f, traj.xs)
            entry["error_poly_degree"] = ca.E_poly.degree
            entry["node_check"] = corrector.node_consistency_check(ca, f).to_dict()
            rep.fits.append(entry)
            if f_exact_integral is not None:
                fit_integrals[str(d)] = corrector.integration_report(ca, f_exact_integral)[
                    "error_H_plus_E"]

        if cfg.spline:
            s0, s1 = fitting.spline_end_slopes(traj, prob)
            sp = fitting.fit_clamped_spline(traj.xs, g, s0, s1)
            ca = corrector.corrected_spline(H, sp)
            rep.spline = {
                "end_slopes": [s0, s1],
                "max_error": corrector.max_error(ca, f, traj.xs),
                "error_bound": fitting.spline_error_bound(f, traj, prob),
                "node_check": corrector.node_consistency_check(ca, f).to_dict(),
            }
            if f_exact_integral is not None:
                rep.integration["error_H_plus_E_spline"] = corrector.integration_report(
                    ca, f_exact_integral)["error_H_plus_E"]
        if fit_integrals:
            rep.integration["error_H_plus_E_polynomial"] = fit_integrals
    except ConfigError:
        flush()
        raise
    except RolleError as exc:
        rep.status = f"failed:{stage}"
        flush()
        raise StageError(stage, exc) from exc
    flush()
    return rep


def report_lines(rep: ExperimentReport) -> list[str]:
    lines = [f"status: {rep.status}"]
    if rep.hermite:
        c = rep.hermite["coefficients"]
        lines.append("H coefficients (ascending): " + ", ".join(f"{v:.4f}" for v in c))
        if "max_error_rk_grid" in rep.hermite:
            lines.append(f"max |f - H| on RK grid: {rep.hermite['max_error_rk_grid']:.4g}")
    if rep.bootstrap:
        lines.append("bootstrap roots: " + ", ".join(f"{r:.4f}" for r in rep.bootstrap["roots"]))
        if "accepted" in rep.bootstrap:
            lines.append(f"accepted xi_z = {rep.bootstrap['accepted']:.4f}, rejected "
                         + ", ".join(f"{r:.4f}" for r in rep.bootstrap["rejected"]))
    if rep.trajectory:
        lines.append(f"max |delta_true - delta_model| = "
                     f"{rep.trajectory['max_abs_difference']:.3g}")
    if rep.fits:
        lines.append("degree  max error    V")
        for e in rep.fits:
            lines.append(f"{e['degree']:>6}  {e['max_error']:.2e}   {e['V']:.2e}")
    if rep.spline:
        lines.append(f"spline max error {rep.spline['max_error']:.2e}, "
                     f"bound {rep.spline['error_bound']:.3g}")
    if rep.integration:
        lines.append(f"|int f - int H| = {rep.integration.get('error_H', float('nan')):.3g}")
        if "error_H_plus_E_spline" in rep.integration:
            lines.append(f"|int f - int (H+E_spline)| = "
                         f"{rep.integration['error_H_plus_E_spline']:.3g}")
    return lines
