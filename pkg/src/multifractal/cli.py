"""Command-line surface.

Commands: tau, spectrum, check, sample, section-dump, coarse.  All output
files are deterministic functions of (config, model): floats are written in
shortest round-trip form with a '.' separator, JSON sidecars have sorted
keys, and newlines are always '\\n'.

Exit codes: 0 pass, 1 oracle/numeric failure, 2 input or schema error,
3 strong-separation violation.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .duality import NEG_INF
from .exceptions import (
    DomainError,
    IntegrityError,
    RangeCapError,
    ResourceLimitError,
    SSCViolationError,
    ValidationError,
)
from .geometry import (
    Geometric1D,
    certify_ssc,
    coarse_spectrum,
    dump_coarse_counts,
    dump_sampled_points,
    local_dimension_estimate,
    sample_points,
)
from .ifs import IFSModel, cross_entropy, kl_divergence, load_model, lyapunov
from .lq import CompositionGrid, asymptotes, tau, variational_objective
from .spectrum import dim_attractor, dim_measure, f_alpha, spectrum_curve
from .types_oracle import dump_section, empirical_tau, enumerate_section

DEFAULT_TOLERANCES = {
    "grid_oracle": 5e-3,
    "grid_dominance": 1e-12,
    "empirical_tau": 0.1,
    "coarse_excess": 0.15,
    "kl_identity": 1e-9,
}


@dataclass
class RunConfig:
    model_path: str
    out_dir: str = "out"
    q_min: float = -10.0
    q_max: float = 10.0
    q_step: float = 0.1
    scales: list | None = None
    alphas: list | None = None
    eps: float = 0.1
    seed: int = 0
    sampler: list | None = None
    depth: int = 10_000
    points: int = 1
    grid_n: int = 128
    tolerances: dict = field(default_factory=dict)

    def q_grid(self) -> np.ndarray:
        if self.q_step <= 0.0:
            raise ValidationError("q-step must be positive")
        if self.q_max < self.q_min:
            raise ValidationError("q-max must be >= q-min")
        count = int(round((self.q_max - self.q_min) / self.q_step))
        grid = self.q_min + self.q_step * np.arange(count + 1)
        return grid[grid <= self.q_max + 1e-12]

    def scale_schedule(self, model: IFSModel) -> list:
        if self.scales is not None:
            scales = [float(s) for s in self.scales]
            if any(not (0.0 < s < 1.0) for s in scales):
                raise ValidationError("scales must lie in (0, 1)")
            if any(b >= a for a, b in zip(scales, scales[1:])):
                raise ValidationError("scales must be strictly decreasing")
            return scales
        r_max = float(model.ratios.max())
        return [r_max**k for k in range(4, 13)]

    def tolerance(self, name: str) -> float:
        if name in self.tolerances:
            return float(self.tolerances[name])
        return DEFAULT_TOLERANCES[name]


def _fmt(x) -> str:
    return repr(float(x))


def _write_json(path: Path, doc: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _interior_alphas(model: IFSModel, count: int = 5) -> list:
    asym = asymptotes(model)
    if asym.kappa_max - asym.kappa_min <= 1e-9 * max(1.0, asym.kappa_max):
        return [asym.kappa_min]
    width = asym.kappa_max - asym.kappa_min
    return [
        asym.kappa_min + (j / (count + 1)) * width for j in range(1, count + 1)
    ]


# ----------------------------------------------------------------------
# Commands.

def cmd_tau(config: RunConfig) -> int:
    model = load_model(config.model_path)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    asym = asymptotes(model)
    tau0 = tau(model, 0.0).tau
    with open(out / "lq_points.txt", "w", encoding="utf-8", newline="\n") as fh:
        for q in config.q_grid():
            fh.write(f"{_fmt(q)} {_fmt(tau(model, float(q)).tau)}\n")
    _write_json(out / "lq_points.json", {
        "kappa_min": asym.kappa_min,
        "kappa_max": asym.kappa_max,
        "s_min": asym.s_min,
        "s_max": asym.s_max,
        "marked_points": [[1.0, 0.0], [0.0, tau0]],
    })
    return 0


def cmd_spectrum(config: RunConfig) -> int:
    model = load_model(config.model_path)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    curve = spectrum_curve(model, config.q_grid())
    (kmin, smin), (kmax, smax) = curve.endpoints
    alpha0 = next(
        (s.alpha for s in curve.samples if abs(s.q) < 1e-12),
        None,
    )
    with open(out / "multifractal_points.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{_fmt(kmin)} {_fmt(smin)}\n")
        for s in sorted(curve.samples, key=lambda s: -s.q):
            fh.write(f"{_fmt(s.alpha)} {_fmt(s.f)}\n")
        fh.write(f"{_fmt(kmax)} {_fmt(smax)}\n")
    doc = {
        "endpoint_min": [kmin, smin],
        "endpoint_max": [kmax, smax],
        "dim_measure": curve.dim_measure,
        "dim_attractor": curve.dim_attractor,
    }
    if alpha0 is not None:
        doc["alpha_at_q0"] = alpha0
    _write_json(out / "multifractal_points.json", doc)
    return 0


def _check_rows(config: RunConfig, model: IFSModel):
    """Yield (family, detail, gap, tol, gated) rows for the report."""
    rows = []
    qs = config.q_grid()

    grid = CompositionGrid(model, config.grid_n)
    tol_gap = config.tolerance("grid_oracle")
    tol_dom = config.tolerance("grid_dominance")
    for q in qs:
        analytic = tau(model, float(q)).tau
        value, _ = grid.tau_minimum(float(q))
        gap = value - analytic
        ok = (-tol_dom <= gap <= tol_gap)
        rows.append(("grid_oracle", f"q={_fmt(q)}", gap, tol_gap, ok))

    scales = config.scale_schedule(model)
    tol_emp = config.tolerance("empirical_tau")
    for q in (-2.0, 0.0, 2.0, 4.0):
        if not (qs[0] <= q <= qs[-1]):
            continue
        analytic = tau(model, q).tau
        for i, r in enumerate(scales):
            section = enumerate_section(model, r)
            gap = abs(empirical_tau(model, q, r, section=section) - analytic)
            gated = i == len(scales) - 1
            rows.append((
                "empirical_tau",
                f"q={_fmt(q)} r={_fmt(r)}",
                gap,
                tol_emp if gated else None,
                (gap <= tol_emp) if gated else None,
            ))

    tol_coarse = config.tolerance("coarse_excess")
    alphas = config.alphas or _interior_alphas(model)
    for alpha in alphas:
        target = f_alpha(model, float(alpha))
        target_v = -math.inf if target is NEG_INF else float(target)
        for i, r in enumerate(scales):
            cc = coarse_spectrum(model, r, float(alpha), config.eps)
            est = -math.inf if cc.estimate is NEG_INF else float(cc.estimate)
            excess = est - target_v
            gated = i == len(scales) - 1
            rows.append((
                "coarse_excess",
                f"alpha={_fmt(alpha)} r={_fmt(r)}",
                excess,
                tol_coarse if gated else None,
                (excess <= tol_coarse) if gated else None,
            ))

    tol_kl = config.tolerance("kl_identity")
    rng = np.random.default_rng(config.seed)
    worst = 0.0
    for _ in range(100):
        q = float(rng.uniform(-8.0, 8.0))
        w = rng.dirichlet(np.ones(model.alphabet_size))
        sol = tau(model, q)
        residual = abs(
            variational_objective(model, q, w)
            - sol.tau
            - kl_divergence(w, sol.z) / lyapunov(w, model)
        )
        worst = max(worst, residual)
    rows.append(("kl_identity", "100 seeded (q, w) pairs", worst, tol_kl,
                 worst <= tol_kl))
    return rows


def cmd_check(config: RunConfig) -> int:
    model = load_model(config.model_path)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = _check_rows(config, model)

    lines = ["check\tdetail\tgap\ttolerance\tstatus"]
    failures = []
    for family, detail, gap, tol, ok in rows:
        if ok is None:
            status, tol_s = "info", "-"
        else:
            status, tol_s = ("PASS" if ok else "FAIL"), _fmt(tol)
            if not ok:
                failures.append((abs(gap), family, detail, gap))
        lines.append(f"{family}\t{detail}\t{_fmt(gap)}\t{tol_s}\t{status}")
    report = "\n".join(lines) + "\n"
    with open(out / "check_report.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report)
    sys.stdout.write(report)
    if failures:
        failures.sort(reverse=True)
        _, family, detail, gap = failures[0]
        sys.stdout.write(
            f"WORST OFFENDER: {family} {detail} gap={_fmt(gap)}\n"
        )
        return 1
    return 0


def cmd_sample(config: RunConfig) -> int:
    model = load_model(config.model_path)
    geom = Geometric1D.from_model(model)
    certify_ssc(geom)  # raises -> exit 3

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sampler = (
        np.asarray(config.sampler, dtype=float)
        if config.sampler is not None
        else model.p
    )
    if config.scales is not None:
        scales = config.scale_schedule(model)
    else:
        r_max = float(model.ratios.max())
        scales = [r_max ** (10 * k) for k in range(1, 11)]

    pts = sample_points(geom, sampler, config.depth, config.points, config.seed)
    dump_sampled_points(out / "sample_points.txt", pts)

    predicted = cross_entropy(sampler / sampler.sum(), model.probs) / lyapunov(
        sampler / sampler.sum(), model
    )
    observed_last = []
    with open(out / "local_dimension.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("point\tr\tquotient\n")
        for index, (_, word) in enumerate(pts):
            seq = local_dimension_estimate(geom, word, scales)
            for r, value in seq:
                val = "inf" if math.isinf(value) else _fmt(value)
                fh.write(f"{index}\t{_fmt(r)}\t{val}\n")
            observed_last.append(seq[-1][1])
    _write_json(out / "sample_summary.json", {
        "predicted_local_dimension": predicted,
        "observed_at_deepest_scale": observed_last,
        "depth": config.depth,
        "seed": config.seed,
        "sampler": [float(x) for x in sampler],
    })
    return 0


def cmd_section_dump(config: RunConfig) -> int:
    model = load_model(config.model_path)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for index, r in enumerate(config.scale_schedule(model)):
        section = enumerate_section(model, r)
        dump_section(section, out / f"section_{index:03d}.txt")
    return 0


def cmd_coarse(config: RunConfig) -> int:
    model = load_model(config.model_path)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    alphas = config.alphas or _interior_alphas(model)
    counts = []
    for r in config.scale_schedule(model):
        section = enumerate_section(model, r)
        for alpha in alphas:
            counts.append(
                coarse_spectrum(model, r, float(alpha), config.eps,
                                section=section)
            )
    dump_coarse_counts(out / "coarse.tsv", counts)
    return 0


# ----------------------------------------------------------------------
# Argument parsing.

def _parse_float_list(text: str) -> list:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad float list {text!r}") from exc


def _parse_tolerances(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValidationError(f"--tolerance needs name=value, got {pair!r}")
        name, value = pair.split("=", 1)
        if name not in DEFAULT_TOLERANCES:
            raise ValidationError(f"unknown tolerance {name!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise ValidationError(f"bad tolerance value {pair!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multifractal",
        description="Moment scaling and dimension spectra of weighted IFSs, "
                    "with brute-force cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("tau", "write the (q, tau(q)) plot data and asymptote sidecar"),
        ("spectrum", "write the (alpha, f(alpha)) plot data and sidecar"),
        ("check", "run oracle cross-checks; exit 1 on disagreement"),
        ("sample", "certify separation, sample points, report local dims"),
        ("section-dump", "dump section words at each scale"),
        ("coarse", "coarse counting estimates as TSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--model", required=True, help="model JSON path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--q-min", type=float, default=-10.0)
        p.add_argument("--q-max", type=float, default=10.0)
        p.add_argument("--q-step", type=float, default=0.1)
        p.add_argument("--scales", type=str, default=None,
                       help="comma-separated decreasing scales in (0,1)")
        p.add_argument("--alpha", type=str, default=None,
                       help="comma-separated alpha values")
        p.add_argument("--eps", type=float, default=0.1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--sampler", type=str, default=None,
                       help="comma-separated sampling weights (sample only)")
        p.add_argument("--depth", type=int, default=10_000)
        p.add_argument("--points", type=int, default=1)
        p.add_argument("--grid-n", type=int, default=128)
        p.add_argument("--tolerance", action="append", default=None,
                       metavar="NAME=VALUE")
    return parser


_COMMANDS = {
    "tau": cmd_tau,
    "spectrum": cmd_spectrum,
    "check": cmd_check,
    "sample": cmd_sample,
    "section-dump": cmd_section_dump,
    "coarse": cmd_coarse,
}


def config_from_args(args) -> RunConfig:
    return RunConfig(
        model_path=args.model,
        out_dir=args.out,
        q_min=args.q_min,
        q_max=args.q_max,
        q_step=args.q_step,
        scales=_parse_float_list(args.scales) if args.scales else None,
        alphas=_parse_float_list(args.alpha) if args.alpha else None,
        eps=args.eps,
        seed=args.seed,
        sampler=_parse_float_list(args.sampler) if args.sampler else None,
        depth=args.depth,
        points=args.points,
        grid_n=args.grid_n,
        tolerances=_parse_tolerances(args.tolerance),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return _COMMANDS[args.command](config)
    except SSCViolationError as exc:
        print(f"separation violation: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, DomainError, RangeCapError,
            ResourceLimitError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except IntegrityError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
