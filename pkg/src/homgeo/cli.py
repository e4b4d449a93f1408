"""Command line front end.

    homgeo classify --n 2
    homgeo check-vector --n 2 -- 1 1 1 0 0
    homgeo max-orthogonal --n 3
    homgeo hadamard construct --method paley --order 12 --file h12.txt
    homgeo hadamard verify --file h12.txt
    homgeo geodesic residual --n 1 -- 1 1 0
    homgeo geodesic trace --n 1 --csv curve.csv -- 0 0 1
    homgeo report --n 7 --figures figs/

Vector literals follow ``--`` and list x_0..x_n then z_1..z_n.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import algebra as alg
from . import riemann as rm
from . import signs
from .clique import Budget
from .report import Report

log = logging.getLogger("homgeo")

GRAM_TOL = 1e-12
RESIDUAL_TOL = 1e-6
MAX_CLASSIFY_N = 16


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    n: Optional[int] = None
    lam: float = 1.0
    tol: float = alg.DEFAULT_TOL
    step: float = 1e-3
    t_max: float = 1.0
    budget_nodes: Optional[int] = None
    budget_seconds: Optional[float] = 600.0
    seed: int = 0
    output_format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise UsageError(f"--n must be a positive integer, got {self.n}")
        for name in ("lam", "tol", "step", "t_max"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise UsageError(f"{name} must be positive, got {val}")
        if self.budget_nodes is not None and self.budget_nodes <= 0:
            raise UsageError("--budget-nodes must be positive")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise UsageError("--budget-seconds must be positive")
        if self.seed < 0:
            raise UsageError("--seed must be non-negative")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.output_format not in ("json", "csv", "text"):
            raise UsageError(f"unknown output format {self.output_format!r}")

    @property
    def params(self) -> alg.ModelParams:
        return alg.ModelParams(self.n, self.lam)

    @property
    def budget(self) -> Budget:
        return Budget(self.budget_nodes, self.budget_seconds)

    @property
    def grid(self) -> np.ndarray:
        return rm.time_grid(self.t_max, self.step)

    def echo(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def parse_vector(tokens: list[str], n: int) -> alg.AlgebraVector:
    if len(tokens) != 2 * n + 1:
        raise UsageError(f"expected {2 * n + 1} components x_0..x_{n} z_1..z_{n} for n={n}, got {len(tokens)}")
    try:
        vals = [int(t) for t in tokens]
        arr = np.array(vals, dtype=np.int64)
    except ValueError:
        try:
            arr = np.array([float(t) for t in tokens])
        except ValueError as exc:
            raise UsageError(f"bad vector component: {exc}") from None
    if not np.all(np.isfinite(arr)):
        raise UsageError("vector components must be finite")
    return alg.AlgebraVector.from_coords(arr, n)


def _vec(v: alg.AlgebraVector) -> list:
    return v.coords.tolist()


def _cert(subject: str, status: str, proof: str = "", **extra) -> dict:
    d = {"subject": subject, "status": status, "proof": proof}
    d.update(extra)
    return d


def _figdir(args) -> Optional[Path]:
    return Path(args.figures) if getattr(args, "figures", None) else None


def vector_class(v: alg.AlgebraVector, params: alg.ModelParams, tol: float) -> str:
    if v.is_zero():
        return "zero"
    if not alg.is_geodesic_vector(v, params, tol):
        return "none"
    if not np.any(v.a):
        return "W"
    eps = np.sign(v.a[1:] * v.a[0]).astype(int)
    return "sign ray (" + ",".join("+" if e > 0 else "-" for e in eps) + ")"


# -- commands ------------------------------------------------------------------


def cmd_classify(cfg: RunConfig, args) -> Report:
    params = cfg.params
    if params.n > MAX_CLASSIFY_N:
        raise UsageError(f"classify lists 2^n rays; n must be <= {MAX_CLASSIFY_N}")
    rep = alg.classify(params, samples=args.samples, seed=cfg.seed, tol=cfg.tol)
    w = [{"label": f"Z_{k + 1}", "coords": _vec(v), "geodesic": ok}
         for k, (v, ok) in enumerate(zip(rep.w_basis, rep.generator_checks))]
    rays = [
        {"signs": list(s.entries()), "coords": _vec(v), "geodesic": ok}
        for s, v, ok in zip(rep.sign_rays, rep.ray_vectors, rep.generator_checks[params.n :])
    ]
    results = {
        "n": params.n,
        "subspaces": [{"name": "W", "dimension": len(rep.w_basis), "basis": w}],
        "w_dimension": len(rep.w_basis),
        "ray_count": len(rep.sign_rays),
        "sign_rays": rays,
        "outside_samples": rep.outside_samples,
        "outside_failures": rep.outside_failures,
    }
    report = Report("classify", cfg.echo(), results, ok=rep.certified)
    report.warnings.extend(rep.notes)
    report.certificates.append(_cert(
        "classification", "Verified" if rep.certified else "Failed",
        f"criterion on all generators; {rep.outside_samples} random vectors off the set rejected",
    ))
    report.table = (
        [{"kind": "W", "label": r["label"], "coords": " ".join(map(str, r["coords"])), "geodesic": r["geodesic"]} for r in w]
        + [{"kind": "ray", "label": "X_0" + "".join(("+" if e > 0 else "-") + f"X_{i + 1}" for i, e in enumerate(r["signs"][:])),
            "coords": " ".join(map(str, r["coords"])), "geodesic": r["geodesic"]} for r in rays]
    )
    return report


def cmd_check_vector(cfg: RunConfig, args) -> Report:
    params = cfg.params
    v = parse_vector(args.vector, params.n)
    crit = alg.is_geodesic_vector(v, params, cfg.tol)
    closed = alg.closed_form_conditions(v, params, cfg.tol)
    labels = alg.basis_labels(params.n)
    results = {
        "vector": {"x": v.a.tolist(), "z": v.b.tolist(), "z_0": v.c0.item()},
        "geodesic": crit and not v.is_zero(),
        "criterion": crit,
        "criterion_values": dict(zip([f"<v,[v,{l}]>" for l in labels], alg.criterion_values(v, params).tolist())),
        "closed_form": closed,
        "conditions": {k: val.item() for k, val in alg.closed_form_residuals(v).items()},
        "failing_conditions": alg.failing_conditions(v, params, cfg.tol),
        "agreement": crit == closed,
        "class": vector_class(v, params, cfg.tol),
        "exact": v.is_integral,
    }
    report = Report("check-vector", cfg.echo() | {"vector": args.vector}, results, ok=crit == closed)
    if v.is_zero():
        report.warnings.append(alg.ZERO_VECTOR_NOTE)
    report.table = [{"condition": k, "value": val, "holds": k not in results["failing_conditions"]}
                    for k, val in results["conditions"].items()]
    return report


def _max_orth_payload(cfg: RunConfig):
    params = cfg.params
    res = alg.max_orthogonal_geodesic_set(params, cfg.budget, jobs=cfg.jobs)
    gram = rm.tangent_gram(res.vectors, params)
    off = gram - np.diag(np.diag(gram))
    off_max = float(np.abs(off).max()) if len(gram) > 1 else 0.0
    fam = res.family
    results = {
        "n": params.n,
        "case": alg.orthogonality_case(params.n),
        "total": res.size,
        "predicted": alg.predicted_max_orthogonal(params.n),
        "w_part": [_vec(v) for v in res.w_part],
        "b_part": [_vec(v) for v in res.b_part],
        "family": {
            "k": fam.k,
            "size": fam.size,
            "members": [list(m.entries()) for m in fam.members],
            "maximality": fam.maximality.value,
            "proof": fam.proof,
            "nodes": fam.nodes,
        },
        "gram": gram.tolist(),
        "gram_max_off_diagonal": off_max,
    }
    ok = off_max <= GRAM_TOL and res.size == params.n + fam.size
    cert = _cert(f"max orthogonal +-1 tuples (k={fam.k})", fam.maximality.value, fam.proof, nodes=fam.nodes)
    return res, gram, results, ok, cert


def cmd_max_orthogonal(cfg: RunConfig, args) -> Report:
    res, gram, results, ok, cert = _max_orth_payload(cfg)
    report = Report("max-orthogonal", cfg.echo(), results, [cert], ok=ok)
    labels = [f"W{i + 1}" for i in range(len(res.w_part))] + [f"B{i + 1}" for i in range(len(res.b_part))]
    report.table = [{"label": l, "kind": l[0], "coords": " ".join(map(str, c))}
                    for l, c in zip(labels, results["w_part"] + results["b_part"])]
    figdir = _figdir(args)
    if figdir is not None:
        from .plotting import plot_gram

        p = plot_gram(gram, labels, figdir / f"gram_n{cfg.n}.png", f"orthogonal geodesic vectors, n={cfg.n}")
        report.figures.append(str(p))
    return report


def cmd_hadamard(cfg: RunConfig, args) -> Report:
    if args.action == "construct":
        if args.method is None or args.order is None:
            raise UsageError("construct needs --method and --order")
        try:
            m = signs.construct_by_method(args.method, args.order, args.cap)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        path = Path(args.file or f"hadamard-{args.method}-{args.order}.txt")
        signs.write_matrix(m, path)
        ok = signs.is_hadamard(signs.read_matrix(path))
        results = {"action": "construct", "method": args.method, "order": m.k, "label": m.label,
                   "file": str(path), "verified": ok, "first_violation": None}
    else:
        if not args.file:
            raise UsageError("verify needs --file")
        try:
            m = signs.read_matrix(args.file)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {args.file}: {exc}") from None
        ok = signs.is_hadamard(m)
        viol = signs.first_violation(m)
        results = {"action": "verify", "method": None, "order": m.k, "label": None, "file": args.file,
                   "verified": ok,
                   "first_violation": None if viol is None else {"rows": [viol[0], viol[1]], "inner_product": viol[2]}}
    echo = cfg.echo() | {"action": args.action, "method": args.method, "order": args.order, "file": args.file}
    report = Report("hadamard", echo, results, ok=ok)
    report.certificates.append(_cert(f"A A^T = kI (k={results['order']})", "Verified" if ok else "Failed", "exact integer product"))
    report.table = [{"row": i, "entries": str(r)} for i, r in enumerate(m.rows)]
    return report


def cmd_geodesic(cfg: RunConfig, args) -> Report:
    params = cfg.params
    v = parse_vector(args.vector, params.n)
    grid = cfg.grid
    orbit = rm.orbit_curve(v, grid, params)
    profile = rm.residual_profile(orbit, params)
    residual = float(profile[1:-1].max())
    crit = alg.is_geodesic_vector(v, params, cfg.tol)
    verdict = "geodesic" if residual <= args.residual_tol else "not geodesic"
    results = {
        "vector": _vec(v),
        "residual": residual,
        "residual_tol": args.residual_tol,
        "verdict": verdict,
        "criterion": crit,
        "consistent": (verdict == "geodesic") == crit,
        "nodes": int(grid.size),
    }
    figdir = _figdir(args)
    report = Report("geodesic", cfg.echo() | {"action": args.action, "vector": args.vector}, results)
    if args.action == "trace":
        try:
            integ = rm.integrate_geodesic(rm.GroupPoint.origin(params.n), orbit.v[0], params, grid, cfg.step)
        except rm.GeodesicIntegrationError as exc:
            report.ok = False
            results["error"] = str(exc)
            return report
        dev = float(np.abs(orbit.q - integ.q).max())
        results.update({"sup_deviation": dev, "energy_drift": rm.energy_drift(integ, params)})
        csv_text = orbit.to_csv(integ)
        report.table = csv_text  # written verbatim for --output csv
        if args.csv:
            Path(args.csv).write_text(csv_text)
            results["csv_file"] = args.csv
        if figdir is not None:
            from .plotting import plot_trace

            report.figures.append(str(plot_trace(orbit, integ, figdir / f"trace_n{cfg.n}.png")))
    else:
        report.ok = results["consistent"]
        report.table = [{"residual": residual, "verdict": verdict, "criterion": crit}]
        if figdir is not None:
            from .plotting import plot_residuals

            report.figures.append(str(plot_residuals(grid, {"orbit": profile}, figdir / f"residual_n{cfg.n}.png")))
    return report


def cmd_report(cfg: RunConfig, args) -> Report:
    params = cfg.params
    n = params.n
    # generators: W basis and up to 64 sign rays
    rays = [alg.sign_ray_vector(e) for e in _first_sign_vectors(n, 64)]
    gens = [alg.Z(k, n) for k in range(1, n + 1)] + rays
    gen_ok = all(alg.is_geodesic_vector(v, params, cfg.tol) for v in gens)
    grid = cfg.grid
    profiles = {}
    for i, v in enumerate(gens):
        label = f"Z_{i + 1}" if i < n else f"ray {i - n + 1}"
        profiles[label] = rm.residual_profile(rm.orbit_curve(v, grid, params), params)
    max_res = max(float(p[1:-1].max()) for p in profiles.values())

    fam = alg.independent_geodesic_family(params)
    rank = alg.coefficient_rank(fam)
    res, gram, mo, mo_ok, cert = _max_orth_payload(cfg)
    witness = None
    if n + 1 >= 4 and (n + 1) % 4 == 0:
        h = signs.construct_hadamard(n + 1)
        if h is not None:
            witness = {"order": h.k, "construction": h.label, "verified": signs.is_hadamard(h)}
    results = {
        "n": n,
        "dimension": params.dim,
        "classification": {"w_dimension": n, "ray_count": 2**n, "generators_checked": len(gens),
                           "all_generators_geodesic": gen_ok, "max_generator_residual": max_res},
        "independent_family": {"size": len(fam), "rank": rank},
        "max_orthogonal": {"case": mo["case"], "size": mo["total"], "predicted": mo["predicted"],
                           "family_size": mo["family"]["size"], "maximality": mo["family"]["maximality"],
                           "proof": mo["family"]["proof"], "gram_max_off_diagonal": mo["gram_max_off_diagonal"]},
        "hadamard_witness": witness,
    }
    ok = (gen_ok and max_res < RESIDUAL_TOL and rank == params.dim and mo_ok
          and (witness is None or witness["verified"]))
    report = Report("report", cfg.echo(), results, [cert], ok=ok)
    figdir = _figdir(args)
    if figdir is not None:
        from .plotting import plot_gram, plot_residuals

        labels = [f"W{i + 1}" for i in range(len(res.w_part))] + [f"B{i + 1}" for i in range(len(res.b_part))]
        report.figures.append(str(plot_gram(gram, labels, figdir / f"report_gram_n{n}.png")))
        report.figures.append(str(plot_residuals(grid, profiles, figdir / f"report_residuals_n{n}.png")))
    return report


def _first_sign_vectors(n: int, limit: int) -> list[list[int]]:
    out = []
    for m in range(min(2**n, limit)):
        out.append([-1 if (m >> i) & 1 else 1 for i in range(n)])
    return out


COMMANDS = {
    "classify": cmd_classify,
    "check-vector": cmd_check_vector,
    "max-orthogonal": cmd_max_orthogonal,
    "hadamard": cmd_hadamard,
    "geodesic": cmd_geodesic,
    "report": cmd_report,
}


# -- argument parsing ----------------------------------------------------------


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _positive_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=_positive_float, default=1.0, help="metric constant (default 1)")
    common.add_argument("--tol", type=_positive_float, default=alg.DEFAULT_TOL)
    common.add_argument("--step", type=_positive_float, default=1e-3)
    common.add_argument("--t-max", type=_positive_float, default=1.0)
    common.add_argument("--budget-nodes", type=_positive_int, default=None)
    common.add_argument("--budget-seconds", type=_positive_float, default=600.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=_positive_int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    with_n = argparse.ArgumentParser(add_help=False, parents=[common])
    with_n.add_argument("--n", type=_positive_int, required=True, help="family index, group dimension 2n+1")

    figs = argparse.ArgumentParser(add_help=False)
    figs.add_argument("--figures", metavar="DIR", help="render PNG figures into DIR")

    p = argparse.ArgumentParser(prog="homgeo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[with_n], help="W basis and the 2^n sign rays")
    s.add_argument("--samples", type=int, default=1000, help="random off-set vectors to reject")

    s = sub.add_parser("check-vector", parents=[with_n], help="test one vector")
    s.add_argument("vector", nargs="*")

    sub.add_parser("max-orthogonal", parents=[with_n, figs], help="largest orthogonal geodesic set")

    s = sub.add_parser("hadamard", parents=[common], help="construct or verify Hadamard matrices")
    s.add_argument("action", choices=("construct", "verify"))
    s.add_argument("--method", choices=("sylvester", "paley", "kronecker"))
    s.add_argument("--order", type=_positive_int)
    s.add_argument("--file")
    s.add_argument("--cap", type=_positive_int, default=signs.DEFAULT_ORDER_CAP)

    s = sub.add_parser("geodesic", parents=[with_n, figs], help="orbit residual or trace")
    s.add_argument("action", choices=("trace", "residual"))
    s.add_argument("--csv", help="write the trace CSV here")
    s.add_argument("--residual-tol", type=_positive_float, default=RESIDUAL_TOL)
    s.add_argument("vector", nargs="*")

    sub.add_parser("report", parents=[with_n, figs], help="one-shot summary for n")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # argparse mishandles "--" after a sub-command positional; split it off here
    tail: list[str] = []
    if "--" in argv:
        cut = argv.index("--")
        argv, tail = argv[:cut], argv[cut + 1 :]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if hasattr(args, "vector"):
        args.vector = list(args.vector) + tail
    elif tail:
        parser.print_usage(sys.stderr)
        print(f"homgeo {args.command}: error: unexpected arguments after --: {' '.join(tail)}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = RunConfig(
            n=getattr(args, "n", None), lam=args.lam, tol=args.tol, step=args.step, t_max=args.t_max,
            budget_nodes=args.budget_nodes, budget_seconds=args.budget_seconds, seed=args.seed,
            output_format=args.output, jobs=args.jobs,
        )
        report = COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"homgeo {args.command}: error: {exc}", file=sys.stderr)
        return 2
    report.timing = {"seconds": time.perf_counter() - start}

    if args.output == "json":
        text = report.to_json()
    elif args.output == "text":
        text = report.to_text()
    else:
        text = report.table if isinstance(report.table, str) else report.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not report.ok:
        log.warning("%s: internal verification failed", args.command)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
