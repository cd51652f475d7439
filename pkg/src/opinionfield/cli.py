"""Scenario runner: parse a scenario JSON file, simulate, emit artifacts.

Exit codes: 0 success, 2 parse/validation failure, 3 numerical failure
(no real stationary point or a sensitivity-domain violation), reported with
the offending agent, step, and coefficients.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .control import (
    ComplexRootsError,
    ControlContext,
    DomainError,
    OptimalPolicy,
    fd_sensitivity_case1,
    fd_sensitivity_case2,
    optimal_control,
    sensitivity_case1_dxi,
    sensitivity_case2_dxj,
)
from .cost import total_cost
from .dynamics import PolicyFailure, picard_law_iteration, simulate, write_trajectory_csv
from .kernel import KernelParams
from .measure import kde, silverman_bandwidth, write_kde_csv
from .scenario import Scenario, ScenarioError, load_scenario

__all__ = ["run", "sensitivity_sweep", "main"]


def _make_policy(scn: Scenario):
    if scn.policy_kind == "zero":
        return lambda k, s, x, b: np.zeros(len(x))
    if scn.policy_kind == "constant":
        value = scn.policy_value
        return lambda k, s, x, b: np.full(len(x), value)
    return OptimalPolicy(
        graph=scn.graph,
        kernel=scn.sim.kernel,
        multiplier=scn.multiplier,
        x0=scn.sim.x0,
        sigma=scn.sim.sigma,
        alpha=scn.sim.alpha,
        eps=scn.sim.eps,
        record=bool(scn.outputs["controls"]),
    )


def _write_json(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


_SWEEP_BASE = {
    "n": 4,
    "x": 0.5,
    "x0": 0.4,
    "gap": 0.2,
    "w": 1.0,
    "k": 0.0,
    "sigma": 0.0,
    "B": 0.0,
    "s": 1.0,
    "eps": 0.05,
    "alpha": 0.0,
    "rate": 1.0,
}


def _sweep_context(regime: str, kernel: KernelParams, params: dict) -> ControlContext:
    n = int(params["n"])
    if n < 2:
        raise ScenarioError("outputs.sensitivity.base.n: need at least two agents")
    x = np.full(n, float(params["x"]))
    if regime == "case2":
        x[1:] += float(params["gap"])
    rate = float(params["rate"])
    eps = float(params["eps"])
    return ControlContext(
        s=float(params["s"]),
        eps=eps,
        i=0,
        x=x,
        x0_i=float(params["x0"]),
        B_i=float(params["B"]),
        sigma_i=float(params["sigma"]),
        alpha_s=float(params["alpha"]),
        neighbor_idx=np.arange(1, n),
        neighbor_w=np.full(n - 1, float(params["w"])),
        k_i=float(params["k"]),
        kernel=kernel,
        dlambda=rate * eps,
        dlambda_ds=rate,
    )


def sensitivity_sweep(regime: str, param: str, values, base: dict,
                      kernel: KernelParams) -> list[dict]:
    """Tabulate the chosen control and its opinion-sensitivity over a grid.

    Each row compares the closed-form sensitivity with a central finite
    difference of the feedback root and records whether their signs agree
    (values within 1e-9 of zero count as sign 0).
    """
    settings = dict(_SWEEP_BASE)
    settings.update(base)
    if param not in settings:
        raise ScenarioError(f"outputs.sensitivity.param: unknown parameter {param!r}")
    rows = []
    for value in values:
        point = dict(settings)
        point[param] = float(value)
        ctx = _sweep_context(regime, kernel, point)
        sol = optimal_control(ctx)
        if regime == "case1":
            closed = sensitivity_case1_dxi(ctx)
            fd = fd_sensitivity_case1(ctx)
        else:
            closed = sensitivity_case2_dxj(ctx)
            fd = fd_sensitivity_case2(ctx)

        def sign(v: float) -> int:
            return 0 if abs(v) <= 1e-9 else (1 if v > 0 else -1)

        rows.append({
            "param": param,
            "value": float(value),
            "u_star": float(sol.chosen),
            "sens_closed": float(closed),
            "sens_fd": float(fd),
            "sign_ok": sign(closed) == sign(fd),
        })
    return rows


def _write_sweep_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("param,value,u_star,sens_closed,sens_fd,sign_ok\n")
        for r in rows:
            fh.write(
                f"{r['param']},{r['value']!r},{r['u_star']!r},"
                f"{r['sens_closed']!r},{r['sens_fd']!r},"
                f"{'true' if r['sign_ok'] else 'false'}\n"
            )


def run(scn: Scenario, output_dir, quiet: bool = False) -> dict[str, Path]:
    """Execute one scenario and write every requested artifact.

    Returns a map from artifact name to path. All artifacts are
    deterministic functions of (scenario document, seed).
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, Path] = {}

    def note(name: str, path: Path) -> None:
        artifacts[name] = path
        if not quiet:
            print(f"wrote {path.name} ({path.stat().st_size} bytes)")

    policy = _make_policy(scn)
    traj = simulate(scn.sim, policy, graph=scn.graph)
    if not quiet and not scn.sim.clamp:
        print(f"out-of-range opinion updates: {traj.out_of_range}")

    if scn.outputs["trajectories"]:
        path = out / "trajectories.csv"
        write_trajectory_csv(traj, path)
        note("trajectories", path)

    if scn.outputs["controls"] and scn.policy_kind == "optimal":
        path = out / "controls.json"
        log = [
            {"step": k, "time": s, "agent": i, **sol.to_dict()}
            for (k, s, i, sol) in policy.log
        ]
        _write_json(log, path)
        note("controls", path)

    if scn.outputs["costs"]:
        path = out / "costs.json"
        reports = [total_cost([traj], scn.graph, i).to_dict() for i in range(scn.graph.n)]
        _write_json(reports, path)
        note("costs", path)

    for t in scn.outputs["kde_times"]:
        t = float(t)
        k = int(round(t / scn.sim.eps))
        k = min(k, traj.times.size - 1)
        samples = traj.opinions[:, k]
        spread = samples.std(ddof=1) if samples.size > 1 else 0.0
        h = silverman_bandwidth(samples) if spread > 0 else 0.05
        grid = np.linspace(samples.min() - 3 * h, samples.max() + 3 * h, 201)
        dens = kde(samples, h, grid)
        path = out / f"kde_{t!r}.csv"
        write_kde_csv(float(traj.times[k]), grid, dens, path)
        note(f"kde_{t!r}", path)

    if scn.outputs["picard"]:
        pic = scn.outputs["picard"]
        pic_policy = policy
        if pic["policy"] == "zero":
            pic_policy = lambda k, s, x, b: np.zeros(len(x))  # noqa: E731
        res = picard_law_iteration(scn.sim, pic_policy, tol=float(pic["tol"]),
                                   max_iter=int(pic["max_iter"]), graph=scn.graph)
        path = out / "picard.json"
        _write_json(
            {
                "converged": res.converged,
                "iterations": res.iterations,
                "tol": float(pic["tol"]),
                "terminal_w2": res.distances,
                "sup_w2": res.sup_distances,
            },
            path,
        )
        note("picard", path)

    if scn.outputs["sensitivity"]:
        sens = scn.outputs["sensitivity"]
        rows = sensitivity_sweep(sens["regime"], sens["param"], sens["values"],
                                 sens["base"], scn.sim.kernel)
        path = out / "sensitivity.csv"
        _write_sweep_csv(rows, path)
        note("sensitivity", path)

    return artifacts


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="opinionfield",
        description="Run an opinion-dynamics scenario and emit CSV/JSON artifacts.",
    )
    parser.add_argument("--scenario", required=True, help="path to the scenario JSON file")
    parser.add_argument("--output-dir", default="out", help="artifact directory")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--workers", type=int, default=None,
                        help="override the worker count (never changes results)")
    parser.add_argument("--print-config", action="store_true",
                        help="print the normalized scenario and exit")
    parser.add_argument("--quiet", action="store_true", help="suppress summary lines")
    args = parser.parse_args(argv)

    try:
        scn = load_scenario(args.scenario, seed_override=args.seed,
                            workers_override=args.workers)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.print_config:
        print(json.dumps(scn.doc, indent=2))
        return 0

    try:
        run(scn, args.output_dir, quiet=args.quiet)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ComplexRootsError, DomainError, PolicyFailure) as exc:
        cause = exc.cause if isinstance(exc, PolicyFailure) else exc
        if isinstance(cause, ComplexRootsError):
            agent = "?" if cause.agent is None else cause.agent
            step = "?" if cause.step is None else cause.step
            print(
                f"numerical failure: no real stationary point for agent {agent} "
                f"at step {step}: T1={cause.t1!r} T2={cause.t2!r} T3={cause.t3!r}",
                file=sys.stderr,
            )
        else:
            print(f"numerical failure: {cause}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
