"""Command-line front end.

Subcommands: modes, meanfield, oracle-compare, resonance, evolve,
reduced-state, regime, rerun.  Exit codes: 0 success, 2 validation /
usage error, 3 numerical-tolerance failure.  Every run that writes files
also writes a manifest (see io_utils) that `rerun` can replay and verify.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GinzburgError, ToleranceError, ValidationError
from .io_utils import (RunManifest, load_manifest, sha256_file, write_csv,
                       write_json, write_manifest)
from .params import build_params, load_params, regime_check
from .modes import (DEFAULT_Y_MAX, coupling_strengths, mode_coupling,
                    mode_spectrum, resonance_mode, resonance_pair)
from .meanfield import Trajectory, profile
from .discrete_oracle import initial_state, integrate, site_positions
from .quantum import FockSpace, build_ndpa, evolve_exact, evolve_full, \
    evolve_perturbative
from .specfun import cutoff_f
from .superpose import (branch_spec_from_resonance, density_matrix,
                        discriminate, evolve_superposed, mixed_density_matrix,
                        reduce_chain, reduce_detector)

# Fig. 2-style default configuration when no --params file is given
_DEFAULT_CONFIG = {"units": {"preset": "paper"},
                   "chain": {"N": 2001},
                   "detector": {"w": 0.01}}

_PHI_SWEEP = (0.0, math.pi / 4.0, math.pi / 2.0, 3.0 * math.pi / 4.0)


def _load_params(args):
    if getattr(args, "params", None):
        return load_params(args.params)
    return build_params(json.loads(json.dumps(_DEFAULT_CONFIG)))


def _parse_floats(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"expected comma-separated floats, got {text!r}") from exc
    if not values:
        raise ValidationError(f"empty list {text!r}")
    return values


def _grid(params, n: int) -> np.ndarray:
    if n < 2:
        raise ValidationError(f"--grid must be >= 2 points, got {n}")
    half = params.chain.L / 2.0
    return np.linspace(-half, half, n)


# -- subcommand handlers (return (summary, [output paths])) --------------------


def _cmd_modes(args, params):
    omega_d = args.omega_d if args.omega_d else params.detector.omega_d1
    spec = mode_spectrum(params, y_max=args.y_max)
    g = coupling_strengths(params, omega_d, alphas=spec.alphas, y_max=args.y_max)
    f = cutoff_f(spec.omega * params.detector.w / params.chain.c_s)
    rows = [(int(a), float(om), float(gv), float(fv), bool(r))
            for a, om, gv, fv, r in zip(spec.alphas, spec.omega, g, f, spec.retained)]
    out = write_csv(args.csv, ["alpha", "omega", "g_alpha", "f_factor", "retained"], rows)
    n_ret = int(spec.retained.sum())
    return (f"modes: {len(rows)} modes, {n_ret} retained (y_max={args.y_max}), "
            f"max |g_alpha|/hbar = {np.max(np.abs(g)) / params.hbar:.6g} -> {out}",
            [out])


def _cmd_meanfield(args, params):
    traj = Trajectory(x0=args.x0, v=args.v)
    grid = _grid(params, args.grid)
    kwargs = {}
    if args.route == "closed":
        if args.include_image:
            kwargs["include_image"] = True
        if args.alpha_max is not None:
            raise ValidationError("--alpha-max applies to series/modesum only")
    else:
        if args.include_image:
            raise ValidationError("--include-image applies to the closed route only")
        if args.alpha_max is not None:
            kwargs["alpha_max"] = args.alpha_max
    if args.route == "modesum":
        kwargs["longwave"] = args.longwave
        kwargs["extended_domain"] = args.extended_domain
        kwargs["rel_tol"] = args.rel_tol
    elif args.longwave or args.extended_domain:
        raise ValidationError("--longwave/--extended-domain apply to modesum only")

    prof = profile(args.route, grid, args.t, traj, params, **kwargs)
    comp = prof.components or {}
    nan = float("nan")
    rows = []
    for i, x in enumerate(grid):
        rows.append((float(x), float(prof.values[i]),
                     float(comp["comoving"][i]) if comp else nan,
                     float(comp["ripple_right"][i]) if comp else nan,
                     float(comp["ripple_left"][i]) if comp else nan))
    out = write_csv(args.csv, ["x", "phi_total", "phi_comoving",
                               "phi_ripple_right", "phi_ripple_left"], rows)
    extra = ""
    if "quadrature" in prof.meta:
        q = prof.meta["quadrature"]
        extra = f", quadrature error {q.error_estimate:.2e}"
    return (f"meanfield[{args.route}]: t={args.t}, v={args.v}, "
            f"peak |phi| = {np.max(np.abs(prof.values)):.6g}, "
            f"integral {prof.constraint_integral:.3e}{extra} -> {out}",
            [out])


def _cmd_oracle_compare(args, params):
    chain = params.chain
    traj = Trajectory(x0=args.x0, v=args.v)
    traj.validate(params)
    omega_max = 2.0 * math.sqrt(chain.k_c / chain.m_c)
    dt_max = 0.1 * 2.0 * math.pi / omega_max
    dt = args.dt if args.dt else 0.5 * dt_max
    steps = max(1, int(round(args.t / dt)))
    dt = args.t / steps

    state = initial_state(params, x_d=args.x0, v=args.v)
    run = integrate(state, params, dt, steps, mode="prescribed", store_every=steps)
    phi_d = run.final.phi
    x = site_positions(params)
    from .meanfield import meanfield_closed
    phi_c = meanfield_closed(x, args.t, traj, params)

    peak = float(np.max(np.abs(phi_c)))
    l2 = float(np.sqrt(np.mean((phi_d - phi_c) ** 2))) / peak
    stride = max(1, args.stride)
    rows = [(float(x[i]), float(phi_d[i]), float(phi_c[i]))
            for i in range(0, x.size, stride)]
    out = write_csv(args.csv, ["x", "phi_discrete", "phi_closed"], rows)
    summary = (f"oracle-compare: N={chain.N}, steps={steps}, "
               f"L2/peak = {l2:.4e} (tol {args.tol}) -> {out}")
    if l2 > args.tol:
        print(summary)
        raise ToleranceError(
            f"discrete-vs-closed L2/peak = {l2:.4e} exceeds tol = {args.tol}",
            achieved=l2, target=args.tol)
    return summary, [out]


def _cmd_resonance(args, params):
    omega_d = args.omega_d if args.omega_d else params.detector.omega_d1
    outputs = []
    if args.v2 is not None:
        omega_d2 = args.omega_d2
        if omega_d2 is None:
            omega_d2 = (params.detector.omega_d2 if params.detector.two_level
                        else omega_d)
        pair = resonance_pair(args.v, args.v2, omega_d, omega_d2, params,
                              y_max=args.y_max)
        payload = {"mode": "pair", "v1": args.v, "v2": args.v2,
                   "omega_d1": omega_d, "omega_d2": omega_d2,
                   "alpha1": pair.alpha1, "alpha2": pair.alpha2,
                   "detuning1": pair.detuning1, "detuning2": pair.detuning2,
                   "cross_detunings": pair.cross_detunings,
                   "cross_nearest": pair.cross_nearest,
                   "guard_band": pair.guard_band,
                   "selectivity_violated": pair.selectivity_violated,
                   "degenerate_modes": pair.degenerate_modes}
        summary = (f"resonance pair: alpha1={pair.alpha1}, alpha2={pair.alpha2}, "
                   f"selectivity_violated={pair.selectivity_violated}")
    else:
        res = resonance_mode(args.v, omega_d, params, y_max=args.y_max)
        payload = {"mode": "single", "v": args.v, "omega_d": omega_d,
                   "alpha0": res.alpha0, "detuning": res.detuning,
                   "omega_star": res.omega_star, "alpha_linear": res.alpha_linear}
        summary = (f"resonance: alpha0={res.alpha0}, Omega*={res.omega_star:.6g}, "
                   f"detuning={res.detuning:.4e}")
    if args.json:
        payload["params"] = params.to_dict()
        outputs.append(write_json(args.json, payload))
        summary += f" -> {outputs[0]}"
    return summary, outputs


def _window_couplings(params, alpha0, omega_d, window, y_max):
    lo = max(1, alpha0 - window)
    hi = min(params.chain.N - 1, alpha0 + window)
    return [mode_coupling(a, params, omega_d, y_max=y_max)
            for a in range(lo, hi + 1)]


def _cmd_evolve(args, params):
    omega_d = args.omega_d if args.omega_d else params.detector.omega_d1
    res = resonance_mode(args.v, omega_d, params, y_max=args.y_max)
    coupling = mode_coupling(res.alpha0, params, omega_d, y_max=args.y_max)
    g_abs = abs(coupling.g_alpha)
    if g_abs == 0.0:
        raise ValidationError("resonant coupling is zero; nothing to evolve")
    hbar = params.hbar
    gt_values = _parse_floats(args.gt)

    rows = []
    for gt in gt_values:
        t = gt * hbar / g_abs
        if args.scheme == "perturbative":
            psi = evolve_perturbative(coupling, t, hbar=hbar)
            space = psi.space
        elif args.scheme == "exact":
            space = FockSpace(modes=((res.alpha0, args.n_max),), detector_qubits=1)
            h = build_ndpa(coupling, space)
            psi = evolve_exact(h, space.vacuum(), t, hbar=hbar)
        else:
            couplings = _window_couplings(params, res.alpha0, omega_d,
                                          args.window, args.y_max)
            modes_def = tuple(
                (c.alpha, args.n_max if c.alpha == res.alpha0 else args.n_max_offres)
                for c in couplings)
            space = FockSpace(modes=modes_def, detector_qubits=1)
            traj = Trajectory(x0=args.x0, v=args.v)
            psi = evolve_full(space.vacuum(), t, traj, couplings, space, params,
                              omega_d=omega_d)
        occ = tuple(1 if a == res.alpha0 else 0 for a in space.mode_labels)
        amp = psi.amplitudes[space.basis_index(1, occ)]
        rows.append((float(gt), float(t), float(psi.excitation_probability()),
                     float(amp.real), float(amp.imag)))
    out = write_csv(args.csv, ["gt", "t", "p_excite", "amp_re", "amp_im"], rows)
    return (f"evolve[{args.scheme}]: alpha0={res.alpha0}, "
            f"|g|/hbar={g_abs / hbar:.6g}, {len(rows)} gt values -> {out}",
            [out])


def _populations(rho) -> dict:
    return {str(tuple(int(v) for v in np.unravel_index(k, rho.dims))):
            float(np.real(rho.matrix[k, k]))
            for k in range(rho.matrix.shape[0])
            if abs(rho.matrix[k, k]) > 1e-300}


def _cmd_reduced_state(args, params):
    omega_d = args.omega_d if args.omega_d else params.detector.omega_d1
    omega_d2 = args.omega_d2
    if omega_d2 is None and params.detector.two_level:
        omega_d2 = params.detector.omega_d2
    detector = args.detector
    if detector == "auto":
        detector = "two-level" if omega_d2 is not None else "single"
    if detector == "two-level" and omega_d2 is None:
        raise ValidationError("two-level detector needs --omega-d2 (or a params "
                              "file with two omega_d entries)")

    spec = branch_spec_from_resonance(
        params, args.v1, args.v2, args.theta, args.phi, omega_d=omega_d,
        omega_d2=omega_d2 if detector == "two-level" else None,
        x0_1=args.x0, x0_2=args.x0_2, y_max=args.y_max)
    g1 = abs(spec.branches[0].coupling.g_alpha)
    t = args.t if args.t is not None else args.gt * params.hbar / g1

    state = evolve_superposed(spec, t, detector=detector, method=args.method)
    rho = density_matrix(state)
    rho_chain = reduce_chain(rho)
    rho_det = reduce_detector(rho)
    rho_mix = mixed_density_matrix(spec, t, detector=detector, method=args.method)
    chain_rep = discriminate([rho_chain, reduce_chain(rho_mix)],
                             labels=["coherent", "mixed"])
    det_rep = discriminate([rho_det, reduce_detector(rho_mix)],
                           labels=["coherent", "mixed"])

    payload = {
        "detector_model": detector, "method": args.method,
        "theta": args.theta, "phi": args.phi, "t": t,
        "branches": [{"x0": b.x0, "v": b.v, "alpha": b.alpha,
                      "g_alpha": b.coupling.g_alpha,
                      "omega_alpha": b.coupling.omega_alpha,
                      "omega_d": b.coupling.omega_d}
                     for b in spec.branches],
        "populations": {"chain": _populations(rho_chain),
                        "detector": _populations(rho_det)},
        "coherent_vs_mixed": {"chain": chain_rep.to_dict(),
                              "detector": det_rep.to_dict()},
        "params": params.to_dict(),
    }
    outputs = [write_json(args.json, payload)]

    if args.sweep_csv:
        ref_chain = ref_det = None
        rows = []
        for phi in _PHI_SWEEP:
            s = branch_spec_from_resonance(
                params, args.v1, args.v2, args.theta, phi, omega_d=omega_d,
                omega_d2=omega_d2 if detector == "two-level" else None,
                x0_1=args.x0, x0_2=args.x0_2, y_max=args.y_max)
            r = density_matrix(evolve_superposed(s, t, detector=detector,
                                                 method=args.method))
            rc, rd = reduce_chain(r), reduce_detector(r)
            if ref_chain is None:
                ref_chain, ref_det = rc, rd
            from .quantum import trace_distance
            p00 = rc.population((0, 0))
            p10 = rc.population((1, 0))
            p01 = rc.population((0, 1))
            if detector == "single":
                pe1, pe2 = rd.population((1,)), float("nan")
            else:
                pe1, pe2 = rd.population((2,)), rd.population((1,))
            rows.append((float(phi), p00, p10, p01, pe1, pe2,
                         trace_distance(rc, ref_chain),
                         trace_distance(rd, ref_det)))
        outputs.append(write_csv(
            args.sweep_csv,
            ["phi", "p_chain_00", "p_chain_10", "p_chain_01",
             "p_det_e1", "p_det_e2", "td_chain_vs_phi0", "td_det_vs_phi0"],
            rows))

    worst = max(p.trace_distance for p in chain_rep.pairs + det_rep.pairs)
    return (f"reduced-state[{detector},{args.method}]: alpha1={spec.branches[0].alpha}, "
            f"alpha2={spec.branches[1].alpha}, coherent-vs-mixed max trace distance "
            f"= {worst:.3e} -> {outputs[0]}",
            outputs)


def _cmd_regime(args, params):
    trajectories = [(args.x0, args.v)]
    if args.v2 is not None:
        trajectories.append((args.x0_2, args.v2))
    report = regime_check(params, (0.0, args.t_end), trajectories,
                          y_max=args.y_max)
    outputs = []
    if args.json:
        payload = report.to_dict()
        payload["params"] = params.to_dict()
        outputs.append(write_json(args.json, payload))
    failed = [c.name for c in report.checks if not c.passed]
    status = "all pass" if report.all_pass else f"FAILED: {', '.join(failed)}"
    summary = f"regime: {len(report.checks)} checks, {status}"
    if outputs:
        summary += f" -> {outputs[0]}"
    return summary, outputs


def _cmd_rerun(args, _params_unused=None):
    data = load_manifest(args.manifest)
    argv = list(data["argv"])
    if argv and argv[0] == "rerun":
        raise ValidationError("refusing to rerun a rerun manifest")
    code = run(argv)
    if code != 0:
        raise ValidationError(f"replayed command exited with code {code}")
    mismatched = []
    for rec in data["outputs"]:
        path = Path(rec["path"])
        if not path.exists() or sha256_file(path) != rec["sha256"]:
            mismatched.append(str(path))
    if mismatched:
        raise ToleranceError(
            "rerun outputs differ from manifest hashes: " + ", ".join(mismatched))
    return (f"rerun: {len(data['outputs'])} outputs verified byte-identical "
            f"against {args.manifest}", [])


# -- parser --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginzburg",
        description="Sound-speed analogue of Ginzburg radiation: mean-field, "
                    "discrete-oracle, and quantized detector-chain runs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", type=str, default=None,
                        help="JSON config file (default: paper units, N=2001, w=0.01)")
    common.add_argument("--seed", type=int, default=None,
                        help="accepted for interface stability; every code path "
                             "is deterministic, the value is unused")
    common.add_argument("--y-max", type=float, default=DEFAULT_Y_MAX,
                        help="mode cutoff Omega*w/c_s (default %(default)s)")

    p = sub.add_parser("modes", parents=[common],
                       help="mode table: frequency, coupling, cutoff factor")
    p.add_argument("--csv", required=True)
    p.add_argument("--omega-d", type=float, default=None)
    p.set_defaults(func=_cmd_modes)

    p = sub.add_parser("meanfield", parents=[common],
                       help="mean displacement field profile by one route")
    p.add_argument("--route", required=True, choices=["closed", "series", "modesum"])
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--grid", type=int, default=4001)
    p.add_argument("--csv", required=True)
    p.add_argument("--alpha-max", type=int, default=None)
    p.add_argument("--include-image", action="store_true")
    p.add_argument("--longwave", action="store_true")
    p.add_argument("--extended-domain", action="store_true")
    p.add_argument("--rel-tol", type=float, default=1e-4)
    p.set_defaults(func=_cmd_meanfield)

    p = sub.add_parser("oracle-compare", parents=[common],
                       help="discrete leapfrog vs closed form")
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=_cmd_oracle_compare)

    p = sub.add_parser("resonance", parents=[common],
                       help="resonant mode index for one or two trajectories")
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--omega-d", type=float, default=None)
    p.add_argument("--v2", type=float, default=None)
    p.add_argument("--omega-d2", type=float, default=None)
    p.add_argument("--json", type=str, default=None)
    p.set_defaults(func=_cmd_resonance)

    p = sub.add_parser("evolve", parents=[common],
                       help="detector excitation for a localized trajectory")
    p.add_argument("--scheme", required=True,
                   choices=["exact", "perturbative", "full"])
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--omega-d", type=float, default=None)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--gt", type=str, required=True,
                   help="comma-separated |g_alpha| t / hbar values")
    p.add_argument("--n-max", type=int, default=2,
                   help="resonant-mode Fock truncation")
    p.add_argument("--n-max-offres", type=int, default=1)
    p.add_argument("--window", type=int, default=2,
                   help="full scheme: modes alpha0 +/- window")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("reduced-state", parents=[common],
                       help="superposed-trajectory reduced states and verdicts")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--v1", type=float, required=True)
    p.add_argument("--v2", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--x0-2", type=float, default=0.0)
    p.add_argument("--omega-d", type=float, default=None)
    p.add_argument("--omega-d2", type=float, default=None)
    p.add_argument("--detector", choices=["auto", "single", "two-level"],
                   default="auto")
    p.add_argument("--method", choices=["perturbative", "exact"],
                   default="perturbative")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gt", type=float, help="|g_alpha1| t / hbar")
    group.add_argument("--t", type=float)
    p.add_argument("--json", required=True)
    p.add_argument("--sweep-csv", type=str, default=None,
                   help="also sweep phi over {0, pi/4, pi/2, 3pi/4}")
    p.set_defaults(func=_cmd_reduced_state)

    p = sub.add_parser("regime", parents=[common],
                       help="approximation-regime report for a run window")
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--v2", type=float, default=None)
    p.add_argument("--x0-2", type=float, default=0.0)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--json", type=str, default=None)
    p.set_defaults(func=_cmd_regime)

    p = sub.add_parser("rerun", help="replay a manifest and verify output hashes")
    p.add_argument("manifest")
    p.set_defaults(func=_cmd_rerun, params=None)

    return parser


def run(argv) -> int:
    """Dispatch argv (without the program name); returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:   # argparse handles usage/help text itself
        return int(exc.code or 0)

    t_start = time.perf_counter()
    try:
        if args.subcommand == "rerun":
            summary, outputs = _cmd_rerun(args)
            params = None
        else:
            params = _load_params(args)
            summary, outputs = args.func(args, params)
    except ToleranceError as exc:
        print(f"ginzburg {args.subcommand}: tolerance failure: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, FileNotFoundError, OSError) as exc:
        print(f"ginzburg {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except GinzburgError as exc:
        print(f"ginzburg {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2

    if outputs:
        options = {k: (str(v) if isinstance(v, Path) else v)
                   for k, v in vars(args).items() if k != "func"}
        manifest = RunManifest(
            subcommand=args.subcommand, argv=list(argv),
            params=params.to_dict() if params is not None else {},
            options=options, version=__version__,
            wall_time_s=time.perf_counter() - t_start)
        for path in outputs:
            manifest.record_output(path)
        write_manifest(manifest)
    print(summary)
    return 0


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
