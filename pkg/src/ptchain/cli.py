"""Command-line front end: coupling sweeps, state classification, exceptional
point searches, and time-domain runs, serialized deterministically.

Exit codes: 0 success, 1 usage, 2 I/O failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .chain import ChainConfig
from .classify import count_special_states, special_state_census
from .errors import (ClassificationError, ConfigurationError, DenseSolverError,
                     DomainError, StepSizeError)
from .exceptional import find_exceptional_points
from .io import (invocation_string, meta_lines, write_delimited,
                 write_json_document)
from .spectral import SolverOptions, solve_spectrum
from .transport import (WaveState, build_transport_report, continuity_residual,
                        default_time_step, evolve)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class SweepSpec:
    """A resolved coupling sweep: chain parameters plus the eta values and
    the outputs to produce.  eta values are non-negative with at least one
    entry; multi-point sweeps need at least two."""

    N: int
    k: int
    t: float
    etas: tuple
    outputs: tuple = ("spectrum",)

    def __post_init__(self):
        if len(self.etas) == 0 or min(self.etas) < 0:
            raise _UsageError("sweep requires non-negative eta values")


def _expand_config(argv):
    """Splice `--config FILE` JSON entries in as flags directly after the
    subcommand, so explicitly given command-line flags win on conflict."""
    if "--config" not in argv:
        return argv
    pos = argv.index("--config")
    if pos + 1 >= len(argv):
        raise _UsageError("--config requires a file path")
    path = Path(argv[pos + 1])
    rest = argv[:pos] + argv[pos + 2:]
    if not rest:
        raise _UsageError("--config needs a subcommand")
    try:
        table = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise _UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(table, dict):
        raise _UsageError(f"config file {path} must hold a flag table")
    flags = []
    for key, value in table.items():
        if isinstance(value, bool):
            if value:
                flags.append(f"--{key}")
        else:
            flags.extend([f"--{key}", str(value)])
    return rest[:1] + flags + rest[1:]


def _parse_range(text: str, what: str, parts: int):
    bits = text.split(":")
    if len(bits) != parts:
        raise _UsageError(f"{what} must have the form " + ":".join(["X"] * parts)
                          + f", got '{text}'")
    return bits


def _eta_values(args) -> np.ndarray:
    if args.eta_range is not None:
        lo, hi, steps = _parse_range(args.eta_range, "--eta-range", 3)
        lo, hi, steps = float(lo), float(hi), int(steps)
        if steps < 2 or lo < 0 or hi <= lo:
            raise _UsageError(f"invalid --eta-range '{args.eta_range}'")
        return np.linspace(lo, hi, steps)
    if args.eta is None:
        raise _UsageError("one of --eta or --eta-range is required")
    if args.eta < 0:
        raise _UsageError("--eta must be non-negative")
    return np.array([args.eta])


def _normalized_chain(args, notes: list) -> ChainConfig:
    k = args.k
    if k is not None and args.N is not None and k > args.N // 2:
        mirror = args.N + 1 - k
        notes.append(f"k normalized from {k} to the mirror site {mirror}")
        k = mirror
    try:
        return ChainConfig(N=args.N, k=k, t=args.t, eta=0.0)
    except ConfigurationError as exc:
        raise _UsageError(str(exc)) from exc


def _solver_options(args) -> SolverOptions:
    base = SolverOptions()
    return SolverOptions(
        secular_tol=args.tol_secular if args.tol_secular is not None else base.secular_tol,
        eigen_tol=args.tol_eigen if args.tol_eigen is not None else base.eigen_tol)


def _sweep_spectra(cfg: ChainConfig, etas, opts: SolverOptions, threads: int):
    def one(eta):
        return solve_spectrum(cfg.with_eta(float(eta)), opts)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, etas))
    return [one(eta) for eta in etas]


def _write_rows(args, header, columns, rows):
    if args.format == "json":
        records = [dict(zip(columns, row)) for row in rows]
        write_json_document(args.out, {
            "meta": {"version": __version__, "invocation": header["invocation"],
                     "notes": header["notes"]},
            "records": records,
        })
    else:
        write_delimited(args.out, meta_lines(__version__, header["invocation"],
                                             header["notes"]), columns, rows)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def cmd_spectrum(args, invocation: str) -> int:
    notes = []
    cfg = _normalized_chain(args, notes)
    sweep = SweepSpec(N=cfg.N, k=cfg.k, t=cfg.t,
                      etas=tuple(float(e) for e in _eta_values(args)),
                      outputs=("spectrum",))
    etas = np.array(sweep.etas)
    opts = _solver_options(args)
    spectra = _sweep_spectra(cfg, etas, opts, args.threads)
    columns = ["eta", "index", "re_E", "im_E", "re_theta", "im_theta", "tag",
               "secular_residual"]
    rows = []
    for eta, spec in zip(etas, spectra):
        for i, p in enumerate(spec.pairs):
            rows.append((float(eta), i, p.energy.real, p.energy.imag,
                         p.theta.real, p.theta.imag, p.tag, p.residuals.secular))
    _write_rows(args, {"invocation": invocation, "notes": notes}, columns, rows)
    if args.plot:
        from .plotting import save_spectrum_figure
        energies = [[p.energy for p in spec.pairs] for spec in spectra]
        save_spectrum_figure(Path(args.out).with_suffix(".png"), etas, energies,
                             title=f"N={cfg.N}, k={cfg.k}")
    return 0


def cmd_transport(args, invocation: str) -> int:
    notes = []
    cfg = _normalized_chain(args, notes)
    sweep = SweepSpec(N=cfg.N, k=cfg.k, t=cfg.t,
                      etas=tuple(float(e) for e in _eta_values(args)),
                      outputs=("xi",))
    etas = np.array(sweep.etas)
    opts = _solver_options(args)
    spectra = _sweep_spectra(cfg, etas, opts, args.threads)
    columns = ["eta", "index", "xi", "tag"]
    rows = []
    xi_table = []
    for eta, spec in zip(etas, spectra):
        report = build_transport_report(spec)
        xi_row = []
        for i, rec in enumerate(report.records):
            rows.append((float(eta), i, rec.xi, rec.tag))
            xi_row.append(np.nan if rec.xi is None else rec.xi)
        xi_table.append(xi_row)
    _write_rows(args, {"invocation": invocation, "notes": notes}, columns, rows)
    if args.plot:
        from .plotting import save_transport_figure
        save_transport_figure(Path(args.out).with_suffix(".png"), etas, xi_table,
                              title=f"N={cfg.N}, k={cfg.k}")
    return 0


def cmd_classify(args, invocation: str) -> int:
    if args.k_range is not None:
        lo, hi = _parse_range(args.k_range, "--k-range", 2)
        ks = range(int(lo), int(hi) + 1)
    else:
        ks = range(1, args.N // 2 + 1)
    rows = []
    for k in ks:
        if not 1 <= k <= args.N // 2:
            raise _UsageError(f"k = {k} outside 1..floor(N/2) = {args.N // 2}")
        n_op, n_tr = count_special_states(args.N, k)
        rows.append((k, n_op, n_tr))
    _write_rows(args, {"invocation": invocation, "notes": []},
                ["k", "n_opaque", "n_transparent"], rows)
    if args.plot:
        from .plotting import save_classification_figure
        save_classification_figure(Path(args.out).with_suffix(".png"),
                                   [r[0] for r in rows], [r[1] for r in rows],
                                   [r[2] for r in rows], title=f"N={args.N}")
    return 0


def cmd_census(args, invocation: str) -> int:
    notes = []
    cfg = _normalized_chain(args, notes)
    census = special_state_census(cfg.N, cfg.k)
    doc = census.to_json_dict()
    doc["meta"] = {"version": __version__, "invocation": invocation, "notes": notes}
    write_json_document(args.out, doc)
    return 0


def cmd_ep(args, invocation: str) -> int:
    notes = []
    cfg = _normalized_chain(args, notes)
    lo, hi = _parse_range(args.eta_range, "--eta-range", 2) if args.eta_range.count(":") == 1 \
        else _parse_range(args.eta_range, "--eta-range", 3)[:2]
    try:
        records = find_exceptional_points(cfg, (float(lo), float(hi)), grid=args.grid)
    except ConfigurationError as exc:
        raise _UsageError(str(exc)) from exc
    eps = [{
        "eta_c": r.eta_c,
        "re_theta": r.theta_c.real,
        "im_theta": r.theta_c.imag,
        "re_E": r.energy_c.real,
        "im_E": r.energy_c.imag,
        "p": r.order,
        "flags": list(r.flags),
    } for r in records]
    write_json_document(args.out, {
        "meta": {"version": __version__, "invocation": invocation, "notes": notes},
        "eps": eps,
    })
    if args.plot:
        from .plotting import save_ep_figure
        save_ep_figure(Path(args.out).with_suffix(".png"), records,
                       title=f"N={cfg.N}, k={cfg.k}")
    return 0


def _initial_state(spec: str, cfg: ChainConfig, opts: SolverOptions) -> np.ndarray:
    kind, _, value = spec.partition(":")
    if kind == "site":
        j = int(value)
        if not 1 <= j <= cfg.N:
            raise _UsageError(f"initial site must be in 1..{cfg.N}, got {j}")
        c = np.zeros(cfg.N, dtype=complex)
        c[j - 1] = 1.0
        return c
    if kind == "eigenstate":
        i = int(value)
        spectrum = solve_spectrum(cfg, opts)
        if not 0 <= i < cfg.N:
            raise _UsageError(f"eigenstate index must be in 0..{cfg.N - 1}, got {i}")
        return spectrum.pairs[i].vector.copy()
    if kind == "file":
        data = json.loads(Path(value).read_text(encoding="utf-8"))
        c = np.array([complex(re, im) for re, im in data])
        if len(c) != cfg.N:
            raise _UsageError(f"initial state file has {len(c)} sites, expected {cfg.N}")
        return c
    raise _UsageError(f"initial state must be site:J, eigenstate:I or file:PATH, got '{spec}'")


def cmd_evolve(args, invocation: str) -> int:
    notes = []
    base = _normalized_chain(args, notes)
    if args.eta is None or args.eta < 0:
        raise _UsageError("--eta (non-negative) is required for evolve")
    cfg = base.with_eta(args.eta)
    opts = _solver_options(args)
    c0 = _initial_state(args.initial, cfg, opts)
    dt = args.dt if args.dt is not None else default_time_step(cfg)
    trajectory = evolve(WaveState(c=c0, time=0.0), cfg, args.t_final, dt)

    from .transport import flux_profile
    max_residual = 0.0
    rows = []
    densities = []
    times = []
    for state in trajectory:
        max_residual = max(max_residual, float(np.max(np.abs(
            continuity_residual(state, cfg)))))
        profile = flux_profile(state, cfg)
        times.append(state.time)
        densities.append(np.abs(state.c) ** 2)
        for n in range(1, cfg.N + 1):
            cn = state.c[n - 1]
            rows.append((state.time, n, cn.real, cn.imag,
                         float(abs(cn) ** 2), float(profile.J[n - 1])))
    notes.append(f"max_continuity_residual = {max_residual!r}")
    _write_rows(args, {"invocation": invocation, "notes": notes},
                ["time", "site", "re_c", "im_c", "rho", "J"], rows)
    print(f"max continuity residual: {max_residual!r}")
    if args.plot:
        from .plotting import save_trajectory_figure
        save_trajectory_figure(Path(args.out).with_suffix(".png"), times, densities,
                               title=f"N={cfg.N}, k={cfg.k}, eta={cfg.eta}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="ptchain",
                     description="Spectral and transport analysis of a gain/loss chain")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_chain(p, with_k=True):
        p.add_argument("--N", type=int, required=True, help="chain length")
        if with_k:
            p.add_argument("--k", type=int, required=True, help="gain site (1-based)")
        p.add_argument("--t", type=float, default=1.0, help="hopping amplitude")

    def add_common(p):
        p.add_argument("--out", type=Path, required=True, help="output file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol-secular", type=float, default=None)
        p.add_argument("--tol-eigen", type=float, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--plot", action="store_true",
                       help="also render a PNG figure next to the output")
        p.add_argument("--config", metavar="FILE",
                       help="JSON file of flag values; explicit flags win")

    def add_eta(p):
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--eta-range", type=str, default=None,
                       metavar="MIN:MAX:STEPS")

    p = sub.add_parser("spectrum", help="eigenvalues and pseudo-momenta over a coupling sweep")
    add_chain(p)
    add_eta(p)
    add_common(p)
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("transport", help="transport coefficients over a coupling sweep")
    add_chain(p)
    add_eta(p)
    add_common(p)
    p.set_defaults(handler=cmd_transport)

    p = sub.add_parser("classify", help="special-state counts per contact position")
    add_chain(p, with_k=False)
    p.add_argument("--k-range", type=str, default=None, metavar="MIN:MAX")
    add_common(p)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("census", help="exact special-state census for one configuration (JSON)")
    add_chain(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--config", metavar="FILE",
                   help="JSON file of flag values; explicit flags win")
    p.set_defaults(handler=cmd_census)

    p = sub.add_parser("ep", help="exceptional points over a coupling range (JSON)")
    add_chain(p)
    p.add_argument("--eta-range", type=str, required=True, metavar="MIN:MAX")
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--config", metavar="FILE",
                   help="JSON file of flag values; explicit flags win")
    p.set_defaults(handler=cmd_ep)

    p = sub.add_parser("evolve", help="time evolution of an initial state")
    add_chain(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--initial", type=str, required=True,
                   metavar="site:J|eigenstate:I|file:PATH")
    p.add_argument("--t-final", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    add_common(p)
    p.set_defaults(handler=cmd_evolve)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        expanded = _expand_config([str(a) for a in argv])
        args = parser.parse_args(expanded)
        return args.handler(args, invocation_string(argv))
    except _UsageError as exc:
        print(f"ptchain: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    except OSError as exc:
        print(f"ptchain: i/o error: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, DomainError) as exc:
        print(f"ptchain: error: {exc}", file=sys.stderr)
        return 1
    except (DenseSolverError, StepSizeError, ClassificationError,
            np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"ptchain: numerical failure: {exc}", file=sys.stderr)
        return 3


def entrypoint():  # console script
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
