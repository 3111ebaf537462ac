"""Command line interface: ``weylsg <subcommand> ...``.

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 invalid input, 2 numerical failure (non-real times or singular spectrum),
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import classical, geometry, sampling, unistochastic
from .accessibility import BUDGET, NON_REAL, SINGULAR, decide_accessibility
from .config import DEFAULT_SEARCH, NonRealTimes, SearchConfig, SingularSpectrum, WeylError
from .io import complex_list, matrix_from_json, matrix_to_json, package_version, write_csv, write_sidecar
from .weyl import WeylChannel, circulant, spectrum_from_probabilities

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_BUDGET = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _load(arg: str):
    """Inline JSON or a path to a JSON file."""
    path = Path(arg)
    if path.exists():
        return json.loads(path.read_text())
    return json.loads(arg)


def _channel(args) -> WeylChannel:
    if args.input:
        return WeylChannel.from_json(_load(args.input))
    if args.p is None or args.n is None:
        raise WeylError("give --n and --p, or --input")
    return WeylChannel.validated(args.n, _floats(args.p))


def _circulant(args, cfg: SearchConfig) -> classical.Circulant:
    if args.q is not None:
        c = classical.Circulant(_floats(args.q))
        classical.check_weights(c.q, cfg.tol)
        return c
    if args.matrix is not None:
        return classical.as_circulant(np.asarray(matrix_from_json(_load(args.matrix)).real), cfg.tol)
    raise WeylError("give --q or --matrix")


def _verdict_code(reason: str) -> int:
    if reason in (NON_REAL, SINGULAR):
        return EXIT_NUMERIC
    if reason == BUDGET:
        return EXIT_BUDGET
    return EXIT_OK


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _meta(args, **extra) -> dict:
    return {
        "seed": args.seed,
        "tol": args.tol,
        "mmax": args.mmax,
        "threads": args.threads,
        "version": package_version(),
        **extra,
    }


def _table(args, header, rows, meta) -> None:
    """CSV (file or stdout) or JSON, per ``--format``."""
    rows = list(rows)
    if args.format == "json":
        _emit({"columns": header, "rows": rows, "meta": meta})
        return
    if args.out:
        write_csv(args.out, header, rows)
        write_sidecar(args.out, meta)
        _emit({"written": str(args.out), "rows": len(rows)})
    else:
        sys.stdout.write(",".join(header) + "\n")
        for r in rows:
            sys.stdout.write(",".join(str(x) for x in r) + "\n")


# ---------------------------------------------------------------- subcommands


def cmd_accessible(args, cfg):
    v = decide_accessibility(_channel(args), cfg)
    _emit(v.to_json())
    return _verdict_code(v.reason)


def cmd_embed(args, cfg):
    v = classical.decide_embeddability(_circulant(args, cfg), cfg)
    _emit(v.to_json())
    return _verdict_code(v.reason)


def cmd_decohere(args, cfg):
    c = classical.hyperdecohere_channel(_channel(args))
    _emit({"n": c.n, "q": [float(x) for x in c.q], "T": c.matrix.tolist()})
    return EXIT_OK


def cmd_spectrum(args, cfg):
    if args.q is not None or args.matrix is not None:
        xi = classical.circulant_spectrum(_circulant(args, cfg))
        _emit({"xi": complex_list(xi)})
    else:
        _emit({"lambda": complex_list(spectrum_from_probabilities(_channel(args)))})
    return EXIT_OK


def cmd_volume(args, cfg):
    if args.p0 is None:
        est = sampling.accessible_volume_fraction(args.n, args.samples, args.seed, args.threads, cfg)
    else:
        est = sampling.fixed_p0_fraction(args.n, args.p0, args.samples, args.seed, args.threads, cfg)
    _emit({**est.to_json(), "n": args.n, "p0": args.p0})
    return EXIT_BUDGET if est.undecided else EXIT_OK


def _face(args) -> list[WeylChannel]:
    if args.vertices:
        return [WeylChannel.from_json(v) for v in _load(args.vertices)]
    idx = {"X": [0, 3, 6], "Z": [0, 1, 2]}[args.face]
    out = []
    for i in idx:
        p = np.zeros(9)
        p[i] = 1.0
        out.append(WeylChannel(3, p))
    return out


def cmd_scan(args, cfg):
    tests = tuple(args.tests.split(",")) if args.tests else sampling.SCAN_TESTS
    grid = sampling.cross_section_scan(_face(args), args.resolution, tests, cfg)
    xy = grid.planar()
    names = list(grid.flags)
    rows = (
        [float(xy[i, 0]), float(xy[i, 1])] + [int(grid.flags[k][i]) for k in names]
        for i in range(len(xy))
    )
    meta = _meta(args, resolution=args.resolution, tests=names, samples=len(xy))
    _table(args, ["x", "y", *names], rows, meta)
    return EXIT_OK


def cmd_spiral(args, cfg):
    t = np.linspace(0.0, np.pi, args.points)
    upper, lower = geometry.spiral_boundary(args.n, t)
    rows = [[float(a), float(z.real), float(z.imag)] for a, z in zip(t, upper)]
    rows += [[float(-a), float(z.real), float(z.imag)] for a, z in zip(t, lower)]
    meta = _meta(
        args,
        N=args.n,
        samples=args.points,
        x_min=geometry.x_min(args.n),
        area=geometry.spectral_support_area(args.n),
    )
    _table(args, ["t", "re", "im"], rows, meta)
    return EXIT_OK


def cmd_scatter(args, cfg):
    z = sampling.spectra_scatter(args.n, args.ensemble, args.samples, args.seed)
    meta = _meta(args, N=args.n, samples=args.samples, ensemble=args.ensemble)
    _table(args, ["re", "im"], ([float(x.real), float(x.imag)] for x in z), meta)
    return EXIT_OK


def cmd_jarlskog(args, cfg):
    if args.matrix is not None:
        obj = _load(args.matrix)
        b = obj["b"] if isinstance(obj, dict) else np.asarray(matrix_from_json(obj).real)
    elif args.b is not None:
        b = _floats(args.b)
    else:
        raise WeylError("give --matrix or --b")
    q = unistochastic.jarlskog_Q(b, cfg.tol)
    _emit({"Q": q, "unistochastic": bool(q >= -cfg.tol.simplex)})
    return EXIT_OK


def cmd_star(args, cfg):
    p = _floats(args.p)
    if len(p) != 3:
        raise WeylError("star needs three face weights")
    _emit(
        {
            "p": p,
            "planar": list(unistochastic.face_planar(p)),
            "hypocycloid_value": unistochastic.hypocycloid_value(p),
            "hypocycloid": unistochastic.hypocycloid_test(p, cfg.tol),
            "star": unistochastic.david_star_test(p, cfg.tol),
            # Q of the circulant shadow p1 I + p2 X + p3 X^2
            "Q": unistochastic.jarlskog_Q(circulant(np.asarray(p)), cfg.tol),
            "status": {"hypocycloid": "proven", "star": "conjectured"},
        }
    )
    return EXIT_OK


def cmd_dilation(args, cfg):
    if args.search is not None:
        out = unistochastic.dilation_search_z_face(_floats(args.search), args.budget, args.seed)
        obj = out.to_json()
        if out.found:
            obj["unitary"] = matrix_to_json(out.dilation)
        _emit(obj)
        return EXIT_OK if out.found else EXIT_BUDGET
    if args.unitary is None:
        raise WeylError("give --unitary or --search")
    u = matrix_from_json(_load(args.unitary))
    ch = unistochastic.channel_from_dilation(u, args.n, tol=cfg.tol)
    t = unistochastic.transition_from_dilation(u, ch.n, tol=cfg.tol)
    obj = ch.to_json()
    obj["T"] = t.tolist()
    _emit(obj)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_SEARCH.tol.time,
                        help="slack on non-negative times and discarded imaginary parts")
    common.add_argument("--mmax", type=int, default=DEFAULT_SEARCH.mmax, help="bound on each branch integer")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="workers for Monte Carlo runs")
    common.add_argument("--format", choices=("json", "csv"), default="csv", help="output of table emitters")
    common.add_argument("--out", help="CSV path for table emitters (a .json sidecar is written next to it)")

    ap = argparse.ArgumentParser(prog="weylsg", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=package_version())
    sub = ap.add_subparsers(dest="command", required=True)

    def channel_opts(p):
        p.add_argument("--n", type=int)
        p.add_argument("--p", help="comma separated probabilities p_mu, mu = N k + l")
        p.add_argument("--input", help="JSON {n, p} inline or as a file")

    def circulant_opts(p):
        p.add_argument("--q", help="comma separated circulant weights q_k")
        p.add_argument("--matrix", help="square matrix as JSON (inline or file)")

    p = sub.add_parser("accessible", parents=[common], help="semigroup accessibility of a Weyl channel")
    channel_opts(p)
    p.set_defaults(func=cmd_accessible)

    p = sub.add_parser("embed", parents=[common], help="embeddability of a circulant matrix")
    circulant_opts(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("decohere", parents=[common], help="classical shadow of a Weyl channel")
    channel_opts(p)
    p.set_defaults(func=cmd_decohere)

    p = sub.add_parser("spectrum", parents=[common], help="lambda of a channel or xi of a circulant")
    channel_opts(p)
    circulant_opts(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("volume", parents=[common], help="Monte Carlo accessible fraction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--p0", type=float, help="fix the identity weight")
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser("scan", parents=[common], help="region tests on a face triangle")
    p.add_argument("--face", choices=("X", "Z"), default="X")
    p.add_argument("--vertices", help="JSON list of three channels, overrides --face")
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--tests", help=f"comma separated subset of {','.join(sampling.SCAN_TESTS)}")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("spiral", parents=[common], help="boundary of the spectral support")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, default=512)
    p.set_defaults(func=cmd_spiral)

    p = sub.add_parser("scatter", parents=[common], help="eigenvalues of random channels")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ensemble", choices=sampling.ENSEMBLES, default="simplex")
    p.add_argument("--samples", type=int, default=10**4)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("jarlskog", parents=[common], help="Q of a 3x3 bistochastic matrix")
    p.add_argument("--matrix", help='3x3 matrix or {"b": [b1, b2, b3, b4]} as JSON (inline or file)')
    p.add_argument("--b", help="b1,b2,b3,b4 (upper-left 2x2 block)")
    p.set_defaults(func=cmd_jarlskog)

    p = sub.add_parser("star", parents=[common], help="hypocycloid and star tests for face weights")
    p.add_argument("--p", required=True, help="p1,p2,p3")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("dilation", parents=[common], help="channel and transition matrix of a unitary")
    p.add_argument("--unitary", help="unitary as JSON (inline or file)")
    p.add_argument("--n", type=int)
    p.add_argument("--search", help="p1,p2,p3: look for a block dilation of the Z-face channel")
    p.add_argument("--budget", type=int, default=256, help="random restarts for --search")
    p.set_defaults(func=cmd_dilation)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = replace(DEFAULT_SEARCH.tol, time=args.tol, imag=args.tol)
    cfg = SearchConfig(mmax=args.mmax, budget=DEFAULT_SEARCH.budget, tol=tol)
    try:
        return args.func(args, cfg)
    except (NonRealTimes, SingularSpectrum) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (WeylError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
