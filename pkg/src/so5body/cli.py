"""Command-line interface: simulate, equilibria, classify, verify, integrals.

Exit codes: 0 success, 1 a checked property failed, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

import numpy as np

from . import __version__
from .dynamics import SCHEMES, conservation_report, integrate, write_csv
from .equilibria import (
    OrbitInvariants,
    cartan_point,
    catalog,
    continuous_family,
)
from .errors import IntegrationError, So5Error
from .invariants import integral_snapshot
from .jsonio import dumps
from .lie_core import InertiaSpec, as_coords, coords_to_matrix, random_skew
from .stability import classify_table, expected_classification
from .suites import SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _floats(text: str, flag: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise ConfigError(f"{flag}: expected {count} values, got {len(vals)}")
    return vals


def _inertia(args) -> InertiaSpec:
    if args.lambdas is None:
        raise ConfigError("missing required flag --lambdas")
    return InertiaSpec(tuple(_floats(args.lambdas, "--lambdas", 5)))


def _orbit(args, required=True) -> OrbitInvariants | None:
    if args.c1 is None or args.c2 is None:
        if required:
            missing = [f for f, v in (("--c1", args.c1), ("--c2", args.c2)) if v is None]
            raise ConfigError(f"missing required flag {' and '.join(missing)}")
        return None
    return OrbitInvariants(args.c1, args.c2).require_regular()


def resolve_seed(seed) -> int:
    if seed is not None:
        return int(seed)
    env = os.environ.get("SO5_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"SO5_SEED must be an integer, got {env!r}") from None


def parse_init(spec: str, J: InertiaSpec, args, rng):
    """family:tK:slot=a,b | family:sL:coef=x,y,z | coords:x1,...,z4 | random."""
    if spec == "random":
        return random_skew(5, rng, args.scale)
    if spec.startswith("coords:"):
        return coords_to_matrix(_floats(spec[len("coords:"):], "--init coords", 10))
    if spec.startswith("family:"):
        rest = spec[len("family:"):]
        name, _, opt = rest.partition(":")
        if name.startswith("t"):
            if not opt.startswith("slot="):
                raise ConfigError("--init family:tK needs ':slot=...', e.g. family:t1:slot=a,b")
            inv = _orbit(args)
            try:
                k = int(name[1:])
            except ValueError:
                raise ConfigError(f"--init: bad family {name!r}") from None
            return cartan_point(k, opt[len("slot="):], inv).matrix
        if name.startswith("s"):
            if not opt.startswith("coef="):
                raise ConfigError("--init family:sL needs ':coef=x,y,z'")
            try:
                l = int(name[1:])
            except ValueError:
                raise ConfigError(f"--init: bad family {name!r}") from None
            coef = _floats(opt[len("coef="):], "--init coef", 3)
            return continuous_family(l, J).point(coef).matrix
        raise ConfigError(f"--init: unknown family {name!r}")
    raise ConfigError(f"--init: expected family:..., coords:... or random, got {spec!r}")


def _emit(obj, path):
    text = dumps(obj)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    J = _inertia(args)
    rng = np.random.default_rng(resolve_seed(args.seed))
    M0 = parse_init(args.init, J, args, rng)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = integrate(M0, J, args.dt, args.steps, args.scheme, args.stride)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    drift = conservation_report(traj, J)
    passed = all(v <= args.drift_bound for v in drift.values())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(traj, fh)
    report = {
        "command": "simulate",
        "lambdas": [float(x) for x in J.array],
        "init": args.init,
        "scheme": args.scheme,
        "dt": args.dt,
        "steps": args.steps,
        "stride": args.stride,
        "initial": as_coords(M0),
        "final": traj.coords[-1],
        "drift": drift,
        "drift_bound": args.drift_bound,
        "passed": passed,
    }
    _emit(report, args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_equilibria(args) -> int:
    J = _inertia(args)
    inv = _orbit(args)
    fams = None if args.families is None else args.families.split(",")
    cat = catalog(J, inv, fams)
    worst = max([p["residual"] for p in cat["points"]]
                + [c["residual"] for c in cat["continuous"]] + [0.0])
    cat["max_residual"] = worst
    _emit(cat, args.out)
    return EXIT_OK if worst <= 1e-12 else EXIT_FAIL


def _family_numbers(text):
    if text is None:
        return None
    out = set()
    for tok in text.split(","):
        tok = tok.strip()
        if not tok.startswith("t") or not tok[1:].isdigit() or not 1 <= int(tok[1:]) <= 15:
            raise ConfigError(f"--families: expected names t1..t15, got {tok!r}")
        out.add(int(tok[1:]))
    return out


def cmd_classify(args) -> int:
    J = _inertia(args)
    J.require_ordered()
    inv = _orbit(args)
    rows = classify_table(J, inv, _family_numbers(args.families))
    result = {
        "command": "classify",
        "lambdas": [float(x) for x in J.array],
        "c1": inv.c1,
        "c2": inv.c2,
        "rows": rows,
    }
    code = EXIT_OK
    if args.expect == "paper":
        table = expected_classification(inv, J)
        mismatches = []
        for r in rows:
            key = (r["family"], "ab" if r["slot_class"] == "a,b" else "ba")
            if r["status"] != table[key]:
                mismatches.append({"family": r["family"], "slot_class": r["slot_class"],
                                   "expected": table[key], "got": r["status"]})
        result["expect"] = {"table": "paper", "rows": len(rows),
                            "mismatches": mismatches, "passed": not mismatches}
        for m in mismatches:
            print(f"mismatch: t{m['family']} ({m['slot_class']}) expected {m['expected']}, "
                  f"got {m['got']}", file=sys.stderr)
        code = EXIT_OK if not mismatches else EXIT_FAIL
    _emit(result, args.out)
    return code


def cmd_verify(args) -> int:
    seed = resolve_seed(args.seed)
    names = SUITES if args.suite in (None, "all") else (args.suite,)
    if args.n is not None and args.n < 2:
        raise ConfigError("--n must be >= 2")
    rng = np.random.default_rng(seed)
    suites = run_suites(names, rng, samples=args.samples, n=args.n)
    passed = all(s["passed"] for s in suites.values())
    _emit({"command": "verify", "seed": seed, "suites": suites, "passed": passed}, args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_integrals(args) -> int:
    J = _inertia(args)
    rng = np.random.default_rng(resolve_seed(args.seed))
    M = parse_init(args.init, J, args, rng)
    snap = integral_snapshot(M, J)
    _emit({"coords": as_coords(M), **snap}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="so5body", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, orbit=True):
        sp.add_argument("--lambdas", help="five inertia parameters, e.g. 5,4,3,2,1")
        if orbit:
            sp.add_argument("--c1", type=float, help="value of the Casimir C1")
            sp.add_argument("--c2", type=float, help="value of the Casimir C2")
        sp.add_argument("--seed", type=int, help="random seed (fallback: $SO5_SEED, then 0)")
        sp.add_argument("--out", help="write JSON here instead of stdout")

    s = sub.add_parser("simulate", help="integrate a trajectory and report drift")
    common(s)
    s.add_argument("--init", default="random",
                   help="family:tK:slot=a,b | family:sL:coef=x,y,z | coords:x1,..,z4 | random")
    s.add_argument("--scale", type=float, default=1.0, help="norm of a random initial state")
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--steps", type=int, default=10000)
    s.add_argument("--stride", type=int, default=1)
    s.add_argument("--scheme", choices=SCHEMES, default="rk4")
    s.add_argument("--drift-bound", type=float, default=1e-6)
    s.add_argument("--csv", help="write the trajectory CSV here")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("equilibria", help="catalog of equilibria on a regular orbit")
    common(e)
    e.add_argument("--families", help="comma-separated filter, e.g. t1,t8,s3")
    e.set_defaults(func=cmd_equilibria)

    c = sub.add_parser("classify", help="stability verdicts for the 30 family/slot classes")
    common(c)
    c.add_argument("--families", help="comma-separated filter, e.g. t1,t2")
    c.add_argument("--expect", choices=("paper",),
                   help="compare against the built-in classification table")
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify", help="run randomized identity suites")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--n", type=int, help="dimension for the generator-identity suite")
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("integrals", help="snapshot of all integrals at one state")
    common(i)
    i.add_argument("--init", required=True, help="same grammar as simulate --init")
    i.add_argument("--scale", type=float, default=1.0)
    i.set_defaults(func=cmd_integrals)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, So5Error) as exc:
        print(f"so5body {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"so5body {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
