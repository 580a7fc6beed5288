"""Command-line front end: induction runs, diagnostics, rotation reports.

Exit codes: 0 success, 1 a verification check failed, 2 usage or parse
error, 3 a step-budget cap was hit.  Artifacts are deterministic for a
fixed config and seed, embed both, and serialize big integers as base-10
strings.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .core import CapExceededError, Iem, PermutationPair
from .induction import CocycleMatrix, induce, rauzy_class
from .profiles import (balance_profile, condition_profile, delta_profile,
                       positivity_bound, positivity_depth, return_profile,
                       rows_to_csv, rows_to_jsonable)
from .reduction import (denjoy_koksma_check, indicator, inducing_rotation,
                        induced_map_check, norm_sandwich, project_path,
                        check_projection_identity, check_row_identity,
                        return_time_comparison, zorich_alignment)
from .words import (START_4, WordError, parse_winner_word, quotient_word,
                    realize_iem, u_failure_ratio, uniform_failure_schedule,
                    verify_block_matrix, z_failure_witness,
                    zorich_failure_schedule, fibonacci, ufail_block_norm)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CAP = 3


class UsageError(Exception):
    pass


def _parse_start(text: str) -> PermutationPair:
    try:
        top, bottom = text.split("/")
        return PermutationPair.from_strings(top, bottom)
    except (ValueError, TypeError) as exc:
        raise UsageError("bad permutation %r (expected e.g. ABDC/DACB): %s" % (text, exc))


def load_map(args) -> Iem:
    if getattr(args, "map", None):
        try:
            with open(args.map) as fh:
                return Iem.from_json_dict(json.load(fh))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError("cannot read map file %s: %s" % (args.map, exc))
    if getattr(args, "word", None):
        start = _parse_start(args.start) if args.start else START_4
        try:
            path = parse_winner_word(args.word, start)
        except WordError as exc:
            raise UsageError("bad winner word: %s" % exc)
        return realize_iem(path)
    raise UsageError("provide --map or --word")


def _jsonable(value):
    if isinstance(value, Fraction):
        return "%d/%d" % (value.numerator, value.denominator)
    if isinstance(value, bool) or value is None or isinstance(value, (float, str)):
        return value
    if isinstance(value, int):
        return value if abs(value) < 2 ** 53 else str(value)
    if isinstance(value, CocycleMatrix):
        return [[str(v) for v in row] for row in value.rows]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)


def make_artifact(args, payload: dict) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {"tool": "ietkit", "version": __version__,
            "config": _jsonable(config), "seed": getattr(args, "seed", None),
            **_jsonable(payload)}


def emit(args, artifact: dict, csv_rows=None, records=None):
    if args.format == "csv":
        if csv_rows is None:
            raise UsageError("this subcommand has no CSV form; use --format json")
        text = csv_rows
    elif args.format == "jsonl":
        if records is None:
            raise UsageError("this subcommand has no JSON-lines form; use --format json")
        text = "".join(json.dumps(_jsonable(r), sort_keys=True) + "\n" for r in records)
    else:
        text = json.dumps(artifact, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------

def cmd_induce(args) -> int:
    iem = load_map(args)
    trace = induce(iem, args.depth)
    times = trace.acceleration_times(args.scheme)
    blocks = []
    for k in range(1, len(times)):
        matrix = trace.cocycle(times[k - 1], times[k])
        blocks.append({"k": k, "time": times[k],
                       "winner": str(trace.arrows[times[k] - 1].winner),
                       "matrix": matrix})
    payload = {
        "map": iem.to_json_dict(),
        "depth": trace.depth,
        "stop_reason": trace.stop_reason,
        "scheme": args.scheme,
        "times": list(times),
        "blocks": blocks,
        "final_lengths": {str(a): v for a, v in trace.iem_at(trace.depth).lengths.items()},
        "cocycle_norm": trace.cocycle(0, trace.depth).norm,
    }
    csv_rows = None
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["k", "time", "winner", "matrix"])
        for b in blocks:
            writer.writerow([b["k"], b["time"], b["winner"],
                             ";".join(":".join(str(v) for v in row)
                                      for row in b["matrix"].rows)])
        csv_rows = buf.getvalue()
    emit(args, make_artifact(args, payload), csv_rows, records=blocks)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    iem = load_map(args)
    trace = induce(iem, args.depth)
    rng = random.Random(args.seed)
    payload = {"map": iem.to_json_dict(), "depth": trace.depth,
               "stop_reason": trace.stop_reason, "profiles": {}}
    profiles = payload["profiles"]
    notes = {}
    for scheme in ("zorich", "mmy"):
        avail = len(trace.acceleration_times(scheme)) - 2
        if avail < 1:
            notes[scheme] = "insufficient depth"
            continue
        rows = condition_profile(trace, scheme, min(args.k_max, avail))
        profiles["condition_" + scheme] = rows_to_jsonable(rows)
    profiles["delta"] = rows_to_jsonable(delta_profile(iem, args.delta_max, "geometric"))
    r_grid = [iem.total / 2 ** i for i in range(1, args.r_levels + 1)]
    samples = [iem.total * Fraction(rng.randint(1, 2 ** 30 - 1), 2 ** 30)
               for _ in range(args.samples)]
    profiles["return"] = rows_to_jsonable(return_profile(iem, r_grid, samples, args.cap))
    try:
        profiles["balance"] = rows_to_jsonable(
            balance_profile(trace, min(args.k_max, len(trace.mmy_times()) - 1)))
        depths = positivity_depth(trace, max(0, len(trace.mmy_times()) - 1
                                             - positivity_bound(iem.d)))
        profiles["positivity"] = rows_to_jsonable(depths)
        notes["positivity_bound"] = positivity_bound(iem.d)
    except ValueError as exc:
        notes["balance"] = str(exc)
    payload["notes"] = notes
    emit(args, make_artifact(args, payload))
    return EXIT_OK


def cmd_three(args) -> int:
    iem = load_map(args)
    if iem.perm.d != 3 or iem.perm.bottom != tuple(reversed(iem.perm.top)):
        sys.stderr.write("error: need a 3-interval map with the reversing "
                         "permutation (top/reversed top); normalize the input\n")
        return EXIT_USAGE
    trace = induce(iem, args.depth)
    proj = project_path(trace)
    rot = inducing_rotation(iem)
    rng = random.Random(args.seed)
    checks = {}
    checks["projection_identity"] = all(check_projection_identity(trace, proj, n)
                                        for n in range(trace.depth + 1))
    checks["row_identity"] = all(check_row_identity(trace, n)
                                 for n in range(trace.depth + 1))
    sandwich = [norm_sandwich(trace, proj, n) for n in range(trace.depth + 1)]
    checks["norm_sandwich"] = all(ok for _, _, ok in sandwich)
    alignment = []
    try:
        rows = zorich_alignment(trace, args.k_max)
        alignment = [{"k": r.k, "j": r.j, "ok_step": r.ok_step, "ok_norms": r.ok_norms}
                     for r in rows]
        checks["alignment"] = all(r.ok_step and r.ok_norms for r in rows)
    except ValueError as exc:
        checks["alignment"] = None
        alignment = str(exc)
    f = indicator(rot.interval_length, iem.total)
    dk = []
    x0 = iem.total * Fraction(rng.randint(1, 2 ** 30 - 1), 2 ** 30)
    for k in range(len(rot.denominators)):
        if rot.denominators[k] > args.cap:
            break
        err, ok = denjoy_koksma_check(rot, f, x0, k)
        dk.append({"k": k, "q": rot.denominators[k], "error": err, "ok": ok})
    checks["denjoy_koksma"] = all(row["ok"] for row in dk)
    comparisons = []
    capped = False
    for i in range(1, 6):
        r = iem.total / 2 ** (2 * i)
        x = (iem.total - r) * Fraction(rng.randint(1, 2 ** 30 - 1), 2 ** 30)
        try:
            rc = return_time_comparison(iem, x, r, args.cap)
        except CapExceededError:
            capped = True
            continue
        comparisons.append({"x": x, "r": r, "tau": rc.tau, "tau_bar": rc.tau_bar,
                            "scaled": rc.scaled_bar, "ok": rc.ok})
    checks["return_comparison"] = all(row["ok"] for row in comparisons)
    checks["induced_map"] = all(
        induced_map_check(iem, iem.total * Fraction(i, 17)) for i in range(17))
    payload = {"map": iem.to_json_dict(),
               "rotation": {"interval_length": rot.interval_length,
                            "angle": rot.angle, "alpha": rot.alpha,
                            "cf": list(rot.cf), "denominators": list(rot.denominators)},
               "checks": checks, "alignment": alignment,
               "denjoy_koksma": dk, "return_comparisons": comparisons}
    emit(args, make_artifact(args, payload))
    if capped:
        return EXIT_CAP
    hard = [v for v in checks.values() if v is not None]
    return EXIT_OK if all(hard) else EXIT_CHECK_FAILED


def _euclid_denominators(alpha: Fraction):
    p, q = alpha.numerator, alpha.denominator
    quots = []
    while p:
        quots.append(q // p)
        q, p = p, q % p
    qs = [1]
    prev, cur = 0, 1
    for a in quots:
        prev, cur = cur, a * cur + prev
        qs.append(cur)
    return quots, qs


def cmd_verify_paper(args) -> int:
    fixtures = []

    def record(name, ok, expected, actual):
        fixtures.append({"name": name, "ok": bool(ok),
                         "expected": expected, "actual": actual})

    for k in range(1, 5):
        computed, closed, equal = verify_block_matrix("ufail", k)
        record("bounded-burst block %d entrywise" % k, equal, closed, computed)
        record("bounded-burst block %d norm" % k,
               computed.norm == ufail_block_norm(k), ufail_block_norm(k), computed.norm)
    for k in range(1, 4):
        computed, closed, equal = verify_block_matrix("zfail", k)
        record("slow-balance block %d entrywise" % k, equal, closed, computed)
    for k in range(1, 4):
        w = z_failure_witness(k)
        record("slow-balance burst %d dominates" % k, w.ok,
               "%d < %d^2" % (w.accumulated_norm, w.burst_norm), w.ok)
        record("burst %d norm formula" % k,
               w.burst_norm == fibonacci(2 ** (k + 2)) + 4,
               fibonacci(2 ** (k + 2)) + 4, w.burst_norm)
    for k in range(4, 7):
        u = u_failure_ratio(k)
        record("bounded-burst exponent ratio k=%d below 3/4" % k, u.ok,
               "< 0.75", [u.ratio_lo, u.ratio_hi])
    # two-letter identity fixtures against an independent Euclid oracle
    start2 = PermutationPair.from_strings("AB", "BA")
    for name, quots in (("golden", [2] + [1] * 19),
                        ("pattern", [2, 3, 1, 4] * 5)):
        path = parse_winner_word(quotient_word(quots), start2)
        iem = realize_iem(path)
        trace = induce(iem, len(path))
        quots_realized, qs = _euclid_denominators(iem.lengths["B"])
        times = trace.zorich_times()
        ok = True
        for k in range(1, min(16, len(times) - 1)):
            step_norm = trace.cocycle(times[k], times[k + 1]).norm
            if (trace.cocycle(0, times[k]).norm != qs[k] + qs[k - 1]
                    or step_norm != quots_realized[k] + 2):
                ok = False
        record("two-letter identities (%s word)" % name, ok, True, ok)
    # positivity depth sample
    rng = random.Random(args.seed or 0)
    checked = 0
    ok_all = True
    while checked < 5:
        top = "ABC"
        lens = {a: Fraction(rng.randint(1, 10 ** 9), 10 ** 9) for a in top}
        try:
            iem = Iem(PermutationPair.from_strings(top, top[::-1]), lens)
        except ValueError:
            continue
        trace = induce(iem, 200)
        if len(trace.mmy_times()) < 8:
            continue
        depths = positivity_depth(trace, len(trace.mmy_times()) - 2 - positivity_bound(3))
        ok_all = ok_all and all(row.depth <= positivity_bound(3) for row in depths)
        checked += 1
    record("positivity depth bound (3 letters)", ok_all, "<= %d" % positivity_bound(3), ok_all)

    payload = {"fixtures": fixtures, "all_ok": all(f["ok"] for f in fixtures)}
    emit(args, make_artifact(args, payload))
    return EXIT_OK if payload["all_ok"] else EXIT_CHECK_FAILED


def cmd_class(args) -> int:
    start = _parse_start(args.start)
    diagram = rauzy_class(start)
    vertices = sorted(str(v) for v in diagram.vertices)
    arrows = [{"source": str(a.source), "kind": a.kind,
               "winner": str(a.winner), "loser": str(a.loser),
               "target": str(a.target)} for a in diagram.arrows]
    arrows.sort(key=lambda a: (a["source"], a["kind"]))
    payload = {"start": str(start), "vertex_count": len(vertices),
               "arrow_count": len(diagram.arrows),
               "vertices": vertices, "arrows": arrows}
    emit(args, make_artifact(args, payload))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ietkit",
                                     description="exact interval exchange toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_map=True):
        if with_map:
            p.add_argument("--word", help="winner word, e.g. 'C B^3 (D^2 A^3 D)^2 B'")
            p.add_argument("--start", help="permutation pair, e.g. ABDC/DACB")
            p.add_argument("--map", help="path to a map JSON file")
        p.add_argument("--depth", type=int, default=100, help="induction steps")
        p.add_argument("--format", choices=("json", "csv", "jsonl"), default="json")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", type=int, default=10 ** 5, help="orbit step budget")

    p = sub.add_parser("induce", help="run induction and export the block trace")
    common(p)
    p.add_argument("--scheme", choices=("zorich", "mmy"), default="zorich")
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("diagnose", help="emit growth/gap/return profiles")
    common(p)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--delta-max", type=int, default=64)
    p.add_argument("--r-levels", type=int, default=8)
    p.add_argument("--samples", type=int, default=8)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("three", help="rotation reduction report for 3-letter maps")
    common(p)
    p.add_argument("--k-max", type=int, default=5)
    p.set_defaults(func=cmd_three)

    p = sub.add_parser("verify-paper", help="run all closed-form fixtures")
    common(p, with_map=False)
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("class", help="dump the Rauzy class of a permutation pair")
    p.add_argument("--start", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_class)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except CapExceededError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
