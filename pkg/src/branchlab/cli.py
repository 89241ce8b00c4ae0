"""Command-line front end: ``branchlab <subcommand> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
3 element budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time

from . import __version__
from .burgermozes import (
    check_theorem_hypotheses,
    enumerate_stabilizer,
    legal_automorphisms_exhaustive,
    make_legal_coloring,
    predicted_stabilizer_order,
    tower_match_report,
)
from .cayley import cayley_diameter
from .config import BUDGET_ENV, BudgetExceeded, element_budget
from .permgroup import PermGroup
from .portrait import Portrait
from .selfsimilar import GRIGORCHUK, RecursionTable, Word, k_subgroup_indices, quotient_tree_group
from .tree import vertex_to_json
from .verifier import (
    check_grigorchuk_derangement,
    comm_width_containment,
    commutator_trick,
    diagonalization_search,
    is_full_above,
    random_cover,
    random_transitive_group,
    random_trick_instance,
    syndetic_square_full,
)
from .wreathtower import (
    TowerSpec,
    build_tower,
    commutator_width_survey,
    locally_has_derangements_witness,
    sji_report,
)

DEFAULT_SEED = 20240601

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- output ------------------------------------------------------------------------


class Output:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def record(self, obj: dict, text: str | None = None):
        if self.as_json:
            print(json.dumps(obj, sort_keys=False))
        else:
            print(text if text is not None else json.dumps(obj, indent=2))

    def table(self, rows: list, columns: list, name: str):
        if self.as_json:
            for row in rows:
                print(json.dumps({"table": name, **row}))
            return
        widths = [max(len(c), *(len(_cell(r.get(c))) for r in rows)) if rows else len(c) for c in columns]
        print("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
        print("  ".join("-" * w for w in widths))
        for r in rows:
            print("  ".join(_cell(r.get(c)).ljust(w) for c, w in zip(columns, widths)))


def _cell(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if x is None:
        return "-"
    return str(x)


# -- input helpers -----------------------------------------------------------------------


def _load_json_arg(text: str):
    """Inline JSON, or a path to a JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_group(text: str) -> PermGroup:
    try:
        return PermGroup.parse(_load_json_arg(text))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _table(args) -> RecursionTable:
    if args.table:
        try:
            return RecursionTable.from_json(_load_json_arg(args.table))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad recursion table: {exc}") from None
    if args.builtin == "grigorchuk":
        return GRIGORCHUK
    raise UsageError(f"unknown builtin {args.builtin!r}")


def _range(text: str) -> list:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad range {text!r}; use a..b or a,b,c") from None


# -- eval / orbit --------------------------------------------------------------------------


def cmd_eval(args, out: Output) -> int:
    table = _table(args)
    try:
        word = Word.parse(args.word)
        p = table.evaluate(word, args.depth)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    rec = {"word": str(word), "depth": args.depth, "portrait": p.to_json(), "identity": p.is_identity()}
    if args.order:
        rec["order"] = p.order()
    text = json.dumps(p.to_json())
    if args.order:
        text += f"\norder: {rec['order']}"
    out.record(rec, text)
    return EXIT_OK


def cmd_orbit(args, out: Output) -> int:
    if args.group:
        G = _parse_group(args.group)
        if args.point is not None and not 0 <= args.point < G.degree:
            raise UsageError(f"point {args.point} outside 0..{G.degree - 1}")
        orbits = G.orbits()
        rec = {"degree": G.degree, "order": G.order(), "orbits": [list(o) for o in orbits]}
        if args.point is not None:
            orb = G.orbit(args.point)
            stab = G.point_stabilizer(args.point).order()
            rec.update({"point": args.point, "orbit_size": len(orb), "stabilizer_order": stab,
                        "orbit_stabilizer_ok": len(orb) * stab == rec["order"]})
        text = f"order {rec['order']}; orbits: " + " ".join("{" + ",".join(map(str, o)) + "}" for o in rec["orbits"])
        if args.point is not None:
            text += (f"\npoint {args.point}: orbit size {rec['orbit_size']}, stabilizer order {rec['stabilizer_order']}"
                     f" (product {'=' if rec['orbit_stabilizer_ok'] else '!='} group order)")
        out.record(rec, text)
        return EXIT_OK if rec.get("orbit_stabilizer_ok", True) else EXIT_FAIL
    table = _table(args)
    if args.depth is None:
        raise UsageError("give --group, or --depth for a self-similar quotient")
    Q = quotient_tree_group(table, args.depth)
    level = args.depth if args.level is None else args.level
    act = Q.level_action(level)
    verts = Q.seq.level_vertices(level)
    orbits = [[vertex_to_json(verts[i]) for i in o] for o in act.orbits()]
    rec = {"depth": args.depth, "level": level, "order": Q.order(), "orbits": orbits,
           "level_transitive": len(orbits) == 1}
    shown = " ".join("{" + " ".join("".join(map(str, v)) or "root" for v in o) + "}" for o in orbits)
    out.record(rec, f"depth-{args.depth} quotient of order {rec['order']}, level {level}: {len(orbits)} orbit(s)\n{shown}")
    return EXIT_OK


# -- verify suites --------------------------------------------------------------------------


def suite_comm_trick(args, rng) -> dict:
    count = args.random if args.random is not None else 1000
    depth = args.depth or 4
    ok = 0
    failures = []
    for i in range(count):
        tau, s1, s2 = random_trick_instance(rng, rng.randint(1, depth))
        w = commutator_trick(tau, s1, s2)
        if w.verify() and len(w.conjugators) == 4:
            ok += 1
        elif len(failures) < 3:
            failures.append(w.to_json())
    return {"instances": count, "max_depth": depth, "verified": ok, "conjugators_per_witness": 4,
            "passed": ok == count, "failures": failures}


def suite_fullness(args, rng) -> dict:
    depth = args.depth or 3
    G = build_tower([PermGroup.symmetric(2)] * depth)
    elems = G.portraits()
    ident = Portrait.identity(G.seq)
    checks = []
    for v in list(G.seq.vertices()):
        whole = is_full_above(elems, v, G)
        rist = is_full_above(G.rigid_stabilizer(v).portraits(), v, G)
        only_one = is_full_above([ident], v, G)
        nontrivial = G.rigid_stabilizer(v).order() > 1
        checks.append(whole.full and whole.verify() and rist.full and rist.verify()
                      and (only_one.full != nontrivial))
        if nontrivial:
            checks.append(only_one.verify([ident]))
    st1 = G.level_stabilizer(1).portraits()
    # a tower with a non-abelian bottom, so that rist(w) has commutators
    H = build_tower([PermGroup.symmetric(2), PermGroup.symmetric(2), PermGroup.symmetric(3)])
    containment = comm_width_containment(H.level_stabilizer(1).portraits(), (0,), H)
    swap = Portrait.from_mapping(G.seq, {(): (1, 0)})
    translates = [ident, swap]
    square = syndetic_square_full(st1, translates, G)
    passed = all(checks) and containment.verified and square.verify()
    return {"depth": depth, "fullness_checks": len(checks), "fullness_ok": all(checks),
            "containment": containment.to_json(), "square_full_above": vertex_to_json(square.vertex),
            "passed": passed}


def suite_diagonal(args, rng) -> dict:
    depth = args.depth or 3
    covers = args.random if args.random is not None else 50
    G = build_tower([PermGroup.symmetric(2)] * depth)
    elems = G.portraits()
    ok = 0
    hits = {}
    for _ in range(covers):
        family = random_cover(elems, args.parts, rng)
        res = diagonalization_search(family, (), G)
        again = is_full_above(family[res.index], res.vertex, G)
        if again.full and res.certificate.verify():
            ok += 1
        key = f"{res.index}@{','.join(map(str, res.vertex))}"
        hits[key] = hits.get(key, 0) + 1
    return {"group_order": G.order(), "covers": covers, "parts": args.parts, "reverified": ok,
            "hits": hits, "passed": ok == covers}


def suite_grig_derangement(args, rng) -> dict:
    levels = _range(args.levels)
    rows = []
    for n in levels:
        depth = args.depth if args.depth else n + 4
        if depth < n + 2:
            raise UsageError(f"depth {depth} too small for n={n}")
        rep = check_grigorchuk_derangement(n, depth)
        row = rep.to_json()
        row.pop("element")
        rows.append(row)
    return {"rows": rows, "passed": all(r["ok"] for r in rows)}


def suite_grig_indices(args, rng) -> dict:
    depth = args.depth or 7
    t = time.perf_counter()
    rep = k_subgroup_indices(depth)
    out = rep.to_json()
    out["seconds"] = round(time.perf_counter() - t, 3)
    out["passed"] = rep.index_K_over_K1 == 4 and rep.index_G1_over_K == 16 and rep.K_over_K1_cyclic_by_y
    return out


def suite_jordan(args, rng) -> dict:
    samples = args.samples
    found = 0
    degrees = {}
    for _ in range(samples):
        G = random_transitive_group(rng, args.degree)
        x = G.find_derangement()
        if x is not None and all(i != j for i, j in enumerate(x)) and G.contains(x):
            found += 1
        degrees[G.degree] = degrees.get(G.degree, 0) + 1
    return {"samples": samples, "max_degree": args.degree, "derangements_found": found,
            "degrees": dict(sorted(degrees.items())), "passed": found == samples}


SUITES = {
    "comm-trick": suite_comm_trick,
    "fullness": suite_fullness,
    "diagonal": suite_diagonal,
    "grig-derangement": suite_grig_derangement,
    "grig-indices": suite_grig_indices,
    "jordan": suite_jordan,
}


def cmd_verify(args, out: Output) -> int:
    rng = random.Random(args.seed)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    status = EXIT_OK
    for name in names:
        t = time.perf_counter()
        rep = SUITES[name](args, rng)
        rep = {"suite": name, "seed": args.seed, **rep, "elapsed_s": round(time.perf_counter() - t, 3)}
        if args.json:
            out.record(rep)
        else:
            print(f"[{'PASS' if rep['passed'] else 'FAIL'}] {name} (seed {args.seed}, {rep['elapsed_s']} s)")
            for k, v in rep.items():
                if k not in ("suite", "passed", "seed", "elapsed_s"):
                    print(f"  {k}: {json.dumps(v)}")
        if not rep["passed"]:
            status = EXIT_FAIL
    return status


# -- tower / bm / cayley ----------------------------------------------------------------------


def _tower_spec(args) -> TowerSpec:
    try:
        if args.spec:
            return TowerSpec.from_json(_load_json_arg(args.spec))
        if not args.factors:
            raise UsageError("give --factors or --spec")
        return TowerSpec(tuple(_parse_group(f) for f in args.factors))
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def cmd_tower(args, out: Output) -> int:
    spec = _tower_spec(args)
    G = build_tower(spec, check_order=False)
    order, predicted = G.order(), spec.predicted_order()
    rows = []
    for n in range(spec.depth + 1):
        row = {
            "level": n,
            "|V_n|": G.seq.level_size(n),
            "transitive": G.is_level_transitive(n) if n else True,
            "|st(n)|": G.level_stabilizer(n).order(),
            "|rist(v)|": G.rist_order(n),
        }
        if args.sji:
            row["rist(n) perfect"] = sji_report(G, n)["perfect"]
        if args.derangements and n < spec.depth:
            try:
                N, z = locally_has_derangements_witness(G, n)
                row["derangement of V_N"] = N
            except ValueError:
                row["derangement of V_N"] = None
        rows.append(row)
    summary = {"factors": spec.to_json()["factors"], "order": order, "predicted_order": predicted,
               "order_matches": order == predicted}
    ok = order == predicted
    if args.cw:
        survey = commutator_width_survey(spec)
        summary["commutator_width"] = survey.to_json()
    if out.as_json:
        out.record(summary)
        out.table(rows, list(rows[0]), "levels")
    else:
        print(f"tower {summary['factors']}: order {order} (formula {predicted}, {'match' if ok else 'MISMATCH'})")
        out.table(rows, list(rows[0]), "levels")
        if args.cw:
            print(json.dumps(summary["commutator_width"], indent=2))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bm(args, out: Output) -> int:
    F = _parse_group(args.F)
    if args.d is not None and args.d != F.degree:
        raise UsageError(f"F acts on {F.degree} points but --d is {args.d}")
    try:
        report = check_theorem_hypotheses(F)
        ball = make_legal_coloring(F.degree, args.radius)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    predicted = predicted_stabilizer_order(ball, F)
    rec = {"F": args.F, "d": F.degree, "radius": args.radius, "hypotheses": report.to_json(),
           "count_formula": predicted}
    status = EXIT_OK
    stab = enumerate_stabilizer(ball, F)
    rec["stabilizer_order"] = stab.order()
    if args.tower_match:
        tm = tower_match_report(F, args.radius, ball)
        rec["tower_match"] = tm.to_json()
        if not tm.matches:
            status = EXIT_FAIL
    if args.exhaustive:
        try:
            legal = legal_automorphisms_exhaustive(ball, F)
        except BudgetExceeded as exc:
            rec["exhaustive"] = {"error": str(exc)}
            _emit_bm(rec, out)
            return EXIT_BUDGET
        rec["exhaustive"] = {"legal_count": len(legal), "matches_formula": len(legal) == predicted}
        if len(legal) != predicted:
            status = EXIT_FAIL
    _emit_bm(rec, out)
    return status


def _emit_bm(rec: dict, out: Output):
    if out.as_json:
        out.record(rec)
        return
    h = rec["hypotheses"]
    rows = [{"check": k, "value": v} for k, v in h.items() if k != "degree"]
    print(f"F = {rec['F']} on {rec['d']} points, ball radius {rec['radius']}")
    out.table(rows, ["check", "value"], "hypotheses")
    counts = [{"quantity": "count formula |F| prod |Stab_F(p)|", "value": rec["count_formula"]}]
    if "stabilizer_order" in rec:
        counts.append({"quantity": "legal centre stabilizer (Schreier-Sims)", "value": rec["stabilizer_order"]})
    if "tower_match" in rec:
        tm = rec["tower_match"]
        counts.append({"quantity": "tower [F, H, ...] order", "value": tm["tower_order"]})
        counts.append({"quantity": "tower match", "value": tm["match"]})
    if "exhaustive" in rec:
        ex = rec["exhaustive"]
        counts.append({"quantity": "exhaustive legal count", "value": ex.get("legal_count", ex.get("error"))})
    print()
    out.table(counts, ["quantity", "value"], "counts")


def cmd_cayley(args, out: Output) -> int:
    rows = []
    if args.group:
        G = _parse_group(args.group)
        if args.gens is None:
            raise UsageError("--group needs --gens (a JSON list of permutations)")
        gens = _load_json_arg(args.gens)
        if not isinstance(gens, list):
            raise UsageError("--gens must be a JSON list of permutations")
        try:
            res = cayley_diameter(G, [tuple(g) for g in gens])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rows.append({"group": args.group, **_cayley_row(res)})
    else:
        table = _table(args)
        if args.sweep_depth:
            depths = _range(args.sweep_depth)
        elif args.depth is not None:
            depths = [args.depth]
        else:
            raise UsageError("give --depth or --sweep-depth")
        names = args.gens.split(",") if args.gens else list(table.names)
        for d in depths:
            Q = quotient_tree_group(table, d)
            try:
                gens = [table.evaluate(n, d).level_permutation(d) for n in names]
            except KeyError as exc:
                raise UsageError(str(exc)) from None
            res = cayley_diameter(Q.group, gens)
            rows.append({"depth": d, **_cayley_row(res)})
    cols = list(rows[0])
    out.table(rows, cols, "cayley")
    return EXIT_OK


def _cayley_row(res) -> dict:
    row = {"order": res.group_order, "generates": res.generates, "diameter": res.diameter}
    if not res.generates:
        row["note"] = f"does not generate, index = {res.index}"
    return row


# -- parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON lines")
    common.add_argument("--budget", type=int, help=f"element budget (default {element_budget()}, env {BUDGET_ENV})")

    parser = argparse.ArgumentParser(prog="branchlab", description="Exact computations with rooted-tree automorphism groups.")
    parser.add_argument("--version", action="version", version=f"branchlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p, depth_required=False):
        p.add_argument("--builtin", default="grigorchuk", choices=["grigorchuk"])
        p.add_argument("--table", help="recursion table (JSON file or inline JSON)")
        p.add_argument("--depth", type=int, required=depth_required)

    p = sub.add_parser("eval", parents=[common], help="evaluate a word to a portrait")
    source(p, depth_required=True)
    p.add_argument("word", help='word such as "ab" or "a b^-1 c"')
    p.add_argument("--order", action="store_true", help="also print the order in the depth quotient")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("orbit", parents=[common], help="orbits of a group or of a self-similar quotient on a level")
    source(p)
    p.add_argument("--group", help="Sym(d), Alt(d), Cyclic(d) or JSON {n, gens}")
    p.add_argument("--point", type=int, help="report orbit and stabilizer of this point")
    p.add_argument("--level", type=int, help="level of the quotient (default: depth)")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--depth", type=int)
    p.add_argument("--random", type=int, help="number of random instances (comm-trick, diagonal)")
    p.add_argument("--parts", type=int, default=3, help="sets per random cover (diagonal)")
    p.add_argument("--levels", default="0..2", help="levels n for grig-derangement, e.g. 0..2")
    p.add_argument("--degree", type=int, default=10, help="maximum degree (jordan)")
    p.add_argument("--samples", type=int, default=100, help="number of groups (jordan)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tower", parents=[common], help="build an iterated wreath product")
    p.add_argument("--factors", nargs="+", help="factor groups, top first")
    p.add_argument("--spec", help='JSON {"factors": [...]} (file or inline)')
    p.add_argument("--sji", action="store_true", help="check whether each rist(n) is perfect")
    p.add_argument("--derangements", action="store_true", help="derangement witnesses per level")
    p.add_argument("--cw", action="store_true", help="commutator widths of truncations within budget")
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("bm", parents=[common], help="local structure of U(F) on a ball")
    p.add_argument("--F", required=True, help="local group, e.g. Alt(6)")
    p.add_argument("--d", type=int, help="tree degree (defaults to the degree of F)")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--tower-match", action="store_true")
    p.add_argument("--exhaustive", action="store_true", help="also count legal maps by brute force")
    p.set_defaults(func=cmd_bm)

    p = sub.add_parser("cayley-diameter", parents=[common], help="Cayley-graph diameters of finite quotients")
    source(p)
    p.add_argument("--group", help="explicit group instead of a self-similar quotient")
    p.add_argument("--gens", help="generator names (a,b,c) for quotients, or JSON permutations with --group")
    p.add_argument("--sweep-depth", help="range of depths, e.g. 1..5")
    p.set_defaults(func=cmd_cayley)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get(BUDGET_ENV)
    if args.budget is not None:
        os.environ[BUDGET_ENV] = str(args.budget)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"branchlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"branchlab {args.command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    finally:
        if saved is None:
            os.environ.pop(BUDGET_ENV, None)
        else:
            os.environ[BUDGET_ENV] = saved


if __name__ == "__main__":
    sys.exit(main())
