"""Command line front end.

Verbs: simulate, synth, oracle, growth, expansion, transfer, certify, check,
serve.  Results go to stdout as JSON (traces as JSON-lines); any failure
prints one machine-readable error object on stderr and exits nonzero (2 for
bad arguments, 1 for everything else).  Emitted numbers are integers or
exact rational strings "p/q", never floats.  FIREGRAPH_CAP in the
environment overrides the enumeration member cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .certify import (
    ImpossibilityCertificate,
    certify_divergence_required,
    certify_expansion_impossible,
    check_certificate,
    classify_lattice,
)
from .core import LazyGraph, VertexKey, ball, parse_key_text
from .engine import (
    BudgetSeq,
    Strategy,
    replay_trace,
    run,
    strategy_from_json,
    strategy_to_json,
    trace_to_json_lines,
)
from .errors import FiregraphError
from .families import graph_from_text
from .growth import check_expansion, profile
from .qi import identity_pair, retag_pair, transfer
from .synth import (
    minimax_oracle,
    synth_cut_vertex,
    synth_second_difference,
    synth_sphere_poly,
)


class _Parser(argparse.ArgumentParser):
    """argparse with JSON usage errors so stderr stays machine readable."""

    def error(self, message):
        json.dump({"code": "usage", "message": message}, sys.stderr)
        sys.stderr.write("\n")
        raise SystemExit(2)


# ------------------------------------------------------------- arg parsing --


def _parse_budget(text: str) -> BudgetSeq:
    if text.startswith("poly:"):
        parts = text[5:].split(",")
        if len(parts) != 2:
            raise ValueError(f"budget {text!r}: want poly:c,d")
        return BudgetSeq.polynomial(int(parts[0]), int(parts[1]))
    if text.startswith("list:"):
        return BudgetSeq.explicit(int(v) for v in text[5:].split(","))
    return BudgetSeq.constant(int(text))


def _parse_x0(g: LazyGraph, text: str) -> frozenset[VertexKey]:
    if text.startswith("ball:"):
        return ball(g, [g.base], int(text[5:])).members
    if text.startswith("keys:"):
        keys = [parse_key_text(g.base.tag, t) for t in text[5:].split(";") if t]
        if not keys:
            raise ValueError("empty key list")
        return frozenset(keys)
    raise ValueError(f"x0 {text!r}: want ball:M or keys:(..);(..)")


def _parse_lambda(text: str) -> Fraction:
    lam = Fraction(text)
    if lam <= 1:
        raise ValueError(f"lambda must be > 1, got {text}")
    return lam


def _parse_levels(text: str) -> range:
    a, sep, b = text.partition("..")
    if not sep:
        n = int(text)
        return range(n, n + 1)
    return range(int(a), int(b) + 1)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(doc: dict, out: Optional[str]) -> None:
    _write(json.dumps(doc, indent=2) + "\n", out)


# ------------------------------------------------------------------ verbs --


def _cmd_simulate(a) -> int:
    g = graph_from_text(a.family)
    x0 = _parse_x0(g, a.x0)
    if a.strategy:
        with open(a.strategy) as fh:
            strat = strategy_from_json(json.load(fh))
        if a.budget is not None or a.r is not None:
            raise ValueError("--strategy already fixes budget and r")
    else:
        if a.budget is None or a.r is None:
            raise ValueError("need --budget and --r (or --strategy)")
        strat = Strategy(a.r, _parse_budget(a.budget), ())
    trace = run(g, x0, strat, radius_cap=a.radius_cap, keep_states=False)
    _write(trace_to_json_lines(trace), a.out)
    return 0


def _require(a, names: list[str]) -> None:
    missing = [n for n in names if getattr(a, n.replace("-", "_")) is None]
    if missing:
        what = getattr(a, "method", None) or getattr(a, "kind", None) or a.verb
        raise ValueError(f"{what} needs --" + ", --".join(missing))


def _cmd_synth(a) -> int:
    g = graph_from_text(a.family)
    if a.method == "sphere-poly":
        _require(a, ["d", "c", "m"])
        strat = synth_sphere_poly(g, a.d, a.c, a.m)
        x0 = ball(g, [g.base], a.m).members
    elif a.method == "second-diff":
        _require(a, ["n"])
        strat = synth_second_difference(g, a.n)
        x0 = ball(g, [g.base], a.n).members
    else:
        _require(a, ["x0", "r"])
        x0 = _parse_x0(g, a.x0)
        strat = synth_cut_vertex(g, x0, a.r)
    trace = run(g, x0, strat, keep_states=False)
    doc = {
        "kind": "synth-result",
        "method": a.method,
        "family": g.family,
        "x0": [list(k.coords) for k in sorted(x0)],
        "strategy": strategy_to_json(strat),
        "outcome": trace.outcome,
        "containment_time": trace.containment_time,
        "burned_total": trace.burned_total,
    }
    _emit(doc, a.out)
    if a.trace_out:
        _write(trace_to_json_lines(trace), a.trace_out)
    return 0


def _cmd_oracle(a) -> int:
    g = graph_from_text(a.family)
    rep = minimax_oracle(g, _parse_x0(g, a.x0), a.f, a.R)
    doc = {
        "kind": "oracle-report",
        "family": g.family,
        "verdict": rep.verdict,
        "radius": rep.radius,
        "f": rep.f,
        "burned": rep.burned,
        "nodes": rep.nodes,
        "strategy": strategy_to_json(rep.strategy) if rep.strategy else None,
    }
    _emit(doc, a.out)
    return 0


def _cmd_growth(a) -> int:
    g = graph_from_text(a.family)
    prof = profile(g, a.N)
    doc = {
        "kind": "growth-profile",
        "family": g.family,
        "root": list(prof.root.coords),
        "n": list(range(a.N + 1)),
        "beta": list(prof.beta),
        "s": list(prof.s),
        "beta1": list(prof.beta1),
        "beta2": list(prof.beta2),
    }
    if a.json:
        _emit(doc, a.out)
        return 0
    w = max(5, len(str(prof.beta[-1])) + 1)
    lines = [f"{'n':>4}{'s':>{w}}{'beta':>{w}}"]
    for n in range(a.N + 1):
        lines.append(f"{n:>4}{prof.s[n]:>{w}}{prof.beta[n]:>{w}}")
    _write("\n".join(lines) + "\n", a.out)
    return 0


def _cmd_expansion(a) -> int:
    g = graph_from_text(a.family)
    lam = _parse_lambda(getattr(a, "lambda"))
    reports = [check_expansion(g, n, lam) for n in _parse_levels(a.levels)]
    doc = {
        "kind": "expansion-reports",
        "family": g.family,
        "lambda": str(lam),
        "all_hold": all(r.holds for r in reports),
        "reports": [r.to_json() for r in reports],
    }
    _emit(doc, a.out)
    return 0


def _cmd_transfer(a) -> int:
    if a.source == "second-diff":
        def source(gg, m):
            return synth_second_difference(gg, m)
    else:
        _require(a, ["d", "c"])

        def source(gg, m):
            return synth_sphere_poly(gg, a.d, a.c, m)

    if a.pair == "grid-strong":
        pair = retag_pair(
            "square-strong", graph_from_text("square"), graph_from_text("strong"), 2
        )
    elif a.pair.startswith("grid-power:"):
        k = int(a.pair.split(":", 1)[1])
        pair = retag_pair(
            f"square-power{k}",
            graph_from_text("square"),
            graph_from_text(f"power:k={k}(square)"),
            k,
        )
    elif a.pair == "identity":
        pair = identity_pair(graph_from_text(a.family))
    else:
        raise ValueError(f"unknown pair {a.pair!r}")
    strat = transfer(pair, source, pair.h.base, a.q)
    y0 = ball(pair.h, [pair.h.base], a.q).members
    trace = run(pair.h, y0, strat, keep_states=False)
    doc = {
        "kind": "transfer-result",
        "pair": pair.name,
        "target_family": pair.h.family,
        "q": a.q,
        "strategy": strategy_to_json(strat),
        "outcome": trace.outcome,
        "containment_time": trace.containment_time,
        "burned_total": trace.burned_total,
    }
    _emit(doc, a.out)
    if a.trace_out:
        _write(trace_to_json_lines(trace), a.trace_out)
    return 0


def _cmd_certify(a) -> int:
    if a.kind == "expansion":
        _require(a, ["family", "lambda", "budget", "levels"])
        g = graph_from_text(a.family)
        kw = {} if a.smoke_turns is None else {"smoke_turns": a.smoke_turns}
        cert = certify_expansion_impossible(
            g,
            _parse_lambda(getattr(a, "lambda")),
            _parse_budget(a.budget),
            a.levels,
            **kw,
        )
        _emit(cert.to_json(), a.out)
    elif a.kind == "divergence":
        _require(a, ["family", "budget", "horizon"])
        g = graph_from_text(a.family)
        verdict = certify_divergence_required(g, _parse_budget(a.budget), a.horizon)
        _emit(verdict.to_json(), a.out)
    else:
        _require(a, ["d", "q"])
        res = classify_lattice(a.d, a.q, witness=True)
        doc = {
            "kind": "lattice-classification",
            "d": res.d,
            "q": res.q,
            "verdict": res.verdict,
            "boundary": res.boundary,
            "note": res.note,
            "witness": strategy_to_json(res.witness) if res.witness else None,
            "impossibility": res.impossibility.to_json() if res.impossibility else None,
        }
        _emit(doc, a.out)
    return 0


def _check_divergence_doc(doc: dict) -> list[str]:
    g = graph_from_text(doc["family"])
    horizon = max(doc["homogeneity"]["levels"])
    fresh = certify_divergence_required(g, BudgetSeq.from_json(doc["budget"]), horizon)
    if fresh.to_json() != doc:
        return ["recomputed verdict document differs"]
    return []


def _check_lattice_doc(doc: dict) -> list[str]:
    problems = []
    fresh = classify_lattice(doc["d"], doc["q"])
    for field in ("verdict", "boundary", "note"):
        if getattr(fresh, field) != doc[field]:
            problems.append(f"recomputed {field} differs")
    if doc.get("witness"):
        strategy_from_json(doc["witness"])
    if doc.get("impossibility"):
        problems += _check_divergence_doc(doc["impossibility"])
    return problems


def _cmd_check(a) -> int:
    with open(a.file) as fh:
        text = fh.read()
    if not text.strip():
        raise ValueError(f"{a.file} is empty")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = json.loads(text.splitlines()[0])  # JSON-lines: header decides
    kind = doc.get("kind")
    if kind == "game-trace":
        g = graph_from_text(doc["family"])
        replay_trace(text, g)
        problems: list[str] = []
    elif kind == "expansion-impossibility":
        try:
            cert = ImpossibilityCertificate.from_json(doc)
        except (ValueError, KeyError) as e:
            problems = [f"certificate does not parse: {e}"]
        else:
            ok, bad = check_certificate(cert)
            problems = list(bad)
    elif kind == "divergence-verdict":
        problems = _check_divergence_doc(doc)
    elif kind == "lattice-classification":
        problems = _check_lattice_doc(doc)
    elif kind == "strategy":
        strategy_from_json(doc)
        problems = []
    else:
        raise ValueError(f"unknown document kind {kind!r}")
    _emit({"kind": "check-result", "file": a.file, "ok": not problems,
           "problems": problems}, a.out)
    return 0 if not problems else 1


def _cmd_serve(a) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=a.host, port=a.port, log_level="warning")
    return 0


# ------------------------------------------------------------------ wiring --


def _build_parser() -> _Parser:
    p = _Parser(prog="firegraph", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", help="write the result to this file instead of stdout")
        return sp

    sp = add("simulate", _cmd_simulate, "play a schedule and write the trace")
    sp.add_argument("--family", required=True)
    sp.add_argument("--x0", required=True, help="ball:M or keys:(..);(..)")
    sp.add_argument("--budget", help="c, poly:c,d or list:v1,v2,..")
    sp.add_argument("--r", type=int)
    sp.add_argument("--strategy", help="strategy JSON file to play")
    sp.add_argument("--radius-cap", type=int, default=None)

    sp = add("synth", _cmd_synth, "synthesize a containment strategy")
    sp.add_argument("--method", required=True,
                    choices=["sphere-poly", "second-diff", "cut-vertex"])
    sp.add_argument("--family", required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--c", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--x0")
    sp.add_argument("--r", type=int)
    sp.add_argument("--trace-out", help="also write the verification trace here")

    sp = add("oracle", _cmd_oracle, "exact minimax search on a finite window")
    sp.add_argument("--family", required=True)
    sp.add_argument("--x0", required=True)
    sp.add_argument("--f", type=int, required=True, help="constant per-turn budget")
    sp.add_argument("--R", type=int, required=True, help="window radius")

    sp = add("growth", _cmd_growth, "ball/sphere profile table")
    sp.add_argument("--family", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--json", action="store_true", help="JSON instead of a table")

    sp = add("expansion", _cmd_expansion, "flow-checked layer expansion")
    sp.add_argument("--family", required=True)
    sp.add_argument("--lambda", required=True, help="rational p/q")
    sp.add_argument("--levels", required=True, help="a..b or a single level")

    sp = add("transfer", _cmd_transfer, "carry a strategy across a QI pair")
    sp.add_argument("--pair", required=True,
                    help="grid-strong, grid-power:k or identity")
    sp.add_argument("--q", type=int, required=True, help="target ball radius")
    sp.add_argument("--source", default="second-diff",
                    choices=["second-diff", "sphere-poly"])
    sp.add_argument("--d", type=int)
    sp.add_argument("--c", type=int)
    sp.add_argument("--family", default="square", help="graph for the identity pair")
    sp.add_argument("--trace-out")

    sp = add("certify", _cmd_certify, "emit an impossibility certificate or verdict")
    sp.add_argument("--kind", required=True,
                    choices=["expansion", "divergence", "lattice"])
    sp.add_argument("--family")
    sp.add_argument("--lambda")
    sp.add_argument("--budget")
    sp.add_argument("--levels", type=int, help="expansion check horizon")
    sp.add_argument("--horizon", type=int, help="homogeneity check horizon")
    sp.add_argument("--smoke-turns", type=int, default=None)
    sp.add_argument("--d", type=int)
    sp.add_argument("--q", type=int)

    sp = add("check", _cmd_check, "re-validate a certificate, trace or strategy file")
    sp.add_argument("file")

    sp = sub.add_parser("serve", help="HTTP JSON endpoints for interactive play")
    sp.set_defaults(fn=_cmd_serve)
    sp.add_argument("--port", type=int, required=True)
    sp.add_argument("--host", default="127.0.0.1")

    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FiregraphError as e:
        json.dump(e.payload(), sys.stderr)
        sys.stderr.write("\n")
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        json.dump({"code": "invalid-argument", "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as e:  # uniform contract: never a bare traceback
        json.dump({"code": "internal-error", "message": f"{type(e).__name__}: {e}"},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
