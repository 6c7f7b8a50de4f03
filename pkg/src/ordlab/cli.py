"""Command-line harness: every subcommand prints (or writes) one canonical JSON report.

Exit codes: 0 pass, 1 usage or input error, 2 certificate failure, 3 promise violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import OrdlabError, ParseError, PromiseViolated, StabilityViolated, UsageError
from .order_core import FamilySpec, Poset, canonical_json, generate, poset_from_json, poset_to_json, width_exact
from .stages import InjectionSpec

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_CERT, EXIT_PROMISE = 0, 1, 2, 3


class Outcome(Exception):
    """Carries a finished result whose status is not a plain pass."""

    def __init__(self, code: int, result: dict[str, Any]):
        super().__init__(code)
        self.code = code
        self.result = result


# -- inputs -------------------------------------------------------------------

def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_json(path: str, digests: dict[str, str]) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    digests[path] = _digest(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None


def load_poset(arg: str | None, seed: int, k: int | None, digests: dict[str, str]) -> Poset:
    """A poset file, a family name, or ``name:{json params}``."""
    if not arg:
        raise UsageError("--poset is required")
    if os.path.exists(arg):
        return poset_from_json(_read_json(arg, digests))
    name, _, raw = arg.partition(":")
    try:
        params = json.loads(raw) if raw else {}
    except json.JSONDecodeError as exc:
        raise UsageError(f"--poset parameters are not JSON: {exc}") from None
    if name == "shifted_chains" and k is not None:
        params.setdefault("k", k)
    return generate(FamilySpec(name, params, seed))


def load_injection(arg: str | None, seed: int, n: int, digests: dict[str, str]) -> InjectionSpec:
    if not arg:
        return InjectionSpec.seeded(seed, n)
    if os.path.exists(arg):
        return InjectionSpec.from_json(_read_json(arg, digests))
    try:
        return InjectionSpec.from_json(json.loads(arg))
    except json.JSONDecodeError:
        raise UsageError("--injection must be a file or inline JSON") from None


def parse_chain(arg: str | None, digests: dict[str, str]) -> list[int]:
    if arg is None:
        raise UsageError("--chain is required")
    if os.path.exists(arg):
        data = _read_json(arg, digests)
        return [int(v) for v in (data["chain"] if isinstance(data, dict) else data)]
    try:
        return [int(v) for v in arg.split(",") if v.strip()]
    except ValueError:
        raise UsageError("--chain must be comma-separated ids or a JSON file") from None


# -- commands -----------------------------------------------------------------

def cmd_generate(a, digests):
    p = load_poset(a.poset, a.seed, a.k, digests)
    n = p.window(a.n)
    less = p.less_matrix(n)
    from .order_core import FinitePoset

    trunc = FinitePoset(less, validate=False)
    return {"poset": poset_to_json(p), "n": n, "cover_pairs": trunc.cover_pairs(),
            "width": width_exact(less) if n <= 2000 else None}


def cmd_decompose(a, digests):
    from .decomposition import dilworth_offline, online_partition

    p = load_poset(a.poset, a.seed, None, digests)
    try:
        if a.offline or a.k is None:
            out = dilworth_offline(p.less_matrix(p.window(a.n)))
            return {"mode": "offline", **out.to_json(), "n_chains": out.n_chains}
        out = online_partition(p, a.k, a.n)
    except PromiseViolated as exc:
        raise Outcome(EXIT_PROMISE, {"error": type(exc).__name__, "message": str(exc), "witness": exc.witness})
    return {"mode": "online", **out.to_json(), "n_chains": out.n_chains, "layer_of": out.layer_of}


def _params(a):
    from .extractor import Params

    return Params(window=a.n, m=a.m, budget=a.budget, lookahead=a.lookahead)


def cmd_extract(a, digests):
    from .extractor import (
        RefutationWitness,
        chains_for,
        extract_cd2_sads,
        extract_no_antichain,
        extract_tower,
        extract_w2_diagonal,
        extract_wfsplit_aca,
        seed_chain,
    )

    p = load_poset(a.poset, a.seed, a.k, digests)
    params = _params(a)
    strategy = a.strategy or "tower"
    try:
        if strategy == "ideal":
            ex = extract_no_antichain(p, params, bound=a.k)
        else:
            chains = chains_for(p, params.window)
            if a.k is not None and len(chains) > a.k:
                raise Outcome(EXIT_PROMISE, {"error": "WidthPromiseViolated",
                                             "message": f"{len(chains)} chains needed, promise {a.k}"})
            if strategy == "tower":
                ex = extract_tower(p, chains, seed_chain(p, chains, params.window), params)
            elif strategy == "w2-diagonal":
                ex = extract_w2_diagonal(p, seed_chain(p, chains, params.window), params)
            elif strategy == "cd2-sads":
                ex = extract_cd2_sads(p, chains, params)
            elif strategy == "wf-split":
                ex = extract_wfsplit_aca(p, chains, params)
            else:
                raise UsageError(f"unknown strategy {strategy!r}")
    except PromiseViolated as exc:
        raise Outcome(EXIT_PROMISE, {"error": type(exc).__name__, "message": str(exc), "witness": exc.witness})
    if isinstance(ex, RefutationWitness):
        raise Outcome(EXIT_CERT, {"strategy": strategy, "refutation": ex.to_json()})
    result = {"strategy": strategy, "chain": ex.chain, "ascending": ex.ascending,
              "certificate": ex.certificate.to_json(), "transcript": ex.transcript}
    if not ex.passes:
        raise Outcome(EXIT_CERT, result)
    return result


def cmd_verify(a, digests):
    from .homogeneity import verify_prefix_homogeneity

    p = load_poset(a.poset, a.seed, a.k, digests)
    chain = parse_chain(a.chain, digests)
    reading = a.mode or "inf"
    if reading not in ("inf", "cof"):
        raise UsageError("verify --mode must be inf or cof")
    cert = verify_prefix_homogeneity(p, chain, a.m, a.n, reading)
    result = {"certificate": cert.to_json(), "reading": reading}
    if not cert.passes:
        raise Outcome(EXIT_CERT, result)
    return result


CONSTRUCTIONS = {"tf-linear": "tf_linear", "xi": "xi", "product-lq2": "product_lq2",
                 "product-lq3": "product_lq3", "pi02": "pi02", "chain-ext": "chain_ext"}


def cmd_adversary(a, digests):
    from .adversaries import qprops_violations
    from .stages import StageTruth

    if a.construction not in CONSTRUCTIONS:
        raise UsageError(f"--construction must be one of {sorted(CONSTRUCTIONS)}")
    name = CONSTRUCTIONS[a.construction]
    params: dict[str, Any] = {}
    f = None
    if name != "pi02":
        f = load_injection(a.injection, a.seed, a.n, digests)
        inj = f.to_json()
        if name in ("product_lq2", "product_lq3"):
            params["base"] = FamilySpec("tf_linear", {"injection": inj}, a.seed).to_json()
        else:
            params["injection"] = inj
    p = generate(FamilySpec(name, params, a.seed))
    n = p.window(a.n)
    less = p.less_matrix(n)
    out: dict[str, Any] = {"poset": poset_to_json(p), "window": n, "relations": int(less.sum()),
                           "width": width_exact(less)}
    if f is not None:
        out["true_numbers"] = StageTruth(f).true_set()
    if name == "pi02":
        out["least_total"] = p.meta["least_total"]
        out["profile"] = p.meta["profile"]
    if name == "xi":
        bad = qprops_violations(p, 10_000, np.random.default_rng(a.seed))
        out["stage_rule_violations"] = [list(t) for t in bad[:10]]
    return out


def cmd_decode(a, digests):
    from .adversaries import brute_force_range, decode_range_from_bad_sequence, decode_range_from_true, find_bad_sequence, tf_linear, xi_construct
    from .extractor.splitting import wf_split

    f = load_injection(a.injection, a.seed, a.n, digests)
    mode = a.mode or "true-set"
    if mode == "true-set":
        p = tf_linear(f)
        split = wf_split(p, p.size, a.lookahead)
        candidates = [x for x in split.rest]
        table = decode_range_from_true(f, candidates)
        source = {"mode": mode, "split_rest": len(split.rest)}
    elif mode == "bad-seq":
        p = xi_construct(f)
        seq = find_bad_sequence(p, p.size, a.m)
        if seq is None:
            return {"mode": mode, "found": False}
        table = decode_range_from_bad_sequence(p, seq)
        source = {"mode": mode, "found": True}
    else:
        raise UsageError("decode --mode must be true-set or bad-seq")
    brute = brute_force_range(f, table.bound)
    result = {**source, "table": table.to_json(), "exact_match": table.members == brute}
    if not result["exact_match"]:
        raise Outcome(EXIT_CERT, result)
    return result


def cmd_pipeline(a, digests):
    from .adversaries import StageError, pipeline_reversal

    f = load_injection(a.injection, a.seed, a.n, digests)
    try:
        res = pipeline_reversal(f)
    except StageError as exc:
        raise Outcome(EXIT_USAGE, {"stage": exc.stage, "error": type(exc.cause).__name__, "message": str(exc.cause)})
    out = res.to_json()
    if not res.exact:
        raise Outcome(EXIT_CERT, out)
    return out


def cmd_oracle(a, digests):
    from .chains_trees import FiniteTree, essential_ideal_decomposition, greedy_maximal_chain, leftmost_path, maxless_chain, random_tree
    from .decomposition import dilworth_offline

    op = a.op or "width"
    if op == "leftmost":
        tree = (FiniteTree.from_json(_read_json(a.tree, digests)) if a.tree
                else random_tree(np.random.default_rng(a.seed), max_nodes=a.n))
        path = leftmost_path(tree, a.depth)
        deep = min(nd for nd in tree.nodes if len(nd) == a.depth)
        return {"op": op, "path": list(path), "brute_force": list(deep), "match": tuple(path) == deep}
    p = load_poset(a.poset, a.seed, a.k, digests)
    n = p.window(a.n)
    less = p.less_matrix(n)
    if op == "ideals":
        try:
            fam = essential_ideal_decomposition(less, bound=a.k)
        except PromiseViolated as exc:
            raise Outcome(EXIT_PROMISE, {"error": type(exc).__name__, "witness": exc.witness})
        return {"op": op, "ideals": fam.ideals}
    if op == "maxchain":
        wc = maxless_chain(p, n, a.lookahead)
        return {"op": op, "greedy": greedy_maximal_chain(p, n), "maxless": wc.elements,
                "lookahead": wc.lookahead, "margin_ok": wc.margin_ok}
    if op == "width":
        return {"op": op, "width": width_exact(less), "dilworth_chains": dilworth_offline(less).n_chains}
    raise UsageError("oracle --op must be leftmost, ideals, maxchain or width")


def cmd_selftest(a, digests):
    from .selftest import SelftestConfig, run_selftest

    res = run_selftest(SelftestConfig(seed=a.seed, budget=a.budget, m=a.m, k=a.k))
    if not res["all_pass"]:
        raise Outcome(EXIT_CERT, res)
    return res


COMMANDS = {
    "generate": cmd_generate, "decompose": cmd_decompose, "extract": cmd_extract, "verify": cmd_verify,
    "adversary": cmd_adversary, "decode": cmd_decode, "pipeline": cmd_pipeline, "oracle": cmd_oracle,
    "selftest": cmd_selftest,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as a certificate failure
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ordlab", description="Chain decompositions and homogeneous chains on poset windows.")
    ap.add_argument("--version", action="version", version=f"ordlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--poset", help="poset file, family name, or name:{json params}")
        sp.add_argument("--injection", help="injection file or inline JSON")
        sp.add_argument("--k", type=int, help="width (or antichain) promise")
        sp.add_argument("--n", type=int, default=500, help="window size")
        sp.add_argument("--m", type=int, default=10, help="certificate threshold")
        sp.add_argument("--budget", type=int, default=1000, help="per-index budget base")
        sp.add_argument("--lookahead", type=int, default=32)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--strategy", help="tower | w2-diagonal | cd2-sads | wf-split | ideal")
        sp.add_argument("--construction", help="tf-linear | xi | product-lq2 | product-lq3 | pi02 | chain-ext")
        sp.add_argument("--mode", help="verify: inf | cof; decode: true-set | bad-seq")
        sp.add_argument("--chain", help="verify: comma-separated ids or a JSON file")
        sp.add_argument("--op", help="oracle: leftmost | ideals | maxchain | width")
        sp.add_argument("--tree", help="oracle leftmost: tree file")
        sp.add_argument("--depth", type=int, default=8, help="oracle leftmost: path length")
        sp.add_argument("--offline", action="store_true", help="decompose: exact minimum chain cover")
    return ap


def run(argv: Sequence[str] | None = None) -> tuple[int, dict[str, Any]]:
    """Parse, dispatch, and assemble the report; returns (exit code, report)."""
    args = build_parser().parse_args(argv)
    env_seed = os.environ.get("ORDLAB_SEED")
    if env_seed is not None:
        try:
            args.seed = int(env_seed)
        except ValueError:
            raise UsageError("ORDLAB_SEED must be an integer") from None
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}
    digests: dict[str, str] = {}
    start = time.perf_counter()
    status, code = "pass", EXIT_OK
    try:
        result = COMMANDS[args.command](args, digests)
    except Outcome as o:
        result, code = o.result, o.code
        status = {EXIT_CERT: "certificate-failed", EXIT_PROMISE: "promise-violated"}.get(code, "error")
    except StabilityViolated as exc:
        result, code, status = {"error": type(exc).__name__, "message": str(exc)}, EXIT_PROMISE, "promise-violated"
    report = {"schema": SCHEMA, "version": __version__, "command": args.command, "config": config,
              "digests": digests, "status": status, "result": result,
              "timing": {"seconds": round(time.perf_counter() - start, 6)}}
    return code, report


def payload(report: dict[str, Any]) -> str:
    """The determinism-checked part of a report: everything except timing."""
    return canonical_json({k: v for k, v in report.items() if k != "timing"})


def main(argv: Sequence[str] | None = None) -> int:
    try:
        code, report = run(argv)
    except (UsageError, ParseError) as exc:
        print(f"ordlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OrdlabError as exc:
        print(f"ordlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = canonical_json(report) + "\n"
    out = vars(build_parser().parse_known_args(argv)[0]).get("out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
