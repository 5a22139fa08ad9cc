"""Command-line front end.  Every run prints exactly one JSON document on stdout.

Exit codes: 0 success or PASS, 1 FAIL (the report carries a witness),
2 error, usage error or INCONCLUSIVE.

Config files hold ``key = value`` lines (``#`` starts a comment).  Keys mirror
the long flags with dashes turned into underscores, e.g.::

    p = 5
    precision = 12
    seed = 7

Flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .errors import PadlabError
from .field import PVector, make_context, parse_element

SCHEMA = "padlab/1"
EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

DEFAULTS = {"p": 5, "unram": "0,1", "eis": "0,1", "precision": 8, "output": "json",
            "n_max": None, "ball_k": 0, "samples": 256, "targets": 20, "seed": None}
FIELD_KEYS = ("p", "unram", "eis", "precision")
# commands whose results depend on random sampling
SAMPLING = {"asym-empirical", "deriv", "solve-fixed-point", "solve-inverse", "grouplaw-check", "lazard"}


class UsageError(PadlabError):
    code = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, position=_blame(message))


_ARGV = []


def _blame(message):
    # index of the first argv token named in argparse's message
    for i, tok in enumerate(_ARGV):
        if tok and tok in message:
            return i
    return None


# -- config -----------------------------------------------------------------------

def read_config(path):
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}", position=None) from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value", position=lineno)
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in DEFAULTS:
            raise UsageError(f"config line {lineno}: unknown key {k!r}", position=lineno)
        out[k] = v
    return out


def resolve_config(args):
    file_cfg = read_config(args.config) if getattr(args, "config", None) else {}
    cfg = {}
    for k, default in DEFAULTS.items():
        flag = getattr(args, k, None)
        cfg[k] = flag if flag is not None else file_cfg.get(k, default)
    for k in ("p", "precision", "ball_k", "samples", "targets"):
        cfg[k] = int(cfg[k])
    for k in ("seed", "n_max"):
        if cfg[k] is not None:
            cfg[k] = int(cfg[k])
    for k in ("unram", "eis"):
        cfg[k] = _poly(cfg[k])
    if cfg["output"] not in ("json", "human"):
        raise UsageError(f"output must be json or human, not {cfg['output']!r}", position=None)
    return cfg


def _poly(text):
    if isinstance(text, list):
        return text
    coeffs = []
    for part in str(text).split(","):
        part = part.strip()
        coeffs.append([int(c) for c in part.split(":")] if ":" in part else int(part))
    return coeffs


def context_of(cfg):
    return make_context(cfg["p"], cfg["unram"], cfg["eis"], cfg["precision"])


def _points(text, ctx):
    return [parse_element(s, ctx) for s in text.split(";")]


# -- commands -----------------------------------------------------------------------
# each returns (result dict, exit code)

def cmd_field(args, cfg):
    return context_of(cfg).describe(), EXIT_OK


def cmd_classify(args, cfg):
    from .powers import classify_coset, is_nth_power, power_coset_reps
    ctx = context_of(cfg)
    x = parse_element(args.x, ctx)
    table = power_coset_reps(ctx, args.n)
    i = classify_coset(x, table)
    rep = table.reps[i]
    _, w = is_nth_power(x / rep, args.n)
    return {"coset_index": i, "rep": str(rep), "witness": str(w), "index": len(table)}, EXIT_OK


def cmd_root(args, cfg):
    from .powers import is_nth_power
    ctx = context_of(cfg)
    x = parse_element(args.x, ctx)
    ok, w = is_nth_power(x, args.n)
    if not ok:
        return {"root": None, "check": "fail", "n": args.n, "x": str(x)}, EXIT_FAIL
    residual = w ** args.n - x
    good = residual.is_zero() or residual.val >= w.prec
    return {"root": str(w), "check": "pass" if good else "fail"}, EXIT_OK if good else EXIT_FAIL


def cmd_qpow(args, cfg):
    from .powers import build_qth_power_map
    ctx = context_of(cfg)
    qmap = build_qth_power_map(ctx, Fraction(args.q))
    y = qmap(parse_element(args.x, ctx))
    return {"value": str(y), "q": str(qmap.q), "level": qmap.level,
            "domain_level": qmap.domain_level}, EXIT_OK


def cmd_asym(args, cfg):
    from .calculus import asymptotic_empirical, asymptotic_of_rational
    from .expr import compile_function, parse, to_rational
    ctx = context_of(cfg)
    if args.rational is not None:
        num, den = to_rational(parse(args.rational), ctx, args.var)
        forms = asymptotic_of_rational(num, den)
        return {"forms": [f.to_json() for f in forms]}, EXIT_OK
    if not args.coset:
        raise UsageError("--empirical needs --coset LAMBDA,M", position=None)
    lam_text, m_text = args.coset.rsplit(",", 1)
    lam, m = parse_element(lam_text, ctx), int(m_text)
    ts = [int(t) for t in args.t.split(",")]
    f = compile_function(parse(args.empirical), ctx, args.var)
    form = asymptotic_empirical(f, lam, m, ts, seed=cfg["seed"])
    return {"forms": [form.to_json()]}, EXIT_OK


def _vector_fn(exprs, ctx):
    from .expr import parse, variables, evaluate
    trees = [parse(e) for e in exprs]
    names = sorted({v for t in trees for v in variables(t)}) or ["x"]

    def f(v):
        env = dict(zip(names, v.coords if hasattr(v, "coords") else [v]))
        return PVector([evaluate(t, env, ctx).value for t in trees], ctx)

    return f, names


def cmd_deriv(args, cfg):
    from .calculus import strict_derivative
    ctx = context_of(cfg)
    f, names = _vector_fn(args.f, ctx)
    a = PVector(_points(args.a, ctx), ctx)
    if len(a) != len(names):
        raise UsageError(f"--a needs {len(names)} coordinate(s) for {names}", position=None)
    rep = strict_derivative(f, a, args.gamma_max, seed=cfg["seed"])
    out = rep.to_json()
    out["variables"] = names
    out["gamma_max"] = args.gamma_max if args.gamma_max is not None else ctx.N // 3
    return out, EXIT_OK if rep.witness is None else EXIT_FAIL


def cmd_taylor2(args, cfg):
    from .calculus import verify_taylor2
    from .expr import compile_function, parse
    ctx = context_of(cfg)
    f = compile_function(parse(args.f), ctx, args.var)
    rep = verify_taylor2(f, parse_element(args.a, ctx), step=args.step)
    return rep.to_json(), EXIT_OK


def cmd_solve(args, cfg):
    from .field import Ball
    from .solvers import contraction_fixed_point, hensel_root_monic, local_inverse_solve
    from .calculus import estimate_strict_derivative
    ctx = context_of(cfg)
    if args.method == "hensel":
        if not args.coeffs:
            raise UsageError("hensel needs --coeffs a0;a1;...", position=None)
        res = hensel_root_monic(_points(args.coeffs, ctx))
        return res.to_json(), EXIT_OK
    if not args.f:
        raise UsageError(f"{args.method} needs --f", position=None)
    f, names = _vector_fn(args.f, ctx)
    if args.method == "fixed-point":
        center = PVector(_points(args.center, ctx) if args.center else [ctx.zero()] * len(names), ctx)
        shift = PVector(_points(args.shift, ctx), ctx) if args.shift else None
        res = contraction_fixed_point(f, Ball(center, args.radius), seed=cfg["seed"], shift=shift)
        out = res.to_json()
        out["variables"] = names
        return out, EXIT_OK
    if not (args.a and args.c):
        raise UsageError("inverse needs --a and --c", position=None)
    a = PVector(_points(args.a, ctx), ctx)
    c = PVector(_points(args.c, ctx), ctx)
    Df = estimate_strict_derivative(f, a).mu
    res = local_inverse_solve(f, a, [[x.lift() for x in row] for row in Df], c, seed=cfg["seed"])
    out = res.to_json()
    out["variables"] = names
    return out, EXIT_OK


def _load_law(path, cfg, args):
    from .grouplaw import context_from_spec, load_group_law
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read law file: {exc}", position=None) from None
    except json.JSONDecodeError as exc:
        from .errors import LawFormatError
        raise LawFormatError(f"invalid JSON: {exc}") from None
    spec = dict(doc.get("field", {}))
    if getattr(args, "precision", None) is not None:
        spec["precision"] = args.precision
    ctx = context_from_spec(spec)
    for k in FIELD_KEYS:
        cfg[k] = spec.get(k, cfg[k]) if k != "precision" else ctx.N
    return load_group_law(doc, ctx)


def cmd_grouplaw(args, cfg):
    from .grouplaw import FAIL, INCONCLUSIVE, check_conditions, summarize, rescale_law
    law = _load_law(args.law, cfg, args)
    if args.action == "show":
        return {"law": law.to_document(), "domain": law.domain}, EXIT_OK
    if args.action == "rescale":
        ctx = law.ctx
        new = rescale_law(law, parse_element(args.eps, ctx), parse_element(args.delta, ctx))
        return {"law": new.to_document(), **new.rescale_info}, EXIT_OK
    n_max = cfg["n_max"] if cfg["n_max"] is not None else 6
    cfg["n_max"] = n_max
    verdicts = check_conditions(law, args.conditions, n_max=n_max, ball_k=cfg["ball_k"],
                                seed=cfg["seed"], samples=cfg["samples"], targets=cfg["targets"])
    status = summarize(verdicts)
    code = {FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_ERROR}.get(status, EXIT_OK)
    return {"status": status, "domain": law.domain,
            "verdicts": [v.to_json() for v in verdicts]}, code


def cmd_lazard(args, cfg):
    from .lazard import lazard_report
    law = _load_law(args.law, cfg, args)
    n_max = cfg["n_max"] if cfg["n_max"] is not None else 3
    cfg["n_max"] = n_max
    rep = lazard_report(law, n_max, seed=cfg["seed"])
    return rep, EXIT_OK if rep["verdict"] == "PASS" else EXIT_FAIL


# -- parser -------------------------------------------------------------------------

def _field_opts(sp, law_file=False):
    if not law_file:
        sp.add_argument("--p", type=int)
        sp.add_argument("--unram", help="monic unramified polynomial, little endian, e.g. 2,4,1")
        sp.add_argument("--eis", help="monic Eisenstein polynomial; coefficient components joined by ':'")
    sp.add_argument("--precision", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--config", help="key = value configuration file")
    sp.add_argument("--output", choices=("json", "human"))


def build_parser():
    ap = _Parser(prog="padlab", description="Exact p-adic toolkit.")
    ap.add_argument("--version", action="version", version=f"padlab {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("field", help="describe a field tower")
    _field_opts(sp)
    sp.set_defaults(run=cmd_field)

    for name, fn, hlp in (("classify", cmd_classify, "power class of x"),
                          ("root", cmd_root, "n-th root of x")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--x", required=True)
        _field_opts(sp)
        sp.set_defaults(run=fn)

    sp = sub.add_parser("qpow", help="torsion-free q-th power map")
    sp.add_argument("--q", required=True)
    sp.add_argument("--x", required=True)
    _field_opts(sp)
    sp.set_defaults(run=cmd_qpow)

    sp = sub.add_parser("asym", help="asymptotic form at 0")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--rational")
    g.add_argument("--empirical")
    sp.add_argument("--coset", help="LAMBDA,M")
    sp.add_argument("--t", default="4,8,12,16", help="depths for the empirical fit")
    sp.add_argument("--var", default="x")
    _field_opts(sp)
    sp.set_defaults(run=cmd_asym)

    sp = sub.add_parser("deriv", help="strict derivative, estimated and verified")
    sp.add_argument("--f", action="append", required=True, help="component; repeat for vector maps")
    sp.add_argument("--a", required=True, help="point, coordinates separated by ';'")
    sp.add_argument("--gamma-max", type=int)
    _field_opts(sp)
    sp.set_defaults(run=cmd_deriv)

    sp = sub.add_parser("taylor2", help="second-order Taylor check")
    sp.add_argument("--f", required=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--step", type=int)
    sp.add_argument("--var", default="x")
    _field_opts(sp)
    sp.set_defaults(run=cmd_taylor2)

    sp = sub.add_parser("solve", help="fixed points, Hensel roots, local inversion")
    sp.add_argument("method", choices=("fixed-point", "hensel", "inverse"))
    sp.add_argument("--f", action="append")
    sp.add_argument("--center")
    sp.add_argument("--radius", type=int, default=0)
    sp.add_argument("--shift")
    sp.add_argument("--coeffs", help="a0;a1;...;a_{n-1} of the monic polynomial")
    sp.add_argument("--a")
    sp.add_argument("--c")
    _field_opts(sp)
    sp.set_defaults(run=cmd_solve)

    sp = sub.add_parser("grouplaw", help="group-law documents")
    sp.add_argument("action", choices=("check", "show", "rescale"))
    sp.add_argument("law")
    sp.add_argument("--conditions", default="A,B,C,D,E")
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--ball-k", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--targets", type=int)
    sp.add_argument("--eps")
    sp.add_argument("--delta")
    _field_opts(sp, law_file=True)
    sp.set_defaults(run=cmd_grouplaw)

    sp = sub.add_parser("lazard", help="Lazard report over finite quotients")
    sp.add_argument("law")
    sp.add_argument("--n-max", type=int)
    _field_opts(sp, law_file=True)
    sp.set_defaults(run=cmd_lazard)
    return ap


def _command_key(args):
    if args.command == "asym":
        return "asym-empirical" if args.empirical is not None else "asym-rational"
    if args.command == "solve":
        return f"solve-{args.method}"
    if args.command == "grouplaw":
        return f"grouplaw-{args.action}"
    return args.command


def _public_args(args):
    skip = {"run", "config", "output", "seed", "p", "unram", "eis", "precision",
            "n_max", "ball_k", "samples", "targets"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def render_human(doc, indent=0):
    lines = []
    pad = "  " * indent
    if isinstance(doc, list):
        for v in doc:
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}-")
                lines.append(render_human(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v, sort_keys=True)}")
        return "\n".join(lines)
    for k, v in sorted(doc.items()):
        if isinstance(v, list) and v and not any(isinstance(x, (dict, list)) for x in v):
            lines.append(f"{pad}{k}: {json.dumps(v)}")
        elif isinstance(v, (dict, list)) and v:
            lines.append(f"{pad}{k}:")
            lines.append(render_human(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True)}")
    return "\n".join(lines)


def emit(doc, mode, stream):
    if mode == "human":
        stream.write(render_human(doc) + "\n")
    else:
        stream.write(json.dumps(doc, sort_keys=True) + "\n")


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    _ARGV[:] = argv
    mode = "json"
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        mode = cfg["output"]
        key = _command_key(args)
        if key in SAMPLING and cfg["seed"] is None:
            raise UsageError(f"{args.command} samples randomly and needs --seed", position=None)
        result, code = args.run(args, cfg)
    except PadlabError as exc:
        doc = {"schema": SCHEMA, **exc.to_json()}
        emit(doc, mode, stdout)
        stderr.write(f"padlab: {exc.code}: {exc}\n")
        return EXIT_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    config = {k: cfg[k] for k in sorted(cfg) if k != "output"}
    doc = {"schema": SCHEMA, "command": key, "args": _public_args(args),
           "config": config, "result": result}
    emit(doc, mode, stdout)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
