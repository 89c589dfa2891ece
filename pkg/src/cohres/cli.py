"""cohres command line: resolve, form, member, verify."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .antiforms import render, volume_constant
from .catalog import shipped_ideal, shipped_names
from .freecomplex import (ComplexError, ExtDegreeBoundError, SamplingError, ext_generators,
                          format_complex, generic_exactness_check, load_ideal, resolve_ideal)
from .membership import (INCONCLUSIVE, MEMBER, NON_MEMBER, Thresholds, default_battery,
                         evidence_csv, load_battery, membership_test, oracle_membership)
from .mininv import build_u, load_metric, make_metric, verify_identities
from .pairing import PairingEngine, PairingError, QuadratureSpec, default_quadrature
from .polyring import ParseError, format_rational, parse_poly
from .residues import ClosednessError, ResidueError, is_dbar_closed, residue_forms
from .supercalc import check_super_identities

EXIT_OK, EXIT_NON_MEMBER, EXIT_PARSE, EXIT_EXACTNESS, EXIT_EXT_BOUND, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4, 5
EXIT_FAIL = 6

_METHODS = {"tensor": "tensor-grid", "tensor-grid": "tensor-grid", "grid": "tensor-grid",
            "qmc": "quasi-monte-carlo", "quasi-monte-carlo": "quasi-monte-carlo",
            "mc": "monte-carlo", "monte-carlo": "monte-carlo"}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def parse_quadrature(text, n, seed):
    """'default', 'tensor-grid[:N]', 'qmc[:N]' or 'mc[:N]'."""
    if text in (None, "", "default"):
        q = default_quadrature(n, seed)
        return QuadratureSpec(q.method, q.resolution, seed)
    method, _, res = text.partition(":")
    if method not in _METHODS:
        raise ParseError(f"unknown quadrature method {method!r}")
    method = _METHODS[method]
    if res:
        try:
            N = int(res)
        except ValueError:
            raise ParseError(f"bad quadrature resolution {res!r}") from None
    else:
        N = 24 if method == "tensor-grid" else 2 ** 20
    return QuadratureSpec(method, N, seed)


def load_spec(arg):
    if arg is None:
        raise UsageError("--ideal is required")
    if os.path.exists(arg):
        return load_ideal(arg)
    if arg in shipped_names():
        return shipped_ideal(arg)
    raise UsageError(f"--ideal {arg!r} is neither a file nor a shipped ideal ({', '.join(shipped_names())})")


def config_digest(args, extra=()):
    keys = ("ideal", "resolution", "metric", "battery", "quadrature", "seed", "degree_bound", "thresholds", "phi")
    cfg = {k: getattr(args, k, None) for k in keys}
    for k in ("ideal", "resolution", "metric", "battery"):
        p = cfg.get(k)
        if p and os.path.exists(p):
            with open(p, "rb") as fh:
                cfg[k + "_sha256"] = hashlib.sha256(fh.read()).hexdigest()
            cfg[k] = os.path.basename(p)
    cfg.update(dict(extra))
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()[:16]


def header(args, n, command):
    k = volume_constant(n)
    k = complex(k.real + 0.0, k.imag + 0.0)
    return [f"# cohres {__version__} {command}",
            f"# config_digest = {config_digest(args)}",
            f"# seed = {args.seed}",
            f"# kappa_{n} = {k.real:.17g}{k.imag:+.17g}i"]


class Output:
    """Collects report lines; prints them and mirrors them to --out."""

    def __init__(self, args):
        self.out = args.out
        self.lines = []
        if self.out:
            os.makedirs(self.out, exist_ok=True)

    def __call__(self, *lines):
        for s in lines:
            print(s)
            self.lines.append(s)

    def write(self, name, text):
        if self.out:
            with open(os.path.join(self.out, name), "w", newline="\n") as fh:
                fh.write(text)

    def close(self, name):
        self.write(name, "\n".join(self.lines) + "\n")


def _complex_and_metric(args, spec):
    c = resolve_ideal(spec, args.resolution)
    if args.metric in (None, "identity", "weighted"):
        metric = make_metric(args.metric or "identity", c)
    else:
        metric = load_metric(args.metric, c)
    return c, metric


def _xis(args, spec, c):
    if spec.xi is not None:
        return spec.xi
    return ext_generators(c, D=args.degree_bound)


# ---------------------------------------------------------------------------
# commands


def cmd_resolve(args):
    spec = load_spec(args.ideal)
    c = resolve_ideal(spec, args.resolution)
    out = Output(args)
    out(*header(args, c.nvars, "resolve"))
    out(f"ideal = {spec.name}", f"ranks = {', '.join(map(str, c.ranks))}", f"codim = {c.codim}")
    out(*format_complex(c).splitlines()[3:])
    cz = all(ok for _, ok in c.composition_zero())
    out(f"composition_zero = {'pass' if cz else 'FAIL'}")
    rep = generic_exactness_check(c, seed=args.seed, degree_bound=args.degree_bound)
    out(*rep.lines())
    out(f"exactness = {'pass' if rep.passed else 'FAIL'}")
    out.close("resolve.txt")
    return EXIT_OK if (cz and rep.passed) else EXIT_EXACTNESS


def _forms(args, spec):
    c, metric = _complex_and_metric(args, spec)
    au = build_u(c, metric)
    return c, metric, au, residue_forms(c, au, _xis(args, spec, c))


def cmd_form(args):
    spec = load_spec(args.ideal)
    c, metric, au, rs = _forms(args, spec)
    out = Output(args)
    out(*header(args, c.nvars, "form"))
    out(f"ideal = {spec.name}", f"resolution = {c.name}", f"metric = {metric.name}", f"p = {c.codim}")
    report = {"version": __version__, "config_digest": config_digest(args), "seed": args.seed,
              "kappa": [volume_constant(c.nvars).real, volume_constant(c.nvars).imag],
              "ideal": spec.name, "resolution": c.name, "metric": metric.name, "p": c.codim, "forms": []}
    if args.show_u:
        for k in sorted(au.u):
            for i, w in enumerate(au.u[k]):
                out(f"u_{k}[{i + 1}] = {render(w)}")
    for r in rs:
        closed = is_dbar_closed(r.omega)
        out(f"xi_{r.ell} = ({', '.join(str(x) for x in r.xi)})",
            f"omega_{r.ell} = {render(r.omega)}",
            f"dbar omega_{r.ell} = 0 : {'certified' if closed else 'FAIL'}")
        report["forms"].append({
            "ell": r.ell, "xi": [str(x) for x in r.xi], "bidegree": list(r.bidegree()),
            "dbar_closed": closed,
            "terms": {m.render(): format_rational(f) for m, f in sorted(r.omega.terms.items())}})
    out.write("forms.json", json.dumps(report, indent=1, sort_keys=True) + "\n")
    out.close("form.txt")
    return EXIT_OK


def battery_for(args, spec, p):
    n = spec.nvars
    if args.battery in (None, "default"):
        return default_battery(n, p, spec.generators)
    if args.battery == "small":
        return default_battery(n, p, spec.generators, delta_scales=(1.0,), radii=((0.5, 1.0),))
    if not os.path.exists(args.battery):
        raise UsageError(f"battery {args.battery!r} is neither 'default', 'small' nor a file")
    return load_battery(args.battery, n)


def cmd_member(args):
    spec = load_spec(args.ideal)
    phi = parse_poly(args.phi, spec.nvars)
    if not phi.is_holomorphic():
        raise ParseError("phi must be holomorphic (no conjugated variables)")
    thr = Thresholds.parse(args.thresholds) if args.thresholds else Thresholds()
    c, metric, au, rs = _forms(args, spec)
    q = parse_quadrature(args.quadrature, spec.nvars, args.seed)
    battery = battery_for(args, spec, c.codim)
    eng = PairingEngine(spec.generators, [r.omega for r in rs], q,
                        max_phi_degree=phi.total_degree(),
                        max_h_degree=max((tf.hol(spec.nvars).total_degree() for tf in battery), default=0))
    oracle = oracle_membership(spec, phi)
    v = membership_test(eng, phi, battery, thr, oracle=oracle, p=c.codim)
    out = Output(args)
    out(*header(args, spec.nvars, "member"))
    out(f"ideal = {spec.name}", f"phi = {phi}", f"quadrature = {q.method}:{q.resolution}",
        f"thresholds = {thr.low:g},{thr.high:g}", f"battery_size = {len(battery)}",
        f"max_rho = {v.max_rho():.6e}")
    for R, rho in sorted(v.rho_by_R().items()):
        out(f"max_rho[R={R:g}] = {rho:.6e}")
    out(f"oracle_verdict = {oracle}", f"raw_verdict = {v.raw_verdict}")
    for d in v.diagnostics:
        out(f"diagnostic: {d}")
    out(f"verdict = {v.verdict}")
    csv_head = "\n".join(header(args, spec.nvars, "member")) + "\n"
    out.write("evidence.csv", csv_head + evidence_csv(v))
    out.close("member.txt")
    return {MEMBER: EXIT_OK, NON_MEMBER: EXIT_NON_MEMBER}.get(v.verdict, EXIT_INCONCLUSIVE)


def cmd_verify(args):
    names = [args.ideal] if args.ideal else shipped_names()
    out = Output(args)
    out(f"# cohres {__version__} verify", f"# config_digest = {config_digest(args)}", f"# seed = {args.seed}")
    ok = True
    for name in names:
        spec = load_spec(name)
        try:
            c, metric = _complex_and_metric(args, spec)
        except (ComplexError, ParseError) as e:
            out(f"{spec.name}: FAIL resolution: {e}")
            ok = False
            continue
        checks = [(f"f_{k} f_{k + 1} = 0", ok) for k, ok in c.composition_zero()]
        checks += check_super_identities(c, count=2, seed=args.seed)
        rep = verify_identities(c, metric)
        checks += [(it[0], it[1]) for it in rep.items]
        try:
            if rep.applied_u is None:
                raise ResidueError("no minimal inverses, so no u")
            rs = residue_forms(c, rep.applied_u, _xis(args, spec, c))
            checks += [(f"dbar omega_{r.ell} = 0", is_dbar_closed(r.omega)) for r in rs]
        except (ResidueError, ClosednessError, ExtDegreeBoundError) as e:
            checks.append((f"residue forms ({e})", False))
        for nm, good in checks:
            out(f"{spec.name} [{metric.name}] {nm}: {'pass' if good else 'FAIL'}")
            ok = ok and good
    out(f"verify = {'pass' if ok else 'FAIL'}")
    out.close("verify.txt")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="cohres", description="Residue forms of polynomial ideals and membership by duality.")
    ap.add_argument("--version", action="version", version=f"cohres {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--ideal", help="ideal file or shipped ideal name")
        p.add_argument("--resolution", help="koszul, taylor or a complex file (overrides the ideal file)")
        p.add_argument("--metric", default="identity", help="identity, weighted or a metric file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--degree-bound", type=int, default=None, dest="degree_bound",
                       help="degree bound D for Ext generators and graded exactness checks")
        p.add_argument("--out", help="directory for report files")

    p = sub.add_parser("resolve", help="build and check a resolution")
    common(p)
    p = sub.add_parser("form", help="print the residue forms")
    common(p)
    p.add_argument("--show-u", action="store_true", dest="show_u", help="also print the components u_k")
    p = sub.add_parser("member", help="decide membership of phi by residue pairings")
    common(p)
    p.add_argument("phi", help="holomorphic polynomial, e.g. 'x*y'")
    p.add_argument("--battery", default="default", help="'default', 'small' or a battery file")
    p.add_argument("--quadrature", default="default", help="tensor-grid[:N], qmc[:N], mc[:N] or default")
    p.add_argument("--thresholds", help="low,high cancellation-ratio thresholds")
    p = sub.add_parser("verify", help="run the symbolic identity suite")
    common(p)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    cmd = {"resolve": cmd_resolve, "form": cmd_form, "member": cmd_member, "verify": cmd_verify}[args.command]
    try:
        return cmd(args)
    except (ParseError, UsageError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ExtDegreeBoundError as e:
        print(f"error: {e} (try a larger --degree-bound)", file=sys.stderr)
        return EXIT_EXT_BOUND
    except (ComplexError, SamplingError, ResidueError, ClosednessError, PairingError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE if isinstance(e, ComplexError) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
