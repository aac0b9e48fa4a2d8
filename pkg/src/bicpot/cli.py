"""Command-line surface: curves as CSV, verification/classification as JSON.

All physics flags are in reduced units (2m/hbar^2 = 1, energy = k^2).  Exit
codes: 0 success, 1 numeric failure (diagnostic on stderr), 2 flag/usage
error.  Identical flags always produce byte-identical output: floats are
printed at a fixed significant-digit precision, JSON keys are sorted, and
sweep rows are written in a-major, beta-minor order no matter how many worker
threads computed them.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics, model, ode

__all__ = ["main", "build_parser"]

# cmd_verify acceptance thresholds.
RESIDUAL_MAX = 1e-9
CLOSED_VS_QUAD_MAX = 1e-8
NUMEROV_REL_L2_MAX = 1e-5

# Prediction-vs-fit gate used by classify --fit and sweep.
FIT_REL_TOL = 0.05


def _fmt(x, precision):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.{precision}g}"


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header, rows, precision):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v, precision) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _json(obj, precision):
    def conv(v):
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, (float, np.floating)):
            return float(f"{v:.{precision}g}")
        if isinstance(v, np.integer):
            return int(v)
        return v

    return json.dumps(conv(obj), sort_keys=True, indent=2) + "\n"


def _params(args):
    try:
        return model.ModelParams(k=args.k, a=args.a, beta=args.beta, A=getattr(args, "A", 1.0))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


class UsageError(Exception):
    pass


def _potential_grid(beta, rmax, n):
    # r = 0 is kept when the potential has a finite limit there.
    if beta > 1.0:
        return rmax * np.arange(1, n + 1) / n
    return np.linspace(0.0, rmax, n)


def cmd_potential(args):
    p = _params(args)
    if not args.rmax > 0 or args.n < 2:
        raise UsageError("need rmax > 0 and n >= 2")
    r = _potential_grid(p.beta, args.rmax, args.n)
    v = model.potential(p, r)
    rows = [(ri, vi) for ri, vi in zip(r, v)]
    _write(args.out, _csv(["r", "V"], rows, args.precision))
    return 0


def cmd_wavefunction(args):
    p = _params(args)
    if not args.rmax > 0 or args.n < 2:
        raise UsageError("need rmax > 0 and n >= 2")
    path = "closed_form" if args.path == "closed" else "quadrature"
    if path == "closed_form" and p.beta > 1.0:
        raise UsageError("--path closed covers beta in [0, 1]; use --path quad")
    r = np.linspace(0.0, args.rmax, args.n)
    f = model.modulating_function(p, r, path)
    c = model.chi(p, r, path)
    rows = [(ri, fi, ci) for ri, fi, ci in zip(r, f, c)]
    _write(args.out, _csv(["r", "f", "chi"], rows, args.precision))
    return 0


def cmd_verify(args):
    p = _params(args)
    if not args.rmax > 0 or not 0 < args.h < args.rmax:
        raise UsageError("need rmax > 0 and 0 < h < rmax")
    n = int(round(args.rmax / args.h)) + 1
    g = model.GridSpec(0.0, args.rmax, n)

    # Max normalized Schroedinger defect on off-node points.
    r = g.points()
    keep = ~g.near_node_mask(p.k) & (r > 0)
    sub = r[keep][:: max(1, len(r[keep]) // 4000)]
    path = "closed_form" if p.beta <= 1.0 else "quadrature"
    cval, _, cdd = model.chi_derivatives(p, sub, path)
    vval = model.potential(p, sub)
    num = np.abs(cdd + (p.k * p.k - vval) * cval)
    den = np.maximum(np.maximum(p.k * p.k * np.abs(cval), np.abs(cdd)), 1e-300)
    residual_max = float(np.max(num / den))

    if p.beta <= 1.0:
        radii = np.linspace(args.rmax / 200.0, args.rmax, 200)
        closed = np.asarray(model.modulation_integral(p, radii, "closed_form"))
        quad = np.asarray(model.modulation_integral(p, radii, "quadrature"))
        closed_vs_quad = float(np.max(np.abs(closed - quad)))
    else:
        closed_vs_quad = None

    shot = ode.verify_eigenfunction(p, g)

    report = {
        "classification": asymptotics.classify(p).kind,
        "closedform_vs_quadrature_max": closed_vs_quad,
        "numerov_rel_l2_error": shot.rel_l2_error,
        "residual_max": residual_max,
        "scale_factor": shot.scale_factor,
    }
    _write(args.out, _json(report, args.precision))
    ok = (
        residual_max <= RESIDUAL_MAX
        and (closed_vs_quad is None or closed_vs_quad <= CLOSED_VS_QUAD_MAX)
        and shot.rel_l2_error <= NUMEROV_REL_L2_MAX
    )
    return 0 if ok else 1


def _classification_dict(cl):
    return {
        "kind": cl.kind,
        "normalizable": cl.normalizable,
        "exponent_p": cl.exponent_p,
        "rate_c": cl.rate_c,
        "power_q": cl.power_q,
        "finite_moments_up_to": cl.finite_moments_up_to,
        "potential_asymptotics": cl.potential_asymptotics,
    }


def _fit_for(p, cl, rmax, n):
    """Envelope fit plus prediction-vs-fit deviations for a normalizable p."""
    g = model.GridSpec(0.0, rmax, n)
    samples = model.sample(p, g, "chi")
    if cl.kind == "power_law":
        fit = asymptotics.fit_envelope(samples, "power")
        dev = {"q": abs(fit.fitted_q - cl.power_q) / cl.power_q}
    else:
        fit = asymptotics.fit_envelope(samples, "stretched_exp")
        dev = {
            "p": abs(fit.fitted_p - cl.exponent_p) / cl.exponent_p,
            "c": abs(fit.fitted_c - cl.rate_c) / cl.rate_c,
        }
    info = {
        "model": fit.model,
        "fit_window": list(fit.fit_window),
        "residual_rms": fit.residual_rms,
        "n_extrema": fit.n_extrema,
        "fitted_p": fit.fitted_p,
        "fitted_c": fit.fitted_c,
        "fitted_q": fit.fitted_q,
    }
    return fit, dev, info


def cmd_classify(args):
    p = _params(args)
    cl = asymptotics.classify(p)
    report = _classification_dict(cl)
    if args.fit:
        if cl.normalizable:
            _, dev, info = _fit_for(p, cl, args.rmax, args.n)
            report["fit"] = info
            report["fit_rel_deviation"] = dev
        else:
            report["fit"] = None
    _write(args.out, _json(report, args.precision))
    return 0


_SWEEP_HEADER = [
    "a", "beta", "kind", "normalizable", "exponent_p", "rate_c", "power_q",
    "finite_moments_up_to", "fitted_p", "fitted_c", "fitted_q", "fit_ok",
]


def _sweep_row(k, a, beta, rmax, n):
    p = model.ModelParams(k=k, a=a, beta=beta)
    cl = asymptotics.classify(p)
    fitted_p = fitted_c = fitted_q = None
    fit_ok = ""
    if cl.normalizable:
        _, dev, info = _fit_for(p, cl, rmax, n)
        fitted_p, fitted_c, fitted_q = info["fitted_p"], info["fitted_c"], info["fitted_q"]
        fit_ok = all(d <= FIT_REL_TOL for d in dev.values())
    return (
        a, beta, cl.kind, cl.normalizable, cl.exponent_p, cl.rate_c, cl.power_q,
        cl.finite_moments_up_to, fitted_p, fitted_c, fitted_q, fit_ok,
    )


def cmd_sweep(args):
    try:
        a_list = [float(s) for s in args.a_list.split(",") if s.strip()]
        beta_list = [float(s) for s in args.beta_list.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad sweep list: {exc}") from exc
    if not a_list or not beta_list:
        raise UsageError("empty sweep list")
    for b in beta_list:
        if not 0.0 <= b < 3.0:
            raise UsageError(f"beta = {b:g} outside [0, 3)")
    if args.k <= 0:
        raise UsageError("k must be positive")

    combos = [(a, b) for a in a_list for b in beta_list]  # a-major, beta-minor

    def work(ab):
        return _sweep_row(args.k, ab[0], ab[1], args.rmax, args.n)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(work, combos))
    else:
        rows = [work(ab) for ab in combos]
    _write(args.out, _csv(_SWEEP_HEADER, rows, args.precision))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="bicpot",
        description=(
            "Oscillating potentials with a bound state embedded in the continuum: "
            "curves, verification, and decay classification. All quantities are in "
            "reduced units 2m/hbar^2 = 1, so energies are k^2 and the potential is "
            "the rescaled 2mU/hbar^2."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, a_required=True):
        sp.add_argument("--k", type=float, required=True, help="wavenumber, E = k^2 (reduced units)")
        sp.add_argument("--a", type=float, required=a_required, help="coupling strength (a < 0 decays)")
        sp.add_argument("--beta", type=float, required=True, help="decay exponent of a/r^beta")
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        sp.add_argument("--precision", type=int, default=12, help="significant digits in text output")

    sp = sub.add_parser("potential", help="CSV of r,V")
    common(sp)
    sp.add_argument("--rmax", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_potential)

    sp = sub.add_parser("wavefunction", help="CSV of r,f,chi")
    common(sp)
    sp.add_argument("--A", type=float, default=1.0, help="normalization of f")
    sp.add_argument("--rmax", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--path", choices=["closed", "quad"], default="closed")
    sp.set_defaults(func=cmd_wavefunction)

    sp = sub.add_parser("verify", help="JSON verification report (exit 0 iff all metrics pass)")
    common(sp)
    sp.add_argument("--rmax", type=float, default=60.0)
    sp.add_argument("--h", type=float, default=1e-3, help="Numerov step")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("classify", help="JSON decay classification")
    common(sp)
    sp.add_argument("--fit", action="store_true", help="add an envelope fit on the analytic chi")
    sp.add_argument("--rmax", type=float, default=500.0)
    sp.add_argument("--n", type=int, default=12000)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("sweep", help="CSV classification/fit table over (a, beta)")
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--a-list", default="-0.5,-1,-3", dest="a_list")
    sp.add_argument("--beta-list", default="0,0.25,0.5,0.75,1", dest="beta_list")
    sp.add_argument("--rmax", type=float, default=500.0)
    sp.add_argument("--n", type=int, default=12000)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.add_argument("--precision", type=int, default=12)
    sp.set_defaults(func=cmd_sweep)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.exit(2, f"{ap.prog}: error: {exc}\n")
    except Exception as exc:  # numeric failure contract: diagnostic + exit 1
        print(f"{ap.prog}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
