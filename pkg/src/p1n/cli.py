"""Command-line front end.

Every subcommand writes one report (JSON, or CSV for spectra) and exits with
0 when all items pass, 2 when a verification item fails and 1 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import P1nError
from .reports import RelationItem, RelationReport

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _report(command: str, params: dict, report: RelationReport, result=None) -> dict:
    return {
        "command": command,
        "parameters": params,
        "items": [it.to_json() for it in report.items],
        "result": result,
        "pass": report.passed,
    }


# -- subcommands -------------------------------------------------------------

def cmd_verify_clifford(args) -> dict:
    from .clifford import (build_gamma_5d, build_gamma_8d, build_gamma_generic,
                           check_product_constraint, spin_isospin_split, spin_tensor, verify_clifford)

    name = args.set
    if name == "5d":
        g = build_gamma_5d()
    elif name == "8d":
        g = build_gamma_8d()
    elif name.startswith("generic:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad generic set {name!r}")
        g = build_gamma_generic(n)
    else:
        raise UsageError(f"unknown set {name!r}")
    report = verify_clifford(g)
    items = []
    result = {"dim": g.dim, "matrices": len(g)}
    if len(g) == 5:
        held = check_product_constraint(g).holds_17
        items.append(RelationItem("gamma0=gamma1*gamma2*gamma3*gamma4", held))
    if len(g) == 7 and g.designated is not None:
        items.append(RelationItem("Gamma=-i*Gamma1...Gamma6", check_product_constraint(g).holds_17prime))
        restricted = check_product_constraint(g.restrict(range(5))).holds_17
        items.append(RelationItem("Gamma0!=Gamma1*Gamma2*Gamma3*Gamma4", restricted is False))
    if len(g.metric.spatial) >= 4:
        pair = spin_isospin_split(spin_tensor(g).restrict(range(1, 5)))
        report = report + pair.bracket_report()
    report = report + RelationReport("products", tuple(items))
    return _report("verify clifford", {"set": name}, report, result)


def cmd_verify_kdp(args) -> dict:
    from .kdp import build_beta15, build_beta6, covariance_check, psquared_check, so5_closure_check, verify_kdp

    bset = build_beta6() if args.rep == "6" else build_beta15()
    report = verify_kdp(bset) + covariance_check(bset) + so5_closure_check(bset) \
        + psquared_check(bset, trials=args.trials, seed=args.seed)
    b5sq = bset[5] @ bset[5]
    result = {"dim": bset.dim, "rank_beta5_sq": b5sq.rank(),
              "beta5_sq_diag": [int(b5sq[i, i].re) for i in range(bset.dim)]}
    return _report("verify kdp", {"rep": args.rep, "seed": args.seed, "trials": args.trials}, report, result)


def cmd_classify(args) -> dict:
    from .classify import classify, equation_spec, is_ptc_pattern

    content = classify(equation_spec(args.equation))
    spec_dim = equation_spec(args.equation).dim
    report = RelationReport("classify", (RelationItem("dimension", content.dim == spec_dim),))
    result = dict(content.to_dict())
    result["ptc"] = is_ptc_pattern(content)
    result["label"] = str(content)
    return _report("classify", {"equation": args.equation}, report, result)


def cmd_fw(args) -> dict:
    from .fw import canonical_family, fw_apply, fw_spin_residuals, fw_split_kdp, fw_unitary
    from .kdp import build_beta15, build_beta6

    if len(args.momentum) != 4:
        raise UsageError("--momentum needs four components")
    family = canonical_family(args.equation)
    fu = fw_unitary(family, args.momentum, args.kappa, args.form)
    params = {"equation": args.equation, "form": args.form, "kappa": args.kappa, "momentum": args.momentum}
    identity = bool(np.array_equal(fu.U, np.eye(fu.U.shape[0])))
    items = [RelationItem("unitarity", fu.unitarity <= 1e-12, fu.unitarity)]
    if family.startswith("kdp"):
        bset = build_beta6() if family == "kdp6" else build_beta15()
        split = fw_split_kdp(bset, args.momentum, args.kappa, args.form)
        items.append(RelationItem("coupling", split.passed, split.coupling_residual))
        result = {"U_is_identity": identity, "principal_residual": split.principal_residual,
                  "principal_eigenvalues": [round(float(x), 12) for x in np.linalg.eigvalsh(split.principal)],
                  "redundant_max_abs": float(np.max(np.abs(split.redundant)))}
    else:
        res = fw_apply(family, args.momentum, args.kappa, args.form)
        items.append(RelationItem("foldy-shirokov", res.residual <= 1e-10, res.residual))
        spin = fw_spin_residuals(res)
        items.append(RelationItem("spin-commutes", spin <= 1e-9, spin))
        result = {"U_is_identity": identity, "energy": res.energy}
    return _report("fw", params, RelationReport("fw", tuple(items)), result)


def cmd_commutators(args) -> dict:
    from .clifford import build_gamma_5d, build_gamma_generic, spin_tensor
    from .realization import (MomentumGrid, admissible_suite, build_class1, build_class3,
                              commutator_residuals, gaussian_suite, invariance_report, little_group_spin)

    grid = MomentumGrid(args.n, args.grid_points, args.extent)
    params = {"class": args.cls, "n": args.n, "spin": args.spin, "grid_points": args.grid_points,
              "extent": args.extent, "mass": args.mass, "states": args.states, "seed": args.seed,
              "method": args.method, "mutate": args.mutate}
    if args.cls == "I":
        spin = None
        if args.spin == "dirac":
            spin = spin_tensor(build_gamma_5d() if args.n == 4 else build_gamma_generic(args.n))
        gens = build_class1(grid, spin, args.mass, boost_spin_sign=-1 if args.mutate else 1)
        states = gaussian_suite(grid, args.states, gens.spin_dim, args.seed, kappa_or_eta=args.mass)
        report = commutator_residuals(gens, states, args.method) + invariance_report(gens, states)
    else:
        if args.mutate:
            raise UsageError("--mutate applies to class I")
        s0, sab = (None, None) if args.spin == "scalar" else little_group_spin(args.n)
        gens = build_class3(grid, s0, sab, args.mass)
        states = admissible_suite(grid, args.mass, args.states, gens.spin_dim, args.seed)
        report = commutator_residuals(gens, states, args.method)
    result = {"instances": len(report), "max_residual": report.max_residual()}
    return _report("commutators", params, report, result)


def cmd_evolve(args) -> dict:
    from .realization import GridWavefunction, evolve

    state = GridWavefunction.load(args.state)
    out = evolve(state, args.hamiltonian, args.time)
    drift = abs(out.norm() - state.norm())
    if args.output_state:
        out.save(args.output_state)
    items = (RelationItem("norm", drift <= 1e-10, drift),)
    params = {"state": str(args.state), "time": args.time, "hamiltonian": args.hamiltonian,
              "output_state": args.output_state}
    return _report("evolve", params, RelationReport("evolve", items), {"norm": out.norm()})


def cmd_spectrum(args) -> str:
    from .realization import GridWavefunction
    from .spectrum import mass_distribution

    state = GridWavefunction.load(args.state)
    md = mass_distribution(state, args.kappa, args.bins, include_negative=args.negative)
    return md.to_csv()


def cmd_gaussian(args) -> dict:
    from .realization import MomentumGrid, gaussian_state

    grid = MomentumGrid(args.n, args.grid_points, args.extent)
    center = args.center or [0.0] * args.n
    if len(center) != args.n:
        raise UsageError("--center needs one entry per axis")
    spin = np.zeros(args.spin_dim, dtype=complex)
    spin[args.component] = 1.0
    state = gaussian_state(grid, center, args.sigma, spin, args.mass, args.cls)
    state.save(args.output_state)
    params = {"n": args.n, "grid_points": args.grid_points, "extent": args.extent, "center": center,
              "sigma": args.sigma, "spin_dim": args.spin_dim, "component": args.component,
              "mass": args.mass, "class": args.cls, "output_state": args.output_state}
    return _report("gaussian", params, RelationReport("gaussian", ()), {"norm": state.norm()})


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .classify import EQUATIONS
    from .fw import ALIASES, FAMILIES, FORMS
    from .realization import HAMILTONIANS

    p = Parser(prog="p1n", description="Verify and classify P(1,4) wave-equation representations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    v = sub.add_parser("verify", help="exact algebra checks")
    vsub = v.add_subparsers(dest="target", required=True, parser_class=Parser)
    vc = vsub.add_parser("clifford", help="anticommutators and product constraints")
    vc.add_argument("--set", default="5d", help="5d, 8d or generic:<n>")
    vc.set_defaults(func=cmd_verify_clifford)
    vk = vsub.add_parser("kdp", help="trilinear relation, covariance, P^2 invariant")
    vk.add_argument("--rep", choices=["6", "15"], default="15")
    vk.add_argument("--trials", type=int, default=5)
    vk.add_argument("--seed", type=int, default=0)
    vk.set_defaults(func=cmd_verify_kdp)

    c = sub.add_parser("classify", help="representation content of an equation")
    c.add_argument("--equation", choices=EQUATIONS, required=True)
    c.set_defaults(func=cmd_classify)

    f = sub.add_parser("fw", help="Foldy-Wouthuysen transformation at one momentum")
    f.add_argument("--equation", choices=FAMILIES + tuple(ALIASES), required=True)
    f.add_argument("--momentum", type=_floats, required=True)
    f.add_argument("--kappa", type=_positive, default=1.0)
    f.add_argument("--form", choices=FORMS, default="literal")
    f.set_defaults(func=cmd_fw)

    m = sub.add_parser("commutators", help="generator algebra on a momentum grid")
    m.add_argument("--class", dest="cls", choices=["I", "III"], default="I")
    m.add_argument("--n", type=int, default=4)
    m.add_argument("--spin", choices=["scalar", "dirac"], default="scalar")
    m.add_argument("--grid-points", type=int, default=32)
    m.add_argument("--extent", type=_positive, default=10.0)
    m.add_argument("--mass", "--kappa", "--eta", dest="mass", type=_positive, default=1.0)
    m.add_argument("--states", type=int, default=2)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--method", choices=["normal_ordered", "sequential"], default="normal_ordered")
    m.add_argument("--mutate", action="store_true", help="flip the sign of the boost spin term")
    m.set_defaults(func=cmd_commutators)

    e = sub.add_parser("evolve", help="free evolution of a stored state")
    e.add_argument("--state", required=True)
    e.add_argument("--time", type=float, required=True)
    e.add_argument("--hamiltonian", choices=HAMILTONIANS, default="irreducible_p0")
    e.add_argument("--output-state")
    e.set_defaults(func=cmd_evolve)

    s = sub.add_parser("spectrum", help="mass distribution of a stored state (CSV)")
    s.add_argument("--state", required=True)
    s.add_argument("--kappa", type=_positive, default=1.0)
    s.add_argument("--bins", type=int, default=128)
    s.add_argument("--negative", action="store_true", help="add the p4 < 0 branch")
    s.set_defaults(func=cmd_spectrum)

    g = sub.add_parser("gaussian", help="write a Gaussian test state")
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--grid-points", type=int, default=32)
    g.add_argument("--extent", type=_positive, default=10.0)
    g.add_argument("--center", type=_floats)
    g.add_argument("--sigma", type=_positive, default=1.0)
    g.add_argument("--spin-dim", type=int, default=1)
    g.add_argument("--component", type=int, default=0)
    g.add_argument("--mass", "--kappa", "--eta", dest="mass", type=_positive, default=1.0)
    g.add_argument("--class", dest="cls", choices=["I", "III"], default="I")
    g.add_argument("--output-state", required=True)
    g.set_defaults(func=cmd_gaussian)
    return p


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        out = args.func(args)
    except (UsageError, P1nError, KeyError, ValueError, OSError) as exc:
        print(f"p1n: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(out, str):
        _emit(out, args.output)
        return EXIT_OK
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return EXIT_OK if out["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
