"""Command-line front end.

Every subcommand prints one JSON document (sorted keys) on stdout or to
``--output``.  Exit status: 0 ok, 2 invalid input, 3 guard exceeded,
4 internal invariant violated.  Errors print a single line
``error: <kind>: <reason>`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .errors import GuardExceeded, InvalidInput, InvariantViolation

EXIT_INVALID, EXIT_GUARD, EXIT_INVARIANT = 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message.replace("\n", " "))


def _form(args):
    from .fqm import DiscriminantForm

    return DiscriminantForm(args.N, args.Nprime)


def _subgroup(form, text: str):
    from .fqm import subgroup_from_generators, subgroup_from_json

    doc = _load_json(text)
    if isinstance(doc, list):
        return subgroup_from_generators(form, doc)
    H = subgroup_from_json({"N": form.N, "Nprime": form.Nprime, **doc})
    if H.form != form:
        raise InvalidInput("subgroup belongs to a different form")
    return H


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"bad JSON: {exc}") from None


def _read_file(path: str):
    try:
        with open(path) as fh:
            return _load_json(fh.read())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None


def _label(args):
    from .cusps import make_label

    return make_label(args.star, args.a, args.c)


def _type_json(H, witness):
    return {"generators": [list(g) for g in H.canonical_generators], "order": H.order,
            "witness": witness.to_json()}


# --- subcommands ------------------------------------------------------------------------

def cmd_cusps(args):
    from .cusps import cusp_classes, enumerate_types

    form = _form(args)
    if args.count:
        return {"count": len(cusp_classes(form)), "types": len(enumerate_types(form))}
    out = {}
    if not args.classes:
        out["types"] = [_type_json(H, w) for H, w in enumerate_types(form)]
    if not args.types:
        out["classes"] = [S.to_json() for S in cusp_classes(form)]
    return out


def cmd_types(args):
    from .cusps import enumerate_types, types_count_formula

    form = _form(args)
    types = enumerate_types(form)
    out = {"count": len(types)}
    if args.formula:
        out["formula"] = types_count_formula(form.N, form.Nprime)
    if args.list:
        out["types"] = [_type_json(H, w) for H, w in types]
    return out


def cmd_invariants(args):
    from .fqm import fraction_str
    from .invariants import invariant_space_certificate, types_span, types_span_formula

    form = _form(args)
    out = {}
    if args.dim:
        cert = invariant_space_certificate(form)
        out["invariant_dim"] = {"dim": cert.dim, "lower": cert.lower, "upper": cert.upper,
                                "method": cert.method, "prime": cert.prime}
    if args.span or args.relations or not args.dim:
        dim, kernel = types_span(form)
        out["span_dim"] = dim
        out["span_formula"] = types_span_formula(form.N, form.Nprime)
        if args.relations:
            out["relations"] = [[fraction_str(x) for x in v] for v in kernel]
    return out


def cmd_relations(args):
    from .fqm import fraction_str
    from .invariants import relation_coefficients, relation_in_kernel

    out = {}
    for reading in ("literal", "non_overlapping"):
        coeffs = relation_coefficients(args.p, args.r, args.rprime, reading)
        out[reading] = {
            "in_kernel": relation_in_kernel(args.p, args.r, args.rprime, reading),
            "coefficients": [{"generators": [list(g) for g in H.canonical_generators], "coeff": fraction_str(c)}
                             for H, c in sorted(coeffs.items(), key=lambda t: t[0].canonical_generators) if c],
        }
    return out


def cmd_zdiv(args):
    from .cusps import cusp_classes
    from .divisors import BoundaryDivisor, special_divisor

    form = _form(args)
    H = _subgroup(form, args.H)
    d = special_divisor(form, H)
    if args.perturb:
        # type-inconstant perturbation: bump one member of a type shared by several classes
        rng = random.Random(args.seed)
        classes = cusp_classes(form)
        shared = [S for S in classes if sum(T.type == S.type for T in classes) > 1]
        if not shared:
            raise InvalidInput("every type is carried by a single cusp class; nothing to perturb")
        S = rng.choice(shared)
        d = d + BoundaryDivisor(form, {S: Fraction(rng.choice([-2, -1, 1, 2]))})
    return d.to_json()


def cmd_is_special(args):
    from .divisors import characterization_check, divisor_from_json, is_special

    form = _form(args)
    d = divisor_from_json(form, _read_file(args.file))
    cert = is_special(form, d)
    out = cert.to_json() if cert is not None else {"special": False}
    if args.explain:
        rep = characterization_check(form, d)
        out["characterization"] = {"regime": rep.regime, "conditions": rep.conditions}
    return out


def cmd_weyl(args):
    from .divisors import levels_of_cusp, weyl_component_b2, weyl_component_constant
    from .fqm import fraction_str

    form = _form(args)
    H = _subgroup(form, args.H)
    lab = _label(args)
    Nz, Nzt = levels_of_cusp(form, lab)
    return {"N_z": Nz, "N_z_tilde": Nzt,
            "constant_term": fraction_str(weyl_component_constant(form, H, lab)),
            "b2_component": fraction_str(weyl_component_b2(form, H, lab))}


def cmd_eta(args):
    from .fqm import fraction_str
    from .qeta import eta_expansion, eta_identity_check, eta_identity_sides, psi_factors

    if args.terms < 1:
        raise InvalidInput("--terms must be positive")
    if args.eta_cmd == "identity":
        res = eta_identity_check(args.p, args.r, args.terms)
        x = res.constant_exponent()
        out = {"holds": res.holds, "constant_exponent": None if x is None else fraction_str(x)}
        if args.series:
            n = args.p ** args.r
            lhs, rhs = eta_identity_sides(args.p, args.r, Fraction(args.terms, n))
            out["lhs"], out["rhs"] = lhs.to_json(), rhs.to_json()
        return out
    form = _form(args)
    f1, f2 = psi_factors(form, _label(args))
    # --terms counts grid slots q^(lead + i/m) of each factor
    s1, s2 = (eta_expansion(f.alpha, f.beta, f.alpha / 24 + Fraction(args.terms - 1, f.alpha.denominator))
              for f in (f1, f2))
    return {"factors": [f1.to_json(), f2.to_json()], "z1": s1.to_json(), "z2": s2.to_json()}


def cmd_cross_validate(args):
    from .cusps import enumerate_types
    from .qeta import cross_validate_boundary

    form = _form(args)
    if args.H:
        targets = [_subgroup(form, args.H)]
    else:
        targets = [H for H, _ in enumerate_types(form)]
    rows = []
    for H in targets:
        doc = cross_validate_boundary(form, H).to_json()
        doc["generators"] = [list(g) for g in H.canonical_generators]
        rows.append(doc)
    return {"all_constant": all(r["constant"] for r in rows), "types": rows}


# --- parser -------------------------------------------------------------------------------

def _add_form(p):
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--Nprime", type=int, default=1)


def _add_label(p):
    p.add_argument("--star", type=int, choices=(1, 2), default=1)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--c", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized sampling")
    common.add_argument("--output", default=argparse.SUPPRESS, help="write JSON here instead of stdout")
    parser = _Parser(prog="spbdiv", description=__doc__.splitlines()[0], parents=[common])
    parser.set_defaults(seed=0, output=None)
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("cusps", parents=[common], help="types and cusp classes")
    _add_form(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--classes", action="store_true")
    g.add_argument("--types", action="store_true")
    g.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_cusps)

    p = sub.add_parser("types", parents=[common], help="count of types")
    _add_form(p)
    p.add_argument("--formula", action="store_true", help="also report the closed formula")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("invariants", parents=[common], help="Weil invariants and span of types")
    _add_form(p)
    p.add_argument("--dim", action="store_true")
    p.add_argument("--span", action="store_true")
    p.add_argument("--relations", action="store_true")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("relations", parents=[common], help="prime-power relation among types")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--rprime", type=int, required=True)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("zdiv", parents=[common], help="special divisor Z(H)")
    _add_form(p)
    p.add_argument("--H", required=True, help='subgroup JSON ({"generators": [[w,x,y,z], ...]})')
    p.add_argument("--perturb", action="store_true", help="add a random type-inconstant perturbation")
    p.set_defaults(func=cmd_zdiv)

    p = sub.add_parser("is-special", parents=[common], help="decide whether a boundary divisor is special")
    _add_form(p)
    p.add_argument("--file", required=True)
    p.add_argument("--explain", action="store_true", help="also evaluate the explicit characterization")
    p.set_defaults(func=cmd_is_special)

    p = sub.add_parser("divisor", parents=[common], help="zH / is-special under one name")
    dsub = p.add_subparsers(dest="divisor_cmd", required=True, parser_class=_Parser)
    q = dsub.add_parser("zH", parents=[common])
    _add_form(q)
    q.add_argument("--H", required=True)
    q.add_argument("--perturb", action="store_true")
    q.set_defaults(func=cmd_zdiv)
    q = dsub.add_parser("is-special", parents=[common])
    _add_form(q)
    q.add_argument("--file", required=True)
    q.add_argument("--explain", action="store_true")
    q.set_defaults(func=cmd_is_special)

    p = sub.add_parser("weyl", parents=[common], help="Weyl vector components at a cusp")
    _add_form(p)
    p.add_argument("--H", required=True)
    _add_label(p)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("eta", parents=[common], help="eta-product expansions")
    esub = p.add_subparsers(dest="eta_cmd", required=True, parser_class=_Parser)
    q = esub.add_parser("identity", parents=[common])
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--r", type=int, default=1)
    q.add_argument("--terms", type=int, default=50)
    q.add_argument("--series", action="store_true", help="include both expansions")
    q.set_defaults(func=cmd_eta)
    q = esub.add_parser("psi", parents=[common])
    _add_form(q)
    _add_label(q)
    q.add_argument("--terms", type=int, default=10, help="number of exponent slots per factor")
    q.set_defaults(func=cmd_eta)

    p = sub.add_parser("cross-validate", parents=[common], help="eta-quotient orders against Z(H)")
    _add_form(p)
    p.add_argument("--H")
    p.set_defaults(func=cmd_cross_validate)
    return parser


def run(argv=None) -> tuple[int, dict | None]:
    """Parse and execute; return (exit status, JSON document)."""
    status, doc, _ = _execute(argv)
    return status, doc


def _execute(argv):
    output = None
    try:
        args = build_parser().parse_args(argv)
        output = args.output
        random.seed(args.seed)
        return 0, args.func(args), output
    except InvalidInput as exc:
        return _fail("invalid-input", exc, EXIT_INVALID)
    except GuardExceeded as exc:
        return _fail("guard-exceeded", exc, EXIT_GUARD)
    except InvariantViolation as exc:
        return _fail("invariant-violation", exc, EXIT_INVARIANT)
    except (ValueError, ZeroDivisionError) as exc:
        return _fail("invalid-input", exc, EXIT_INVALID)


def _fail(kind: str, exc: Exception, status: int):
    msg = " ".join(str(exc).split())
    print(f"error: {kind}: {msg}", file=sys.stderr)
    return status, None, None


def main(argv=None) -> int:
    status, doc, output = _execute(argv)
    if doc is not None:
        text = json.dumps(doc, sort_keys=True) + "\n"
        if output:
            with open(output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
