"""Command-line front end: validation, analytics, sampling and campaigns.

Machine-readable output (JSON or CSV) goes to stdout or ``--out``; short
human summaries go to stderr.  Exit codes: 0 success, 1 validation or
usage errors, 2 exhausted compute budget.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .channel import induced_joint, load_channel
from .codebook import (
    Budget,
    RatePair,
    codebook_sizes,
    format_codebook_dump,
    sample_codebooks,
)
from .errors import (
    BudgetExceededError,
    ChannelFormatError,
    OffSupportError,
    UndefinedConditionalError,
)
from .experiments import ExperimentConfig, render_csv, run_tv_sweep
from .info import density_moments, mutual_informations
from .resolvability import (
    TypParams,
    corner_points,
    decompose_tv,
    first_order_certificate,
    first_order_region,
    region_slacks,
    second_order_eps_prime,
    second_order_rates,
    second_order_rhs,
    second_order_typ_params,
)

_CORNER_VARIANTS = {
    "A": ("conditional-x-given-y", "marginal-y"),
    "B": ("marginal-x", "conditional-y-given-x"),
}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", out)


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _budget(args) -> Budget:
    if getattr(args, "budget", None) is None:
        return Budget()
    return Budget(max_work=args.budget)


def _cmd_validate(args) -> int:
    ch = load_channel(args.channel)
    _emit_json(
        {"valid": True, "sizeX": ch.sizeX, "sizeY": ch.sizeY, "sizeZ": ch.sizeZ},
        args.out,
    )
    _say(f"channel OK: |X|={ch.sizeX} |Y|={ch.sizeY} |Z|={ch.sizeZ}")
    return 0


def _cmd_info(args) -> int:
    ch = load_channel(args.channel)
    joint = induced_joint(ch)
    iq = mutual_informations(joint)
    m1 = density_moments(joint, "conditional-x-given-y")
    m2 = density_moments(joint, "marginal-y")
    corner_a, corner_b = corner_points(iq)
    payload = {
        "sizeX": ch.sizeX,
        "sizeY": ch.sizeY,
        "sizeZ": ch.sizeZ,
        "iXZgY": iq.i_xz_given_y,
        "iYZ": iq.i_yz,
        "iXZ": iq.i_xz,
        "iYZgX": iq.i_yz_given_x,
        "sumRate": iq.sum_rate,
        "V1": m1.variance,
        "rho1": m1.third_abs,
        "V2": m2.variance,
        "rho2": m2.third_abs,
        "cornerA": list(corner_a),
        "cornerB": list(corner_b),
    }
    _emit_json(payload, args.out)
    _say(
        f"I(X;Z|Y)={iq.i_xz_given_y:.6g} I(Y;Z)={iq.i_yz:.6g} "
        f"I(X,Y;Z)={iq.sum_rate:.6g}"
    )
    return 0


def _cmd_region(args) -> int:
    ch = load_channel(args.channel)
    iq = mutual_informations(induced_joint(ch))
    inside = first_order_region(iq, args.r1, args.r2, strict=args.strict)
    slacks = region_slacks(iq, args.r1, args.r2)
    tightest = min(slacks, key=slacks.get)
    binding = "sum-rate" if tightest == "sum" else tightest
    payload = {
        "r1": args.r1,
        "r2": args.r2,
        "strict": bool(args.strict),
        "inside": bool(inside),
        "slacks": slacks,
        "binding": binding,
    }
    _emit_json(payload, args.out)
    word = "inside" if inside else "outside"
    _say(f"({args.r1:g}, {args.r2:g}) is {word} (binding: {binding})")
    return 0


def _cmd_rates(args) -> int:
    ch = load_channel(args.channel)
    joint = induced_joint(ch)
    iq = mutual_informations(joint)
    v1, v2 = _CORNER_VARIANTS[args.corner]
    m1 = density_moments(joint, v1)
    m2 = density_moments(joint, v2)
    rates = second_order_rates(iq, m1, m2, args.eps, args.c, args.n, args.corner)
    size1, size2 = codebook_sizes(rates)
    ep1 = second_order_eps_prime(m1, args.eps, args.d, args.n)
    ep2 = second_order_eps_prime(m2, args.eps, args.d, args.n)
    typ = second_order_typ_params(m1, m2, args.eps, args.d, args.n)
    payload = {
        "n": args.n,
        "corner": args.corner,
        "eps": args.eps,
        "c": args.c,
        "d": args.d,
        "R1": rates.r1,
        "R2": rates.r2,
        "M1": size1,
        "M2": size2,
        "R1_eff": math.log(size1) / args.n,
        "R2_eff": math.log(size2) / args.n,
        "epsPrime1": ep1,
        "epsPrime2": ep2,
        "eps1": typ.eps1,
        "eps2": typ.eps2,
    }
    _emit_json(payload, args.out)
    _say(
        f"n={args.n} corner {args.corner}: R1={rates.r1:.6g} R2={rates.r2:.6g} "
        f"M1={size1} M2={size2}"
    )
    return 0


def _cmd_bounds(args) -> int:
    ch = load_channel(args.channel)
    joint = induced_joint(ch)
    iq = mutual_informations(joint)
    if args.kind == "first":
        if args.r1 is None or args.r2 is None:
            raise ValueError("--kind first needs --r1 and --r2")
        nominal = first_order_certificate(iq, args.r1, args.r2, args.n, ch.sizeY, ch.sizeZ)
        size1, size2 = codebook_sizes(RatePair(args.r1, args.r2, args.n))
        effective = first_order_certificate(
            iq,
            math.log(size1) / args.n,
            math.log(size2) / args.n,
            args.n,
            ch.sizeY,
            ch.sizeZ,
        )
        payload = {
            "kind": "first",
            "n": args.n,
            "r1": args.r1,
            "r2": args.r2,
            "M1": size1,
            "M2": size2,
            "nominal": nominal.to_record(),
            "effective": effective.to_record(),
        }
        headline = nominal
    else:
        v1, v2 = _CORNER_VARIANTS[args.corner]
        m1 = density_moments(joint, v1)
        m2 = density_moments(joint, v2)
        rates = second_order_rates(iq, m1, m2, args.eps, args.c, args.n, args.corner)
        size1, size2 = codebook_sizes(rates)
        ep1 = second_order_eps_prime(m1, args.eps, args.d, args.n)
        ep2 = second_order_eps_prime(m2, args.eps, args.d, args.n)
        nominal = second_order_rhs(
            ep1, ep2, rates.r1, rates.r2, args.n, args.c, args.d, ch.sizeY, ch.sizeZ
        )
        effective = second_order_rhs(
            ep1,
            ep2,
            math.log(size1) / args.n,
            math.log(size2) / args.n,
            args.n,
            args.c,
            args.d,
            ch.sizeY,
            ch.sizeZ,
        )
        payload = {
            "kind": "second",
            "n": args.n,
            "corner": args.corner,
            "eps": args.eps,
            "c": args.c,
            "d": args.d,
            "R1": rates.r1,
            "R2": rates.r2,
            "M1": size1,
            "M2": size2,
            "epsPrime1": ep1,
            "epsPrime2": ep2,
            "nominal": nominal.to_record(),
            "effective": effective.to_record(),
        }
        headline = nominal
    _emit_json(payload, args.out)
    value = headline.value
    shown = f"{value:.6g}" if math.isfinite(value) else "inf"
    _say(f"{headline.name}: value={shown} vacuous={headline.vacuous}")
    return 0


def _cmd_sample(args) -> int:
    ch = load_channel(args.channel)
    cb = sample_codebooks(ch, RatePair(args.r1, args.r2, args.n), args.seed, _budget(args))
    _emit(format_codebook_dump(cb), args.out)
    _say(f"sampled M1={cb.M1} M2={cb.M2} codewords at n={cb.n} (seed {args.seed})")
    return 0


def _cmd_tv(args) -> int:
    ch = load_channel(args.channel)
    budget = _budget(args)
    cb = sample_codebooks(ch, RatePair(args.r1, args.r2, args.n), args.seed, budget)
    dec = decompose_tv(ch, cb, TypParams(args.eps1, args.eps2, args.n), budget)
    payload = {
        "seed": args.seed,
        "n": args.n,
        "M1": cb.M1,
        "M2": cb.M2,
        "R1_eff": cb.effective_r1,
        "R2_eff": cb.effective_r2,
        "eps1": args.eps1,
        "eps2": args.eps2,
        "tv": dec.tv,
        "pAtyp1": dec.p_atyp1,
        "pAtyp2": dec.p_atyp2,
        "typExcess": dec.typ_excess,
        "boundSum": dec.bound_sum,
    }
    _emit_json(payload, args.out)
    _say(f"tv={dec.tv:.6g} decomposition sum={dec.bound_sum:.6g}")
    return 0


def _cmd_experiment(args) -> int:
    ch = load_channel(args.channel)
    n_list = tuple(int(part) for part in args.n.split(",") if part.strip())
    cfg = ExperimentConfig(
        channel=ch,
        n_list=n_list,
        trials=args.trials,
        seed=args.seed,
        schedule=args.schedule,
        r1=args.r1,
        r2=args.r2,
        eps1=args.eps1,
        eps2=args.eps2,
        eps=args.eps,
        c=args.c,
        d=args.d,
        corner=args.corner,
        timings=args.timings,
        budget=_budget(args),
    )
    records = run_tv_sweep(cfg)
    _emit(render_csv(records), args.out)
    dest = args.out if args.out else "stdout"
    _say(f"{len(records)} records ({len(n_list)} block lengths) -> {dest}")
    return 0


def _add_channel(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--channel", required=True, help="path to a channel JSON file")


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="write machine output here instead of stdout")


def _add_budget(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--budget",
        type=int,
        default=None,
        help="cap on enumeration work in cells (default 1e10)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macresolve",
        description="Exact accounting of codebook-induced output statistics for two-sender channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel file and report its sizes")
    _add_channel(p)
    _add_out(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("info", help="information quantities and density moments")
    _add_channel(p)
    _add_out(p)
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("region", help="test a rate pair against the achievable region")
    _add_channel(p)
    _add_out(p)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--strict", action="store_true", help="require strict inequalities")
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("rates", help="finite-length rate schedule at a corner point")
    _add_channel(p)
    _add_out(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--c", type=float, default=1.5)
    p.add_argument("--d", type=float, default=0.25)
    p.add_argument("--corner", choices=("A", "B"), default="A")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("bounds", help="closed-form tail certificates at given rates")
    _add_channel(p)
    _add_out(p)
    p.add_argument("--kind", choices=("first", "second"), default="first")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=float, default=None)
    p.add_argument("--r2", type=float, default=None)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--c", type=float, default=1.5)
    p.add_argument("--d", type=float, default=0.25)
    p.add_argument("--corner", choices=("A", "B"), default="A")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("sample", help="draw a codebook pair and dump it as text")
    _add_channel(p)
    _add_out(p)
    _add_budget(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("tv", help="exact distance decomposition for one codebook draw")
    _add_channel(p)
    _add_out(p)
    _add_budget(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--eps2", type=float, default=0.1)
    p.set_defaults(func=_cmd_tv)

    p = sub.add_parser("experiment", help="seeded sweep over block lengths, CSV out")
    _add_channel(p)
    _add_out(p)
    _add_budget(p)
    p.add_argument("--n", required=True, help="comma-separated block lengths, e.g. 2,4,6,8")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--schedule", choices=("fixed", "corner-offset", "second-order"), default="fixed")
    p.add_argument("--r1", type=float, default=None)
    p.add_argument("--r2", type=float, default=None)
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--eps2", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--c", type=float, default=1.5)
    p.add_argument("--d", type=float, default=0.25)
    p.add_argument("--corner", choices=("A", "B"), default="A")
    p.add_argument("--timings", action="store_true", help="record real per-trial runtimes")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; those are validation errors here
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        _say(f"budget exceeded: {exc}")
        return 2
    except (
        ChannelFormatError,
        OffSupportError,
        UndefinedConditionalError,
        ValueError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        _say(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
