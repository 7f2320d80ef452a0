"""Command-line front end.

Subcommands: ``relations``, ``character``, ``vo``, ``eval`` and ``hw``.  Every
subcommand prints a report (text or JSON) and exits with status 1 when any
check failed, 2 on a configuration error and 0 otherwise.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .report import ConfigError, Report, RunConfig

__all__ = ["main", "build_parser", "run"]

CHARACTER_WHICH = ("brute", "f221", "f222", "f223", "f224", "compare")
# command-line names of the closed forms
FORMULA_ALIASES = {"f221": "fock", "f222": "ker", "f223": "coker", "f224": "coker10"}
DEFAULT_ALPHA = {"relations": "0", "character": "1/2", "vo": "1", "eval": "0", "hw": "0"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="superboson",
        description="Exact checks for the level-one free-boson realization of "
                    "U_q(sl-hat(M+1|N+1)).  Rationals are given as p/q.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, degree, alpha_help=True):
        sp.add_argument("--M", type=int, default=1, help="default 1")
        sp.add_argument("--N", type=int, default=0, help="default 0")
        if alpha_help:
            sp.add_argument("--alpha", default=None,
                            help="module F(alpha; beta): p/q, or (1,0) / (0,1) for the two "
                                 "special modules")
            sp.add_argument("--beta", default="0", help="p/q, default 0")
        sp.add_argument("--degree", type=int, default=degree,
                        help="monomial degree / q-degree cut (default {})".format(degree))
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    sp = sub.add_parser("relations", help="defining relations on a truncated Fock module "
                                          "(default F(0;0), degree 2, modes 2)")
    common(sp, 2)
    sp.add_argument("--modes", type=int, default=2, help="mode bound |m|,|n| (default 2)")
    sp.add_argument("--relations", default="",
                    help="comma separated catalogue ids, e.g. 1.14,level (default all)")

    sp = sub.add_parser("character", help="characters of Fock modules (default F(1/2;0))")
    sp.add_argument("which", choices=CHARACTER_WHICH)
    common(sp, 6)
    sp.add_argument("--part", choices=("full", "ker", "coker"), default="full")
    sp.add_argument("--series", default=None, help="also write the computed series here")

    sp = sub.add_parser("vo", help="intertwining checks of the vertex operators "
                                   "(default F(1;0), degree 2)")
    common(sp, 2)
    sp.add_argument("--kind", choices=("phi", "phistar", "psi", "psistar"), default="phi")
    sp.add_argument("--modes", type=int, default=2, help="mode bound for the helper identities")
    sp.add_argument("--convention", choices=("printed", "repaired"), default="printed",
                    help="seed cocycle and grading convention (default printed)")

    sp = sub.add_parser("eval", help="relations on the evaluation modules as matrix identities")
    common(sp, 0, alpha_help=False)
    sp.add_argument("--modes", type=int, default=2)
    sp.add_argument("--relations", default="")

    sp = sub.add_parser("hw", help="classify highest weight vacua")
    common(sp, 0, alpha_help=False)
    return p


def _config(ns) -> RunConfig:
    alpha = getattr(ns, "alpha", None)
    if alpha is None:
        alpha = DEFAULT_ALPHA[ns.command]
    rels = tuple(x.strip() for x in getattr(ns, "relations", "").split(",") if x.strip())
    return RunConfig(M=ns.M, N=ns.N, alpha=alpha, beta=getattr(ns, "beta", "0"),
                     degree=ns.degree, modes=getattr(ns, "modes", 2), relations=rels,
                     part=getattr(ns, "part", "full"), kind=getattr(ns, "kind", "phi"),
                     format=ns.format, out=ns.out, jobs=ns.jobs).validate()


def _need10(cfg: RunConfig, what: str) -> None:
    if (cfg.M, cfg.N) != (1, 0):
        raise ConfigError("M/N", "{} is implemented for (M, N) = (1, 0) only".format(what))


# ---------------------------------------------------------------------------
# relations


def _relation_ids(cfg: RunConfig) -> list:
    from .algebra import ALL_RELATIONS
    rels = list(cfg.relations) or list(ALL_RELATIONS)
    bad = [r for r in rels if r not in ALL_RELATIONS]
    if bad:
        raise ConfigError("relations", "unknown ids {} (known: {})".format(
            ", ".join(bad), ", ".join(ALL_RELATIONS)))
    return rels


def _relation_slice(args) -> list:
    """Worker: check every ``jobs``-th instance starting at ``start``."""
    M, N, alpha, beta, degree, modes, rels, start, jobs = args
    from .algebra import CartanData, check_instances, relation_catalogue
    from .boson import enumerate_space
    from .report import parse_space
    cd = CartanData(M, N)
    space = parse_space(alpha, Fraction(beta))
    blocks = enumerate_space(space, degree)
    vecs, labels = [], []
    for b in blocks:
        for lab, v in zip(b.labels, b.vectors()):
            vecs.append(v)
            labels.append("{} @{}".format(lab, b.point))
    insts, _ = relation_catalogue(cd, rels, modes)
    mine = [(n, inst) for n, inst in enumerate(insts) if n % jobs == start]
    recs = check_instances([i for _, i in mine], vecs, cd.system, labels)
    return [(n, r) for (n, _), r in zip(mine, recs)]


def cmd_relations(cfg: RunConfig) -> Report:
    from .algebra import CartanData, relation_catalogue
    _need10(cfg, "Fock module enumeration")
    rels = _relation_ids(cfg)
    rep = Report("relations", cfg.echo())
    rep.data["space"] = cfg.space().label
    args = [(cfg.M, cfg.N, cfg.alpha, str(cfg.beta_value()), cfg.degree, cfg.modes, rels,
             k, cfg.jobs) for k in range(cfg.jobs)]
    if cfg.jobs == 1:
        parts = [_relation_slice(args[0])]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            parts = list(ex.map(_relation_slice, args))
    found = sorted((x for part in parts for x in part), key=lambda t: t[0])
    rep.extend(r for _, r in found)
    # the skip list does not depend on the relation filter
    _, skipped = relation_catalogue(CartanData(cfg.M, cfg.N), ["1.2"], cfg.modes)
    from .algebra import CheckRecord
    rep.extend(CheckRecord(s, "skipped", notes=why) for s, why in skipped)
    return rep


# ---------------------------------------------------------------------------
# characters


def _positivity(series, name: str):
    from .algebra import CheckRecord
    bad = [(k, c) for k, c in sorted(series.terms.items())
           if Fraction(c).denominator != 1 or c < 0]
    if bad:
        return CheckRecord("positivity " + name, "fail",
                           "non-positive or non-integral coefficients: {}".format(bad[:5]))
    return CheckRecord("positivity " + name, "pass",
                       notes="{} coefficients, all positive integers".format(len(series.terms)))


def _compare_record(rid: str, a, b, need_trivial: bool = False):
    from .algebra import CheckRecord
    from .characters import compare
    res = compare(a, b)
    ok = res.ok and (not need_trivial or res.monomial == (0, 0, 0))
    if ok:
        return CheckRecord(rid, "pass", notes="monomial {}, window {}".format(
            res.render_monomial(), res.window)), res
    why = res.note or "monomial {} is not 1".format(res.render_monomial())
    return CheckRecord(rid, "fail", "{} ({} residual terms)".format(why, len(res.residual))), res


def _brute(space, part: str, D: int):
    from .characters import brute_character, projected_character
    if part == "full":
        return brute_character(space, D)
    return projected_character(space, part, D)


def _formula_for(space, part: str):
    """Closed form expected to match ``part`` of ``space``, or None."""
    if space.kind == "alpha":
        if part == "full":
            return "fock", space.alpha
        if space.alpha.denominator == 1:
            return part, space.alpha
        return None
    if space.kind == "10" and part == "coker":
        return "coker10", 0
    return None


def cmd_character(cfg: RunConfig, which: str, series_path: str | None = None) -> Report:
    from .characters import EtaUndefined, formula_character
    from .boson import SpaceSpec
    _need10(cfg, "the character module")
    space = cfg.space()
    D = cfg.degree
    rep = Report("character " + which, cfg.echo())
    if which != "f224":
        rep.data["space"] = space.label
    produced = None
    try:
        if which == "brute":
            produced = _brute(space, cfg.part, D)
            rep.records.append(_positivity(produced, produced.label))
        elif which in ("f221", "f222", "f223"):
            produced = formula_character(FORMULA_ALIASES[which], space.alpha if
                                         space.kind == "alpha" else Fraction(0), D)
        elif which == "compare":
            target = _formula_for(space, cfg.part)
            if target is None:
                raise ConfigError("part", "no closed form for {} of {}".format(
                    cfg.part, space.label))
            produced = _brute(space, cfg.part, D)
            rep.records.append(_positivity(produced, produced.label))
            f = formula_character(target[0], target[1], D)
            rec, res = _compare_record("{} vs formula {}".format(produced.label, target[0]),
                                       produced, f)
            rep.records.append(rec)
            rep.data["monomial"] = res.render_monomial()
            rep.data["layer0 terms"] = len(produced.layer(0))
        else:
            # the (1,0) and (0,1) coker identities
            co01 = _brute(SpaceSpec("01", 0, 0), "coker", D)
            co1 = _brute(SpaceSpec.F(1), "coker", D)
            ker01 = _brute(SpaceSpec("01", 0, 0), "ker", D)
            rec, _ = _compare_record("Coker (0,1) = Coker F(1)", co01, co1, need_trivial=True)
            rep.records.append(rec)
            rec, _ = _compare_record("Ker (0,1) = Coker F(1)", ker01, co1, need_trivial=True)
            rep.records.append(rec)
            produced = formula_character("coker10", 0, D)
            for part in ("coker", "ker"):
                b10 = _brute(SpaceSpec("10", 0, 0), part, D)
                rec, res = _compare_record("formula coker10 vs {} (1,0)".format(
                    part.capitalize()), b10, produced)
                rep.records.append(rec)
            rep.notes.append("the Ker rows are the reading under which both identities hold")
    except EtaUndefined as exc:
        raise ConfigError("alpha", str(exc))
    if produced is not None:
        text = produced.render()
        if series_path:
            with open(series_path, "w") as fh:
                fh.write(text)
        else:
            rep.data["series"] = text
    return rep


# ---------------------------------------------------------------------------
# vertex operators, evaluation modules, highest weights


def cmd_vo(cfg: RunConfig, convention: str = "printed") -> Report:
    from .intertwiner import helper_exchange, helper_serre, intertwining_suite, vo_target
    _need10(cfg, "the vertex operator table")
    space = cfg.space()
    try:
        targets = vo_target(space, cfg.kind)
    except KeyError as exc:
        raise ConfigError("kind", str(exc.args[0]))
    rep = Report("vo", cfg.echo())
    rep.data["convention"] = convention
    rep.data["targets"] = [t.space.label for t in targets]
    rep.data["k"] = 1
    rep.extend(intertwining_suite(cfg.kind, space, cfg.degree, targets=targets,
                                  convention=convention))
    if cfg.kind == "psi":
        rep.records.append(helper_exchange(space, cfg.degree, cfg.modes, convention=convention))
        rep.extend(helper_serre(space, cfg.degree, convention=convention))
    return rep


def cmd_eval(cfg: RunConfig) -> Report:
    from .algebra import CartanData, CHEVALLEY_RELATIONS
    from .evalrep import pairing_check, verify_eval_relations
    from .algebra import CheckRecord
    cd = CartanData(cfg.M, cfg.N)
    rels = list(cfg.relations) or list(CHEVALLEY_RELATIONS) + \
        ["1.10", "1.11", "1.12", "1.13", "1.14", "1.15", "1.16"]
    rep = Report("eval", cfg.echo())
    for dual in (False, True):
        for r in verify_eval_relations(cd, rels, cfg.modes, dual=dual):
            r.id = ("V* " if dual else "V ") + r.id
            rep.records.append(r)
    for r in verify_eval_relations(cd, list(CHEVALLEY_RELATIONS), cfg.modes,
                                   coproduct_duals=(False, True)):
        r.id = "V (x) V* " + r.id
        rep.records.append(r)
    for g in ("e", "f", "t"):
        for i in range(cd.size):
            ok = pairing_check(cd, (g, i))
            rep.records.append(CheckRecord("pairing {}{}".format(g, i), "pass" if ok else "fail"))
    return rep


def cmd_hw(cfg: RunConfig) -> Report:
    from .algebra import CheckRecord
    from .characters import solve_highest_weights
    _need10(cfg, "the highest weight solver")
    sols = solve_highest_weights()
    rep = Report("hw", cfg.echo())
    rep.data["families"] = "\n".join(s.render() for s in sols) + "\n"
    expected = {
        "generic-alpha": ((1, -1), (0, 0), (0, 1)),
        "Lambda1": ((0, 0), (1, 0), (0, 0)),
        "Lambda2": ((0, 0), (0, 0), (1, 0)),
    }
    found = {s.tag: s for s in sols}
    for tag, w in expected.items():
        s = found.get(tag)
        if s is None:
            rep.records.append(CheckRecord("family " + tag, "fail", "not found"))
            continue
        ok = tuple((Fraction(a), Fraction(b)) for a, b in s.weight) == \
            tuple((Fraction(a), Fraction(b)) for a, b in w)
        rep.records.append(CheckRecord("family " + tag, "pass" if ok else "fail",
                                       "" if ok else "weight {}".format(s.weight),
                                       notes="{} grid points".format(s.points)))
    extra = [s.tag for s in sols if s.tag not in expected]
    rep.records.append(CheckRecord("no other families", "fail" if extra else "pass",
                                   ", ".join(extra)))
    return rep


# ---------------------------------------------------------------------------


def run(argv=None) -> tuple:
    """Parse ``argv`` and run; returns ``(report, exit code)``."""
    ns = build_parser().parse_args(argv)
    cfg = _config(ns)
    t0 = time.perf_counter()
    if ns.command == "relations":
        rep = cmd_relations(cfg)
    elif ns.command == "character":
        rep = cmd_character(cfg, ns.which, ns.series)
    elif ns.command == "vo":
        rep = cmd_vo(cfg, ns.convention)
    elif ns.command == "eval":
        rep = cmd_eval(cfg)
    else:
        rep = cmd_hw(cfg)
    rep.seconds = time.perf_counter() - t0
    if (cfg.M == 0 or cfg.N == 0) and ns.command in ("relations", "eval"):
        rep.notes.append("N = 0 or M = 0: the extra fifth-order Serre relations are not checked")
    return rep, rep.exit_code()


def main(argv=None) -> int:
    try:
        rep, code = run(argv)
    except ConfigError as exc:
        print("superboson: configuration error: {}".format(exc), file=sys.stderr)
        return 2
    text = rep.render(rep.config.get("format", "text"))
    if rep.config.get("out"):
        with open(rep.config["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
