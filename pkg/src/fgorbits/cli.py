"""Command line front end.

Exit codes: 0 the answer was computed (which may be "no"), 1 invalid input,
2 a resource cap was hit.  Subgroups are given inline as comma-separated
words, as ``@path`` (one generator per line, ``#`` comments) or as ``-``
for stdin in the same format.  Words are inline, ``@path`` or ``-``.
Rational expressions are inline only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dynamics, endo2, orbit, stallings, words
from .errors import InvalidInputError, ResourceLimitError

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RESOURCE = 2

ENV_MAX_STATES = "FGORBITS_MAX_STATES"
ENV_MAX_AUT_SIZE = "FGORBITS_MAX_AUT_SIZE"


def _read_source(value: str) -> str:
    if value == "-":
        return sys.stdin.read()
    if value.startswith("@"):
        with open(value[1:], "r", encoding="utf-8") as fh:
            return fh.read()
    return value


def _parse_subgroup(value: str) -> list[words.Word]:
    if value == "-" or value.startswith("@"):
        return stallings.parse_subgroup(_read_source(value))
    return [words.word(part) for part in value.split(",") if part.strip()]


def _parse_word(value: str) -> words.Word:
    if value == "-" or value.startswith("@"):
        gens = stallings.parse_subgroup(_read_source(value))
        if len(gens) != 1:
            raise InvalidInputError("expected exactly one word in the input")
        return gens[0]
    return words.word(value)


def _fold(value: str) -> stallings.StallingsAutomaton:
    return stallings.fold_generators(_parse_subgroup(value), rank=2)


def _caps(args) -> dict:
    max_states = args.max_states
    if max_states is None:
        max_states = int(os.environ.get(ENV_MAX_STATES, dynamics.DEFAULT_MAX_STATES))
    max_aut = args.max_aut_size
    if max_aut is None:
        max_aut = int(os.environ.get(ENV_MAX_AUT_SIZE, dynamics.DEFAULT_MAX_AUT_SIZE))
    return {"max_states": max_states, "max_aut_size": max_aut}


def _emit(args, payload: dict, text_lines: list[str]):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _write_dot(path: str, content: str):
    if path == "-":
        sys.stdout.write(content)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)


def _decision_output(args, decision: orbit.Decision):
    payload = decision.to_json_dict()
    lines = ["yes" if decision.answer else "no"]
    if decision.witness is not None:
        w = decision.witness
        lines.append(f"witness {w.sigma_word}")
        if w.prefix is not None:
            lines.append(f"prefix {w.prefix}")
        if w.psi is not None:
            lines.append(f"psi {w.psi}")
        if w.n is not None:
            lines.append(f"n {w.n}")
        if w.conjugator is not None:
            lines.append(f"conjugator {w.conjugator}")
    lines.append(f"states {decision.states_explored}")
    lines.append(f"t {decision.t_used}")
    _emit(args, payload, lines)


def _parse_rational(args):
    alphabet = getattr(args, "regex_alphabet", "sigma")
    if alphabet == "sigma":
        return orbit.parse_sigma_regex(args.rational), None
    kind = "is" if alphabet == "is" else "is-inverse"
    base = orbit.parse_sigma_regex(args.rational, letters=orbit.IS_LETTERS)
    return orbit.encode_invertible_substitutions(kind, base)


# -- subcommand handlers ----------------------------------------------------


def _cmd_fold(args):
    aut = _fold(args.subgroup)
    edges = [[p, "ab"[l - 1], q] for p, l, q in aut.positive_edges()]
    payload = {"states": aut.n, "origin": aut.origin, "edges": edges}
    lines = [f"states {aut.n}", f"origin {aut.origin}"] + [
        f"edge {p} {c} {q}" for p, c, q in edges
    ]
    if args.dot:
        _write_dot(args.dot, stallings.to_dot(aut))
        if args.dot != "-":
            lines.append(f"dot {args.dot}")
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_member(args):
    aut = _fold(args.subgroup)
    u = _parse_word(args.word)
    ok = (
        stallings.contains_conjugate(aut, u)
        if args.conjugate
        else stallings.contains(aut, u)
    )
    _emit(args, {"answer": ok}, ["yes" if ok else "no"])
    return EXIT_OK


def _cmd_metrics(args):
    aut = _fold(args.subgroup)
    prof = stallings.singularity_profile(aut)
    m = stallings.metrics(aut)
    payload = {
        "sigma": prof.sigma,
        "sources": sorted(prof.sources),
        "sinks": sorted(prof.sinks),
        "hc": m.hc,
        "hcfp": m.hcfp,
        "shcfp": m.shcfp,
        "delta0": m.delta0,
        "delta": m.delta,
        "zeta": m.zeta,
    }
    lines = [f"{k} {v}" for k, v in payload.items()]
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_primitive(args):
    u = _parse_word(args.word)
    witness = endo2.is_primitive(u)
    if witness is None:
        _emit(args, {"answer": False}, ["no"])
        return EXIT_OK
    payload = {
        "answer": True,
        "conjugator": str(witness.conjugator),
        "psi": str(witness.psi),
        "factors": [str(f) for f in witness.factors],
    }
    lines = [
        "yes",
        f"conjugator {witness.conjugator}",
        f"psi {witness.psi}",
        "factors " + (" | ".join(str(f) for f in witness.factors) or "(none)"),
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_basis_completion(args):
    if args.generators == "-" or args.generators.startswith("@"):
        gens = stallings.parse_subgroup(_read_source(args.generators), rank=args.rank)
    else:
        gens = [words.word(p, rank=args.rank) for p in args.generators.split(",") if p.strip()]
    result = stallings.basis_completion(gens, args.rank)
    if result is None:
        _emit(args, {"answer": False}, ["none"])
        return EXIT_OK
    payload = {"answer": True, "z": str(result.z), "completions": result.describe()}
    _emit(args, payload, ["z " + str(result.z), "completions " + result.describe()])
    return EXIT_OK


def _cmd_orbit_elem(args):
    aut = _fold(args.subgroup)
    rational, transform = _parse_rational(args)
    us = [_parse_word(v) for v in args.word]
    caps = _caps(args)
    if transform is not None:
        aut = endo2.image_subgroup(transform, aut)
        us = [endo2.apply_endo(transform, u) for u in us]
    if len(us) > 1:
        decision = orbit.decide_rational("4", rational, aut, us=us, **caps)
    else:
        kind = "1'" if args.conjugate else "1"
        decision = orbit.decide_rational(kind, rational, aut, u=us[0], **caps)
    _decision_output(args, decision)
    return EXIT_OK


def _cmd_orbit_subgroup(args):
    aut = _fold(args.subgroup)
    k_aut = _fold(args.k_subgroup)
    rational, transform = _parse_rational(args)
    if transform is not None:
        aut = endo2.image_subgroup(transform, aut)
        k_aut = endo2.image_subgroup(transform, k_aut)
    kind = "3" if args.equal else "2"
    if args.conjugate:
        kind += "'"
    decision = orbit.decide_rational(
        kind, rational, aut, k_subgroup=k_aut, **_caps(args)
    )
    _decision_output(args, decision)
    return EXIT_OK


def _cmd_orbit_aut(args):
    aut = _fold(args.subgroup)
    u = _parse_word(args.word)
    decision = orbit.decide_full_aut(u, aut, **_caps(args))
    _decision_output(args, decision)
    return EXIT_OK


def _cmd_contains_primitive(args):
    aut = _fold(args.subgroup)
    decision = orbit.contains_primitive(aut, **_caps(args))
    _decision_output(args, decision)
    return EXIT_OK


def _cmd_transition_system(args):
    aut = _fold(args.subgroup)
    t = args.t if args.t is not None else dynamics.choose_t(aut, [])
    alphabet = (
        dynamics.SIGMA0_LETTERS if args.alphabet == "sigma0" else dynamics.SIGMA_LETTERS
    )
    system = dynamics.closure_system(aut, t, alphabet, **_caps(args))
    ids = {key: i for i, key in enumerate(system.states)}
    payload = {
        "states": system.state_count,
        "t": t,
        "alphabet": list(alphabet),
        "initial": ids[system.initial],
        "transitions": [
            [ids[k], g, ids[dst]]
            for (k, g), dst in sorted(
                system.transitions.items(), key=lambda kv: (ids[kv[0][0]], kv[0][1])
            )
        ],
    }
    lines = [f"states {system.state_count}", f"t {t}", f"initial {ids[system.initial]}"]
    lines += [f"{a} {g} {b}" for a, g, b in payload["transitions"]]
    if args.dot:
        _write_dot(args.dot, dynamics.system_to_dot(system))
        if args.dot != "-":
            lines.append(f"dot {args.dot}")
    if args.dump:
        lines.append(dynamics.dump_system(system).rstrip("\n"))
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_grammar(args):
    endos = [endo2.endo(e) for e in args.endo]
    u = _parse_word(args.word)
    grammar = endo2.emit_closure_grammar(endos, u)
    lines = [endo2.grammar_to_text(grammar).rstrip("\n")]
    payload = {
        "rules": [str(r) for r in grammar.rules],
        "start": grammar.start,
        "terminals": sorted(grammar.terminals),
        "nonterminals": sorted(grammar.nonterminals),
    }
    if args.enumerate is not None:
        lang = sorted(endo2.bounded_language(grammar, args.enumerate))
        payload["language"] = lang
        lines.append("language " + " ".join(lang))
    _emit(args, payload, lines)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fg-orbits",
        description="Orbit problems in the rank-2 free group.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, subgroup=True, caps=False):
        p.add_argument("--json", action="store_true", help="JSON output")
        if subgroup:
            p.add_argument(
                "-g", "--subgroup", required=True,
                help="generators: inline comma-separated, @file, or - for stdin",
            )
        if caps:
            p.add_argument("--max-states", type=int, default=None)
            p.add_argument("--max-aut-size", type=int, default=None)

    p = sub.add_parser("fold", help="fold a generating set into its core automaton")
    common(p)
    p.add_argument("--dot", help="write DOT to a path, or - for stdout")
    p.set_defaults(func=_cmd_fold)

    p = sub.add_parser("member", help="membership of a word in a subgroup")
    common(p)
    p.add_argument("-w", "--word", required=True)
    p.add_argument("--conjugate", action="store_true", help="test conjugates instead")
    p.set_defaults(func=_cmd_member)

    p = sub.add_parser("metrics", help="singularities and homogeneous-path metrics")
    common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("primitive", help="is the word part of a basis?")
    common(p, subgroup=False)
    p.add_argument("-w", "--word", required=True)
    p.set_defaults(func=_cmd_primitive)

    p = sub.add_parser("basis-completion", help="complete m-1 words to a basis")
    common(p, subgroup=False)
    p.add_argument("-g", "--generators", required=True)
    p.add_argument("--rank", type=int, default=2)
    p.set_defaults(func=_cmd_basis_completion)

    p = sub.add_parser("orbit-elem", help="u in mu(H) for some mu in a rational set?")
    common(p, caps=True)
    p.add_argument("-w", "--word", action="append", required=True,
                   help="repeatable; several words ask for simultaneous conjugates")
    p.add_argument("-R", "--rational", required=True, help="rational expression")
    p.add_argument("--conjugate", action="store_true")
    p.add_argument("--regex-alphabet", choices=("sigma", "is", "is-inverse"),
                   default="sigma")
    p.set_defaults(func=_cmd_orbit_elem)

    p = sub.add_parser("orbit-subgroup", help="K vs mu(H): containment or equality")
    common(p, caps=True)
    p.add_argument("-K", "--k-subgroup", required=True)
    p.add_argument("-R", "--rational", required=True)
    p.add_argument("--equal", action="store_true", help="equality instead of containment")
    p.add_argument("--conjugate", action="store_true")
    p.add_argument("--regex-alphabet", choices=("sigma", "is", "is-inverse"),
                   default="sigma")
    p.set_defaults(func=_cmd_orbit_subgroup)

    p = sub.add_parser("orbit-aut", help="phi(u) in H for some automorphism phi?")
    common(p, caps=True)
    p.add_argument("-w", "--word", required=True)
    p.set_defaults(func=_cmd_orbit_aut)

    p = sub.add_parser("contains-primitive", help="does H contain a basis element?")
    common(p, caps=True)
    p.set_defaults(func=_cmd_contains_primitive)

    p = sub.add_parser("transition-system", help="closure system of truncations")
    common(p, caps=True)
    p.add_argument("-t", type=int, default=None, help="radius; default per subgroup")
    p.add_argument("--alphabet", choices=("sigma", "sigma0"), default="sigma")
    p.add_argument("--dot", help="write DOT to a path, or - for stdout")
    p.add_argument("--dump", action="store_true", help="expanded state dump")
    p.set_defaults(func=_cmd_transition_system)

    p = sub.add_parser("grammar", help="closure grammar of positive endomorphisms")
    common(p, subgroup=False)
    p.add_argument("-e", "--endo", action="append", default=[],
                   help="positive endomorphism 'x ; y', repeatable")
    p.add_argument("-w", "--word", required=True, help="positive seed word")
    p.add_argument("--enumerate", type=int, default=None,
                   help="also list the language up to this length")
    p.set_defaults(func=_cmd_grammar)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: resource-limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InvalidInputError as exc:
        print(f"error: invalid-input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: invalid-input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
