"""Command line interface.

Exit codes: 0 success, 1 verification failure or exhausted search,
2 input errors.  Human-readable reports go to stdout; machine artifacts
to files.  Bundles are written to a temporary directory and renamed into
place, so a failed run never leaves a partial bundle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import constructions, homology, moves, pairing, presentations
from .moves import MoveError, MoveScript, SearchBudget
from .presentations import (Presentation, canonical_key, euler_char,
                            format_presentation, parse_presentation,
                            serialize_key)
from .words import parse_word

INPUT_ERROR = 2
VERIFY_FAIL = 1


class InputError(Exception):
    pass


def _load_presentation(path: str) -> Presentation:
    try:
        with open(path) as fh:
            return parse_presentation(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from None


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_normalize(args) -> int:
    p = _load_presentation(args.presentation)
    key = canonical_key(p)
    if args.format == "json":
        print(json.dumps({"rank": key.rank, "key": serialize_key(key)}))
    else:
        print(serialize_key(key))
    return 0


def cmd_apply(args) -> int:
    p = _load_presentation(args.presentation)
    data = _load_json(args.script)
    try:
        script = moves.script_from_json(data, p.gens)
        result = moves.replay(p, script)
    except MoveError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR
    except ValueError as e:
        raise InputError(str(e)) from None
    _write_text(args.output, format_presentation(result))
    return 0


def cmd_product(args) -> int:
    p = _load_presentation(args.first)
    q = _load_presentation(args.second)
    try:
        result = presentations.product(p, q)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write_text(args.output, format_presentation(result))
    return 0


def cmd_lustig(args) -> int:
    try:
        p = constructions.lustig(args.index)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write_text(args.output, format_presentation(p))
    return 0


def cmd_witness(args) -> int:
    p = _load_presentation(args.presentation)
    try:
        target = parse_word(args.target, p.gens)
    except ValueError as e:
        raise InputError(str(e)) from None
    wit = constructions.search_normal_closure_witness(
        target, p.relators, args.max_factors, args.max_conj, args.max_states)
    if wit is None:
        print("unknown: witness search exhausted its budget (no claim made)")
        return VERIFY_FAIL
    payload = constructions.witness_to_json(wit, p.gens)
    _write_text(args.output, json.dumps(payload, indent=1))
    return 0


def _load_iso_witness(path, p, q) -> constructions.IsoWitness:
    if path is None:
        if p.gens != q.gens:
            raise InputError("presentations have different generators; "
                             "an isomorphism witness file is required")
        return constructions.IsoWitness.identity(p.rank)
    data = _load_json(path)
    try:
        return constructions.IsoWitness(
            tuple(parse_word(w, p.gens) for w in data["y_in_x"]),
            tuple(parse_word(w, q.gens) for w in data["x_in_y"]))
    except (KeyError, ValueError) as e:
        raise InputError(f"{path}: {e}") from None


def _load_witness_dir(dirpath, prefix, count, names):
    """Optional per-relator witness files <prefix><i>.json (1-based)."""
    if dirpath is None:
        return None
    out = []
    for i in range(count):
        path = os.path.join(dirpath, f"{prefix}{i + 1}.json")
        if os.path.exists(path):
            out.append(constructions.witness_from_json(_load_json(path), names))
        else:
            out.append(None)
    return out


def cmd_pipeline(args) -> int:
    l1 = _load_presentation(args.first)
    l2 = _load_presentation(args.second)
    iso = _load_iso_witness(args.iso, l1, l2)
    budget = constructions.WitnessBudget(args.max_factors, args.max_conj,
                                         args.max_states)
    try:
        common = constructions.common_generators(l1, l2, iso)
        sup12 = _load_witness_dir(args.witnesses, "second_over_first_",
                                  len(common.q_prime.relators), common.p_prime.gens)
        sup21 = _load_witness_dir(args.witnesses, "first_over_second_",
                                  len(common.p_prime.relators), common.q_prime.gens)
        result = constructions.null_vector_pipeline(
            l1, l2, iso, budget, sup12, sup21, jobs=args.jobs)
    except (constructions.WitnessError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR

    reps = {canonical_key(result.p1): result.p1,
            canonical_key(result.p2): result.p2}
    lines = [f"boundary rank: {result.p1.rank}",
             f"stabilizations: {result.stabilizations}",
             f"certificates: {len(result.certificates)}"]
    for cert in result.certificates:
        lines.append(f"  {cert.label}: {len(cert.script)} moves")
    if result.unknown:
        lines.append("unknown witnesses (search exhausted, no claim): "
                     + ", ".join(result.unknown))
    else:
        report = pairing.verify_null(result.x, result.certificates)
        lines.append("verify-null: " + ("pass" if report.null else "FAIL"))

    parent = os.path.dirname(os.path.abspath(args.output)) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".bundle-", dir=parent)
    try:
        with open(os.path.join(tmp, "x.sum"), "w") as fh:
            json.dump(pairing.sum_to_json(result.x, reps), fh, indent=1)
        os.makedirs(os.path.join(tmp, "certs"), exist_ok=True)
        for cert in result.certificates:
            with open(os.path.join(tmp, "certs", f"{cert.label}.json"), "w") as fh:
                json.dump(pairing.certificate_to_json(cert), fh, indent=1)
        with open(os.path.join(tmp, "report.txt"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
        if os.path.exists(args.output):
            raise InputError(f"output {args.output} already exists")
        os.rename(tmp, args.output)
    finally:
        if os.path.isdir(tmp):
            import shutil
            shutil.rmtree(tmp)
    print("\n".join(lines))
    return 0 if result.complete else VERIFY_FAIL


def cmd_verify_null(args) -> int:
    sum_path = os.path.join(args.bundle, "x.sum")
    certs_dir = os.path.join(args.bundle, "certs")
    x, _ = pairing.sum_from_json(_load_json(sum_path))
    certs = []
    if os.path.isdir(certs_dir):
        for name in sorted(os.listdir(certs_dir)):
            if name.endswith(".json"):
                certs.append(pairing.certificate_from_json(
                    _load_json(os.path.join(certs_dir, name))))
    report = pairing.verify_null(x, certs)
    if args.format == "json":
        print(json.dumps(report.as_json(), indent=1))
    else:
        print(report.as_text())
    return 0 if report.null else VERIFY_FAIL


def cmd_verify_smove(args) -> int:
    l1 = _load_presentation(args.first)
    l2 = _load_presentation(args.second)
    names = presentations.product(l1, l2).gens

    def load_scripts(prefix):
        out = []
        for name in sorted(os.listdir(args.scripts)):
            if name.startswith(prefix) and name.endswith(".json"):
                out.append(moves.script_from_json(
                    _load_json(os.path.join(args.scripts, name)), names))
        return out

    try:
        to_first = load_scripts("to_l1l1")
        to_second = load_scripts("to_l2l2")
        certs = constructions.verify_smove_certificates(l1, l2, to_first, to_second)
    except (moves.RegimeError, constructions.WitnessError, MoveError) as e:
        print(f"rejected: {e}")
        return VERIFY_FAIL
    except ValueError as e:
        raise InputError(str(e)) from None
    print(f"accepted: {len(certs)} certificates verified")
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        for cert in certs:
            with open(os.path.join(args.output, f"{cert.label}.json"), "w") as fh:
                json.dump(pairing.certificate_to_json(cert), fh, indent=1)
    return 0


def cmd_search_equiv(args) -> int:
    p = _load_presentation(args.first)
    q = _load_presentation(args.second)
    budget = SearchBudget(args.depth, args.max_relator_length, args.max_states,
                          args.conj_len)
    try:
        script = moves.bounded_equivalence_search(p, q, budget, args.regime)
    except ValueError as e:
        raise InputError(str(e)) from None
    if script is None:
        print("unknown: search budget exhausted (no claim of inequivalence)")
        return VERIFY_FAIL
    payload = moves.script_to_json(script, p.gens)
    _write_text(args.output, json.dumps(payload, indent=1))
    if args.output:
        print(f"found: {len(script)} moves, script written to {args.output}")
    return 0


def _load_chain(path: str):
    try:
        return homology.load_chain_file(path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    except (ValueError, KeyError) as e:
        raise InputError(f"{path}: {e}") from None


def cmd_homology(args) -> int:
    chain = _load_chain(args.chain)
    try:
        group = homology.homology_at(chain, args.at)
    except ValueError as e:
        raise InputError(str(e)) from None
    if args.format == "json":
        print(json.dumps({"at": args.at, "free_rank": group.free_rank,
                          "torsion": list(group.torsion)}))
    else:
        print(f"H_{args.at} = {group}")
    return 0


def cmd_glue(args) -> int:
    c1 = _load_chain(args.first)
    c2 = _load_chain(args.second)
    try:
        glued = homology.glue_product(c1, c2)
    except ValueError as e:
        raise InputError(str(e)) from None
    _write_text(args.output, json.dumps(homology.chain_to_json(glued), indent=1))
    return 0


REPL_HELP = """\
commands (indices 1-based; words are comma-separated syllables, e.g. x,y^-2):
  conj J W        conjugate relator J by W
  inv J           invert relator J
  slide J K left|right
  rslide J K SIGN W H   append W [R_K^SIGN, H] W^-1 to relator J (W may be 1)
  addgen NAME | rmgen I | addtriv | rmtriv J
  ninv I | nmul I J left|right
  show | key | chi | undo | help | quit
"""


def _repl_word(token, names):
    return parse_word(token.replace(",", " "), names)


def _repl_move(parts, pres):
    op = parts[0]
    names = pres.gens
    if op == "conj":
        return moves.ConjRel(int(parts[1]) - 1, _repl_word(parts[2], names))
    if op == "inv":
        return moves.InvRel(int(parts[1]) - 1)
    if op == "slide":
        return moves.SlideRel(int(parts[1]) - 1, int(parts[2]) - 1, parts[3])
    if op == "rslide":
        j, k, sign = int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
        w, h = _repl_word(parts[4], names), _repl_word(parts[5], names)
        return moves.RestrictedSlide(j, (moves.RSFactor(w, k, sign, h),))
    if op == "addgen":
        return moves.AddGen(parts[1])
    if op == "rmgen":
        return moves.RemoveGen(int(parts[1]) - 1)
    if op == "addtriv":
        return moves.AddTrivialRel()
    if op == "rmtriv":
        return moves.RemoveTrivialRel(int(parts[1]) - 1)
    if op == "ninv":
        return moves.NielsenInv(int(parts[1]) - 1)
    if op == "nmul":
        return moves.NielsenMul(int(parts[1]) - 1, int(parts[2]) - 1, parts[3])
    raise MoveError(f"unknown command {op!r} (try 'help')")


def cmd_repl(args) -> int:
    pres = _load_presentation(args.presentation)
    initial = pres
    history = []
    log = []
    print(REPL_HELP)
    print(format_presentation(pres))
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if not line:
            continue
        parts = line.split()
        op = parts[0]
        if op in ("quit", "exit"):
            break
        if op == "help":
            print(REPL_HELP)
            continue
        if op == "show":
            print(format_presentation(pres), end="")
            continue
        if op == "key":
            print(serialize_key(canonical_key(pres)))
            continue
        if op == "chi":
            print(euler_char(pres))
            continue
        if op == "undo":
            if history:
                pres = history.pop()
                log.pop()
                print("undone")
            else:
                print("nothing to undo")
            continue
        try:
            move = _repl_move(parts, pres)
            nxt = moves.apply_move(pres, move)
        except (MoveError, ValueError, IndexError) as e:
            print(f"error: {e}")
            continue
        history.append(pres)
        log.append(move)
        pres = nxt
        print(f"chi = {euler_char(pres)}")
        print(serialize_key(canonical_key(pres)))
    if args.log:
        script = MoveScript(tuple(log), "full")
        moves.dump_script(script, initial.gens, args.log)
        print(f"session script written to {args.log}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acpair",
        description="Move scripts, pairings and homology for presentation "
                    "2-complexes with a fixed wedge boundary.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("normalize", cmd_normalize, "print the canonical key")
    p.add_argument("presentation")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = add("apply", cmd_apply, "replay a move script")
    p.add_argument("presentation")
    p.add_argument("script")
    p.add_argument("-o", "--output")

    p = add("product", cmd_product, "glue two presentations along the boundary")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")

    p = add("lustig", cmd_lustig, "emit the i-th Lustig presentation")
    p.add_argument("index", type=int)
    p.add_argument("-o", "--output")

    p = add("witness", cmd_witness, "search a normal closure witness")
    p.add_argument("presentation")
    p.add_argument("--target", required=True)
    p.add_argument("--max-factors", type=int, default=8)
    p.add_argument("--max-conj", type=int, default=4)
    p.add_argument("--max-states", type=int, default=20000)
    p.add_argument("-o", "--output")

    p = add("pipeline", cmd_pipeline, "build a certified null vector bundle")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--iso", help="isomorphism witness JSON (default: identity)")
    p.add_argument("--witnesses", help="directory of supplied witness files")
    p.add_argument("--max-factors", type=int, default=8)
    p.add_argument("--max-conj", type=int, default=4)
    p.add_argument("--max-states", type=int, default=20000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", required=True)

    p = add("verify-null", cmd_verify_null, "verify a pipeline bundle")
    p.add_argument("bundle")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = add("verify-smove", cmd_verify_smove,
            "verify restricted-regime product certificates")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--scripts", required=True)
    p.add_argument("-o", "--output")

    p = add("search-equiv", cmd_search_equiv, "bounded equivalence search")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--regime", choices=("full", "k_prime"), default="full")
    p.add_argument("--max-states", type=int, default=10000)
    p.add_argument("--max-relator-length", type=int, default=24)
    p.add_argument("--conj-len", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")

    p = add("homology", cmd_homology, "homology of a chain complex file")
    p.add_argument("chain")
    p.add_argument("--at", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = add("glue", cmd_glue, "glue two chain complexes along the lower skeleton")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")

    p = add("repl", cmd_repl, "interactive move application with undo")
    p.add_argument("presentation")
    p.add_argument("--log", help="write the session as a move script on exit")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
