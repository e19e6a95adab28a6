"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from datetime import datetime
from pathlib import Path

from . import __version__
from .catalog import NAMES, CatalogError, catalog
from .engine import (
    DEFAULT_BATCH,
    DEFAULT_GROUPS,
    EngineError,
    LevelStore,
    ch_hunt,
    excluded_minors,
    generate_level,
    load_class,
    rank_counts,
    verify_base_excluded,
)
from .field import make_field
from .matroid import BasisMatroid, MatroidError, delta_y_closure, has_minor, is_isomorphic
from .pfield import PartialFieldError, Proxy, ProxyNotFound, find_proxy, resolve_partial_field, verify_proxy

log = logging.getLogger("minorforge")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _store_path(args):
    if getattr(args, "store", None):
        return Path(args.store)
    env = os.environ.get("MINORFORGE_STORE")
    return Path(env) if env else Path("store")


def _open_log(args, argv):
    """One log file per invocation under <store>/log/ (only when a store is in play)."""
    root = logging.getLogger("minorforge")
    root.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    err = logging.StreamHandler(sys.stderr)
    err.setLevel(logging.DEBUG if args.verbose else logging.WARNING)
    err.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    root.addHandler(err)
    if not (getattr(args, "store", None) or os.environ.get("MINORFORGE_STORE") or args.command in _STORE_COMMANDS):
        return None
    logdir = _store_path(args) / "log"
    logdir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now().strftime("%Y%m%dT%H%M%S%f")
    path = logdir / f"{stamp}-{os.getpid()}-{args.command}.log"
    fh = logging.FileHandler(path, encoding="utf-8")
    fh.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    fh.setLevel(logging.DEBUG)
    root.addHandler(fh)
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    config["store"] = str(_store_path(args))
    log.info("minorforge %s argv=%s", __version__, json.dumps(argv))
    log.info("config %s", json.dumps(config, default=str, sort_keys=True))
    return path


def _matroid_arg(text, store=None) -> BasisMatroid:
    """A catalog name, a literal `B ...` line, or a file whose first B line is used."""
    if text.startswith("B "):
        return BasisMatroid.parse(text)
    p = Path(text)
    if p.is_file():
        for line in p.read_text(encoding="utf-8").splitlines():
            if line.startswith("B "):
                return BasisMatroid.parse(line)
        raise UsageError(f"no B line in {p}")
    return catalog(text, store)


def _gen_kw(args):
    return dict(fast=args.fast_confinement, jobs=args.jobs, groups=args.groups, batch_size=args.batch_size)


# ---------------------------------------------------------------------------
# subcommands


def cmd_proxy(args):
    pf = resolve_partial_field(args.pf)
    if args.action == "find":
        try:
            proxy = find_proxy(pf, prime_ceiling=args.prime_ceiling)
        except ProxyNotFound as exc:
            print(str(exc))
            return 1
        print(proxy.stanza())
        return 0
    if args.q is None or args.images is None:
        raise UsageError("proxy verify needs --q and --images")
    images = {}
    for part in args.images.split(","):
        k, _, v = part.partition("=")
        if not _:
            raise UsageError(f"bad image {part!r}")
        images[k] = int(v)
    res = verify_proxy(pf, make_field(args.q), images)
    if isinstance(res, Proxy):
        print(res.stanza())
        return 0
    print(f"rejected: {res}")
    return 1


def cmd_generate(args):
    spec = load_class(args.cls)
    store = LevelStore(_store_path(args), spec.name)
    n0 = min(rec.matroid.n for _, rec in spec.seed_records())
    for n in range(n0, args.max_n + 1):
        t0 = time.time()
        recs = generate_level(spec, n, store, **_gen_kw(args))
        counts = rank_counts([r.matroid for r in recs])
        cells = " ".join(f"r{r}:{c}" for r, c in sorted(counts.items()))
        print(f"n={n}\ttotal={len(recs)}\t{cells}\t{time.time() - t0:.1f}s", flush=True)
    return 0


def _print_counts(store, spec_name):
    levels = store.levels()
    if not levels:
        return False
    ranks = sorted({int(r) for n in levels for r in store.read_counts(n) if r != "total"})
    print("r\t" + "\t".join(str(n) for n in levels))
    for r in ranks:
        print(f"{r}\t" + "\t".join(str(store.read_counts(n).get(str(r), 0)) for n in levels))
    print("total\t" + "\t".join(str(store.read_counts(n)["total"]) for n in levels))
    return True


def cmd_counts(args):
    spec = load_class(args.cls)
    store = LevelStore(_store_path(args), spec.name)
    if not _print_counts(store, spec.name):
        print(f"no complete levels for {spec.name} in {store.root}", file=sys.stderr)
        return 1
    return 0


def cmd_excluded(args):
    spec = load_class(args.cls)
    store = LevelStore(_store_path(args), spec.name)
    rep = excluded_minors(spec, args.max_n, store, use_splices=args.splices, verify_base=not args.skip_base,
                          **_gen_kw(args))
    ok = True
    print(f"# base excluded minors of {spec.name}")
    for b in rep["base"]:
        status = {True: "verified", False: "FAILED", None: "unchecked"}[b["ok"]]
        ok &= b["ok"] is not False
        print(f"base\t{b['name']}\tn={b['n']}\t{status}")
    print("# sieve output")
    for n, mats in sorted(rep["excluded"].items()):
        if not mats:
            print(f"n={n}\tnone")
        for M in mats:
            closure = delta_y_closure(M, with_duals=False)
            print(f"n={n}\tr={M.r}\tbases={M.basis_count()}\tdelta={len(closure)}\t{M.serialize()}")
    return 0 if ok else 1


def cmd_catalog(args):
    if args.action == "list":
        for nm in NAMES:
            print(nm)
        return 0
    if not args.name:
        raise UsageError("catalog show needs a name")
    M = catalog(args.name, _store_path(args) if args.store else None)
    print(f"name\t{args.name}\nn\t{M.n}\nr\t{M.r}\nbases\t{M.basis_count()}\n3-connected\t{M.is_3connected()}")
    print(M.serialize())
    return 0


def cmd_iso(args):
    store = _store_path(args) if args.store else None
    M, N = _matroid_arg(args.first, store), _matroid_arg(args.second, store)
    res = is_isomorphic(M, N, witness=True)
    if res is not None:
        print("isomorphic\t" + " ".join(str(int(x)) for x in res))
        return 0
    print("not isomorphic")
    return 0


def cmd_minor(args):
    store = _store_path(args) if args.store else None
    M, N = _matroid_arg(args.matroid, store), _matroid_arg(args.minor, store)
    print("yes" if has_minor(M, N) else "no")
    return 0


def cmd_deltay(args):
    store = _store_path(args) if args.store else None
    M = _matroid_arg(args.matroid, store)
    closure = delta_y_closure(M, with_duals=args.duals)
    print(f"size\t{len(closure)}")
    for X in closure:
        print(X.serialize())
    return 0


def cmd_chhunt(args):
    spec = load_class(args.cls)
    store = LevelStore(_store_path(args), spec.name)
    report, found = ch_hunt(spec, args.n, store)
    for k, v in report.items():
        print(f"{k}\t{v}")
    for M in found:
        print(M.serialize())
    return 0


def cmd_verify_base(args):
    spec = load_class(args.cls)
    ok = True
    for b in verify_base_excluded(spec):
        ok &= b["ok"]
        extra = "" if b["ok"] else f"\tnot_member={b['not_member']}\tbad_minor={b['bad_minor']}"
        print(f"{b['name']}\tn={b['n']}\t{'pass' if b['ok'] else 'FAIL'}{extra}")
    return 0 if ok else 1


_STORE_COMMANDS = {"generate", "excluded", "counts", "chhunt"}


def build_parser():
    p = _Parser(prog="minorforge", description=__doc__)
    p.add_argument("--version", action="version", version=f"minorforge {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    common = _Parser(add_help=False)
    common.add_argument("--store", metavar="DIR", help="store directory (default $MINORFORGE_STORE or ./store)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--groups", type=int, default=DEFAULT_GROUPS)
    common.add_argument("--batch-size", type=int, default=DEFAULT_BATCH)
    common.add_argument("--fast-confinement", action="store_true")
    common.add_argument("--prime-ceiling", type=int, default=1000)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("proxy", parents=[common], help="find or verify a proxy field")
    s.add_argument("action", choices=["find", "verify"])
    s.add_argument("--pf", required=True, help="built-in partial field or presentation file")
    s.add_argument("--q", type=int)
    s.add_argument("--images", help="generator images, e.g. alpha=4,beta=44")
    s.set_defaults(func=cmd_proxy)

    s = sub.add_parser("generate", parents=[common], help="build levels up to --max-n")
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--max-n", type=int, required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("excluded", parents=[common], help="excluded minors up to --max-n")
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--splices", action="store_true", help="also sieve splice candidates")
    s.add_argument("--skip-base", action="store_true", help="do not re-verify the base list")
    s.set_defaults(func=cmd_excluded)

    s = sub.add_parser("counts", parents=[common], help="per-rank member counts")
    s.add_argument("--class", dest="cls", required=True)
    s.set_defaults(func=cmd_counts)

    s = sub.add_parser("catalog", parents=[common], help="named matroids")
    s.add_argument("action", choices=["list", "show"])
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("iso", parents=[common], help="isomorphism test")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("minor", parents=[common], help="does MATROID have a MINOR-minor")
    s.add_argument("matroid")
    s.add_argument("minor")
    s.set_defaults(func=cmd_minor)

    s = sub.add_parser("deltay", parents=[common], help="Delta-Y equivalence class")
    s.add_argument("matroid")
    s.add_argument("--duals", action="store_true")
    s.set_defaults(func=cmd_deltay)

    s = sub.add_parser("chhunt", parents=[common], help="circuit-hyperplane hunt from level n")
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_chhunt)

    s = sub.add_parser("verify-base", parents=[common], help="check the base excluded list")
    s.add_argument("--class", dest="cls", required=True)
    s.set_defaults(func=cmd_verify_base)
    return p


def dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"minorforge: error: {exc}", file=sys.stderr)
        return 2
    _open_log(args, argv)
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"minorforge: error: {exc}", file=sys.stderr)
        code = 2
    except (EngineError, CatalogError, MatroidError, PartialFieldError, ProxyNotFound, ValueError) as exc:
        log.error("%s", exc)
        print(f"minorforge: {exc}", file=sys.stderr)
        code = 1
    log.info("exit %d", code)
    for h in list(logging.getLogger("minorforge").handlers):
        h.close()
        logging.getLogger("minorforge").removeHandler(h)
    return code


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
