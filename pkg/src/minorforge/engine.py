"""Level-by-level generation, isomorph filtering, candidate streams and the sieve."""

from __future__ import annotations

import configparser
import hashlib
import logging
import os
import shutil
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .catalog import catalog
from .field import FieldSpec, make_field
from .linrep import (
    LinearRep,
    all_carrier_extensions,
    carrier_column_for,
    confined_simple_extensions,
    dual_rep_standard,
    dual_standard_matroid,
    extension_matroid,
    find_confined_rep,
    is_confined,
    matroid_of,
)
from .matroid import BasisMatroid, delta_y_closure, elements_of, is_isomorphic, mask_of
from .pfield import PartialFieldPresentation, Proxy, find_proxy, resolve_partial_field

log = logging.getLogger(__name__)

DEFAULT_GROUPS = 127
DEFAULT_BATCH = 100000


class EngineError(RuntimeError):
    pass


class StoreError(EngineError):
    pass


# ---------------------------------------------------------------------------
# class specifications


@dataclass
class ClassSpec:
    name: str
    pf: PartialFieldPresentation
    proxy: Proxy
    carrier: FieldSpec
    carrier_threshold: int
    seeds: list
    base_excluded: list
    _seed_records: list = dc_field(default=None, repr=False)

    @property
    def F(self):
        return self.proxy.F

    def seed_records(self):
        """(name, MemberRecord) for every seed, with matching confined and carrier reps."""
        if self._seed_records is None:
            out = []
            full = frozenset(range(2, self.carrier.q))
            for nm in self.seeds:
                M = catalog(nm)
                conf = find_confined_rep(M, self.F, self.proxy.field)
                if conf is None:
                    raise EngineError(f"seed {nm} has no confined representation")
                car = find_confined_rep(M, full, self.carrier)
                if car is None or car.rows != conf.rows:
                    raise EngineError(f"seed {nm} has no carrier representation")
                out.append((nm, make_record(conf.standard(), car.standard())))
            self._seed_records = out
        return self._seed_records

    def to_config(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["class"] = {
            "name": self.name,
            "pf": self.pf.name,
            "proxy": self.proxy.stanza(),
            "carrier": str(self.carrier.q),
            "carrier_threshold": str(self.carrier_threshold),
            "seeds": "; ".join(self.seeds),
            "base_excluded": "; ".join(self.base_excluded),
        }
        import io

        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


# smallest proxy for U2 (what find_proxy returns; it takes ~40s, so it is pinned here)
U2_PROXY = ("pf=U2 q=211 images=alpha=4,beta=44 F=4,11,21,24,38,44,50,53,55,57,60,70,94,96,102,110,116,"
            "118,142,152,155,157,159,162,168,174,188,191,201,208")

_BUILTIN = {
    "dyadic": dict(pf="D", proxy="pf=D q=11 images=2=2 F=2,6,10", carrier=3, carrier_threshold=8,
                   seeds=["F7-", "F7-*", "P8"],
                   base_excluded=["U2,5", "U3,5", "F7", "F7*", "AG(2,3)\\e", "AG(2,3)\\e*",
                                  "(AG(2,3)\\e)dY"]),
    "2regular": dict(pf="U2", proxy=U2_PROXY, carrier=4, carrier_threshold=9, seeds=["U2,5", "U3,5"],
                     base_excluded=["U2,6", "U3,6", "U4,6", "P6", "F7", "F7*", "F7-", "F7-*", "F7=",
                                    "F7=*", "AG(2,3)\\e", "AG(2,3)\\e*", "(AG(2,3)\\e)dY", "P8", "P8-",
                                    "P8=", "TQ8"]),
}

_CLASS_CACHE: dict = {}


def _split(s):
    return [x.strip() for x in s.split(";") if x.strip()]


def load_class(name_or_path: str) -> ClassSpec:
    if name_or_path in _CLASS_CACHE:
        return _CLASS_CACHE[name_or_path]
    if name_or_path in _BUILTIN:
        d = dict(_BUILTIN[name_or_path])
        name = name_or_path
    else:
        cp = configparser.ConfigParser(interpolation=None)
        if not cp.read(name_or_path):
            raise EngineError(f"unknown class {name_or_path!r}")
        sec = cp["class"]
        name = sec["name"]
        d = dict(pf=sec["pf"], proxy=sec.get("proxy"), carrier=int(sec["carrier"]),
                 carrier_threshold=int(sec["carrier_threshold"]), seeds=_split(sec["seeds"]),
                 base_excluded=_split(sec.get("base_excluded", "")))
    pf = resolve_partial_field(d["pf"])
    proxy = Proxy.parse(d["proxy"]) if d["proxy"] else find_proxy(pf)
    spec = ClassSpec(name, pf, proxy, make_field(d["carrier"]), d["carrier_threshold"], list(d["seeds"]),
                     list(d["base_excluded"]))
    _CLASS_CACHE[name_or_path] = spec
    return spec


# ---------------------------------------------------------------------------
# member records and the level store


@dataclass
class MemberRecord:
    matroid: BasisMatroid
    conf: LinearRep
    carrier: LinearRep

    @property
    def invariant(self):
        return self.matroid.invariant_key()

    def lines(self):
        return [self.matroid.serialize(), self.conf.serialize(), self.carrier.serialize()]


def make_record(conf: LinearRep, carrier: LinearRep, check=True) -> MemberRecord:
    M = matroid_of(conf)
    if check and matroid_of(carrier) != M:
        raise EngineError("confined and carrier representations disagree")
    return MemberRecord(M, conf, carrier)


def dual_record(rec: MemberRecord) -> MemberRecord:
    return make_record(dual_rep_standard(rec.conf), dual_rep_standard(rec.carrier), check=False)


class LevelStore:
    def __init__(self, root, class_name: str):
        self.root = Path(root)
        self.class_name = class_name
        self.base = self.root / class_name

    def level_dir(self, n):
        return self.base / f"n={n}"

    def is_complete(self, n) -> bool:
        return (self.level_dir(n) / "DONE").exists()

    def write_level(self, n, records):
        d = self.level_dir(n)
        if d.exists():
            shutil.rmtree(d)
        d.mkdir(parents=True)
        text = "".join(line + "\n" for rec in records for line in rec.lines())
        (d / "members.txt").write_text(text, encoding="utf-8")
        counts = rank_counts([rec.matroid for rec in records])
        rows = [f"{n}\t{r}\t{c}" for r, c in sorted(counts.items())]
        rows.append(f"{n}\ttotal\t{len(records)}")
        (d / "counts.tsv").write_text("n\tr\tcount\n" + "\n".join(rows) + "\n", encoding="utf-8")
        digest = hashlib.sha256(text.encode()).hexdigest()
        (d / "DONE").write_text(f"members {len(records)}\nsha256 {digest}\n", encoding="utf-8")

    def read_level(self, n, verify=True):
        d = self.level_dir(n)
        if not self.is_complete(n):
            raise StoreError(f"level n={n} of {self.class_name} is not complete")
        text = (d / "members.txt").read_text(encoding="utf-8")
        meta = dict(line.split(" ", 1) for line in (d / "DONE").read_text().splitlines() if " " in line)
        if verify and meta.get("sha256") != hashlib.sha256(text.encode()).hexdigest():
            raise StoreError(f"checksum mismatch in {d / 'members.txt'}")
        lines = text.splitlines()
        if len(lines) % 3:
            raise StoreError(f"truncated member file {d / 'members.txt'}")
        out = []
        for i in range(0, len(lines), 3):
            M = BasisMatroid.parse(lines[i])
            out.append(MemberRecord(M, LinearRep.parse(lines[i + 1]), LinearRep.parse(lines[i + 2])))
        if verify and int(meta.get("members", -1)) != len(out):
            raise StoreError(f"member count mismatch in {d}")
        return out

    def read_counts(self, n):
        d = self.level_dir(n)
        out = {}
        for line in (d / "counts.tsv").read_text().splitlines()[1:]:
            _, r, c = line.split("\t")
            out[r] = int(c)
        return out

    def levels(self):
        if not self.base.exists():
            return []
        ks = []
        for p in self.base.iterdir():
            if p.name.startswith("n=") and (p / "DONE").exists():
                ks.append(int(p.name[2:]))
        return sorted(ks)

    def excluded_path(self, n):
        return self.base / "excluded" / f"n={n}.txt"

    def write_excluded(self, n, matroids):
        p = self.excluded_path(n)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text("".join(M.serialize() + "\n" for M in matroids), encoding="utf-8")

    def read_excluded(self, n):
        p = self.excluded_path(n)
        if not p.exists():
            return None
        return [BasisMatroid.parse(l) for l in p.read_text().splitlines() if l.startswith("B ")]

    def tmpdir(self):
        self.base.mkdir(parents=True, exist_ok=True)
        return tempfile.mkdtemp(prefix="isofilter-", dir=self.base)


def rank_counts(matroids):
    counts = {}
    for M in matroids:
        counts[M.r] = counts.get(M.r, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# isomorph filtering


class IsomorphFilter:
    """Two-pass dedup: spill (hash, B line, payload) into g files by hash mod g,
    then sort each group and keep the first record of every isomorphism class.
    """

    def __init__(self, groups=DEFAULT_GROUPS, batch_size=DEFAULT_BATCH, workdir=None):
        if groups < 1:
            raise EngineError("need at least one group")
        self.g = groups
        self.batch_size = batch_size
        self._own = workdir is None
        self.workdir = Path(workdir or tempfile.mkdtemp(prefix="isofilter-"))
        self.workdir.mkdir(parents=True, exist_ok=True)
        self._buf = [[] for _ in range(groups)]
        self._buffered = 0
        self.count = 0

    def add(self, M: BasisMatroid, payload: str = ""):
        h = M.invariant_hash
        self._buf[h % self.g].append(f"{h:016x}\t{M.serialize()}\t{payload}\n")
        self._buffered += 1
        self.count += 1
        if self._buffered >= self.batch_size:
            self._flush()

    def _flush(self):
        for gi, rows in enumerate(self._buf):
            if rows:
                path = self.workdir / f"group-{gi:05d}.txt"
                try:
                    with open(path, "a", encoding="utf-8") as fh:
                        fh.writelines(rows)
                except OSError as exc:
                    raise EngineError(f"isomorph filter group {gi}: {exc}") from exc
                rows.clear()
        self._buffered = 0

    def results(self):
        """Survivors as (matroid, payload), sorted by (rank, B line, payload)."""
        self._flush()
        out = []
        for gi in range(self.g):
            path = self.workdir / f"group-{gi:05d}.txt"
            if not path.exists():
                continue
            try:
                rows = path.read_text(encoding="utf-8").splitlines()
            except OSError as exc:
                raise EngineError(f"isomorph filter group {gi}: {exc}") from exc
            rows.sort()
            run_hash = None
            reps = []
            last_b = None
            for row in rows:
                h, bline, payload = row.split("\t", 2)
                if h != run_hash:
                    run_hash, reps, last_b = h, [], None
                if bline == last_b:
                    continue
                last_b = bline
                M = BasisMatroid.parse(bline)
                if any(is_isomorphic(M, R) for R in reps):
                    continue
                reps.append(M)
                out.append((M, payload))
        if self._own:
            shutil.rmtree(self.workdir, ignore_errors=True)
        out.sort(key=lambda t: (t[0].r, t[0].serialize(), t[1]))
        return out


def isomorph_filter(items, groups=DEFAULT_GROUPS, batch_size=DEFAULT_BATCH, workdir=None):
    f = IsomorphFilter(groups, batch_size, workdir)
    for M, payload in items:
        f.add(M, payload)
    return f.results()


class MemberIndex:
    """Iso-class lookup for a collection of matroids."""

    def __init__(self, matroids=()):
        self.buckets = {}
        for M in matroids:
            self.add(M)

    def add(self, M):
        self.buckets.setdefault(M.invariant_key(), []).append(M)

    def find(self, M):
        for i, R in enumerate(self.buckets.get(M.invariant_key(), ())):
            if is_isomorphic(M, R):
                return R
        return None

    def __contains__(self, M):
        return self.find(M) is not None

    def __len__(self):
        return sum(len(v) for v in self.buckets.values())


# ---------------------------------------------------------------------------
# generation


def _extend_parent(args):
    conf_line, F, fast = args
    A = LinearRep.parse(conf_line)
    return confined_simple_extensions(A, F, fast)


def _map(fn, items, jobs):
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [fn(x) for x in items]


def _zstr(z):
    return ",".join(str(x) for x in z)


def generate_level(spec: ClassSpec, n: int, store: LevelStore, fast=False, jobs=1, groups=DEFAULT_GROUPS,
                   batch_size=DEFAULT_BATCH, force=False):
    """Build level n from level n-1 (plus seeds of size n); returns the member records."""
    if store.is_complete(n) and not force:
        return store.read_level(n)
    t0 = time.time()
    seeds = [(nm, rec) for nm, rec in spec.seed_records() if rec.matroid.n == n]
    n0 = min(rec.matroid.n for _, rec in spec.seed_records())
    if n < n0:
        raise EngineError(f"level {n} is below the smallest seed size {n0}")
    parents = []
    if n > n0:
        if not store.is_complete(n - 1):
            raise EngineError(f"level {n - 1} of {spec.name} is missing")
        parents = store.read_level(n - 1)
    tmp = store.tmpdir()
    try:
        filt = IsomorphFilter(groups, batch_size, tmp)
        results = _map(_extend_parent, [(p.conf.serialize(), spec.F, fast) for p in parents], jobs)
        raw = 0
        for pi, (parent, cols) in enumerate(zip(parents, results)):
            for z in cols:
                M = extension_matroid(parent.matroid, parent.conf.with_column(z))
                filt.add(M, f"E {pi} {_zstr(z)} 0")
                filt.add(dual_standard_matroid(M), f"E {pi} {_zstr(z)} 1")
                raw += 2
        for si, (nm, rec) in enumerate(spec.seed_records()):
            if rec.matroid.n == n:
                filt.add(rec.matroid, f"S {si}")
        survivors = filt.results()
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    records = []
    for M, payload in survivors:
        rec = _resolve(payload, parents, spec)
        if rec.matroid != M:
            raise EngineError("resolved record does not match its matroid")
        records.append(rec)
    store.write_level(n, records)
    log.info("%s n=%d: %d raw extensions, %d members, %.1fs", spec.name, n, raw, len(records),
             time.time() - t0)
    return records


def _lockstep(parent: MemberRecord, z) -> MemberRecord:
    conf = parent.conf.with_column(z)
    M = matroid_of(conf)
    zc = carrier_column_for(parent.carrier, [x != 0 for x in z], M)
    if zc is None:
        raise EngineError("no carrier column matches a confined extension")
    return MemberRecord(M, conf, parent.carrier.with_column(zc))


def _resolve(payload: str, parents, spec: ClassSpec) -> MemberRecord:
    parts = payload.split()
    if parts[0] == "S":
        return spec.seed_records()[int(parts[1])][1]
    pi, z, dual = int(parts[1]), tuple(int(x) for x in parts[2].split(",")), parts[3] == "1"
    rec = _lockstep(parents[pi], z)
    return dual_record(rec) if dual else rec


def ensure_levels(spec, upto, store, **kw):
    n0 = min(rec.matroid.n for _, rec in spec.seed_records())
    for n in range(n0, upto + 1):
        if not store.is_complete(n):
            generate_level(spec, n, store, **kw)


# ---------------------------------------------------------------------------
# candidate streams


def _carrier_matroid(rep: LinearRep):
    return matroid_of(rep)


def extension_candidates(spec: ClassSpec, n: int, store: LevelStore, groups=DEFAULT_GROUPS,
                         batch_size=DEFAULT_BATCH, enforce_threshold=True):
    """Carrier single-element extensions of level n-1 and their duals, isomorph-filtered.

    Returns (matroid, carrier rep) pairs.
    """
    if enforce_threshold and n < spec.carrier_threshold:
        raise EngineError(f"n={n} is below the carrier threshold {spec.carrier_threshold}")
    parents = store.read_level(n - 1)
    tmp = store.tmpdir()
    try:
        filt = IsomorphFilter(groups, batch_size, tmp)
        for parent in parents:
            for z in all_carrier_extensions(parent.carrier):
                rep = parent.carrier.with_column(z)
                M = extension_matroid(parent.matroid, rep)
                line = rep.serialize()
                filt.add(M, "P " + line)
                filt.add(dual_standard_matroid(M), "D " + line)
        out = [(M, _candidate_rep(p)) for M, p in filt.results()]
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return out


def _candidate_rep(payload: str) -> LinearRep:
    kind, line = payload.split(" ", 1)
    rep = LinearRep.parse(line)
    return dual_rep_standard(rep) if kind == "D" else rep


def splice_candidates(spec: ClassSpec, n: int, store: LevelStore, groups=DEFAULT_GROUPS,
                      batch_size=DEFAULT_BATCH):
    """Simple, cosimple M[A'|v_e|v_f] where both single extensions of A' are level n-1 members."""
    base = store.read_level(n - 2)
    index = MemberIndex(rec.matroid for rec in store.read_level(n - 1))
    tmp = store.tmpdir()
    try:
        filt = IsomorphFilter(groups, batch_size, tmp)
        for parent in base:
            A = parent.carrier
            X = [z for z in all_carrier_extensions(A) if matroid_of(A.with_column(z)) in index]
            for i in range(len(X)):
                for j in range(i + 1, len(X)):
                    rep = A.with_column(X[i]).with_column(X[j])
                    M = matroid_of(rep)
                    if not (M.is_simple() and M.is_cosimple()):
                        continue
                    line = rep.serialize()
                    filt.add(M, "P " + line)
                    filt.add(dual_standard_matroid(M), "D " + line)
        out = [(M, _candidate_rep(p)) for M, p in filt.results()]
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return out


def pair_deletable(M: BasisMatroid, index_n1: MemberIndex, index_n2: MemberIndex) -> bool:
    for x in range(M.n):
        Mx = M.delete(x)
        if Mx not in index_n1:
            continue
        for y in range(x + 1, M.n):
            My = M.delete(y)
            if My in index_n1 and M.minor(delete=[x, y]) in index_n2:
                return True
    return False


# ---------------------------------------------------------------------------
# membership and the sieve


class Membership:
    """Is a matroid in the class?  Level lookup for stored sizes, else a confined-rep search.

    Verdicts are memoised per isomorphism class.
    """

    def __init__(self, spec: ClassSpec, store: LevelStore | None = None):
        self.spec = spec
        self.store = store
        self.levels = {}
        self.memo = {}
        self.searches = 0

    def _level(self, n):
        if n not in self.levels:
            if self.store is not None and self.store.is_complete(n):
                self.levels[n] = MemberIndex(rec.matroid for rec in self.store.read_level(n))
            else:
                self.levels[n] = None
        return self.levels[n]

    def __call__(self, M: BasisMatroid) -> bool:
        key = M.invariant_key()
        bucket = self.memo.setdefault(key, [])
        for R, verdict in bucket:
            if is_isomorphic(M, R):
                return verdict
        lvl = self._level(M.n)
        if lvl is not None and M in lvl:
            verdict = True
        else:
            self.searches += 1
            verdict = find_confined_rep(M, self.spec.F, self.spec.proxy.field) is not None
        bucket.append((M, verdict))
        return verdict


def single_element_minors(M: BasisMatroid, first=None):
    """Deletions and contractions, those of element `first` leading."""
    order = list(range(M.n))
    if first is not None:
        order.remove(first)
        order.insert(0, first)
    for e in order:
        yield ("c", e), M.contract(e)
        yield ("d", e), M.delete(e)


def is_minimal_nonmember(M: BasisMatroid, member: Membership, first=None) -> bool:
    """All single-element deletions and contractions are members."""
    for _, child in single_element_minors(M, first):
        if not member(child):
            return False
    return True


def sieve_excluded(spec: ClassSpec, n: int, candidates, store: LevelStore, member: Membership | None = None,
                   groups=DEFAULT_GROUPS):
    """Excluded minors of size n among the candidates (closed under duality and Delta-Y)."""
    member = member or Membership(spec, store)
    level = MemberIndex(rec.matroid for rec in store.read_level(n))
    survivors = []
    dropped_member = dropped_minor = 0
    for M, _rep in candidates:
        if M in level:
            dropped_member += 1
            continue
        # the newest element is the last one for primal candidates, the first for duals
        if not is_minimal_nonmember(M, member, first=M.n - 1):
            dropped_minor += 1
            continue
        survivors.append(M)
    closed = []
    for M in survivors:
        closed.extend(delta_y_closure(M, with_duals=True))
    result = [M for M, _ in isomorph_filter(((M, "") for M in closed), groups=groups)]
    log.info("%s n=%d sieve: %d candidates, %d members, %d with smaller excluded minors, %d excluded",
             spec.name, n, len(candidates), dropped_member, dropped_minor, len(result))
    return result


def verify_base_excluded(spec: ClassSpec):
    """For each base excluded minor: no confined rep, and every single-element minor has one."""
    report = []
    for nm in spec.base_excluded:
        B = catalog(nm)
        fails = find_confined_rep(B, spec.F, spec.proxy.field) is None
        minors_ok = True
        bad = None
        for what, child in single_element_minors(B):
            if find_confined_rep(child, spec.F, spec.proxy.field) is None:
                minors_ok = False
                bad = what
                break
        report.append({"name": nm, "n": B.n, "r": B.r, "not_member": fails, "minors_members": minors_ok,
                       "ok": fails and minors_ok, "bad_minor": bad})
    return report


def ch_hunt(spec: ClassSpec, n: int, store: LevelStore, member: Membership | None = None):
    """Hunt for excluded minors with disjoint circuit-hyperplanes among extensions of level n.

    Returns (report dict, list of excluded minors found at size n + 1).
    """
    member = member or Membership(spec, store)
    recs = store.read_level(n)
    level_next = None
    if store.is_complete(n + 1):
        level_next = MemberIndex(rec.matroid for rec in store.read_level(n + 1))
    selected = 0
    with_ext = 0
    cands = []
    for rec in recs:
        M = rec.matroid
        full = M.ground
        if not any(M.is_independent(full ^ h) for h in M.circuit_hyperplanes()):
            continue
        selected += 1
        found_here = False
        for z in all_carrier_extensions(rec.carrier):
            rep = rec.carrier.with_column(z)
            X = matroid_of(rep)
            chs = X.circuit_hyperplanes()
            if not any(a & b == 0 for i, a in enumerate(chs) for b in chs[i + 1:]):
                continue
            if not X.is_3connected():
                continue
            found_here = True
            cands.append((X, rep))
        with_ext += found_here
    uniq = isomorph_filter((X, rep.serialize()) for X, rep in cands)
    members = 0
    contain = 0
    out = []
    for X, payload in uniq:
        if level_next is not None:
            inside = X in level_next
        else:
            hint = LinearRep.parse(payload)
            inside = find_confined_rep(X, spec.F, spec.proxy.field, zero_pattern=hint) is not None
        if inside:
            members += 1
            continue
        if not is_minimal_nonmember(X, member, first=X.n - 1):
            contain += 1
            continue
        out.append(X)
    report = {"n": n, "members": len(recs), "selected": selected, "with_extensions": with_ext,
              "candidates": len(uniq), "in_class": members, "proper_excluded_minor": contain,
              "survivors": len(out)}
    return report, out


def splice_threshold(spec: ClassSpec) -> int:
    """Size from which splice candidates alone are known to be complete."""
    return max(13, max(rec.matroid.n for _, rec in spec.seed_records()) + 6)


def excluded_minors(spec: ClassSpec, max_n: int, store: LevelStore, fast=False, jobs=1, groups=DEFAULT_GROUPS,
                    batch_size=DEFAULT_BATCH, use_splices=False, verify_base=True):
    """Full pipeline; returns a report with the base list and the sieve output per n."""
    report = {"class": spec.name, "base": [], "levels": {}, "excluded": {}}
    if verify_base:
        report["base"] = verify_base_excluded(spec)
    else:
        report["base"] = [{"name": nm, "n": catalog(nm).n, "ok": None} for nm in spec.base_excluded]
    member = Membership(spec, store)
    n0 = min(rec.matroid.n for _, rec in spec.seed_records())
    for n in range(n0, max_n + 1):
        recs = generate_level(spec, n, store, fast=fast, jobs=jobs, groups=groups, batch_size=batch_size)
        report["levels"][n] = rank_counts([r.matroid for r in recs])
        if n < spec.carrier_threshold or n == n0:
            continue
        prior = store.read_excluded(n)
        if prior is not None:
            report["excluded"][n] = prior
            continue
        # extensions below the splice threshold, splices at or above it, both when cross-validating
        cands = []
        if n < splice_threshold(spec) or use_splices:
            cands += extension_candidates(spec, n, store, groups=groups, batch_size=batch_size)
        if n >= splice_threshold(spec) or (use_splices and n >= n0 + 2):
            cands += splice_candidates(spec, n, store, groups=groups, batch_size=batch_size)
        found = sieve_excluded(spec, n, cands, store, member, groups=groups)
        base_idx = MemberIndex(catalog(nm) for nm in spec.base_excluded)
        new = [M for M in found if M not in base_idx]
        store.write_excluded(n, new)
        report["excluded"][n] = new
    return report
