"""Stage orchestration: files in, files out, deterministic everywhere.

A stage turns drawings of K_{n-1} into drawings of K_n within a
crossing budget.  The work unit is one input drawing; workers share
nothing and their per-drawing results are merged at the end, so the
output is independent of worker count and sharding (records are emitted
as canonical representatives and sorted).  Anomalies (counts below the
known floor, parity violations, negative deficiency, heavy-subdrawing
hits) are collected as first-class artifacts, never asserted away.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import time
from dataclasses import dataclass, field

from . import canonical, counting
from .drawing import (FileFormatError, iter_records, loads, normalize,
                      to_text, validate)
from .equivalence import ErrorSet, drawing_hash, iter_representative_extensions
from .extension import iter_extensions, minimality_filter
from .k12check import CASE_ANOMALY, CASE_SKIP, run_k12_stage


@dataclass
class StageRun:
    stage_n: int
    budget: int
    mode: str
    input_path: str
    output_path: str
    shard: tuple[int, int] = (0, 1)
    drawings_in: int = 0
    drawings_out: int = 0
    raw_generated: int = 0
    histogram: dict[int, int] = field(default_factory=dict)
    cpu_seconds: float = 0.0
    wall_seconds: float = 0.0
    use_parity: bool = True
    input_errors: list[str] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    error_lines: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        d["shard"] = list(self.shard)
        return json.dumps(d, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "StageRun":
        d = json.loads(text)
        d["histogram"] = {int(k): v for k, v in d["histogram"].items()}
        d["shard"] = tuple(d["shard"])
        return cls(**d)

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "StageRun":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_json(fh.read())


def _load_inputs(path, expect_n: int | None):
    """Parse and validate input records; returns (drawings, error lines)."""
    errors = []
    drawings = []
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    for idx, rec in iter_records(text):
        if isinstance(rec, FileFormatError):
            errors.append(f"record {idx}: {rec}")
            continue
        rep = validate(rec)
        if not rep.ok:
            errors.append(f"record {idx}: " + "; ".join(rep.violations[:3]))
            continue
        if expect_n is not None and rec.n_real != expect_n:
            errors.append(f"record {idx}: has n={rec.n_real}, expected {expect_n}")
            continue
        drawings.append(normalize(rec))
    return drawings, errors


def _alg1_worker(args):
    text, budget, distinct = args
    t0 = time.process_time()
    base = loads(text)[0]
    notes: list[str] = []
    codes = set()
    raw = 0
    for ext in iter_extensions(base, budget, distinct_faces=distinct,
                               notes=notes):
        raw += 1
        codes.add(canonical.canonical_code(ext.drawing))
    return [c.hex() for c in codes], raw, notes, time.process_time() - t0


def _alg2_worker(args):
    text, budget, _distinct = args
    t0 = time.process_time()
    base = loads(text)[0]
    notes: list[str] = []
    errors = ErrorSet()
    out = []
    raw = 0
    for ext in iter_representative_extensions(base, budget, notes=notes,
                                              errors=errors):
        raw += 1
        if minimality_filter(ext.drawing, base.x):
            out.append(to_text(ext.drawing))
    err_lines = [rec.line() for rec in errors.records]
    return out, raw, notes + err_lines, time.process_time() - t0


def _map_jobs(worker, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with multiprocessing.Pool(workers) as pool:
            yield from pool.imap(worker, jobs)
    else:
        for job in jobs:
            yield worker(job)


def _checkpoint_write(path, done: int, payload: list[str]) -> None:
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        json.dump({"done": done, "payload": payload}, fh)
    os.replace(tmp, path)


def run_stage(n: int, budget: int, input_path, output_path, *,
              mode: str = "alg1", shard: tuple[int, int] = (0, 1),
              workers: int = 1, use_parity: bool = True,
              distinct_faces: bool = True,
              known_cr: dict[int, int] | None = None,
              checkpoint=None, resume: bool = False,
              stop_after: int | None = None) -> StageRun:
    """Generate drawings of K_n with at most ``budget`` crossings from a
    file of K_{n-1} drawings.

    alg1 output is isomorphism-deduplicated and written as canonical
    representatives in sorted code order; alg2 output keeps one drawing
    per equivalence-class product (no isomorphism dedup) with the
    cheaper-subdrawing discard rule applied.  Shard (i, k) processes
    every k-th input starting at i; merging shard outputs and
    deduplicating reproduces the unsharded run.
    """
    if mode not in ("alg1", "alg2"):
        raise ValueError(f"unknown mode {mode!r}")
    wall0 = time.time()
    known = counting.KNOWN_CR if known_cr is None else known_cr
    run = StageRun(n, budget, mode, str(input_path), str(output_path),
                   shard=shard, use_parity=use_parity)
    inputs, run.input_errors = _load_inputs(input_path, n - 1)
    si, sk = shard
    mine = [d for idx, d in enumerate(inputs) if idx % sk == si]
    run.drawings_in = len(mine)

    done = 0
    payload: list[str] = []
    if resume and checkpoint and os.path.exists(checkpoint):
        with open(checkpoint, "r", encoding="ascii") as fh:
            state = json.load(fh)
        done = state["done"]
        payload = state["payload"]

    worker = _alg1_worker if mode == "alg1" else _alg2_worker
    jobs = [(to_text(d), budget, distinct_faces) for d in mine[done:]]
    if stop_after is not None:
        jobs = jobs[:max(0, stop_after - done)]

    codes: set[bytes] = set(bytes.fromhex(h) for h in payload) \
        if mode == "alg1" else set()
    records: list[str] = list(payload) if mode == "alg2" else []
    for result in _map_jobs(worker, jobs, workers):
        out, raw, notes, cpu = result
        run.raw_generated += raw
        run.notes.extend(nt for nt in notes if not nt.startswith("E "))
        run.error_lines.extend(nt for nt in notes if nt.startswith("E "))
        run.cpu_seconds += cpu
        if mode == "alg1":
            codes.update(bytes.fromhex(h) for h in out)
        else:
            records.extend(out)
        done += 1
        if checkpoint:
            pay = sorted(c.hex() for c in codes) if mode == "alg1" else records
            _checkpoint_write(checkpoint, done, pay)

    if stop_after is not None and done < len(mine):
        run.notes.append(f"stopped after {done} of {len(mine)} inputs")

    if mode == "alg1":
        outs = [canonical.drawing_from_code(c) for c in sorted(codes)]
    else:
        outs = [normalize(d) for d in loads("".join(sorted(records)))]
        outs.sort(key=lambda d: (d.x, to_text(d)))
    for d in outs:
        run.histogram[d.x] = run.histogram.get(d.x, 0) + 1
        floor = known.get(n)
        if floor is not None and d.x < floor:
            run.anomalies.append(
                f"drawing with {d.x} crossings is below the known floor "
                f"{floor} for K_{n}")
        if counting.deficiency(d) < 0:
            run.anomalies.append(
                f"drawing with {d.x} crossings lies below the conjectured "
                f"optimum Z({n})={counting.zed(n)}")
        if use_parity and n % 2 and n >= 5 and not counting.parity_ok(n, d.x):
            run.anomalies.append(
                f"drawing with {d.x} crossings violates the parity of Z({n})")
    run.drawings_out = len(outs)

    with open(output_path, "w", encoding="ascii", newline="\n") as fh:
        for d in outs:
            fh.write(to_text(d))
    if mode == "alg1":
        store = canonical.DedupStore(codes)
        store.save(str(output_path) + ".codes")
    run.wall_seconds = time.time() - wall0
    if run.cpu_seconds == 0.0:
        run.cpu_seconds = run.wall_seconds
    run.save(str(output_path) + ".stats.json")
    return run


# ---------------------------------------------------------------------------
# Compound final stage
# ---------------------------------------------------------------------------


@dataclass
class K12Report:
    input_path: str
    extend_cr: int
    target_x: int
    threshold: int
    bases: int = 0
    extensions: int = 0
    discarded_minimality: int = 0
    faces_checked: int = 0
    verdict_lines: list[str] = field(default_factory=list)
    hit_lines: list[str] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)
    error_lines: list[str] = field(default_factory=list)
    input_errors: list[str] = field(default_factory=list)
    cpu_seconds: float = 0.0

    @property
    def hits(self) -> int:
        return len(self.hit_lines)

    def conclusion(self) -> str:
        real = (self.target_x, self.threshold) == (151, 104)
        if self.hits:
            msg = (f"{self.hits} extension(s) reach a subdrawing with >= "
                   f"{self.threshold} crossings")
            if real:
                msg += "; this certifies cr(K_13) < 225"
            return msg
        msg = (f"no extension with {self.target_x} crossings contains a "
               f"subdrawing with >= {self.threshold} crossings")
        if real:
            msg += "; over the full input set this implies cr(K_13) > 217"
        return msg

    def to_text(self) -> str:
        lines = [
            f"# compound stage: input {self.input_path}",
            f"# extend to {self.extend_cr} crossings, test extensions at "
            f"{self.target_x} for subdrawings >= {self.threshold}",
            f"# bases={self.bases} extensions={self.extensions} "
            f"discarded={self.discarded_minimality} "
            f"faces_checked={self.faces_checked}",
        ]
        lines += self.verdict_lines
        lines += self.hit_lines
        lines += [f"# anomaly: {a}" for a in self.anomalies]
        lines += self.error_lines
        lines.append("# " + self.conclusion())
        return "\n".join(lines) + "\n"


def _k12_worker(args):
    text, extend_cr, target_x, threshold = args
    t0 = time.process_time()
    base10 = loads(text)[0]
    rep_report = K12Report("", extend_cr, target_x, threshold)
    errors = ErrorSet()
    base_hash = drawing_hash(base10)
    n_faces10 = len(base10.face_cycles())
    for ext in iter_representative_extensions(base10, extend_cr,
                                              errors=errors):
        d11 = ext.drawing
        if d11.x < extend_cr:
            rep_report.anomalies.append(
                f"extension of base {base_hash} has only {d11.x} crossings, "
                f"below the stage value {extend_cr}")
            continue
        if not minimality_filter(d11, base10.x):
            rep_report.discarded_minimality += 1
            continue
        rep_report.extensions += 1
        k11_hash = drawing_hash(d11)
        for f_prime in range(n_faces10):
            verdicts = run_k12_stage(ext, base10, f_prime, target_x=target_x,
                                     threshold=threshold, errors=errors)
            rep_report.faces_checked += len(verdicts)
            for v in verdicts:
                if v.case != CASE_SKIP:
                    rep_report.verdict_lines.append(v.line(k11_hash))
                if v.case == CASE_ANOMALY:
                    rep_report.anomalies.append(
                        f"face {v.face} of k11={k11_hash} reaches only "
                        f"m={v.m} < {target_x - 1}")
                for h in v.hits:
                    keys = ";".join(
                        ",".join(f"{a}-{b}" for a, b in key) or "none"
                        for key in h.product_key)
                    rep_report.hit_lines.append(
                        f"HIT base={base_hash} F={ext.face} F'={f_prime} "
                        f"F''={v.face} v={h.vertex} cr={h.count} "
                        f"classes={keys}")
    rep_report.error_lines = [rec.line() for rec in errors.records]
    rep_report.cpu_seconds = time.process_time() - t0
    return rep_report


def run_k12_compound(input_path, report_path=None, *, extend_cr: int = 100,
                     target_x: int = 151, threshold: int = 104,
                     workers: int = 1) -> K12Report:
    """The integrated final stage: extend each input drawing by class
    products, immediately test each extension's faces, keep nothing.

    Extensions are tested face by face (per containing face of the
    base), and only verdicts and hits are retained; the intermediate
    drawings are discarded after use.
    """
    report = K12Report(str(input_path), extend_cr, target_x, threshold)
    inputs, report.input_errors = _load_inputs(input_path, None)
    report.bases = len(inputs)
    jobs = [(to_text(d), extend_cr, target_x, threshold) for d in inputs]
    for part in _map_jobs(_k12_worker, jobs, workers):
        report.extensions += part.extensions
        report.discarded_minimality += part.discarded_minimality
        report.faces_checked += part.faces_checked
        report.verdict_lines.extend(part.verdict_lines)
        report.hit_lines.extend(part.hit_lines)
        report.anomalies.extend(part.anomalies)
        report.error_lines.extend(part.error_lines)
        report.cpu_seconds += part.cpu_seconds
    if report_path:
        with open(report_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(report.to_text())
    return report


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    path: str
    records: int = 0
    failures: list[str] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        lines = [f"# verify {self.path}: {self.records} record(s)"]
        lines += [f"FAIL {msg}" for msg in self.failures]
        lines += [f"ANOMALY {msg}" for msg in self.anomalies]
        lines.append("# " + ("all records ok" if self.ok
                             else f"{len(self.failures)} failing record(s)"))
        return "\n".join(lines) + "\n"


def verify_file(path, *, use_parity: bool = True, ndp: bool = False) -> VerifyReport:
    """Validate every record: structure, goodness, crossing bookkeeping,
    the counting identity over all deletions, and the parity flag."""
    from .drawing import delete_vertex

    report = VerifyReport(str(path))
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    for idx, rec in iter_records(text):
        report.records += 1
        if isinstance(rec, FileFormatError):
            report.failures.append(f"record {idx}: {rec}")
            continue
        rep = validate(rec)
        if not rep.ok:
            for v in rep.violations:
                report.failures.append(f"record {idx}: {v}")
            continue
        n = rec.n_real
        if n >= 5:
            total = sum(delete_vertex(rec, v).x for v in range(1, n + 1))
            if total != (n - 4) * rec.x:
                report.failures.append(
                    f"record {idx}: deletion counts sum to {total}, "
                    f"expected (n-4)x = {(n - 4) * rec.x}")
        if use_parity and n % 2 and n >= 5 and not counting.parity_ok(n, rec.x):
            report.anomalies.append(
                f"record {idx}: {rec.x} crossings violates parity of Z({n})")
        if counting.deficiency(rec) < 0:
            report.anomalies.append(
                f"record {idx}: below the conjectured optimum "
                f"Z({n})={counting.zed(n)}")
        if ndp and n % 2 == 0:
            ok, witness = counting.ndp_check(rec)
            if not ok:
                report.anomalies.append(
                    f"record {idx}: deficiency doubles at vertex {witness}; "
                    f"duplicating it yields a drawing of K_{n + 1} below "
                    f"Z({n + 1})={counting.zed(n + 1)}")
    return report


# ---------------------------------------------------------------------------
# Stats
# ---------------------------------------------------------------------------


def stats_table(runs) -> str:
    """Stage counts and time costs, one row per crossing count."""
    lines = [f"{'drawings':<14}{'# drawings':>12}   cost of time"]
    for run in sorted(runs, key=lambda r: (r.stage_n, r.budget)):
        first = True
        for x in sorted(run.histogram):
            name = f"D_{run.stage_n}^{x}"
            cost = f"{run.cpu_seconds:.1f} s" if first else ""
            lines.append(f"{name:<14}{run.histogram[x]:>12}   {cost}")
            first = False
        if not run.histogram:
            lines.append(f"D_{run.stage_n}^<={run.budget}"
                         f"{0:>12}   {run.cpu_seconds:.1f} s")
    return "\n".join(lines) + "\n"


def stats_tsv(runs) -> str:
    lines = ["n\tcrossings\tcount\tmode\tcpu_seconds\twall_seconds"]
    for run in sorted(runs, key=lambda r: (r.stage_n, r.budget)):
        for x in sorted(run.histogram):
            lines.append(f"{run.stage_n}\t{x}\t{run.histogram[x]}\t"
                         f"{run.mode}\t{run.cpu_seconds:.3f}\t"
                         f"{run.wall_seconds:.3f}")
    return "\n".join(lines) + "\n"


def load_runs(paths) -> list[StageRun]:
    """Collect StageRun stats from files or directories."""
    runs = []
    for p in paths:
        if os.path.isdir(p):
            for name in sorted(os.listdir(p)):
                if name.endswith(".stats.json"):
                    runs.append(StageRun.load(os.path.join(p, name)))
        else:
            runs.append(StageRun.load(p))
    return runs
