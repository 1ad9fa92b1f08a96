"""End-to-end run: distances, double centering, eigenpairs, embedding, assignment, density exports.

Each stage writes its outputs to disk before the next one starts. Files are
written under a ``.partial`` name and renamed once complete, so a failed
run leaves its incomplete output recognisable.
"""

from __future__ import annotations

import json
import logging
import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .align import DEFAULT_SCORING
from .assign import ReferenceDB, classify, read_labels, summarize, write_assignments
from .density import hexbin, parallel_coords, write_hexbin, write_parallel_coords
from .distmat import (ids_path, pairwise_cross, pairwise_self, read_ids, read_matrix, write_ids,
                      write_matrix)
from .exceptions import StageError
from .mds import (embedding_from_spectrum, gram_from_distances, meta_path, solver_options,
                  write_embedding)
from .rsvd import eigs_sym, stable_rank
from .seqio import parse_fasta

log = logging.getLogger(__name__)

STAGES = ("dist", "gram", "eigs", "embed", "assign", "hexbin", "pcoords")
EXIT_OK = 0
EXIT_CONFIG = 2
# stage errors exit with 3 + position in STAGES
STAGE_EXIT = {name: 3 + k for k, name in enumerate(STAGES)}

HEX_AXES = ((0, 1), (0, 2), (1, 2))
PCOORDS_DIMS = 6


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    input: str
    outdir: str
    refs: str | None = None
    labels: str | None = None
    rank: int = 50
    gap: float = 0.97
    seed: int = 0
    threads: int = 1
    oversampling: int = 10
    power_iters: int = 2

    def validate(self):
        if self.rank < 1:
            raise ConfigError("rank must be >= 1")
        if not (0 < self.gap <= 1):
            raise ConfigError("gap must lie in (0, 1]")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if (self.refs is None) != (self.labels is None):
            raise ConfigError("--refs and --labels must be given together")


@dataclass
class Manifest:
    config: dict
    artifacts: list = field(default_factory=list)
    stages: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    status: str = "running"

    def add(self, path, stage):
        self.artifacts.append({"path": os.fspath(path), "stage": stage, "seconds": None})

    def close_stage(self, stage, seconds):
        self.stages[stage] = {"seconds": seconds}
        for a in self.artifacts:
            if a["stage"] == stage:
                a["seconds"] = seconds

    def write(self, path):
        tmp = f"{path}.partial"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=False)
            fh.write("\n")
        os.replace(tmp, path)


@contextmanager
def _artifact(manifest, path, stage):
    """Yield a temporary path; promote it and record it once the body succeeds."""
    tmp = f"{path}.partial"
    yield tmp
    os.replace(tmp, path)
    manifest.add(path, stage)


@contextmanager
def _stage(manifest, name):
    t0 = time.perf_counter()
    log.info("stage %s: start", name)
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        manifest.close_stage(name, round(time.perf_counter() - t0, 6))
    log.info("stage %s: done in %.3fs", name, manifest.stages[name]["seconds"])


def run_pipeline(cfg: PipelineConfig) -> tuple[int, Manifest]:
    """Run every stage. Returns (exit status, manifest).

    Errors are logged with their stage name, and the exit status encodes
    the failing stage.
    """
    out = Path(cfg.outdir)
    manifest = Manifest(config=asdict(cfg))
    try:
        cfg.validate()
        out.mkdir(parents=True, exist_ok=True)
    except (ConfigError, OSError) as exc:
        log.error("config: %s", exc)
        manifest.status = f"error: config: {exc}"
        return EXIT_CONFIG, manifest

    manifest_path = out / "manifest.json"
    try:
        _run_stages(cfg, out, manifest)
    except StageError as exc:
        log.error("%s", exc)
        manifest.status = f"error: {exc.stage}: {exc.cause}"
        manifest.write(manifest_path)
        return STAGE_EXIT[exc.stage], manifest
    manifest.status = "ok"
    manifest.write(manifest_path)
    return EXIT_OK, manifest


def _run_stages(cfg, out, manifest):
    dvs = out / "distances.dvs"
    with _stage(manifest, "dist"):
        reads = parse_fasta(cfg.input)
        d = pairwise_self(reads, DEFAULT_SCORING, threads=cfg.threads)
        with _artifact(manifest, dvs, "dist") as tmp:
            write_matrix(d, tmp)
        with _artifact(manifest, ids_path(dvs), "dist") as tmp:
            write_ids(tmp, reads.ids)
        del d

    with _stage(manifest, "gram"):
        g = gram_from_distances(read_matrix(dvs))
        ids = read_ids(ids_path(dvs))

    with _stage(manifest, "eigs"):
        opts = solver_options(g.n, cfg.rank, cfg.oversampling, cfg.power_iters, cfg.seed,
                              cfg.threads)
        spec = eigs_sym(g.values, opts)
        spectrum_path = out / "spectrum.tsv"
        with _artifact(manifest, spectrum_path, "eigs") as tmp:
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("index\teigenvalue\n")
                for k, lam in enumerate(spec.eigenvalues, 1):
                    fh.write(f"{k}\t{float(lam)!r}\n")
        del g

    emb_path = out / "embedding.tsv"
    with _stage(manifest, "embed"):
        emb = embedding_from_spectrum(spec, cfg.rank).with_ids(ids)
        with _artifact(manifest, emb_path, "embed") as tmp, \
                _artifact(manifest, meta_path(emb_path), "embed") as tmp_meta:
            write_embedding(emb, tmp, meta_dest=tmp_meta, extra={
                "seed": cfg.seed, "oversampling": opts.oversampling,
                "power_iters": opts.power_iters, "stable_rank_estimate": repr(_safe_st(spec)),
            })

    labels = None
    if cfg.refs is not None:
        with _stage(manifest, "assign"):
            refs = parse_fasta(cfg.refs)
            db = ReferenceDB(refs, read_labels(cfg.labels))
            cross = pairwise_cross(reads, refs, DEFAULT_SCORING, threads=cfg.threads)
            with _artifact(manifest, out / "cross.dvs", "assign") as tmp:
                write_matrix(cross, tmp)
            results = classify(reads, db, cross, cfg.gap)
            with _artifact(manifest, out / "assignments.tsv", "assign") as tmp:
                write_assignments(results, tmp)
            manifest.summary = summarize(results)
            labels = results

    with _stage(manifest, "hexbin"):
        pairs = [(i, j) for i, j in HEX_AXES if j < emb.r]
        if not pairs:
            raise ValueError(f"embedding has {emb.r} positive dimension(s); hexbin needs 2")
        for i, j in pairs:
            grid = hexbin(emb, (i, j))
            with _artifact(manifest, out / f"hexbin_{i + 1}_{j + 1}.tsv", "hexbin") as tmp:
                write_hexbin(grid, tmp)

    with _stage(manifest, "pcoords"):
        table = parallel_coords(emb, min(PCOORDS_DIMS, emb.r), labels)
        with _artifact(manifest, out / "pcoords.tsv", "pcoords") as tmp:
            write_parallel_coords(table, tmp)


def _safe_st(spec):
    try:
        return stable_rank(spec)
    except ValueError:
        return float("nan")
