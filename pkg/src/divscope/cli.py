"""Command-line front end: ``divscope <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .align import ScoringScheme, sw_align
from .assign import (ReferenceDB, classify, read_assignment_labels, read_labels, summarize,
                     write_assignments)
from .density import hexbin, log_counts, parallel_coords, write_hexbin, write_parallel_coords
from .distmat import (ids_path, pairwise_cross, pairwise_self, read_ids, read_matrix, write_ids,
                      write_matrix, write_tsv)
from .exceptions import DivscopeError
from .mds import embed, gram_from_distances, read_embedding, solver_options, write_embedding
from .pipeline import PipelineConfig, run_pipeline
from .rsvd import eigs_sym, stable_rank
from .seqio import parse_fasta, subsample, write_fasta

log = logging.getLogger("divscope")


def _axes(text):
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("axes must look like '1,2'")
    if i < 1 or j < 1:
        raise argparse.ArgumentTypeError("axes are 1-based")
    return i - 1, j - 1


def _solver_flags(p):
    p.add_argument("--rank", type=int, required=True, help="number of eigenpairs")
    p.add_argument("--seed", type=int, default=0, help="seed of the Gaussian sketch")
    p.add_argument("--oversample", type=int, default=10, help="extra sketch columns")
    p.add_argument("--power-iters", type=int, default=2, help="range-finder power iterations")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divscope",
        description="Alignment distances, randomized classical MDS, homology-gap "
                    "assignment and density exports for marker-gene reads.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subsample", help="draw k reads uniformly without replacement")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("align", help="align two sequences and print score, distance, spans")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--match", type=int, default=1)
    p.add_argument("--mismatch", type=int, default=-1)
    p.add_argument("--gap", type=int, default=-2)

    p = sub.add_parser("dist", help="pairwise distance matrix (self, or cross with --ref)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--ref", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--tsv", default=None, help="also write a tab-separated copy here")

    p = sub.add_parser("mds", help="classical MDS of a DVS1 distance matrix")
    p.add_argument("--dist", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ids", default=None, help="FASTA or id list giving row names")
    _solver_flags(p)

    p = sub.add_parser("spectrum", help="print leading eigenvalues and stable rank of the Gram matrix")
    p.add_argument("--dist", required=True)
    _solver_flags(p)

    p = sub.add_parser("assign", help="homology-gap species assignment")
    p.add_argument("--queries", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--cross", default=None, help="precomputed query x reference DVS1 matrix")
    p.add_argument("--gap", type=float, default=0.97)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("hexbin", help="hexagonal-bin counts on two embedding axes")
    p.add_argument("--embed", required=True)
    p.add_argument("--axes", type=_axes, default=(0, 1), help="1-based, e.g. 1,2")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("pcoords", help="parallel-coordinates table of the leading dimensions")
    p.add_argument("--embed", required=True)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--labels", default=None, help="assignment TSV or id<TAB>label file")
    p.add_argument("--species", default=None, help="keep only rows with this label")
    p.add_argument("--out", required=True)

    p = sub.add_parser("pipeline", help="run every stage end to end")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--refs", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--rank", type=int, default=50)
    p.add_argument("--gap", type=float, default=0.97)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--oversample", type=int, default=10)
    p.add_argument("--power-iters", type=int, default=2)
    p.add_argument("--outdir", required=True)
    return parser


def _row_ids(dist_path, ids_arg, n):
    if ids_arg is not None:
        try:
            ids = parse_fasta(ids_arg).ids
        except DivscopeError:
            ids = read_ids(ids_arg)
    else:
        try:
            ids = read_ids(ids_path(dist_path))
        except FileNotFoundError:
            ids = [str(i) for i in range(n)]
    if len(ids) != n:
        raise DivscopeError(f"{len(ids)} ids for a matrix of {n} rows")
    return ids


def cmd_subsample(args):
    rs = subsample(parse_fasta(args.input), args.k, args.seed)
    write_fasta(rs, args.out)


def cmd_align(args):
    res = sw_align(args.a, args.b, ScoringScheme(args.match, args.mismatch, args.gap))
    print(f"score\t{res.score}")
    print(f"distance\t{res.distance}")
    print(f"edits\t{res.edits}")
    print(f"unaligned\t{res.unaligned}")
    print(f"span_a\t{res.span_a[0]}\t{res.span_a[1]}")
    print(f"span_b\t{res.span_b[0]}\t{res.span_b[1]}")


def cmd_dist(args):
    queries = parse_fasta(args.input)
    if args.ref is None:
        d = pairwise_self(queries, threads=args.threads)
        col_ids = None
    else:
        refs = parse_fasta(args.ref)
        d = pairwise_cross(queries, refs, threads=args.threads)
        col_ids = refs.ids
    write_matrix(d, args.out)
    write_ids(ids_path(args.out), queries.ids)
    if args.tsv:
        write_tsv(d, args.tsv, queries.ids, col_ids)


def cmd_mds(args):
    d = read_matrix(args.dist)
    ids = _row_ids(args.dist, args.ids, d.rows)
    e = embed(gram_from_distances(d), args.rank, oversampling=args.oversample,
              power_iters=args.power_iters, seed=args.seed, threads=args.threads)
    write_embedding(e.with_ids(ids), args.out, extra={
        "seed": args.seed, "oversampling": args.oversample, "power_iters": args.power_iters})
    if e.truncated:
        log.warning("only %d positive eigenvalues among the %d requested", e.r, args.rank)


def cmd_spectrum(args):
    g = gram_from_distances(read_matrix(args.dist))
    opts = solver_options(g.n, args.rank, args.oversample, args.power_iters, args.seed,
                          args.threads)
    spec = eigs_sym(g.values, opts)
    for k, lam in enumerate(spec.eigenvalues, 1):
        print(f"lambda_{k}\t{float(lam)!r}")
    print(f"stable_rank\t{stable_rank(g.values)!r}")
    print(f"residual_fro\t{spec.resid!r}")


def cmd_assign(args):
    queries = parse_fasta(args.queries)
    refs = parse_fasta(args.refs)
    db = ReferenceDB(refs, read_labels(args.labels))
    if args.cross:
        cross = read_matrix(args.cross)
    else:
        cross = pairwise_cross(queries, refs, threads=args.threads)
    results = classify(queries, db, cross, args.gap)
    write_assignments(results, args.out)
    counts = summarize(results)
    print("\t".join(f"{k}={v}" for k, v in counts.items()))


def cmd_hexbin(args):
    grid = log_counts(hexbin(read_embedding(args.embed), args.axes, args.radius))
    write_hexbin(grid, args.out)


def cmd_pcoords(args):
    e = read_embedding(args.embed)
    labels = read_assignment_labels(args.labels) if args.labels else None
    write_parallel_coords(parallel_coords(e, args.k, labels, args.species), args.out)


def cmd_pipeline(args):
    cfg = PipelineConfig(input=args.input, outdir=args.outdir, refs=args.refs, labels=args.labels,
                         rank=args.rank, gap=args.gap, seed=args.seed, threads=args.threads,
                         oversampling=args.oversample, power_iters=args.power_iters)
    status, manifest = run_pipeline(cfg)
    if status != 0:
        print(f"divscope: {manifest.status}", file=sys.stderr)
    else:
        for a in manifest.artifacts:
            print(f"{a['stage']}\t{a['path']}")
    return status


COMMANDS = {
    "subsample": cmd_subsample,
    "align": cmd_align,
    "dist": cmd_dist,
    "mds": cmd_mds,
    "spectrum": cmd_spectrum,
    "assign": cmd_assign,
    "hexbin": cmd_hexbin,
    "pcoords": cmd_pcoords,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args) or 0
    except (DivscopeError, ValueError, OSError) as exc:
        print(f"divscope {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
