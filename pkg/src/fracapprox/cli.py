"""Reproducible experiment runner.

Every subcommand reads a JSON config (flags override), derives all randomness
from the recorded seed, and writes CSV files whose first lines carry the tool
version, a hash of the resolved config, and the seed.  Outputs are
byte-identical for identical (config, seed) regardless of --jobs.

Exit codes: 0 success, 1 usage or config error, 2 scientific failure
(a certification or audit found a violation).
"""

from __future__ import annotations

import hashlib
import json
import math
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analysis import (
    SumSpec,
    audit_hyperplane_lemma,
    classify_sum,
    dimension_report,
    hs_upper_bound,
    layer_decay_experiment,
)
from .approx import parse_psi_spec, smallness_onset
from .diagnostics import (
    CertificationError,
    certify_decay,
    certify_doubling,
    certify_regularity,
    decay_alpha_from_regularity,
    default_r0,
    export_certificate_csv,
)
from .geometry import unit_ball_volume
from .ifs import BUNDLED_SYSTEMS, bundled_system, load_system, sample_measure

__all__ = ["main", "ExperimentConfig", "resolve_config"]


class UsageFailure(Exception):
    """Config or argument problem; maps to exit code 1."""


class ScientificFailure(Exception):
    """A certification or audit failed; maps to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    ifs_path: str | None = None
    psi_spec: str = "power:tau=2.5"
    seed: int = 0
    trials: int = 200
    blocks: tuple = (1, 6)
    output_dir: str = "out"
    tolerance: float = 1e-4
    alpha: float | None = None
    s: float | None = None
    kind: str = "measure_zero"
    taus: tuple = (2.0, 3.0, 4.0)
    samples: int = 100_000
    jobs: int = 1

    def hash(self) -> str:
        """Config fingerprint; excludes output_dir and jobs, which must not
        influence output bytes."""
        payload = asdict(self)
        payload.pop("output_dir")
        payload.pop("jobs")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise UsageFailure(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise UsageFailure(f"config file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise UsageFailure("config file must hold a JSON object")
    return data


def resolve_config(config_path: str | None, **overrides) -> ExperimentConfig:
    data = _load_config_file(config_path) if config_path else {}
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise UsageFailure(f"unknown config fields: {sorted(unknown)}")
    cfg = ExperimentConfig(**data)
    clean = {k: v for k, v in overrides.items() if v is not None}
    if clean:
        cfg = replace(cfg, **clean)
    if isinstance(cfg.blocks, list):
        cfg = replace(cfg, blocks=tuple(cfg.blocks))
    if isinstance(cfg.taus, list):
        cfg = replace(cfg, taus=tuple(cfg.taus))
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.trials < 1:
        raise UsageFailure("config field 'trials' must be >= 1")
    if cfg.samples < 1:
        raise UsageFailure("config field 'samples' must be >= 1")
    if len(cfg.blocks) != 2 or cfg.blocks[0] > cfg.blocks[1] or cfg.blocks[0] < 0:
        raise UsageFailure("config field 'blocks' must be a nonempty range [lo, hi]")
    if cfg.tolerance <= 0:
        raise UsageFailure("config field 'tolerance' must be positive")
    if cfg.jobs < 1:
        raise UsageFailure("config field 'jobs' must be >= 1")


def _resolve_system(cfg: ExperimentConfig):
    if not cfg.ifs_path:
        raise UsageFailure("config field 'ifs_path' is required (bundled name or file)")
    if cfg.ifs_path in BUNDLED_SYSTEMS:
        return bundled_system(cfg.ifs_path)
    path = Path(cfg.ifs_path)
    if not path.exists():
        raise UsageFailure(f"config field 'ifs_path': no such file {cfg.ifs_path!r}")
    try:
        return load_system(path)
    except (ValueError, KeyError) as e:
        raise UsageFailure(f"config field 'ifs_path': invalid system file: {e}")


def _resolve_alpha(cfg: ExperimentConfig, sys_) -> float:
    if cfg.alpha is not None:
        if cfg.alpha <= 0:
            raise UsageFailure("config field 'alpha' must be positive")
        return cfg.alpha
    alpha = decay_alpha_from_regularity(sys_.delta, sys_.dim)
    if alpha is None:
        raise UsageFailure(
            "config field 'alpha' is required: delta - (d-1) is not positive "
            "for this system"
        )
    return alpha


def _header(cfg: ExperimentConfig) -> list:
    return [
        f"# fracapprox v{__version__}",
        f"# config_hash={cfg.hash()}",
        f"# seed={cfg.seed}",
    ]


def _write_csv(cfg: ExperimentConfig, name: str, columns: list, rows: list,
               trailer: list | None = None) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    lines = _header(cfg) + [",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    if trailer:
        lines.extend(trailer)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _prepend_header(path: Path, cfg: ExperimentConfig) -> None:
    body = path.read_text(encoding="utf-8")
    path.write_text("\n".join(_header(cfg)) + "\n" + body, encoding="utf-8",
                    newline="\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@click.group()
@click.option("--config", "config_path", type=str, default=None,
              help="JSON experiment config.")
@click.option("--seed", type=int, default=None, help="Override the seed.")
@click.option("--out", "output_dir", type=str, default=None,
              help="Override the output directory.")
@click.option("--jobs", type=int, default=None, help="Worker processes.")
@click.pass_context
def cli(ctx, config_path, seed, output_dir, jobs):
    """Experiments on rational approximation over self-similar measures."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["overrides"] = {"seed": seed, "output_dir": output_dir, "jobs": jobs}


def _cfg(ctx, **extra) -> ExperimentConfig:
    overrides = dict(ctx.obj["overrides"])
    overrides.update(extra)
    return resolve_config(ctx.obj["config_path"], **overrides)


@cli.command()
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.pass_context
def certify(ctx, ifs_path, trials, alpha):
    """Fit doubling, decay and regularity certificates; write three CSVs."""
    cfg = _cfg(ctx, ifs_path=ifs_path, trials=trials, alpha=alpha)
    sys_ = _resolve_system(cfg)
    a = _resolve_alpha(cfg, sys_)
    r0 = default_r0(sys_)
    try:
        dc = certify_doubling(sys_, cfg.trials, r0, cfg.seed, jobs=cfg.jobs)
        cc = certify_decay(sys_, a, cfg.trials, r0, cfg.seed, jobs=cfg.jobs)
        rc = certify_regularity(sys_, cfg.trials, r0, cfg.seed, jobs=cfg.jobs)
    except CertificationError as e:
        raise ScientificFailure(f"certification failed: {e}")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for cert, name in ((dc, "doubling.csv"), (cc, "decay.csv"),
                       (rc, "regularity.csv")):
        path = out / name
        export_certificate_csv(cert, path)
        _prepend_header(path, cfg)
        click.echo(f"wrote {path}")


@cli.command()
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--psi", "psi_spec", type=str, default=None)
@click.option("--blocks", type=str, default=None, help="Range lo:hi.")
@click.option("--samples", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.pass_context
def decay(ctx, ifs_path, psi_spec, blocks, samples, alpha):
    """Per-block layer mass against the decay envelope."""
    cfg = _cfg(ctx, ifs_path=ifs_path, psi_spec=psi_spec,
               blocks=_parse_blocks(blocks), samples=samples, alpha=alpha)
    sys_ = _resolve_system(cfg)
    a = _resolve_alpha(cfg, sys_)
    psi = _parse_psi(cfg, sys_.dim)
    lo, hi = cfg.blocks
    res = layer_decay_experiment(sys_, psi, a, range(lo, hi + 1),
                                 cfg.samples, cfg.seed)
    d = sys_.dim
    c_audit = (
        0.5 / math.sqrt(d)
        * (1.0 / (unit_ball_volume(d) * math.factorial(d))) ** (1.0 / d)
        * 2.0 ** (-(d + 1) / d)
    )
    onset = smallness_onset(psi, c_audit, d)
    trailer = [
        f"# empirical_slope={res.empirical_slope!r}",
        f"# predicted_slope={res.predicted_slope!r}",
        f"# smallness_onset(c={c_audit!r})={onset}",
    ]
    path = _write_csv(cfg, "decay_experiment.csv",
                      ["n", "empirical_mass", "envelope"], list(res.rows), trailer)
    click.echo(f"wrote {path}")


@cli.command("lemma-audit")
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--blocks", type=str, default=None, help="Range lo:hi.")
@click.option("--trials", type=int, default=None, help="Balls per block.")
@click.pass_context
def lemma_audit(ctx, ifs_path, blocks, trials):
    """Exact-arithmetic audit: block rationals near a ball lie on a hyperplane."""
    cfg = _cfg(ctx, ifs_path=ifs_path, blocks=_parse_blocks(blocks), trials=trials)
    sys_ = _resolve_system(cfg)
    d = sys_.dim
    lo, hi = cfg.blocks
    rows = []
    bad_total = 0
    for n in range(lo, hi + 1):
        rep = audit_hyperplane_lemma(d, n, cfg.trials, seed=cfg.seed)
        rows.append((rep.d, rep.n, rep.balls, rep.max_rationals,
                     rep.simplex_counterexamples))
        bad_total += rep.simplex_counterexamples
    path = _write_csv(cfg, "lemma_audit.csv",
                      ["d", "n", "balls", "max_rationals", "simplex_counterexamples"],
                      rows)
    click.echo(f"wrote {path}")
    if bad_total:
        raise ScientificFailure(
            f"{bad_total} simplex counterexamples found; the volume obstruction "
            "failed"
        )


@cli.command("dim-report")
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--taus", type=str, default=None, help="Comma-separated taus.")
@click.option("--alpha", type=float, default=None)
@click.option("--samples", type=int, default=None,
              help="Batch size for approximant sampling.")
@click.pass_context
def dim_report(ctx, ifs_path, taus, alpha, samples):
    """Dimension bound vs box-count estimate of the layer approximant."""
    cfg = _cfg(ctx, ifs_path=ifs_path, taus=_parse_taus(taus), samples=samples,
               alpha=alpha)
    if not cfg.taus:
        raise UsageFailure("config field 'taus' must be nonempty")
    sys_ = _resolve_system(cfg)
    a = _resolve_alpha(cfg, sys_)
    d = sys_.dim
    keep = []
    for tau in cfg.taus:
        if tau < (d + 1) / d - 1e-12:
            click.echo(
                f"tau={tau} below the Dirichlet exponent {(d + 1) / d}; skipped",
                err=True,
            )
        else:
            keep.append(tau)
    rows = dimension_report(sys_, a, keep, seed=cfg.seed, batch=cfg.samples)
    path = _write_csv(cfg, "dim_report.csv",
                      ["tau", "bound", "box_estimate"], rows)
    click.echo(f"wrote {path}")


@cli.command()
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--psi", "psi_spec", type=str, default=None)
@click.option("--kind", type=str, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--s-param", "s_param", type=float, default=None)
@click.pass_context
def sums(ctx, ifs_path, psi_spec, kind, alpha, s_param):
    """Classify the configured convergence sum; write condensed terms."""
    cfg = _cfg(ctx, ifs_path=ifs_path, psi_spec=psi_spec, kind=kind,
               alpha=alpha, s=s_param)
    sys_ = _resolve_system(cfg)
    psi = _parse_psi(cfg, sys_.dim)
    a = _resolve_alpha(cfg, sys_) if cfg.kind in ("measure_zero", "hausdorff") else None
    s_val = cfg.s if cfg.s is not None else sys_.delta
    try:
        spec = SumSpec(cfg.kind, psi, sys_.dim, alpha=a,
                       delta=sys_.delta if cfg.kind == "hausdorff" else None,
                       s=s_val if cfg.kind == "hausdorff" else None)
    except ValueError as e:
        raise UsageFailure(str(e))
    verdict = classify_sum(spec)
    rows = [
        (n, term, ps)
        for (n, term), (_, ps) in zip(verdict.condensed_terms, verdict.partial_sums)
    ]
    trailer = [
        f"# converges={verdict.converges}",
        f"# method={verdict.method}",
        f"# criterion={verdict.criterion}",
    ]
    path = _write_csv(cfg, "sums.csv", ["n", "term", "partial_sum"], rows, trailer)
    click.echo(f"wrote {path}")


@cli.command("cover-cost")
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--psi", "psi_spec", type=str, default=None)
@click.option("--blocks", type=str, default=None, help="Range k_min:k_max.")
@click.option("--s-param", "s_param", type=float, default=None)
@click.pass_context
def cover_cost_cmd(ctx, ifs_path, psi_spec, blocks, s_param):
    """Block-cover cost tails of the well-approximable part."""
    cfg = _cfg(ctx, ifs_path=ifs_path, psi_spec=psi_spec,
               blocks=_parse_blocks(blocks), s=s_param)
    sys_ = _resolve_system(cfg)
    psi = _parse_psi(cfg, sys_.dim)
    s_val = cfg.s if cfg.s is not None else sys_.delta
    k_min, k_max = cfg.blocks
    try:
        tail = hs_upper_bound(sys_, psi, s_val, k_min, k_max, seed=cfg.seed)
    except ValueError as e:
        raise UsageFailure(str(e))
    tails = dict(tail.tails)
    rows = [
        (n, nd, nc, tails[n]) for (n, nd, nc, _cost) in tail.rows
    ]
    path = _write_csv(cfg, "cover_cost.csv",
                      ["n", "n_Dn", "n_C_total", "cost_tail"], rows,
                      [f"# s={s_val!r}"])
    click.echo(f"wrote {path}")


@cli.command()
@click.option("--ifs", "ifs_path", type=str, default=None)
@click.option("--samples", type=int, default=None)
@click.pass_context
def sample(ctx, ifs_path, samples):
    """Draw natural-measure samples; sharded deterministically over workers."""
    cfg = _cfg(ctx, ifs_path=ifs_path, samples=samples)
    sys_ = _resolve_system(cfg)
    pts = _sharded_samples(sys_, cfg.samples, cfg.seed, cfg.jobs)
    cols = [f"x_{i}" for i in range(sys_.dim)]
    rows = [tuple(float(v) for v in p) for p in pts]
    path = _write_csv(cfg, "samples.csv", cols, rows)
    click.echo(f"wrote {path}")


_SHARD = 10_000


def _sample_chunk(args):
    sys_, seed, idx, count = args
    return sample_measure(sys_, count, np.random.SeedSequence([abs(seed), idx]))


def _sharded_samples(sys_, total: int, seed: int, jobs: int) -> np.ndarray:
    """Fixed-size chunks with per-chunk derived seeds: the stream does not
    depend on the worker count."""
    chunks = []
    idx = 0
    remaining = total
    payloads = []
    while remaining > 0:
        take = min(_SHARD, remaining)
        payloads.append((sys_, seed, idx, take))
        idx += 1
        remaining -= take
    if jobs <= 1 or len(payloads) == 1:
        chunks = [_sample_chunk(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sample_chunk, payloads))
    return np.concatenate(chunks)


def _parse_blocks(text: str | None):
    if text is None:
        return None
    for sep in (":", "-", ","):
        if sep in text:
            lo, _, hi = text.partition(sep)
            try:
                return (int(lo), int(hi))
            except ValueError:
                break
    raise UsageFailure(f"cannot parse blocks range {text!r}; expected lo:hi")


def _parse_taus(text: str | None):
    if text is None:
        return None
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageFailure(f"cannot parse taus {text!r}")
    return vals


def _parse_psi(cfg: ExperimentConfig, d: int):
    try:
        return parse_psi_spec(cfg.psi_spec, d=d)
    except (ValueError, KeyError, OSError) as e:
        raise UsageFailure(f"config field 'psi_spec': {e}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
    except UsageFailure as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except click.UsageError as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except ScientificFailure as e:
        click.echo(f"FAILURE: {e}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    _sys.exit(main())
