"""Command-line interface.

Subcommands mirror the experiment protocols: `bench` for testbench
inspection and dataset export, `regress` for the small-sample regression
study, `opt` for a single optimization run, `campaign` for a full method
matrix, and `report` to regenerate tables from persisted traces.
"""

from __future__ import annotations

import json
import logging
import os

import click
import yaml

from .circuits import build_registry
from .harness import (
    CampaignConfig,
    RegressionConfig,
    run_campaign,
    run_regression_protocol,
    write_regression_csv,
    write_reports,
    export_dataset,
)
from .optimize import RunConfig, random_search, run


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO)


@main.group()
def bench():
    """Inspect and export the synthetic testbenches."""


@bench.command("list")
def bench_list():
    for name, tb in sorted(build_registry().items()):
        click.echo(f"{name}\tdim={tb.space.dim}\tspecs={len(tb.specs)}")


@bench.command("export")
@click.option("--name", required=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def bench_export(name, samples, seed, out):
    export_dataset(name, samples, seed, out)
    click.echo(f"wrote {out}")


@main.group()
def regress():
    """Small-sample regression study."""


@regress.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", default="regression.csv", show_default=True)
def regress_run(config_path, out):
    with open(config_path) as fh:
        raw = yaml.safe_load(fh) or {}
    config = RegressionConfig.from_dict(raw)
    rows = run_regression_protocol(config)
    write_regression_csv(rows, out)
    click.echo(f"wrote {out} ({len(rows)} rows)")


@main.group()
def opt():
    """Single optimization runs."""


@opt.command("run")
@click.option("--bench", "bench_name", required=True)
@click.option("--strategy", default="direct_fom", show_default=True)
@click.option("--backend", default="khist", show_default=True)
@click.option("--acq", default="dei", show_default=True)
@click.option("--budget", type=int, default=400, show_default=True)
@click.option("--init-count", type=int, default=5, show_default=True)
@click.option("--candidates", type=int, default=2048, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--external-backend-cmd", default=None)
@click.option("--external-eval-cmd", default=None)
@click.option("--out", default="trace.json", show_default=True)
@click.option("--random-search", "use_random", is_flag=True,
              help="Run the random-search baseline instead.")
def opt_run(bench_name, strategy, backend, acq, budget, init_count, candidates,
            seed, external_backend_cmd, external_eval_cmd, out, use_random):
    config = RunConfig(
        bench=bench_name,
        strategy=strategy,
        backend=backend,
        acquisition=acq,
        budget=budget,
        init_count=init_count,
        candidate_count=candidates,
        seed=seed,
        external_backend_cmd=external_backend_cmd,
        external_eval_cmd=external_eval_cmd,
    )
    trace = random_search(config) if use_random else run(config)
    trace.save(out)
    click.echo(
        f"final fom {trace.final_fom:.4f} after {len(trace.records)} evaluations; "
        f"trace at {out}"
    )


@main.group()
def campaign():
    """Method x testbench x seed experiment matrices."""


@campaign.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", default="campaign_out", show_default=True)
def campaign_run(config_path, out_dir):
    with open(config_path) as fh:
        raw = yaml.safe_load(fh)
    config = CampaignConfig.from_dict(raw)
    os.makedirs(out_dir, exist_ok=True)
    run_campaign(config, out_dir)
    click.echo(f"campaign results under {out_dir}")


@main.command("report")
@click.option("--from", "from_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--checkpoints", default="30,50", show_default=True)
@click.option("--threshold-fraction", type=float, default=0.8, show_default=True)
def report(from_dir, checkpoints, threshold_fraction):
    cps = [int(c) for c in checkpoints.split(",") if c]
    write_reports(from_dir, cps, threshold_fraction)
    click.echo(f"reports regenerated under {from_dir}")


if __name__ == "__main__":
    main()
