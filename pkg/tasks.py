from invoke import task
import json
from pathlib import Path


@task
def solve(ctx, scenario="sphere", out="out", quiet=False):
    """Solve a bundled scenario and write report.json plus CSV profiles"""
    flags = " --quiet" if quiet else ""
    ctx.run(f'cone-capacity solve --config {scenario} --out "{out}/{scenario}"{flags}')


@task
def verify(ctx, scenario="sphere", out="out"):
    """Solve and fail (exit 4) if an audit exceeds its tolerance"""
    ctx.run(f'cone-capacity verify --config {scenario} --out "{out}/{scenario}" --deterministic')


@task
def geometry(ctx, scenario="perturbed_cap", out="out"):
    """Geometry-only report (deficits, curvature profile)"""
    ctx.run(f'cone-capacity geometry --config {scenario} --out "{out}/{scenario}"')


@task
def study(ctx, scenario="study", out="out"):
    """Refinement/truncation convergence study"""
    ctx.run(f'cone-capacity study --config {scenario} --out "{out}/{scenario}"')


@task
def model(ctx, scenario="sphere", out="out"):
    """Closed-form radial table"""
    ctx.run(f'cone-capacity model --config {scenario} --out "{out}/{scenario}"')


@task
def show_runs(ctx, out="out"):
    """Display run sessions from the JSON-lines logs"""
    logs = sorted(Path(out).rglob("runs.jsonl"))
    if not logs:
        print("No run logs found.")
        return
    for log in logs:
        print(f"\n{log.parent}:")
        for line in log.read_text().splitlines():
            run = json.loads(line)
            print(f"  {run['start_time']} {run['command']:<8} exit={run['exit_status']} "
                  f"solves={run['solves']} newton={run['newton_iterations']}")


@task
def test(ctx, fast=False):
    """Run the test suite"""
    marker = ' -m "not slow"' if fast else ""
    ctx.run(f"pytest{marker}")


@task
def clean(ctx, out="out"):
    """Remove generated artifacts"""
    if Path(out).exists():
        ctx.run(f'rm -r "{out}"')
        print("Output removed.")
    else:
        print("No output to clean.")


@task
def setup(ctx):
    """Install the package in development mode"""
    ctx.run('uv pip install -e ".[dev]"')


@task
def init(ctx):
    """Initialize project (install deps, create directories)"""
    Path("out").mkdir(exist_ok=True)
    ctx.run('uv pip install -e ".[dev]"')

    if not Path("etc/config.toml").exists():
        print("\nNOTE: etc/config.toml not found, using etc/config.template.toml.")
        print("Copy the template to etc/config.toml to change logging or output defaults.")
