"""Command-line harness.

Subcommands: gen (synthetic instance to file), solve-lp (benchmark value and
duals), run (multi-seed experiment from a JSON config), verify (acceptance
checks).  Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import dataclasses
import json
import sys

import click

from . import checks as checks_mod
from . import lp as lp_mod
from .experiment import (
    ConfigError, load_any_instance, run_experiment, solve_benchmark,
)
from .model import InstanceError
from .synth import (
    GenParams, generate_synthetic_instance, instance_to_record,
    save_mnl_instance,
)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _run(fn):
    try:
        fn()
    except (ConfigError, InstanceError, json.JSONDecodeError, OSError,
            ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except lp_mod.LpError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)


@click.group()
def main():
    """Reusable-resource allocation experiment harness."""


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--params-file", type=click.Path(exists=True), default=None,
              help="JSON file with generator parameter overrides.")
@click.option("--n-types", type=int, default=None)
@click.option("--n-resources", type=int, default=None)
@click.option("--max-assortment-size", type=int, default=None)
@click.option("--duration-cap", type=int, default=None)
@click.option("--xi", type=float, default=None)
def gen(seed, out, params_file, n_types, n_resources, max_assortment_size,
        duration_cap, xi):
    """Generate a synthetic instance file."""

    def body():
        overrides = {}
        if params_file:
            with open(params_file) as fh:
                overrides.update(json.load(fh))
        for key, value in [
            ("n_types", n_types), ("n_resources", n_resources),
            ("max_assortment_size", max_assortment_size),
            ("duration_cap", duration_cap), ("xi", xi),
        ]:
            if value is not None:
                overrides[key] = value
        known = {f.name for f in dataclasses.fields(GenParams)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown generator params: {sorted(unknown)}")
        params = GenParams(**overrides)
        instance, mnl, kpi = generate_synthetic_instance(params, seed)
        record = instance_to_record(params, seed, instance, mnl, kpi)
        save_mnl_instance(record, out)
        click.echo(json.dumps({
            "out": out, "n_types": instance.n_types,
            "n_actions": instance.n_actions,
            "capacity": float(instance.capacities[0]),
        }))

    _run(body)


@main.command("solve-lp")
@click.option("--instance", "instance_path", type=click.Path(exists=True),
              required=True)
@click.option("--out", type=click.Path(), default=None,
              help="Write the result JSON here instead of stdout.")
@click.option("--duals/--no-duals", default=False, show_default=True)
def solve_lp(instance_path, out, duals):
    """Solve the steady-state benchmark LP for an instance file."""

    def body():
        instance = load_any_instance(instance_path)
        value, details = solve_benchmark(instance)
        payload = {"lambda_star": value, "method": details["method"]}
        if duals:
            if details["method"] == "colgen":
                payload["duals"] = {
                    "rho": list(map(float, details["rho"])),
                    "alpha": list(map(float, details["alpha"])),
                    "beta": {str(j): b for j, b in details["beta"].items()},
                }
            else:
                payload["duals"] = {
                    name: float(v)
                    for name, v in details["solution"].dual.items()
                }
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)

    _run(body)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              required=True)
def run(config_path):
    """Run a multi-seed experiment from a JSON config file."""

    def body():
        with open(config_path) as fh:
            config = json.load(fh)
        written = run_experiment(config)
        click.echo(json.dumps({
            "lambda_star": written["lambda_star"],
            "summary": written["summary"],
            "metrics": {str(k): v for k, v in written["metrics"].items()},
        }, indent=1, sort_keys=True))

    _run(body)


@main.command()
@click.argument("level", type=click.Choice(["quick", "full"]))
def verify(level):
    """Run the acceptance check suite and print one line per check."""

    def body():
        results = checks_mod.run_suite(level)
        failed = 0
        for result in results:
            status = "PASS" if result.passed else "FAIL"
            click.echo(f"[{status}] {result.name}: {result.measured}")
            failed += not result.passed
        if failed:
            click.echo(f"{failed} check(s) failed", err=True)
            sys.exit(EXIT_NUMERICAL)
        click.echo(f"all {len(results)} checks passed")

    _run(body)


if __name__ == "__main__":
    main()
