"""Command-line surface: reproducible experiments over edge-list files.

Every file-producing subcommand writes a ``manifest.json`` (tool
version, parameters, input digests) next to its outputs; ``rerun``
re-executes a manifest and reproduces the outputs byte-identically.
Data goes to stdout only when ``--output -`` is given; warnings and
timings go to stderr.

Exit codes: 0 ok, 1 I/O, 2 validation/parse, 3 undefined math.
Option values may also come from environment variables named
``COMMLENS_<SUBCOMMAND>_<OPTION>``; explicit flags win.
"""

from __future__ import annotations

import functools
import hashlib
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .diagnostics import resolution_probe, run_ensemble
from .echo import LoopConfig, simulate_loop
from .errors import ParseError, UndefinedModularityError, ValidationError
from .graph import Partition, load_edge_list
from .layout import SvgOptions, coords_to_tsv, fruchterman_reingold, render_svg
from .louvain import louvain
from .modularity import modularity

MANIFEST_NAME = "manifest.json"


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as exc:
            _fail(str(exc), 2)
        except ValidationError as exc:
            _fail(str(exc), 2)
        except UndefinedModularityError as exc:
            _fail(str(exc), 3)
        except OSError as exc:
            _fail(str(exc), 1)
    return wrapper


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_graph(path: str):
    parsed = load_edge_list(path)
    if parsed.duplicates:
        click.echo(f"warning: merged {parsed.duplicates} duplicate edge(s)", err=True)
    return parsed.graph


def _write_outputs(output_dir: str, files: dict[str, str]) -> Path:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        (out / name).write_text(content, encoding="utf-8")
    return out


def _manifest(subcommand: str, inputs: list[tuple[str, str]], parameters: dict) -> str:
    return _json_text({
        "tool": "commlens",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": [
            {"role": role, "path": str(path), "sha256": _sha256(Path(path))}
            for role, path in inputs
        ],
        "parameters": parameters,
    })


def _q_text(value: float) -> str:
    return format(value, ".12g")


def _parse_seeds(text: str) -> list[int]:
    """Seed list syntax: ``0..9`` (inclusive), ``1,4,7`` or a single int."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError:
            raise ValidationError(f"bad seed range {text!r}") from None
        if hi_i < lo_i:
            raise ValidationError(f"empty seed range {text!r}")
        return list(range(lo_i, hi_i + 1))
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValidationError(f"bad seed list {text!r}") from None


# ---------------------------------------------------------------------------
# subcommand cores (shared by the click wrappers and `rerun`)
# ---------------------------------------------------------------------------

def _run_detect(input_path: str, params: dict, output_dir: str, stream) -> None:
    g = _load_graph(input_path)
    started = time.perf_counter()
    result = louvain(g, seed=params["seed"],
                     first_improvement=params["first_improvement"])
    elapsed = time.perf_counter() - started
    click.echo(
        f"detected {result.num_communities} communities in {elapsed:.2f}s "
        f"(q={_q_text(result.q_trace[-1]) if result.q_trace else 'n/a'})",
        err=True)

    tsv = result.partition.to_tsv(g)
    if stream is not None:
        stream.write(tsv)
        return
    report = _json_text({
        "n": g.n,
        "m": g.total_weight,
        "seed": params["seed"],
        "q": result.q_trace[-1] if result.q_trace else modularity(g, result.partition),
        "q_trace": list(result.q_trace),
        "levels": len(result.levels),
        "passes": list(result.passes),
        "communities": result.num_communities,
        "community_sizes": list(result.partition.sizes),
    })
    _write_outputs(output_dir, {
        "partition.tsv": tsv,
        "report.json": report,
        MANIFEST_NAME: _manifest("detect", [("edges", input_path)], params),
    })


def _run_modularity(input_path: str, params: dict, output_dir: str, stream) -> None:
    g = _load_graph(input_path)
    partition_text = Path(params["partition"]).read_text(encoding="utf-8")
    p = Partition.from_tsv(partition_text, g)
    q = modularity(g, p)
    if output_dir is None:
        (stream or sys.stdout).write(_q_text(q) + "\n")
        return
    _write_outputs(output_dir, {
        "q.txt": _q_text(q) + "\n",
        MANIFEST_NAME: _manifest(
            "modularity",
            [("edges", input_path), ("partition", params["partition"])],
            params),
    })


def _run_diagnose(input_path: str, params: dict, output_dir: str, stream) -> None:
    g = _load_graph(input_path)
    report = run_ensemble(g, params["seeds"], metric=params["metric"],
                          jobs=params["jobs"])
    report_json = _json_text(report.to_json_dict())
    if stream is not None:
        stream.write(report_json)
        return
    files = {"report.json": report_json}
    if params["matrices"]:
        files["pairwise_similarity.csv"] = _matrix_csv(report.pairwise)
        files["coclassification.csv"] = _matrix_csv(report.coclassification)
    files[MANIFEST_NAME] = _manifest("diagnose", [("edges", input_path)], params)
    out = _write_outputs(output_dir, files)
    if params["figures"]:
        from .plots import save_ensemble_figures

        save_ensemble_figures(report, out)


def _matrix_csv(matrix) -> str:
    return "\n".join(",".join(repr(float(x)) for x in row) for row in matrix) + "\n"


def _run_probe(input_path: str, params: dict, output_dir: str, stream) -> None:
    report = resolution_probe(params["cliques"], params["clique_size"],
                              seed=params["seed"])
    text = _json_text(report.to_json_dict())
    if stream is not None:
        stream.write(text)
        return
    _write_outputs(output_dir, {
        "probe.json": text,
        MANIFEST_NAME: _manifest("probe-resolution", [], params),
    })


def _run_layout(input_path: str, params: dict, output_dir: str, stream) -> None:
    g = _load_graph(input_path)
    if params["partition"] is not None:
        p = Partition.from_tsv(
            Path(params["partition"]).read_text(encoding="utf-8"), g)
    else:
        p = louvain(g, seed=params["detect_seed"]).partition
    coords = fruchterman_reingold(g, seed=params["seed"],
                                  iterations=params["iterations"])
    options = SvgOptions(width=params["width"], height=params["height"],
                         node_radius=params["node_radius"])
    svg = render_svg(g, coords, p, options)
    if stream is not None:
        stream.write(svg)
        return
    inputs = [("edges", input_path)]
    if params["partition"] is not None:
        inputs.append(("partition", params["partition"]))
    _write_outputs(output_dir, {
        "layout.svg": svg,
        "coords.tsv": coords_to_tsv(g, coords),
        MANIFEST_NAME: _manifest("layout", inputs, params),
    })


def _run_simulate_loop(input_path: str, params: dict, output_dir: str, stream) -> None:
    g = _load_graph(input_path)
    cfg = LoopConfig(rounds=params["rounds"],
                     recommendations_per_node=params["per_node"],
                     acceptance_probability=params["acceptance"],
                     detection_seed_policy=params["seed_policy"],
                     seed=params["seed"])
    trajectory = simulate_loop(g, cfg)
    csv_text = trajectory.to_csv()
    if stream is not None:
        stream.write(csv_text)
        return
    files = {"trajectory.csv": csv_text}
    if params["emit_final_graph"]:
        files["final_graph.txt"] = trajectory.final_graph.to_edge_list_text()
    files[MANIFEST_NAME] = _manifest("simulate-loop", [("edges", input_path)], params)
    out = _write_outputs(output_dir, files)
    if params["figures"]:
        from .plots import save_trajectory_figure

        save_trajectory_figure(trajectory, out)


def _run_oracle(input_path: str, params: dict, output_dir: str, stream) -> None:
    from .diagnostics import brute_force_best_partition

    g = _load_graph(input_path)
    p, q = brute_force_best_partition(g)
    tsv = p.to_tsv(g)
    if stream is not None:
        stream.write(tsv)
        return
    report = _json_text({
        "q": q,
        "communities": p.num_communities,
        "community_sizes": list(p.sizes),
    })
    _write_outputs(output_dir, {
        "partition.tsv": tsv,
        "oracle.json": report,
        MANIFEST_NAME: _manifest("oracle", [("edges", input_path)], params),
    })


_RUNNERS = {
    "detect": _run_detect,
    "modularity": _run_modularity,
    "diagnose": _run_diagnose,
    "probe-resolution": _run_probe,
    "layout": _run_layout,
    "simulate-loop": _run_simulate_loop,
    "oracle": _run_oracle,
}


def _stream_or_none(output: str | None):
    if output == "-":
        return sys.stdout
    if output is not None:
        raise ValidationError("--output only supports '-' (stdout); "
                              "use --output-dir for files")
    return None


# ---------------------------------------------------------------------------
# click surface
# ---------------------------------------------------------------------------

@click.group(context_settings={"auto_envvar_prefix": "COMMLENS"})
@click.version_option(__version__, prog_name="commlens")
def main():
    """Community detection, diagnostics and rendering over edge lists."""


_input_opt = click.option("--input", "input_path", required=True,
                          help="Edge-list file (u v [w] per line, # comments).")
_outdir_opt = click.option("--output-dir", default=".", show_default=True,
                           help="Directory for output artifacts.")
_stdout_opt = click.option("--output", default=None,
                           help="'-' streams the primary artifact to stdout "
                                "and writes no files.")


@main.command()
@_input_opt
@click.option("--seed", default=0, show_default=True, help="Detection seed.")
@click.option("--first-improvement", is_flag=True, default=False,
              help="Take the first improving move instead of the best.")
@_outdir_opt
@_stdout_opt
@_cli_errors
def detect(input_path, seed, first_improvement, output_dir, output):
    """Detect communities; writes partition.tsv and report.json."""
    params = {"seed": seed, "first_improvement": first_improvement}
    _run_detect(input_path, params, output_dir, _stream_or_none(output))


@main.command(name="modularity")
@_input_opt
@click.option("--partition", required=True,
              help="Partition TSV (label<TAB>community).")
@click.option("--output-dir", default=None,
              help="Write q.txt and a manifest instead of printing only.")
@_cli_errors
def modularity_cmd(input_path, partition, output_dir):
    """Print Q of a partition with 12 significant digits."""
    params = {"partition": partition}
    _run_modularity(input_path, params, output_dir, None)


@main.command()
@_input_opt
@click.option("--seeds", default="0..9", show_default=True,
              help="Seed list: '0..9', '1,4,7' or a single integer.")
@click.option("--metric", type=click.Choice(["NMI", "ARI", "VI"]),
              default="NMI", show_default=True)
@click.option("--matrices", is_flag=True, default=False,
              help="Also write pairwise and co-classification CSV matrices.")
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Render PNG figures alongside the report.")
@click.option("--jobs", default=1, show_default=True,
              help="Parallel detection runs.")
@_outdir_opt
@_stdout_opt
@_cli_errors
def diagnose(input_path, seeds, metric, matrices, figures, jobs, output_dir, output):
    """Run a seed ensemble and report instability statistics."""
    params = {"seeds": _parse_seeds(seeds), "metric": metric,
              "matrices": matrices, "figures": figures, "jobs": jobs}
    _run_diagnose(input_path, params, output_dir, _stream_or_none(output))


@main.command(name="probe-resolution")
@click.option("--cliques", default=30, show_default=True,
              help="Number of cliques in the ring.")
@click.option("--clique-size", default=5, show_default=True,
              help="Nodes per clique.")
@click.option("--seed", default=0, show_default=True)
@_outdir_opt
@_stdout_opt
@_cli_errors
def probe_resolution(cliques, clique_size, seed, output_dir, output):
    """Probe the resolution limit on a ring of cliques."""
    params = {"cliques": cliques, "clique_size": clique_size, "seed": seed}
    _run_probe(None, params, output_dir, _stream_or_none(output))


@main.command()
@_input_opt
@click.option("--seed", default=0, show_default=True, help="Layout seed.")
@click.option("--iterations", default=50, show_default=True)
@click.option("--partition", default=None,
              help="Partition TSV for coloring; omitted -> run detection.")
@click.option("--detect-seed", default=0, show_default=True,
              help="Detection seed when no partition file is given.")
@click.option("--width", default=800, show_default=True)
@click.option("--height", default=800, show_default=True)
@click.option("--node-radius", default=4.0, show_default=True)
@_outdir_opt
@_stdout_opt
@_cli_errors
def layout(input_path, seed, iterations, partition, detect_seed, width, height,
           node_radius, output_dir, output):
    """Force-directed placement; writes layout.svg and coords.tsv."""
    params = {"seed": seed, "iterations": iterations, "partition": partition,
              "detect_seed": detect_seed, "width": width, "height": height,
              "node_radius": node_radius}
    _run_layout(input_path, params, output_dir, _stream_or_none(output))


@main.command(name="simulate-loop")
@_input_opt
@click.option("--rounds", default=5, show_default=True)
@click.option("--per-node", default=1, show_default=True,
              help="Recommendations per node per round.")
@click.option("--acceptance", default=1.0, show_default=True,
              help="Probability each recommended edge is accepted.")
@click.option("--seed", default=0, show_default=True)
@click.option("--seed-policy", type=click.Choice(["fixed", "per-round"]),
              default="fixed", show_default=True,
              help="Detection seed policy across rounds.")
@click.option("--emit-final-graph", is_flag=True, default=False,
              help="Also write the final edge list.")
@click.option("--figures/--no-figures", default=True, show_default=True)
@_outdir_opt
@_stdout_opt
@_cli_errors
def simulate_loop_cmd(input_path, rounds, per_node, acceptance, seed, seed_policy,
                      emit_final_graph, figures, output_dir, output):
    """Simulate the detection/recommendation feedback loop."""
    params = {"rounds": rounds, "per_node": per_node, "acceptance": acceptance,
              "seed": seed, "seed_policy": seed_policy,
              "emit_final_graph": emit_final_graph, "figures": figures}
    _run_simulate_loop(input_path, params, output_dir, _stream_or_none(output))


@main.command()
@_input_opt
@_outdir_opt
@_stdout_opt
@_cli_errors
def oracle(input_path, output_dir, output):
    """Exhaustive best partition for small graphs (<= 12 nodes)."""
    _run_oracle(input_path, {}, output_dir, _stream_or_none(output))


@main.command()
@click.argument("manifest_path")
@click.option("--output-dir", default=None,
              help="Target directory [default: the manifest's directory].")
@_cli_errors
def rerun(manifest_path, output_dir):
    """Re-execute a manifest, reproducing its outputs byte-identically."""
    manifest_file = Path(manifest_path)
    manifest = json.loads(manifest_file.read_text(encoding="utf-8"))
    subcommand = manifest.get("subcommand")
    if subcommand not in _RUNNERS:
        raise ValidationError(f"manifest names unknown subcommand {subcommand!r}")
    input_path = None
    for entry in manifest.get("inputs", []):
        digest = _sha256(Path(entry["path"]))
        if digest != entry["sha256"]:
            raise ValidationError(
                f"input {entry['path']} changed since the manifest was written")
        if entry["role"] == "edges":
            input_path = entry["path"]
    target = output_dir if output_dir is not None else str(manifest_file.parent)
    _RUNNERS[subcommand](input_path, manifest["parameters"], target, None)
    click.echo(f"reproduced {subcommand} into {target}", err=True)


if __name__ == "__main__":
    main()
