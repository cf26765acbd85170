import numpy as np
import pytest
from click.testing import CliRunner

from picgame.cli import main
from picgame.experiment import (CSV_HEADER, STRATEGIES, ExperimentConfig, ExperimentError, ResultRow,
                                emit_plot_data, induced_bfs_subgraph, load_network, read_series,
                                rows_from_csv, rows_to_csv, run_experiment)
from picgame.netgraph import load_edge_list

from conftest import pa_edge_list as _graph_text


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    p = tmp_path_factory.mktemp("data") / "graph.txt"
    p.write_text(_graph_text())
    return str(p)


def _cfg(dataset, **kw):
    base = dict(dataset=dataset, undirected=True, prob="uniform:0.3", trials=300, samples=30, timing=False)
    base.update(kw)
    return ExperimentConfig.build(**base)


def test_header_and_order(dataset):
    rows = run_experiment(_cfg(dataset, sweep=(3, 1)))
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == "sweep,strategy,rumor_active_mean,stderr,trials,wall_ms"
    assert tuple(text.splitlines()[0].split(",")) == CSV_HEADER
    assert [(r.sweep, r.strategy) for r in rows] == [(s, t) for s in (1, 3) for t in sorted(STRATEGIES)]
    assert rows_from_csv(text) == rows
    n = load_network(_cfg(dataset)).node_count
    assert all(0 <= r.rumor_active_mean <= n and r.trials == 300 for r in rows)


def test_blocking_never_hurts(dataset):
    rows = run_experiment(_cfg(dataset, experiment=2, rumor_seeds=3, sweep=(1, 4, 8)))
    by = {(r.sweep, r.strategy): r for r in rows}
    for s in (1, 4, 8):
        none = by[(s, "none")]
        for strat in ("game", "greedy", "random", "max-degree"):
            r = by[(s, strat)]
            assert r.rumor_active_mean <= none.rumor_active_mean + 4 * np.hypot(r.stderr, none.stderr)


def test_rounds_experiment(dataset):
    rows = run_experiment(_cfg(dataset, experiment=3, rumor_seeds=2, budget=3, sweep=tuple(range(12)),
                               strategies=("none", "game")))
    for strat in ("game", "none"):
        series = [r.rumor_active_mean for r in rows if r.strategy == strat]
        assert len(series) == 12
        assert all(a <= b for a, b in zip(series, series[1:]))
    assert rows[0].rumor_active_mean == 2.0  # only the seeds at step 0


def test_reproducible_bytes(dataset):
    cfg = _cfg(dataset, sweep=(2,))
    assert rows_to_csv(run_experiment(cfg)) == rows_to_csv(run_experiment(cfg))


def test_config_errors(dataset):
    with pytest.raises(ExperimentError):
        _cfg(dataset, trials=0)
    with pytest.raises(ExperimentError):
        _cfg(dataset, strategies=("proximity",))
    with pytest.raises(ExperimentError):
        _cfg(dataset, experiment=4)
    with pytest.raises(ValueError):
        _cfg(dataset, prob="uniform:7")
    with pytest.raises(ExperimentError, match="not found"):
        run_experiment(_cfg("/nonexistent/graph.txt"))
    with pytest.raises(ExperimentError, match="infeasible"):
        run_experiment(_cfg(dataset, experiment=2, rumor_seeds=2, sweep=(500,), strategies=("none",)))


def test_full_fidelity_defaults(dataset):
    cfg = ExperimentConfig.build(full_fidelity=True, dataset=dataset)
    assert cfg.trials == 10_000 and cfg.sweep == tuple(range(1, 31))
    desk = ExperimentConfig.build(dataset=dataset)
    assert desk.trials == 2_000 and desk.sweep == (1, 5, 10)
    assert ExperimentConfig.build(dataset=dataset, experiment=3).budget == 15


def _rows(strategies, points, experiment=2):
    return [ResultRow(x, s, float(x * 10 + i) + 0.125, 0.5, 100, 0, experiment)
            for x in points for i, s in enumerate(strategies)]


def test_emit_plot_data(tmp_path):
    rows = _rows(STRATEGIES, range(1, 11))
    paths = emit_plot_data(rows, tmp_path)
    for s in STRATEGIES:
        lines = paths[s].read_text().splitlines()
        assert len(lines) == 10
        assert read_series(paths[s]) == [(r.sweep, r.rumor_active_mean) for r in rows if r.strategy == s]
    combined = paths["combined"].read_text().splitlines()
    assert combined[0] == "sweep," + ",".join(sorted(STRATEGIES))
    assert len(combined) == 11
    with pytest.raises(ExperimentError):
        emit_plot_data([], tmp_path)
    with pytest.raises(ExperimentError):
        emit_plot_data(_rows(["none"], [1], 1) + _rows(["none"], [2], 2), tmp_path)


def test_bfs_subgraph():
    net = load_edge_list(_graph_text(60), undirected=True)
    sub = induced_bfs_subgraph(net, 20)
    assert sub.node_count == 20
    assert induced_bfs_subgraph(net, 100) is net
    assert set(sub.labels.tolist()) <= set(net.labels.tolist())


def test_cli_writes_csv_series_and_figure(dataset, tmp_path):
    out = tmp_path / "exp" / "result.csv"
    args = ["--dataset", dataset, "--undirected", "--prob", "uniform:0.3", "--experiment", "2",
            "--rumor-seeds", "2", "--sweep", "1:3", "--trials", "200", "--samples", "20",
            "--seed", "18446744073709551615", "--out", str(out), "--no-timing"]
    res = CliRunner().invoke(main, args)
    assert res.exit_code == 0, res.output
    rows = rows_from_csv(out.read_text())
    assert len(rows) == 3 * len(STRATEGIES)
    assert (tmp_path / "exp" / "result.png").stat().st_size > 0
    assert len((tmp_path / "exp" / "result" / "game.dat").read_text().splitlines()) == 3
    first = out.read_bytes()
    assert CliRunner().invoke(main, args).exit_code == 0
    assert out.read_bytes() == first


def test_cli_stdout_and_errors(dataset):
    res = CliRunner().invoke(main, ["--dataset", dataset, "--undirected", "--strategy", "none,random",
                                    "--sweep", "1", "--trials", "50", "--no-timing"])
    assert res.exit_code == 0
    assert res.output.splitlines()[0] == ",".join(CSV_HEADER)
    assert len(res.output.splitlines()) == 3
    res = CliRunner().invoke(main, ["--dataset", "/nope.txt"])
    assert res.exit_code != 0 and "not found" in res.output
    res = CliRunner().invoke(main, ["--dataset", dataset, "--prob", "uniform"])
    assert res.exit_code != 0


def test_cli_explicit_rumor_seeds(dataset):
    res = CliRunner().invoke(main, ["--dataset", dataset, "--undirected", "--experiment", "3",
                                    "--rumor-seeds", "0,5", "--budget", "1", "--sweep", "0:2",
                                    "--strategy", "none", "--trials", "20", "--no-timing"])
    assert res.exit_code == 0, res.output
    assert res.output.splitlines()[1].startswith("0,none,2.0,")
