import json
import math

import pytest

from rcslab.circuit import grid_layout
from rcslab.engine import DEFAULT_MAX_QUBITS, ErrorModel, StateVector
from rcslab.harness import (
    AmplitudeTable,
    CSV_COLUMNS,
    RunSpec,
    ScoringPolicyError,
    bench_sweep,
    bitstring_text,
    config_hash,
    dump_amplitudes,
    load_amplitudes,
    load_rcs_config,
    load_sweep_config,
    read_csv,
    resolve_max_qubits,
    run,
    score_external,
    write_csv,
)
from rcslab.rcs import RcsConfig
from rcslab import cli

from helpers import random_state_vector


def rcs_spec(rows=2, cols=3, m=4, seed=0, **kw):
    return RunSpec(rcs=RcsConfig(grid_layout(rows, cols, "EFGH"), m=m, seed=seed), **kw)


def test_runspec_validation():
    with pytest.raises(ValueError):
        RunSpec()
    with pytest.raises(ValueError):
        RunSpec(qasm_path="x.qasm", rcs=RcsConfig(grid_layout(2, 2, "EFGH"), m=1))
    with pytest.raises(ValueError):
        rcs_spec(k=0)


def test_identity_qasm_run_scores_n_minus_one(tmp_path):
    qasm = tmp_path / "id.qasm"
    qasm.write_text("OPENQASM 2.0;\nqreg q[1];\nU(0,0,0) q[0];\n")
    record = run(RunSpec(qasm_path=str(qasm), k=10, seed=3))
    assert record.n == 1
    assert record.f_xeb == 1.0  # N - 1 with N = 2
    assert record.std_dev == 0.0
    # at M=2 the asymptotic KS critical exceeds 1, so no pass/fail claim here;
    # the statistic itself is the empirical-step gap at u=0
    assert record.pt_ks == pytest.approx(0.5, abs=1e-12)


def test_run_record_fields_and_persistence(tmp_path):
    spec = rcs_spec(rows=3, cols=4, m=14, seed=7, k=20000,
                    out_dir=str(tmp_path), record_amplitudes=True)
    record = run(spec)
    assert record.n == 12
    assert record.m == 14
    assert record.num_gates == 228
    assert 0.9 <= record.f_xeb <= 1.1
    assert record.pt_passed is True
    assert record.entropy_uniform == pytest.approx(12 * math.log(2), abs=1e-12)
    expect_entropy = 12 * math.log(2) - 1.0 + 0.5772156649
    assert record.entropy_ideal == pytest.approx(expect_entropy, abs=0.02)
    assert record.time_to_first_sample_s > 0
    assert record.total_wall_time_s >= record.time_to_first_sample_s
    assert record.peak_memory_bytes >= 16 * 2**12
    assert not record.memory_estimated
    assert record.status == "ok"
    label = record.label
    assert (tmp_path / f"{label}.json").exists()
    assert (tmp_path / f"{label}.samples.txt").exists()
    assert (tmp_path / f"{label}.amps.txt").exists()
    doc = json.loads((tmp_path / f"{label}.json").read_text())
    assert doc["record"]["f_xeb"] == record.f_xeb
    assert len(doc["top_states"]) == 10
    assert len(doc["pt_histogram"]["density"]) == 40
    lines = (tmp_path / f"{label}.samples.txt").read_text().splitlines()
    assert len(lines) == 20000
    assert all(len(l) == 12 and set(l) <= {"0", "1"} for l in lines[:50])


def test_run_determinism(tmp_path):
    spec_a = rcs_spec(m=6, seed=5, k=4000, out_dir=str(tmp_path / "a"))
    spec_b = rcs_spec(m=6, seed=5, k=4000, out_dir=str(tmp_path / "b"))
    ra, rb = run(spec_a), run(spec_b)
    assert ra.scientific_fields() == rb.scientific_fields()
    sa = (tmp_path / "a" / f"{ra.label}.samples.txt").read_bytes()
    sb = (tmp_path / "b" / f"{rb.label}.samples.txt").read_bytes()
    assert sa == sb


def test_run_with_error_model_scores_against_ideal():
    noisy = run(rcs_spec(rows=3, cols=4, m=14, seed=1, k=20000,
                         error_model=ErrorModel(0.01, seed=2)))
    clean = run(rcs_spec(rows=3, cols=4, m=14, seed=1, k=20000))
    assert noisy.epsilon == 0.01
    assert noisy.f_xeb < clean.f_xeb  # noise must reduce the score
    assert noisy.config_hash != clean.config_hash


def test_config_hash_sensitivity(tmp_path):
    a = config_hash(rcs_spec(m=4, seed=0, k=100))
    b = config_hash(rcs_spec(m=4, seed=0, k=100))
    c = config_hash(rcs_spec(m=4, seed=1, k=100))
    d = config_hash(rcs_spec(m=4, seed=0, k=101))
    assert a == b
    assert len({a, c, d}) == 3
    q = tmp_path / "x.qasm"
    q.write_text("OPENQASM 2.0;\nqreg q[1];\n")
    e = config_hash(RunSpec(qasm_path=str(q), k=100))
    q.write_text("OPENQASM 2.0;\nqreg q[2];\n")
    f = config_hash(RunSpec(qasm_path=str(q), k=100))
    assert e != f


# ---------------------------------------------------------------------------
# amplitude tables


def test_load_amplitudes_probability_format(tmp_path):
    path = tmp_path / "t.amps"
    path.write_text("# table\n00 1.0\n01 0.0\n10 0.0\n11 0.0\n")
    table = load_amplitudes(path)
    assert table.n == 2
    assert table.probability(0) == 1.0
    assert table.amplitudes is None


def test_load_amplitudes_amplitude_format(tmp_path):
    path = tmp_path / "t.amps"
    path.write_text("00 1.0 0.0\n01 0.0 0.0\n10 0.0 1.0\n")
    table = load_amplitudes(path)
    assert table.probability(0) == 1.0
    assert table.probability(2) == pytest.approx(1.0)
    assert table.amplitudes[2] == 1j


def test_load_amplitudes_hex(tmp_path):
    path = tmp_path / "t.amps"
    path.write_text("0x0 0.5\n0x3 0.5\n")
    table = load_amplitudes(path, n=2)
    assert table.n == 2
    assert table.probability(3) == 0.5


@pytest.mark.parametrize(
    "content,fragment",
    [
        ("0b 1.0\n", "bad bitstring"),
        ("00 1.0\n01 0.0 0.0\n", "mixed formats"),
        ("00 1.0 0.0 0.0\n", "2 or 3 columns"),
        ("00 xyz\n", "bad number"),
        ("00 1.0\n00 0.0\n", "duplicate"),
        ("00 1.5\n", "outside"),
        ("00 1.0\n0101 0.0\n", "width"),
        ("", "no data"),
    ],
)
def test_load_amplitudes_errors(tmp_path, content, fragment):
    path = tmp_path / "bad.amps"
    path.write_text(content)
    with pytest.raises(ValueError, match=fragment):
        load_amplitudes(path)


def test_load_amplitudes_error_carries_line_number(tmp_path):
    path = tmp_path / "bad.amps"
    path.write_text("00 1.0\n01 0.0\nxx 0.0\n")
    with pytest.raises(ValueError, match="line 3"):
        load_amplitudes(path)


def test_uniform_table_scores_zero(tmp_path):
    n = 3
    table = AmplitudeTable(n, {i: 2.0**-n for i in range(1 << n)})
    samples = tmp_path / "s.txt"
    samples.write_text("".join(bitstring_text(i % 8, 3) + "\n" for i in range(100)))
    report, missing = score_external(samples, table)
    assert report.f_xeb == 0.0
    assert missing == 0


def test_score_external_matches_run_at_n10(tmp_path):
    spec = rcs_spec(rows=2, cols=5, m=6, seed=2, k=5000,
                    out_dir=str(tmp_path), record_amplitudes=True)
    record = run(spec)
    label = record.label
    table = load_amplitudes(tmp_path / f"{label}.amps.txt")
    report, missing = score_external(tmp_path / f"{label}.samples.txt", table, strict=False)
    assert missing == 0
    assert abs(report.f_xeb - record.f_xeb) <= 1e-12


def test_score_external_strict_policy(tmp_path):
    table = AmplitudeTable(2, {0: 0.5, 1: 0.5})
    samples = tmp_path / "s.txt"
    samples.write_text("00\n11\n")
    with pytest.raises(ScoringPolicyError, match="11"):
        score_external(samples, table, strict=True)
    report, missing = score_external(samples, table, strict=False)
    assert missing == 1
    assert report.k == 2


def test_score_external_width_mismatch(tmp_path):
    table = AmplitudeTable(2, {0: 1.0})
    samples = tmp_path / "s.txt"
    samples.write_text("000\n")
    with pytest.raises(ScoringPolicyError, match="width"):
        score_external(samples, table)


def test_dump_amplitudes_round_trip_exact(tmp_path):
    st = StateVector(4, random_state_vector(4, 8).copy())
    path = tmp_path / "amps.txt"
    dump_amplitudes(st, path)
    table = load_amplitudes(path)
    assert table.n == 4
    p = st.probabilities()
    for i in range(16):
        assert table.probability(i) == p[i]


# ---------------------------------------------------------------------------
# sweeps, CSV, configs, CLI


def test_csv_header_is_stable_golden(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv([], path)
    header = path.read_text().strip()
    assert header == (
        "label,n,m,num_gates,k,seed,epsilon,f_xeb,std_error,std_dev,"
        "entropy_ideal,cross_entropy_sampled,entropy_uniform,"
        "pt_ks,pt_critical,pt_passed,"
        "time_to_first_sample_s,total_wall_time_s,parse_time_s,"
        "peak_memory_bytes,memory_estimated,engine_version,config_hash,status,error"
    )
    assert tuple(header.split(",")) == CSV_COLUMNS


def test_bench_sweep_memory_monotone_and_csv(tmp_path):
    specs = [
        rcs_spec(rows=3, cols=4, m=14, k=2000, out_dir=str(tmp_path / "runs")),
        rcs_spec(rows=2, cols=7, m=14, k=2000, out_dir=str(tmp_path / "runs")),
        rcs_spec(rows=4, cols=4, m=14, k=2000, out_dir=str(tmp_path / "runs")),
    ]
    csv_path = tmp_path / "sweep.csv"
    records = bench_sweep(specs, csv_path=csv_path)
    assert [r.status for r in records] == ["ok"] * 3
    mems = [r.peak_memory_bytes for r in records]
    assert mems[0] < mems[1] < mems[2]
    rows = read_csv(csv_path)
    assert len(rows) == 3
    assert [int(r["n"]) for r in rows] == [12, 14, 16]


def test_bench_sweep_survives_per_spec_failure(tmp_path):
    specs = [
        rcs_spec(m=2, k=100),
        RunSpec(qasm_path=str(tmp_path / "missing.qasm"), k=100),
        rcs_spec(m=3, k=100),
    ]
    csv_path = tmp_path / "sweep.csv"
    records = bench_sweep(specs, csv_path=csv_path)
    assert [r.status for r in records] == ["ok", "error", "ok"]
    rows = read_csv(csv_path)
    assert rows[1]["status"] == "error"
    assert "missing.qasm" in rows[1]["error"]


def test_resolve_max_qubits_env(monkeypatch):
    assert resolve_max_qubits() == DEFAULT_MAX_QUBITS
    assert resolve_max_qubits(12) == 12
    monkeypatch.setenv("RCSLAB_MAX_QUBITS", "17")
    assert resolve_max_qubits() == 17
    assert resolve_max_qubits(5) == 5
    monkeypatch.setenv("RCSLAB_MAX_QUBITS", "chaos")
    with pytest.raises(ValueError):
        resolve_max_qubits()


def test_load_rcs_config(tmp_path):
    cfg = tmp_path / "rcs.cfg"
    cfg.write_text(
        "[layout]\nrows = 2\ncols = 3\nscheme = EFGH\n\n"
        "[circuit]\nm = 5\nschedule = EF\nseed = 9\nno_repeat_rule = true\n"
    )
    rcs = load_rcs_config(cfg)
    assert rcs.layout.n == 6
    assert rcs.m == 5
    assert rcs.schedule == "EF"
    assert rcs.seed == 9
    assert rcs.no_repeat_rule is True
    bad = tmp_path / "bad.cfg"
    bad.write_text("[layout]\nrows = 2\ncols = 2\n")
    with pytest.raises(ValueError):
        load_rcs_config(bad)


def test_load_rcs_config_layout_file(tmp_path):
    layout_path = tmp_path / "line.layout"
    layout_path.write_text("layout n=3\n0 1 A\n1 2 B\n")
    cfg = tmp_path / "rcs.cfg"
    cfg.write_text(
        f"[layout]\nfile = {layout_path}\n\n[circuit]\nm = 2\nschedule = AB\n"
    )
    rcs = load_rcs_config(cfg)
    assert rcs.layout.edges == ((0, 1, "A"), (1, 2, "B"))


def test_load_sweep_config(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "[defaults]\nk = 500\nout = %s\n\n"
        "[run:small]\nrows = 2\ncols = 2\nm = 3\nseed = 1\n\n"
        "[run:noisy]\nrows = 2\ncols = 3\nm = 4\nseed = 2\nepsilon = 0.01\nk = 250\n"
        % (tmp_path / "out")
    )
    specs = load_sweep_config(cfg)
    assert len(specs) == 2
    assert specs[0].k == 500
    assert specs[0].label == "small"
    assert specs[1].k == 250
    assert specs[1].error_model.epsilon == 0.01
    with pytest.raises(ValueError):
        empty = tmp_path / "none.cfg"
        empty.write_text("[defaults]\nk = 1\n")
        load_sweep_config(empty)


# ---------------------------------------------------------------------------
# CLI exit codes


def test_cli_exit_codes(tmp_path, capsys):
    bad_qasm = tmp_path / "bad.qasm"
    bad_qasm.write_text("OPENQASM 2.0;\nqreg q[1];\nU(0,0,0) q[5];\n")
    assert cli.main(["run", "--qasm", str(bad_qasm), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert f"{bad_qasm}:3:" in err

    wide = tmp_path / "wide.qasm"
    wide.write_text("OPENQASM 2.0;\nqreg q[33];\nU(0,0,0) q[0];\n")
    assert cli.main(["run", "--qasm", str(wide), "--out", str(tmp_path / "o")]) == 3

    assert cli.main(["run", "--qasm", str(tmp_path / "nope.qasm"), "--out", str(tmp_path)]) == 4

    table = tmp_path / "t.amps"
    table.write_text("0 0.5\n1 0.5\n")
    samples = tmp_path / "s.txt"
    samples.write_text("0\n")
    assert cli.main(["xeb", "--samples", str(samples), "--amplitudes", str(table)]) == 0
    missing = tmp_path / "s2.txt"
    missing.write_text("1\n")
    table2 = tmp_path / "t2.amps"
    table2.write_text("0 1.0\n")
    assert (
        cli.main(
            ["xeb", "--samples", str(missing), "--amplitudes", str(table2),
             "--n", "1", "--strict-amplitudes"]
        )
        == 5
    )


def test_cli_run_and_generate_and_sample(tmp_path, capsys):
    cfg = tmp_path / "rcs.cfg"
    cfg.write_text("[layout]\nrows = 2\ncols = 2\n\n[circuit]\nm = 3\nseed = 0\n")
    out_qasm = tmp_path / "gen.qasm"
    assert cli.main(["generate", "--rcs-config", str(cfg), "-o", str(out_qasm)]) == 0
    assert out_qasm.read_text().startswith("OPENQASM 2.0;")

    assert (
        cli.main(
            ["run", "--rcs-config", str(cfg), "--k", "200", "--seed", "1",
             "--out", str(tmp_path / "results"), "--csv", str(tmp_path / "r.csv")]
        )
        == 0
    )
    assert "f_xeb=" in capsys.readouterr().out
    assert (tmp_path / "r.csv").exists()

    sfile = tmp_path / "samples.txt"
    assert cli.main(["sample", "--qasm", str(out_qasm), "--k", "50", "-o", str(sfile)]) == 0
    lines = sfile.read_text().splitlines()
    assert len(lines) == 50 and all(len(l) == 4 for l in lines)


def test_cli_layout(tmp_path):
    out = tmp_path / "g.layout"
    assert cli.main(["layout", "--rows", "2", "--cols", "3", "-o", str(out)]) == 0
    from rcslab.circuit import parse_layout

    lay = parse_layout(out.read_text())
    assert lay.n == 6


def test_cli_bench(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        f"[defaults]\nk = 300\nout = {tmp_path / 'runs'}\n\n"
        "[run:a]\nrows = 2\ncols = 2\nm = 2\nseed = 0\n\n"
        "[run:b]\nrows = 2\ncols = 2\nm = 4\nseed = 0\n"
    )
    csv_path = tmp_path / "bench.csv"
    assert cli.main(["bench", "--config", str(cfg), "--csv", str(csv_path)]) == 0
    rows = read_csv(csv_path)
    assert len(rows) == 2
    assert {r["label"] for r in rows} == {"a", "b"}
