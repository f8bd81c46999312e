import json
import subprocess
import sys

import numpy as np
import pytest

from pacstack.cli import main, parse_args, read_config
from pacstack.code import PacCodeSpec, rm_rate_profile
from pacstack.construction import build_tables
from pacstack.precoder import pac_encode
from pacstack.simulate import CSV_HEADER


def run(argv, capsys):
    main(argv)
    return capsys.readouterr().out


def test_profile(capsys):
    assert run(["profile", "--n", "3", "--k", "4"], capsys).strip() == "00010111"


def test_profile_file_and_poly(tmp_path, capsys):
    prof = tmp_path / "p.txt"
    prof.write_text("00010111\n")
    assert run(["profile", "--profile-file", str(prof), "--poly", "1011"], capsys).strip() == \
        "00010111"
    with pytest.raises(SystemExit):
        main(["profile", "--profile-file", str(prof), "--n", "4"])


def test_profile_needs_code(capsys):
    with pytest.raises(SystemExit):
        main(["profile", "--n", "3"])


def test_construct(tmp_path):
    out = tmp_path / "t.csv"
    main(["construct", "--n", "4", "--k", "8", "--ebn0", "2", "--pth", "0.01", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert len(lines) == 17
    sigma = np.sqrt(1 / (2 * 0.5 * 10 ** 0.2))
    tab = build_tables(sigma, 4, 0.01)
    fields = lines[5].split(",")
    assert int(fields[0]) == 5 and int(fields[-1]) == tab.gamma_T[4]
    assert float(fields[3]) == pytest.approx(tab.E0[4], rel=1e-9)


def test_decode_json_lines(tmp_path, capsys):
    spec = PacCodeSpec.reed_muller(5, 16)
    d = np.random.default_rng(0).integers(0, 2, 16, dtype=np.uint8)
    llrs = 20.0 * (1 - 2.0 * pac_encode(d, spec))
    path = tmp_path / "llr.txt"
    path.write_text("\n".join(map(str, llrs)) + "\n")
    for decoder in ("stack", "pstackd_var", "fast"):
        out = run(["decode", "--n", "5", "--k", "16", "--ebn0", "3", "--decoder", decoder,
                   "--llr-file", str(path)], capsys)
        rec = json.loads(out)
        assert rec["status"] == "decoded"
        assert rec["d_hat"] == "".join(map(str, d.tolist()))


def test_simulate_csv(tmp_path):
    out = tmp_path / "fer.csv"
    main(["simulate", "--n", "5", "--k", "16", "--ebn0-start", "1", "--ebn0-stop", "2",
          "--ebn0-step", "0.5", "--max-frames", "30", "--min-errors", "5", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 4
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1.0000", "1.5000", "2.0000"]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nn = 6\nk 57\nstack-size = 8\npth = 0.01, 0.001\nall_zero = yes\n")
    assert read_config(cfg)["pth"] == [0.01, 0.001]
    args = parse_args(["--config", str(cfg), "simulate", "--stack-size", "4"])
    assert (args.n, args.k, args.stack_size, args.pth, args.all_zero) == (6, 57, 4, [0.01, 0.001], True)


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    with pytest.raises(SystemExit):
        parse_args(["--config", str(cfg), "profile"])


def test_bad_allowed_types():
    with pytest.raises(SystemExit):
        parse_args(["decode", "--allowed-types", "rate0,rate7"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pacstack", "profile", "--n", "2", "--k", "1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "0001"
    assert rm_rate_profile(2, 1).tolist() == [0, 0, 0, 1]
