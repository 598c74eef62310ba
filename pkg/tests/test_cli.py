import json

import pytest

from geoflip import io
from geoflip.cli import main, parse_move, parse_simplexes
from helpers import G, SQUARE_BOUNDARY, square, twisted, unit_simplex


@pytest.fixture
def files(tmp_path):
    def write(name, g, L=None):
        p = tmp_path / name
        io.write_complex(p, g, L)
        return str(p)
    return write


def test_parsers():
    assert parse_simplexes("0 1; 1 2") == [(0, 1), (1, 2)]
    assert parse_simplexes("2,1;") == [(1, 2)]
    assert parse_move("bistellar A=0,2 B=1,3")["B"] == (1, 3)
    with pytest.raises(ValueError):
        parse_move("twist A=0")


def test_validate(files, capsys):
    assert main(["validate", files("ok.json", square())]) == 0
    assert "valid" in capsys.readouterr().out
    bad = G([(0, 1, 2), (0, 1, 3)], [(0, 0), (2, 0), (0, 2), (1, 1)])
    assert main(["validate", files("bad.json", bad)]) == 2


def test_subdivide_simplex(files, tmp_path):
    out = tmp_path / "b.json"
    assert main(["subdivide", files("t.json", unit_simplex(3)), "--times", "1", "--out", str(out)]) == 0
    g, _ = io.read_complex(out)
    assert len(g.complex.maximal) == 24


def test_subdivide_relative(files, tmp_path):
    out = tmp_path / "r.json"
    assert main(["subdivide", files("s.json", square(), SQUARE_BOUNDARY), "--relative", "--out", str(out)]) == 0
    assert len(io.read_complex(out)[0].complex.maximal) == 8


def test_flip(files, tmp_path):
    out = tmp_path / "f.json"
    assert main(["flip", files("s.json", square()), "--move", "bistellar A=0,2 B=1,3", "--out", str(out)]) == 0
    assert (1, 3) in io.read_complex(out)[0].complex
    assert main(["flip", files("s2.json", square()), "--move", "bistellar A=0,1 B=2,3"]) == 2


def test_connect_then_verify(files, tmp_path, capsys):
    a = files("a.json", square("02"), SQUARE_BOUNDARY)
    b = files("b.json", square("13"), SQUARE_BOUNDARY)
    seq = tmp_path / "seq.json"
    assert main(["connect", a, b, "--out", str(seq)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["moves"] > 0
    assert main(["verify", a, str(seq)]) == 0
    assert "verified" in capsys.readouterr().out

    d = json.loads(seq.read_text())
    d["moves"][3]["A"] = [0, 1, 2, 3]
    seq.write_text(json.dumps(d))
    assert main(["verify", a, str(seq)]) == 2
    assert "step 3" in capsys.readouterr().out


def test_connect_star_with_log(files, tmp_path):
    a = files("a.json", square("02"))
    b = files("b.json", square("13"))
    log = tmp_path / "log.txt"
    assert main(["connect", a, b, "--star", "--sweep-log", str(log)]) == 0
    lines = [l for l in log.read_text().splitlines() if not l.startswith("#")]
    assert lines and all(len(l.split()) == 5 for l in lines)


def test_export_off(files, capsys):
    assert main(["export", files("t.json", unit_simplex(3))]) == 0
    assert capsys.readouterr().out.startswith("OFF\n4 4 0\n")


def test_error_exit_codes(files, tmp_path):
    assert main(["validate", str(tmp_path / "missing.json")]) == 1
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 1
    a = files("a.json", square("02"))
    b = files("b.json", square("13"))
    assert main(["connect", a, b, "--fixed", "0 1"]) == 3
    t1, t2 = files("t1.json", twisted()), files("t2.json", twisted(True))
    assert main(["connect", t1, t2, "--star", "--s-max", "0"]) == 4
