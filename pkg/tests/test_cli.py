import pytest

from timehash.cli import main
from timehash.keygen import TimeRange, index_terms


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_keys_worked_example(capsys):
    code, out, _ = run(capsys, "keys", "--from", "1140", "--to", "2100")
    assert code == 0
    assert out.splitlines() == ["08113040", "081145", "12", "16", "2020"]


def test_keys_empty_range(capsys):
    assert run(capsys, "keys", "--from", "1200", "--to", "1200")[:2] == (0, "")


def test_keys_wrap_is_union(capsys):
    code, out, _ = run(capsys, "keys", "--from", "2200", "--to", "0200")
    want = index_terms(TimeRange(1320, 1440)) | index_terms(TimeRange(0, 120))
    assert code == 0 and out.splitlines() == sorted(want)


def test_keys_prefix_and_all_day(capsys):
    _, out, _ = run(capsys, "keys", "--from", "0000", "--to", "0000", "--all-day", "--prefix", "mon")
    assert out.splitlines() == ["mon00", "mon04", "mon08", "mon12", "mon16", "mon20"]


@pytest.mark.parametrize(
    "argv",
    [
        ["keys", "--from", "2500", "--to", "0100"],
        ["keys", "--from", "0100", "--to", "0200", "--hierarchy", "60,7"],
        ["query", "--at", "2400"],
        ["query", "--at", "12:30"],
    ],
)
def test_bad_input_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "error" in err


def test_query(capsys):
    _, out, _ = run(capsys, "query", "--at", "1430")
    assert out.splitlines()[:3] == ["12", "1214", "121430"]
    _, out, _ = run(capsys, "query", "--at", "0000")
    assert out.splitlines() == ["00", "0000", "000000", "00000000", "0000000000"]


def test_output_is_byte_stable(capsys):
    first = run(capsys, "keys", "--from", "0713", "--to", "1958")[1]
    assert all(run(capsys, "keys", "--from", "0713", "--to", "1958")[1] == first for _ in range(3))


@pytest.fixture
def files(tmp_path):
    pois = tmp_path / "pois.jsonl"
    pois.write_text('{"id":"p1","ranges":[["1140","2100"]]}\n{"id":"p2","ranges":[["0800","1200"]]}\n')
    queries = tmp_path / "q.txt"
    queries.write_text("1430\n2100\n1150\n")
    return tmp_path, pois, queries


def test_serve_batch(capsys, files):
    _, pois, queries = files
    code, out, _ = run(capsys, "serve-batch", str(pois), str(queries))
    assert code == 0
    assert out == "p1\n\np1 p2\n"


def test_serve_batch_empty_pois(capsys, files):
    tmp, _, queries = files
    empty = tmp / "empty.jsonl"
    empty.write_text("")
    assert run(capsys, "serve-batch", str(empty), str(queries))[1] == "\n\n\n"


def test_serve_batch_bad_line(capsys, files):
    tmp, pois, queries = files
    bad = tmp / "bad.jsonl"
    bad.write_text('{"id":"p1","ranges":[["1140","2100"]]}\n{"id":"p2"\n')
    code, out, err = run(capsys, "serve-batch", str(bad), str(queries))
    assert code == 2 and out == "" and "line 2" in err
    badq = tmp / "badq.txt"
    badq.write_text("1200\nnoon\n")
    code, out, err = run(capsys, "serve-batch", str(pois), str(badq))
    assert code == 2 and out == "" and "line 2" in err


def test_gen_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["gen", "--n", "300", "--seed", "4", "--out", str(a)]) == 0
    assert main(["gen", "--n", "300", "--seed", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 300


def test_gen_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("n = 5\nall_day_fraction = 1.0\nbreak_fraction = 0.0\n")
    code, out, _ = run(capsys, "gen", "--config", str(cfg))
    assert code == 0
    assert out.splitlines()[0] == '{"id":"0000000","ranges":[["0000","2400"]]}'
    cfg.write_text("n = oops\n")
    assert run(capsys, "gen", "--config", str(cfg))[0] == 2


def test_verify_samples(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "2000", "--seed", "3")
    assert code == 0 and "mismatches=0" in out


def test_bench_keystats_csv(capsys, tmp_path):
    out_path = tmp_path / "k.csv"
    assert main(["bench", "keystats", "--out", str(out_path)]) == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "label,ranges,avg,min,max,naive_avg"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["<1h", "1-4h", "4-12h", "12-24h", "all"]


def test_bench_sweep_json(capsys):
    code, out, _ = run(capsys, "bench", "sweep", "--n", "500", "--json")
    assert code == 0 and '"experiment": "sweep"' in out


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["keys", "--from", "0100", "--to", "0200", "--bogus"])
    assert exc.value.code == 2
