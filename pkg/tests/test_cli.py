"""CLI surface: exit codes, JSON output, determinism, witness re-verification."""

import json
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "extendkit"]

LINEAR_XOS = '{"m":2,"points":[{"set":[0],"value":"1"},{"set":[1],"value":"2"},{"set":[0,1],"value":"3"}]}'
CUBE_VIOLATION = (
    '{"m":2,"points":[{"set":[],"value":"0"},{"set":[0],"value":"0"},'
    '{"set":[1],"value":"0"},{"set":[0,1],"value":"1"}]}'
)
KINK = '{"dim":1,"points":[{"x":["0"],"value":"0"},{"x":["1"],"value":"2"},{"x":["2"],"value":"2"}]}'
KINK_POSITIVE = '{"dim":1,"points":[{"x":["0"],"value":"1"},{"x":["1"],"value":"2"},{"x":["2"],"value":"2"}]}'
MODULAR_TABLE = '{"m":3,"values":["0","1","1","2","1","2","2","3"]}'


def run(args, **kw):
    return subprocess.run(CMD + args, capture_output=True, text=True, **kw)


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for name, doc in [
        ("lin.json", LINEAR_XOS),
        ("cube.json", CUBE_VIOLATION),
        ("kink.json", KINK),
        ("kinkpos.json", KINK_POSITIVE),
        ("modular.json", MODULAR_TABLE),
    ]:
        p = tmp_path / name
        p.write_text(doc)
        paths[name] = str(p)
    return paths


def test_extend_xos_linear(files):
    out = run(["extend", "--class", "xos", "--input", files["lin.json"]])
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["verdict"] == "extendible" and "vectors" in doc


def test_extend_submodular_cube_violation(files):
    out = run(["extend", "--class", "submodular", "--input", files["cube.json"]])
    assert out.returncode == 1
    doc = json.loads(out.stdout)
    assert doc["verdict"] == "not_extendible"
    assert doc["certificate"]["tuples"] == [{"a": [0], "b": [1], "count": 1}]


def test_certify_verify_rewrite_pipeline(files, tmp_path):
    cert_path = str(tmp_path / "cert.json")
    out = run(
        ["certify", "--input", files["cube.json"], "--out", cert_path]
    )
    assert out.returncode == 1
    out = run(
        ["verify-cert", "--cert", cert_path, "--input", files["cube.json"]]
    )
    assert out.returncode == 0 and json.loads(out.stdout)["valid"] is True
    out = run(
        ["rewrite-cert", "--cert", cert_path, "--input", files["cube.json"]]
    )
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["sizes"]["input"] >= 1 and doc["tuples"]


def test_verify_cert_rejects_wrong_values(files, tmp_path):
    cert_path = str(tmp_path / "cert.json")
    cert_path_file = tmp_path / "cert.json"
    cert_path_file.write_text('{"m":2,"tuples":[{"a":[0],"b":[1],"count":1}]}')
    zero = tmp_path / "zero.json"
    zero.write_text(
        '{"m":2,"points":[{"set":[],"value":"0"},{"set":[0],"value":"0"},'
        '{"set":[1],"value":"0"},{"set":[0,1],"value":"0"}]}'
    )
    out = run(["verify-cert", "--cert", cert_path, "--input", str(zero)])
    assert out.returncode == 1 and json.loads(out.stdout)["valid"] is False


def test_tester_accept_exit_zero(files):
    out = run(
        [
            "test",
            "--class",
            "subadditive",
            "--oracle",
            files["modular.json"],
            "--epsilon",
            "1/4",
            "--seed",
            "7",
        ]
    )
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["verdict"] == "accept" and doc["queries"] >= 1 and doc["seed"] == 7


def test_deterministic_stdout(files):
    args = [
        "test",
        "--class",
        "xos",
        "--oracle",
        files["modular.json"],
        "--epsilon",
        "1/4",
        "--seed",
        "42",
        "--trials",
        "3",
    ]
    a, b = run(args), run(args)
    assert a.stdout == b.stdout and a.returncode == b.returncode == 0


def test_eval_roofs(files):
    out = run(
        ["eval", "--class", "xos-roof", "--at", "[0,1]", "--input", files["lin.json"]]
    )
    assert out.returncode == 0 and json.loads(out.stdout)["value"] == "3"
    out = run(
        ["eval", "--class", "convex-roof", "--at", '["1"]', "--input", files["kink.json"]]
    )
    assert out.returncode == 0 and json.loads(out.stdout)["value"] == "1"
    out = run(
        ["eval", "--class", "convex-roof", "--at", '["3"]', "--input", files["kink.json"]]
    )
    assert json.loads(out.stdout)["status"] == "outside_hull"
    out = run(
        ["eval", "--class", "convex-tilde", "--at", '["3"]', "--input", files["kink.json"]]
    )
    assert json.loads(out.stdout)["value"] == "3"


def test_vertices(files):
    out = run(["vertices", "--input", files["kink.json"]])
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["vertices"] == [{"y": ["1"], "mu": "0", "tight": [0, 2]}]


def test_approx_commands(files):
    out = run(
        ["approx", "--class", "convex", "--input", files["kinkpos.json"], "--audit"]
    )
    assert out.returncode == 0 and json.loads(out.stdout)["alpha"] == "4/3"
    out = run(["approx", "--class", "xos", "--input", files["lin.json"]])
    assert out.returncode == 0 and json.loads(out.stdout)["alpha"] == "1"


def test_oracle_command(files):
    out = run(
        ["oracle", "--class", "monotone-subadditive", "--input", files["cube.json"]]
    )
    assert out.returncode == 1 and json.loads(out.stdout)["extendible"] is False


def test_gen_commands():
    out = run(["gen", "--kind", "antichain", "--m", "4", "--n", "3", "--seed", "5"])
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert len(doc["points"]) == 3
    out2 = run(["gen", "--kind", "antichain", "--m", "4", "--n", "3", "--seed", "5"])
    assert out.stdout == out2.stdout  # seeded generation is reproducible
    out = run(["gen", "--kind", "cert", "--m", "3", "--seed", "9"])
    assert out.returncode == 0 and "certificate" in json.loads(out.stdout)


def test_usage_errors(files, tmp_path):
    out = run(["extend", "--class", "xos", "--input", str(tmp_path / "missing.json")])
    assert out.returncode == 2 and out.stdout == ""
    bad = tmp_path / "bad.json"
    bad.write_text('{"m":2,"points":[{"set":[0],"value":"x"}]}')
    out = run(["extend", "--class", "xos", "--input", str(bad)])
    assert out.returncode == 2
    neg = tmp_path / "neg.json"
    neg.write_text('{"m":2,"points":[{"set":[0],"value":"-1"}]}')
    out = run(["extend", "--class", "xos", "--input", str(neg)])
    assert out.returncode == 2
    out = run(["extend", "--class", "submodular", "--input", str(neg)])
    assert out.returncode == 0  # negative values are legal for submodular


def test_cap_exit_code(files, tmp_path):
    # six disjoint singletons blow a tiny closure cap
    doc = {
        "m": 6,
        "points": [{"set": [i], "value": "1"} for i in range(6)]
        + [{"set": list(range(6)), "value": "1"}],
    }
    p = tmp_path / "wide.json"
    p.write_text(json.dumps(doc))
    out = run(
        ["extend", "--class", "submodular", "--input", str(p), "--cap", "10"]
    )
    assert out.returncode == 3 and out.stdout == ""


def test_version():
    out = run(["--version"])
    assert out.returncode == 0 and "schema" in out.stdout


def test_emitted_witnesses_reverify(files, tmp_path):
    """Whatever lands on stdout with exit 1 must check out against the
    input via the matching verification routine."""
    from extendkit.ground import mask_of, parse_partial_function, parse_rational
    from extendkit.subadditive import CoverViolation

    gadget = tmp_path / "gadget.json"
    gadget.write_text(
        '{"m":3,"points":[{"set":[0,1],"value":"1"},{"set":[1,2],"value":"1"},'
        '{"set":[0,1,2],"value":"3"}]}'
    )
    out = run(["extend", "--class", "subadditive", "--input", str(gadget)])
    assert out.returncode == 1
    doc = json.loads(out.stdout)["witness"]
    h = parse_partial_function(gadget.read_text())
    violation = CoverViolation(
        mask_of(doc["target"]),
        tuple(mask_of(c) for c in doc["cover"]),
        parse_rational(doc["cover_sum"]),
        parse_rational(doc["target_value"]),
    )
    assert violation.check(h)

    out = run(["extend", "--class", "xos", "--input", str(gadget)])
    assert out.returncode == 1
    wdoc = json.loads(out.stdout)["witness"]
    from extendkit.xos import XosNotExtendible

    witness = XosNotExtendible(
        mask_of(wdoc["target"]),
        tuple(
            (mask_of(e["set"]), parse_rational(e["weight"]))
            for e in wdoc["weights"]
        ),
    )
    assert witness.check(h)


def test_trials_jobs_byte_identical(files):
    base = [
        "test",
        "--class",
        "subadditive",
        "--oracle",
        files["modular.json"],
        "--epsilon",
        "1/4",
        "--seed",
        "11",
        "--trials",
        "4",
    ]
    serial = run(base + ["--jobs", "1"])
    parallel = run(base + ["--jobs", "2"])
    assert serial.returncode == parallel.returncode == 0
    assert serial.stdout == parallel.stdout
