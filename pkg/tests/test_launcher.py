import inspect
import io
import json
import os

import pytest

from conftest import projective_plane_document, series_document, single_generator_document
from kpwindow import defaults, launcher
from kpwindow.cohomology import tangent_report
from kpwindow.errors import EXIT_PRECISION, EXIT_VALIDATION, ValidationError
from kpwindow.hierarchy import apply_to_field
from kpwindow.series import bi_inverse
from kpwindow.subspace import in_order_kernel, schur_check

INI = """[windows]\nu_cap = 6\nt_lo = -3\nt_hi = 3\nfloor = -6\ndepth_cap = 10\nmargin = 1\nseed = 7\n\n[output]\nformat = json\nlog_dir = logs\n"""


def small_job(command, inputs=(), **overrides):
    values = dict(command=command, inputs=list(inputs), t_lo=-2, t_hi=2, u_cap=3, margin=1, output_format="json")
    values.update(overrides)
    return launcher.JobConfig(**values)


def run_job(config):
    logger = launcher.get_logger("test_logger")
    stream = io.StringIO()
    code = launcher.run(config, logger, stream)
    return code, stream.getvalue()


def test_read_window_config(tmp_path, caplog):
    logger = launcher.get_logger("test_logger")
    ini_path = tmp_path / "kpwindow.ini"
    ini_path.write_text(INI)
    with caplog.at_level("INFO", logger="test_logger"):
        cfg = launcher.read_window_config(str(ini_path), logger=logger)
    assert cfg["u_cap"] == 6
    assert (cfg["t_lo"], cfg["t_hi"]) == (-3, 3)
    assert cfg["depth_cap"] == 10
    assert cfg["format"] == "json"
    assert cfg["log_dir"] == "logs"
    assert "Successfully read config file" in caplog.text


def test_missing_config_falls_back_to_defaults(tmp_path, caplog):
    logger = launcher.get_logger("test_logger")
    with caplog.at_level("WARNING", logger="test_logger"):
        cfg = launcher.read_window_config(str(tmp_path / "absent.ini"), logger=logger)
    assert cfg == launcher.WINDOW_DEFAULTS
    assert "Config file not found" in caplog.text


def test_library_defaults_follow_the_built_in_windows():
    assert launcher.WINDOW_DEFAULTS["u_cap"] == defaults.U_CAP
    assert launcher.WINDOW_DEFAULTS["t_hi"] == defaults.T_CAP
    assert launcher.WINDOW_DEFAULTS["floor"] == defaults.FLOOR
    for function in (bi_inverse, in_order_kernel):
        parameters = inspect.signature(function).parameters
        assert parameters["t_cap"].default == launcher.WINDOW_DEFAULTS["t_hi"]
        assert parameters["u_cap"].default == launcher.WINDOW_DEFAULTS["u_cap"]
    assert inspect.signature(apply_to_field).parameters["t_cap"].default == launcher.WINDOW_DEFAULTS["t_hi"]
    for function in (schur_check, tangent_report):
        assert inspect.signature(function).parameters["margin"].default == launcher.WINDOW_DEFAULTS["margin"]
    config = launcher.JobConfig("coh", ["w.json"])
    assert (config.t_lo, config.t_hi, config.u_cap) == (defaults.T_LO, defaults.T_CAP, defaults.U_CAP)


def test_non_integer_config_value(tmp_path):
    logger = launcher.get_logger("test_logger")
    ini_path = tmp_path / "kpwindow.ini"
    ini_path.write_text("[windows]\nu_cap = lots\n")
    with pytest.raises(ValidationError) as excinfo:
        launcher.read_window_config(str(ini_path), logger=logger)
    assert excinfo.value.path == f"{ini_path}:[windows]"


def test_config_path_precedence(monkeypatch):
    monkeypatch.setenv("KPWINDOW_CONFIG", "/tmp/from-env.ini")
    assert launcher.get_config_path("/tmp/cli.ini") == "/tmp/cli.ini"
    assert launcher.get_config_path() == "/tmp/from-env.ini"
    monkeypatch.delenv("KPWINDOW_CONFIG")
    assert launcher.get_config_path().endswith(os.path.join("config", "kpwindow.ini"))


def test_get_cache_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("KPWINDOW_CACHE_DIR", str(tmp_path / "cache"))
    assert launcher.get_cache_dir() == str(tmp_path / "cache")


def test_build_config_merges_overrides(tmp_path):
    logger = launcher.get_logger("test_logger")
    ini_path = tmp_path / "kpwindow.ini"
    ini_path.write_text(INI)
    args = launcher.parse_args(
        ["coh", "--input", "a.json", "--input", "b.json", "--config", str(ini_path), "--margin", "0", "--format", "table"]
    )
    config = launcher.build_config(args, logger)
    assert config.inputs == ["a.json", "b.json"]
    assert config.margin == 0
    assert config.output_format == "table"
    assert config.u_cap == 6
    assert config.seed == 7


@pytest.mark.parametrize(
    "overrides, path",
    [
        ({"command": "nope"}, "command"),
        ({"t_lo": 0}, "t_lo"),
        ({"floor": 0}, "floor"),
        ({"output_format": "xml"}, "format"),
        ({"margin": -1}, "margin"),
        ({"inputs": []}, "input"),
        ({"command": "selfcheck", "inputs": [], "samples": 0}, "samples"),
    ],
)
def test_validate_reports_the_field(overrides, path):
    values = {"command": "coh", "inputs": ["w.json"]}
    values.update(overrides)
    with pytest.raises(ValidationError) as excinfo:
        launcher.JobConfig(**values).validate()
    assert excinfo.value.path == path


def test_input_count_message():
    with pytest.raises(ValidationError) as excinfo:
        launcher.JobConfig("schur", ["a.json"]).validate()
    assert "schur takes 2 --input document(s), got 1" in str(excinfo.value)


def test_print_job_config(caplog):
    logger = launcher.get_logger("test_logger")
    with caplog.at_level("INFO", logger="test_logger"):
        launcher.print_job_config(launcher.JobConfig("coh", ["w.json"]), logger=logger)
    assert "kpwindow job configuration:" in caplog.text
    assert "Command: coh" in caplog.text
    assert "Inputs: w.json" in caplog.text


def test_run_coh(write_document):
    path = write_document("plane.json", projective_plane_document())
    code, output = run_job(small_job("coh", [path]))
    assert code == 0
    result = json.loads(output)
    assert result["command"] == "coh"
    section = result["results"][0]
    assert section["title"] == path
    assert (section["h0"], section["h1"], section["h2"]) == (1, 0, 0)
    assert section["routes agree"] is True
    assert section["cross identity"] is True


def test_run_coh_reports_unbounded(write_document):
    path = write_document("single.json", single_generator_document())
    code, output = run_job(small_job("coh", [path]))
    assert code == 0
    section = json.loads(output)["results"][0]
    assert section["h2"] == "unbounded"
    assert section["certified"] is False


def test_documents_without_box_use_the_configured_box(write_document):
    path = write_document("boxless.json", {"kind": "subspace", "thresholds": [[[0, 0]]]})
    code, output = run_job(small_job("coh", [path]))
    assert code == 0
    assert json.loads(output)["results"][0]["h0"] == 1


def test_json_output_is_deterministic(write_document):
    path = write_document("plane.json", projective_plane_document())
    first = run_job(small_job("coh", [path, path]))
    second = run_job(small_job("coh", [path, path]))
    assert first == second
    assert len(json.loads(first[1])["results"]) == 2


def test_table_output(write_document):
    path = write_document("single.json", single_generator_document())
    code, output = run_job(small_job("coh", [path], output_format="table"))
    assert code == 0
    assert "unbounded-in-window" in output
    assert "routes agree" in output


def test_malformed_document_exits_with_validation_code(tmp_path, caplog):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with caplog.at_level("ERROR", logger="test_logger"):
        code, output = run_job(small_job("coh", [str(path)]))
    assert code == EXIT_VALIDATION
    assert output == ""
    assert "coh failed (ValidationError)" in caplog.text


def test_wrong_document_kind(write_document):
    path = write_document("series.json", series_document([[0, 0, "1"]]))
    code, _ = run_job(small_job("fredholm", [path]))
    assert code == EXIT_VALIDATION


def test_depth_cap_too_small_is_a_precision_failure():
    code, _ = run_job(small_job("kp-derive", depth_cap=3))
    assert code == EXIT_PRECISION


def test_run_fredholm(write_document):
    path = write_document("plane.json", projective_plane_document())
    code, output = run_job(small_job("fredholm", [path]))
    assert code == 0
    section = json.loads(output)["results"][0]
    assert section["fredholm"] is True
    assert section["level 0"] == {"h0": 1, "h1": 0}


def test_run_ord(write_document):
    a = write_document("a.json", series_document([[1, 1, "1"]]))
    b = write_document("b.json", series_document([[0, 0, "1"], [1, 0, "1"]]))
    code, output = run_job(small_job("ord", [a, b]))
    assert code == 0
    section = json.loads(output)["results"][0]
    assert (section["ord a"], section["ord b"], section["ord ab"]) == (1, 0, 1)
    assert section["additive"] is True
    assert section["b in kernel"] is True


def test_run_schur_without_algebra_check(write_document):
    box = {"t_lo": -3, "t_hi": 3, "u_lo": -4, "u_hi": 4}
    a = write_document("a.json", {"kind": "subspace", "box": box, "generators": [[[0, 0, 0, "1"]], [[-1, 0, 0, "1"]]]})
    w = write_document("w.json", {"kind": "subspace", "box": box, "generators": [[[-1, -1, 0, "1"]]]})
    code, output = run_job(small_job("schur", [a, w], require_algebra=False))
    assert code == 0
    section = json.loads(output)["results"][0]
    assert section["schur pair"] is False
    assert section["witness a"] == [[-1, 0, 0, "1"]]
    code, _ = run_job(small_job("schur", [a, w]))
    assert code == EXIT_VALIDATION


def test_run_apply(write_document):
    operator = write_document(
        "op.json", {"kind": "operator", "coefficients": [{"d1": 0, "d2": -1, "terms": [[0, 0, "1"]]}]}
    )
    field = write_document("f.json", series_document([[0, 0, "1"]]))
    code, output = run_job(small_job("apply", [operator, field]))
    assert code == 0
    assert json.loads(output)["results"][0]["series"]["terms"] == [[1, 0, "1"]]


def test_run_kp_flow():
    code, output = run_job(small_job("flow", n=1, depth=3))
    assert code == 0
    section = json.loads(output)["results"][0]
    assert section["da_1"] == [[[[1, 1, 1]], "1"]]


def test_run_kdv_derive(caplog):
    with caplog.at_level("WARNING", logger="test_logger"):
        code, output = run_job(small_job("kdv-derive"))
    assert code == 0
    section = json.loads(output)["results"][0]
    assert section["c"] == "1"
    assert section["matches printed"] is False
    assert "differs from the printed 7" in caplog.text


def test_selfcheck_reports_every_sweep():
    code, output = run_job(small_job("selfcheck", samples=2))
    assert code == 0
    checks = json.loads(output)["results"][0]
    assert checks["route equality"] == "7/7"
    assert checks["monomial oracle"] == "2/2"
    assert checks["level oracle"] == "2/2"
    assert checks["dual-number splitting"] == "2/2"
    assert checks["ord kernel"] == "2/2"
    assert checks["flow commutativity"] == "1/1"
    assert checks["flow well-posedness"] == "2/2"
    assert checks["quotient action"] == "2/2"
    assert checks["quotient action base cases"] == "1/1"


def test_selfcheck_sample_cap():
    assert launcher._sample_size(small_job("selfcheck"), "monomial") == 100
    assert launcher._sample_size(small_job("selfcheck"), "levels") == 50
    assert launcher._sample_size(small_job("selfcheck", samples=30), "dressing") == 25
    assert launcher._sample_size(small_job("selfcheck", samples=30), "units") == 30
