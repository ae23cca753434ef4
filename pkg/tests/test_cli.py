import json

import pytest

from awarebid import cli
from awarebid.cli import ParseError, emit, main, parse_scenario, write_scenario
from awarebid.disclosure import ClaimResult, VerificationReport


def run_cli(capsysbinary, args):
    status = main(args)
    return status, capsysbinary.readouterr().out


def test_parse_d1_round_trip(scenario_dir, tmp_path):
    s, p, cfg = parse_scenario(str(scenario_dir / "d1.json"))
    assert s.n_bidders == 2
    assert cfg.backend == "exact" and cfg.seed == 7
    first = tmp_path / "one.json"
    second = tmp_path / "two.json"
    write_scenario(str(first), s, p, cfg)
    reparsed = parse_scenario(str(first))
    write_scenario(str(second), *reparsed)
    assert first.read_bytes() == second.read_bytes()


def test_generated_corpus_files_round_trip(tmp_path):
    from awarebid.disclosure import CorpusConfig, random_discrete_scenario
    from awarebid.engine import EstimatorConfig
    from awarebid.scenario import no_info_policy

    for index in range(4):
        _sid, s = random_discrete_scenario(CorpusConfig(count=4, seed=2), index)
        policy = no_info_policy(s)
        cfg = EstimatorConfig(backend="exact", n_samples=1000, seed=index)
        first = tmp_path / f"gen{index}a.json"
        second = tmp_path / f"gen{index}b.json"
        write_scenario(str(first), s, policy, cfg)
        write_scenario(str(second), *parse_scenario(str(first)))
        assert first.read_bytes() == second.read_bytes()


def test_backend_override_flag(capsysbinary, scenario_dir):
    status, out = run_cli(capsysbinary,
                          ["revenue", "--scenario", str(scenario_dir / "d1.json"),
                           "--backend", "mc", "--samples", "20000", "--seed", "4"])
    assert status == 0
    assert b",mc" in out and b"_exact," not in out


def test_parse_syntax_error_positions(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"bidders": 2,,}')
    with pytest.raises(ParseError, match="line 1"):
        parse_scenario(str(bad))


def _write(tmp_path, doc):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return str(path)


def _d1_doc():
    dist = {"kind": "discrete", "atoms": [[0, "1/2"], [1, "1/2"]]}
    dist2 = {"kind": "discrete", "atoms": [[0, "1/2"], [2, "1/2"]]}
    return {
        "bidders": 2,
        "characteristics": [{"distributions": [dist, dist]},
                            {"distributions": [dist2, dist2]}],
        "awareness": [[1, 2], [1]],
        "info": [{"1": "full", "2": "full"}, {"1": "full"}],
        "estimator": {"backend": "exact", "samples": 1000, "seed": 1},
    }


def test_parse_reports_bad_probabilities_with_path(tmp_path):
    doc = _d1_doc()
    doc["characteristics"][1]["distributions"][0]["atoms"] = [[0, "1/2"], [2, "2/5"]]
    with pytest.raises(ParseError, match=r"characteristics\[1\].distributions\[0\]"):
        parse_scenario(_write(tmp_path, doc))


def test_parse_reports_awareness_rule(tmp_path):
    doc = _d1_doc()
    doc["awareness"][1] = [2]
    with pytest.raises(ParseError, match="bidder 2.*characteristic 1"):
        parse_scenario(_write(tmp_path, doc))


def test_parse_reports_info_on_unaware(tmp_path):
    doc = _d1_doc()
    doc["info"][1]["2"] = "full"
    with pytest.raises(ParseError, match="unaware characteristic"):
        parse_scenario(_write(tmp_path, doc))


def test_parse_unknown_kind_and_level(tmp_path):
    doc = _d1_doc()
    doc["characteristics"][0]["distributions"][0] = {"kind": "cauchy"}
    with pytest.raises(ParseError, match="unknown distribution kind"):
        parse_scenario(_write(tmp_path, doc))
    doc = _d1_doc()
    doc["info"][0]["1"] = "everything"
    with pytest.raises(ParseError, match="unknown info level"):
        parse_scenario(_write(tmp_path, doc))


def test_revenue_command_on_d1(capsysbinary, scenario_dir):
    status, out = run_cli(capsysbinary,
                          ["revenue", "--scenario", str(scenario_dir / "d1.json")])
    assert status == 0
    text = out.decode()
    assert text.splitlines()[0] == "field,value,stderr,backend"
    assert "total_revenue,1.75,,exact" in text
    assert "total_revenue_exact,7/4,,exact" in text
    assert "consistency_residual,0,,exact" in text


def test_orderstats_command_reports_example1_reference(capsysbinary, scenario_dir):
    status, out = run_cli(capsysbinary,
                          ["orderstats", "--scenario", str(scenario_dir / "example1.json")])
    assert status == 0
    text = out.decode()
    assert "reference_expected_first_order_stat_exact,505/132,,exact" in text
    assert "agreement_1e9,1" in text


def test_orderstats_command_reports_clark_reference(capsysbinary, scenario_dir):
    status, out = run_cli(capsysbinary,
                          ["orderstats", "--scenario", str(scenario_dir / "example2.json")])
    assert status == 0
    text = out.decode()
    assert "reference_expected_first_order_stat" in text
    assert ",clark" in text
    assert "agreement_1e9,1" in text


COMMANDS = {
    "d1.json": [["fees"], ["revenue"], ["curse"], ["orderstats"],
                ["tradeoff", "--bidder", "2", "--char", "2"],
                ["optimize", "--regime", "individual"]],
    "example1.json": [["fees", "--samples", "20000"],
                      ["revenue", "--samples", "20000"],
                      ["curse", "--samples", "20000"],
                      ["orderstats"],
                      ["optimize", "--regime", "public-no-info", "--samples", "20000"],
                      ["optimize", "--regime", "public-full-info", "--samples", "20000"]],
    "example1_discrete.json": [["fees"], ["revenue"], ["curse"], ["orderstats"],
                               ["optimize", "--regime", "public-full-info"]],
    "example2.json": [["fees", "--samples", "20000"],
                      ["revenue", "--samples", "20000"],
                      ["orderstats"]],
    "prop4_demo.json": [["revenue", "--samples", "20000"],
                        ["optimize", "--regime", "public-no-info", "--samples", "20000"]],
    "prop5_demo.json": [["optimize", "--regime", "public-full-info", "--samples", "20000"]],
    "prop6_demo.json": [["revenue"], ["optimize", "--regime", "common-free-info"]],
    "curse_demo.json": [["curse"], ["revenue"]],
}


@pytest.mark.parametrize("name,extra", [
    (name, extra) for name, cmds in COMMANDS.items() for extra in cmds])
def test_bundled_scenarios_run_all_commands(capsysbinary, scenario_dir, name, extra):
    path = scenario_dir / name
    status, out = run_cli(capsysbinary,
                          [extra[0], "--scenario", str(path), *extra[1:]])
    assert status == 0
    assert out.startswith(b"field,value,stderr,backend\n")


def test_output_is_byte_stable(capsysbinary, scenario_dir):
    args = ["revenue", "--scenario", str(scenario_dir / "d1.json")]
    _s1, out1 = run_cli(capsysbinary, args)
    _s2, out2 = run_cli(capsysbinary, args)
    assert out1 == out2
    args_mc = ["fees", "--scenario", str(scenario_dir / "example1.json"),
               "--samples", "20000", "--seed", "3"]
    _s1, mc1 = run_cli(capsysbinary, args_mc)
    _s2, mc2 = run_cli(capsysbinary, args_mc)
    assert mc1 == mc2


def test_text_format_alignment(capsysbinary, scenario_dir):
    status, out = run_cli(capsysbinary,
                          ["revenue", "--scenario", str(scenario_dir / "d1.json"),
                           "--format", "text"])
    assert status == 0
    lines = out.decode().split("\n")
    assert lines[0].startswith("field")
    assert b"\r" not in out


def test_emit_rejects_unknown_format():
    from awarebid.cli import ReportDocument
    rep = ReportDocument()
    rep.add("x", 1)
    with pytest.raises(ParseError):
        emit(rep, "yaml")


def test_exit_codes_for_input_errors(capsysbinary, tmp_path):
    assert main(["revenue", "--scenario", str(tmp_path / "missing.json")]) == 1
    assert main(["revenue", "--no-such-flag"]) == 1
    assert main(["bogus-command"]) == 1
    doc = _d1_doc()
    doc["awareness"][1] = [2]
    assert main(["revenue", "--scenario", _write(tmp_path, doc)]) == 1
    capsysbinary.readouterr()


def test_verify_command_exit_zero(capsysbinary):
    status, out = run_cli(capsysbinary, ["verify", "--count", "3", "--corpus-seed", "0"])
    assert status == 0
    assert b"failures,0" in out


def test_verify_command_exit_two_on_injected_failure(capsysbinary, monkeypatch):
    def fake_suite(cfg):
        bad = ClaimResult("Prop2", "injected", True, False, -1)
        return VerificationReport((bad,), cfg)

    monkeypatch.setattr(cli, "verify_suite", fake_suite)
    status, out = run_cli(capsysbinary, ["verify", "--count", "1"])
    assert status == 2
    assert b"failures,1" in out
