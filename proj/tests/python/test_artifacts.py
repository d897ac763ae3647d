"""Checks on files the command-line tool publishes or emits."""

import json
import os
import subprocess
import xml.etree.ElementTree as ET

import jsonschema
import pytest

SVG = "{http://www.w3.org/2000/svg}"


def load_schema(source_dir):
    return json.loads((source_dir / "docs" / "config.schema.json").read_text())


@pytest.mark.parametrize("name", ["demo1d.json", "demo2d.json"])
def test_demo_configs_satisfy_the_published_schema(source_dir, name):
    schema = load_schema(source_dir)
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(json.loads((source_dir / "configs" / name).read_text()), schema)


def test_schema_rejects_unknown_keys_and_bad_tags(source_dir):
    schema = load_schema(source_dir)
    doc = json.loads((source_dir / "configs" / "demo1d.json").read_text())
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({**doc, "extra": 1}, schema)
    doc["problem"]["bcs"][0] = "bogus"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, schema)


def run(binary, *args, cwd):
    env = {k: v for k, v in os.environ.items() if k != "HOMOGEIG_OUT"}
    return subprocess.run([binary, *args], cwd=cwd, env=env, capture_output=True, text=True)


def test_plots_are_well_formed_svg(binary, source_dir, tmp_path):
    config = str(source_dir / "configs" / "demo1d.json")
    assert run(binary, "rates", "--config", config, "--out", "o", cwd=tmp_path).returncode == 0
    assert run(binary, "plot", "--config", config, "--out", "o", cwd=tmp_path).returncode == 0
    report = json.loads((tmp_path / "o" / "demo1d" / "rates.json").read_text())
    svgs = sorted((tmp_path / "o" / "demo1d").glob("plot_*.svg"))
    assert len(svgs) == len(report["bcs"])
    for svg in svgs:
        root = ET.parse(svg).getroot()
        assert root.tag == SVG + "svg"
        assert root.find(SVG + "title") is not None
        circles = root.findall(SVG + "circle")
        assert circles, svg.name
        for c in circles:
            float(c.get("cx"))
            float(c.get("cy"))
