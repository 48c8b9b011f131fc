import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

from hodgefl.cli import main
from hodgefl.corpus import corpus, delta_plane, polynomial_plane
from hodgefl.monodromic import broken_model, cz_model, delta_model, fl
from hodgefl.serialize import dumps, load_schema, module_from_json, module_to_json

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"

SCHEMAS = {n: load_schema(f"{n}.schema.json") for n in ("report", "monodromic-module", "rmf-input")}
REGISTRY = Registry().with_resources(
    (s["$id"], Resource.from_contents(s)) for s in SCHEMAS.values())


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(argv + ["--format", "json"], capsys)
    doc = json.loads(out)
    jsonschema.Draft202012Validator(SCHEMAS["report"], registry=REGISTRY).validate(doc)
    return code, doc


# --- fixtures -----------------------------------------------------------------

@pytest.mark.parametrize("name,model", [
    ("czmodel", cz_model), ("deltamodel", delta_model), ("broken", broken_model),
    ("polyplane", polynomial_plane), ("deltaplane", delta_plane),
])
def test_fixtures_match_models(name, model):
    doc = json.loads((FIX / f"{name}.json").read_text())
    jsonschema.Draft202012Validator(SCHEMAS["monodromic-module"]).validate(doc)
    assert module_from_json(doc) == model()


def test_corpus_documents_match_schema():
    v = jsonschema.Draft202012Validator(SCHEMAS["monodromic-module"])
    for M in corpus(3, 10):
        v.validate(json.loads(dumps(module_to_json(M))))


def test_rmf_fixtures_match_schema():
    v = jsonschema.Draft202012Validator(SCHEMAS["rmf-input"])
    for name in ("rmf_jordan", "rmf_none"):
        v.validate(json.loads((FIX / f"{name}.json").read_text()))


# --- gkz ----------------------------------------------------------------------

def test_gkz_standard(capsys):
    code, doc = run_json(["gkz", "--matrix", "1,1,1;0,1,2", "--beta", "0,0"], capsys)
    assert code == 0 and doc["ok"]
    assert doc["flags"] == {"homogeneous": True, "pointed": True, "columns_span": True}
    assert doc["boxes"] == ["d1*d3 - d2^2"]


def test_gkz_inhomogeneous(capsys):
    code, doc = run_json(["gkz", "--matrix", "1,2", "--beta", "0"], capsys)
    assert code == 0 and doc["flags"]["homogeneous"] is False
    code, _ = run_json(["gkz", "--matrix", "1,2", "--beta", "0", "--strict"], capsys)
    assert code == 1


def test_gkz_identity_and_json_matrix(capsys):
    code, doc = run_json(["gkz", "--matrix", "[[1,0],[0,1]]", "--beta", "0,0"], capsys)
    assert code == 0 and doc["boxes"] == []


@pytest.mark.parametrize("argv", [
    ["gkz", "--matrix", "1,a"], ["gkz", "--matrix", "1,2;3"], ["gkz", "--matrix", "1,1", "--beta", "0,0"],
    ["gkz", "--matrix", "0,0"], ["gkz", "--matrix", "1,1", "--beta", "1/0"], ["gkz"], ["nosuch"],
])
def test_gkz_input_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


# --- mono ---------------------------------------------------------------------

def test_mono_inversion(capsys):
    code, doc = run_json(["mono", "inversion", str(FIX / "czmodel.json")], capsys)
    assert code == 0 and doc["info"]["intertwiner_is_identity"]


def test_mono_flrestrict(capsys):
    code, doc = run_json(["mono", "flrestrict", str(FIX / "deltamodel.json")], capsys)
    assert code == 0 and doc["ok"]


def test_mono_validate_broken(capsys):
    code, doc = run_json(["mono", "validate", str(FIX / "broken.json")], capsys)
    assert code == 1 and not doc["ok"]
    assert doc["failures"][0]["witness"] == ["1"]


def test_mono_fl_outputs_module(capsys, tmp_path):
    out = tmp_path / "fl.json"
    code, _, _ = run(["mono", "fl", str(FIX / "czmodel.json"), "--format", "json",
                      "--output", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert module_from_json(doc["module"]) == fl(cz_model()) == delta_model()
    jsonschema.Draft202012Validator(SCHEMAS["report"], registry=REGISTRY).validate(doc)


def test_mono_fl_rejects_invalid(capsys):
    code, doc = run_json(["mono", "fl", str(FIX / "broken.json")], capsys)
    assert code == 1 and not doc["validation"]["ok"]


def test_mono_twist_and_restrict(capsys):
    code, doc = run_json(["mono", "twist", str(FIX / "czmodel.json"), "--ell", "1"], capsys)
    assert code == 0
    code, doc = run_json(["mono", "restrict", str(FIX / "deltamodel.json")], capsys)
    assert code == 0 and doc["shriek"]["cohomology"] == {"0": 1, "1": 0}


def test_mono_restrict_needs_rank_one(capsys):
    code, _, err = run(["mono", "restrict", str(FIX / "polyplane.json")], capsys)
    assert code == 2 and "r = 1" in err


def test_mono_rmf(capsys):
    code, doc = run_json(["mono", "rmf", str(FIX / "rmf_jordan.json")], capsys)
    assert code == 0 and doc["graded_dims"] == {"-1": 1, "1": 1}
    code, doc = run_json(["mono", "rmf", str(FIX / "rmf_none.json")], capsys)
    assert code == 1 and doc["certificate"]


def test_mono_inversion_rejects_nonunipotent(capsys, tmp_path):
    M = next(M for M in corpus(101, 30) if not M.is_unipotent())
    p = tmp_path / "m.json"
    p.write_text(dumps(module_to_json(M)))
    code, _, err = run(["mono", "inversion", str(p)], capsys)
    assert code == 2 and "unipotent" in err


@pytest.mark.parametrize("content", ["not json", "[1, 2]", '{"schema": "other"}',
                                     '{"schema": "hodgefl/monodromic-module", "version": 1}'])
def test_mono_schema_violations(content, capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, _, err = run(["mono", "validate", str(p)], capsys)
    assert code == 2 and err


def test_mono_missing_file(capsys, tmp_path):
    code, _, err = run(["mono", "validate", str(tmp_path / "none.json")], capsys)
    assert code == 2


# --- micro --------------------------------------------------------------------

def test_micro_phi(capsys):
    code, out, _ = run(["micro", "phi", "--elem", "delta_g"], capsys)
    assert code == 0 and "image: delta_f" in out
    code, doc = run_json(["micro", "phi", "--elem", "y1*dxi^-1*delta_g"], capsys)
    assert doc["image"] == "dt1*delta_f"


def test_micro_identities(capsys):
    code, doc = run_json(["micro", "identities", "--n", "2", "--r", "2", "--f", "x1^2-x2^3,x1*x2",
                          "--samples", "30", "--seed", "7"], capsys)
    assert code == 0 and doc["seed"] == 7
    assert len(doc["identities"]) == 8 and all(i["ok"] for i in doc["identities"])


def test_micro_shifts(capsys):
    code, doc = run_json(["micro", "shifts", "--bound", "4"], capsys)
    assert code == 0 and doc["failures"] == []


@pytest.mark.parametrize("argv", [
    ["micro", "phi", "--elem", "dt1*delta_f"], ["micro", "phi", "--elem", "y1*"],
    ["micro", "identities", "--f", "x1^2,", "--r", "2"], ["micro", "shifts", "--bound", "0"],
    ["micro", "identities", "--samples", "0"], ["micro", "shifts", "--n", "3"],
    ["micro", "phi", "--elem", "delta_g", "--f", "x3"],
])
def test_micro_input_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


# --- determinism and entry points ----------------------------------------------

VERIFY_COMMANDS = [
    ["gkz", "--matrix", "1,1,1;0,1,2", "--beta", "0,0", "--seed", "3"],
    ["mono", "validate", str(FIX / "broken.json")],
    ["mono", "inversion", str(FIX / "deltaplane.json")],
    ["mono", "flrestrict", str(FIX / "czmodel.json")],
    ["mono", "rmf", str(FIX / "rmf_jordan.json")],
    ["micro", "identities", "--samples", "20", "--seed", "11"],
    ["micro", "shifts", "--bound", "3"],
]


@pytest.mark.parametrize("argv", VERIFY_COMMANDS, ids=lambda a: " ".join(a[:2]))
@pytest.mark.parametrize("fmt", ["text", "json"])
def test_byte_identical_output(argv, fmt, capsys):
    first = run(argv + ["--format", fmt], capsys)
    second = run(argv + ["--format", fmt], capsys)
    assert first == second


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hodgefl", "micro", "phi", "--elem", "delta_g"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "delta_f" in res.stdout
