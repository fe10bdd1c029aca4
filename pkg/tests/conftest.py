import json
from pathlib import Path

import pytest

from eventlens import build_call_graph, load_program, load_script

ROOT = Path(__file__).resolve().parent.parent
DEMO_PROGRAM = ROOT / "demo" / "demo-mindmap.edp"
DEMO_SCRIPT = ROOT / "demo" / "demo-mindmap.events"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def demo_doc():
    return json.loads(DEMO_PROGRAM.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def demo_model():
    return load_program(DEMO_PROGRAM)


@pytest.fixture(scope="session")
def demo_cg(demo_model):
    return build_call_graph(demo_model)


@pytest.fixture(scope="session")
def demo_script():
    return load_script(DEMO_SCRIPT)


@pytest.fixture(scope="session")
def demo_goldens():
    return json.loads((FIXTURES / "demo_goldens.json").read_text(encoding="utf-8"))
