from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def massey_json():
    return (DATA / "massey_example.json").read_text()
