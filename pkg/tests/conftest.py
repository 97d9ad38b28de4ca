import os
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]


def data_dir() -> Path:
    return Path(os.environ.get("KCSEARCH_DATA_DIR", REPO / "data"))


@pytest.fixture
def titanic_csv():
    path = data_dir() / "titanic.csv"
    if not path.is_file():
        pytest.fail(f"Titanic CSV not found at {path}")
    return path


@pytest.fixture
def tiny_csv(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text(
        "id,height,colour,y\n"
        "a,1.0,red,0\n"
        "b,,blue,1\n"
        "c,3.0,red,1\n",
        encoding="utf-8",
    )
    return path
