from __future__ import annotations

import pytest

from helpers import hello_world_pdf, make_grid_layout, make_project, make_schema


@pytest.fixture
def schema():
    return make_schema()


@pytest.fixture
def grid():
    return make_grid_layout()


@pytest.fixture
def hello_pdf():
    return hello_world_pdf()


@pytest.fixture
def project(tmp_path):
    store, _ = make_project(tmp_path / "project")
    return store
