"""End-to-end: render every recipe kind from freshly generated artifacts.

Exercises the real CSV producers through their command line (the only
interface this package is allowed to consume) and checks that each recipe
kind renders without error and deterministically.
"""

import pytest

from spikefigs import render
from spikefigs.demo import generate_artifacts, recipes_for


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    work = tmp_path_factory.mktemp("artifacts")
    return generate_artifacts(work), tmp_path_factory.mktemp("png")


def test_every_recipe_renders_and_rerenders_identically(artifacts):
    paths, png_dir = artifacts
    for recipe in recipes_for(paths, png_dir):
        out = render(recipe)
        assert out.is_file() and out.stat().st_size > 1000
        first = out.read_bytes()
        render(recipe)
        assert out.read_bytes() == first, recipe.figure_id
