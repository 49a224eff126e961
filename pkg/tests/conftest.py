"""Shared builders for the test suite.

Expensive synthetic datasets are session-scoped so the forward solver
runs once per configuration; everything derived from them is cheap.
"""

import numpy as np
import pytest

from wavedsm.forward import synthesize_timeseries
from wavedsm.imaging import ImagingConfig
from wavedsm.scene import (MeasurementSetup, PointScatterer, Scene,
                           circle_receivers)
from wavedsm.signals import SignalSpec, TimeGrid


def three_scatterer_scene():
    # Disk (speed 15), small square (speed 30), ellipse (speed 10); the
    # point reduction carries each shape's area as its measure.
    return Scene(2, 4.0, (
        PointScatterer((-1.0, -1.5), 15.0, np.pi * 0.1 * 0.1, bounding_radius=0.1),
        PointScatterer((1.0, 0.0), 30.0, 0.1 * 0.1, bounding_radius=0.1 * np.sqrt(2.0) / 2.0),
        PointScatterer((-1.0, 1.5), 10.0, np.pi * 0.12 * 0.08, bounding_radius=0.12),
    ))


def single_disk_scene(center=(-1.0, -1.5), speed=15.0):
    return Scene(2, 4.0, (PointScatterer(center, speed, np.pi * 0.01, bounding_radius=0.1),))


def circle_setup(n=12, radius=4.2, sources=((-3.0, 0.0),)):
    pts, w = circle_receivers(n, radius)
    return MeasurementSetup(pts, w, list(sources), geometry_tag="circle",
                            geometry_params={"radius": radius})


@pytest.fixture(scope="session")
def gauss20():
    return SignalSpec("gauss_mod_sine", 20.0)


@pytest.fixture(scope="session")
def coarse_grid():
    return TimeGrid(0.02, 300)


@pytest.fixture(scope="session")
def fine_grid():
    return TimeGrid(0.005, 1200)


@pytest.fixture(scope="session")
def small_setup():
    return circle_setup()


@pytest.fixture(scope="session")
def disk_scene():
    return single_disk_scene()


@pytest.fixture(scope="session")
def disk_series(small_setup, disk_scene, gauss20, coarse_grid):
    """Single-disk dataset at dt = 0.02 (12 receivers, one source)."""
    return synthesize_timeseries(small_setup, disk_scene, gauss20, coarse_grid, 0.0)


@pytest.fixture(scope="session")
def disk_series_fine(small_setup, disk_scene, gauss20, fine_grid):
    """Same dataset at dt = 0.005, fine enough for the transform
    equivalence to hold at the 20 rad/s carrier."""
    return synthesize_timeseries(small_setup, disk_scene, gauss20, fine_grid, 0.0)


@pytest.fixture
def base_config():
    return ImagingConfig(0.0, 6.0, 2, 4.0)
