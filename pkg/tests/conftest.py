"""Global pytest configuration.

This file contains pytest configuration and fixtures shared across all tests.
"""

from pathlib import Path

import numpy as np
import pytest

from fibrostage.modules.imgcore import ContrastMode, Geometry, Mask, Study, Volume
from fibrostage.modules.phantom import Ellipsoid, PhantomResult, PhantomSpec, generate


SMALL_PHANTOM = PhantomSpec(
    subject_id="PH1",
    dims=(32, 32, 8),
    organ=Ellipsoid(semi_axes=(18.0, 15.0, 9.0)),
    lesion_fraction=0.3,
    seed=7,
    stage=3,
)


def pytest_addoption(parser):
    """Add command-line options to pytest."""
    parser.addoption(
        "--run-integration",
        action="store_true",
        default=False,
        help="Run integration tests",
    )


def pytest_configure(config: pytest.Config) -> None:
    """Configure pytest with custom markers."""
    config.addinivalue_line("markers", "integration: mark a test as an end-to-end CLI test")
    config.addinivalue_line("markers", "slow: mark a test as slow running")


def pytest_collection_modifyitems(config, items):
    """Skip integration tests unless --run-integration option is used."""
    if config.getoption("--run-integration"):
        return

    skip_integration = pytest.mark.skip(reason="Need --run-integration option to run")
    for item in items:
        if "integration" in item.keywords:
            item.add_marker(skip_integration)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def geometry() -> Geometry:
    """Small anisotropic grid."""
    return Geometry(dims=(24, 20, 12), spacing=(1.5, 1.5, 3.0), origin=(-10.0, 4.0, 2.0))


@pytest.fixture
def smooth_volume(geometry: Geometry) -> Volume:
    """Smooth blob-shaped volume on ``geometry``."""
    x, y, z = np.meshgrid(*(np.linspace(-1.0, 1.0, d) for d in geometry.dims), indexing="ij")
    data = np.exp(-(x**2 + 2 * y**2 + 0.5 * z**2) * 2.0) + 0.2 * x
    return Volume(geometry=geometry, data=data)


@pytest.fixture
def full_mask(geometry: Geometry) -> Mask:
    """Mask covering the whole grid."""
    return Mask(geometry=geometry, data=np.ones(geometry.dims, dtype=np.uint8))


@pytest.fixture
def make_study():
    """Factory for a study whose channels are deterministic functions of the reference."""

    def _make(
        subject_id: str = "S01",
        dims: tuple[int, int, int] = (24, 24, 4),
        stage: int | None = None,
        seed: int = 0,
        mode: ContrastMode = ContrastMode.NONCONTRAST,
    ) -> Study:
        geo = Geometry(dims=dims, spacing=(1.0, 1.0, 2.0))
        gen = np.random.default_rng(seed)
        base = gen.normal(size=dims)
        modalities = {name: Volume(geometry=geo, data=base * (i + 1) + i) for i, name in enumerate(mode.channels)}
        modalities["GED4"] = Volume(geometry=geo, data=base)
        mask = np.zeros(dims, dtype=np.uint8)
        mask[2:-2, 2:-2, :] = 1
        return Study(
            subject_id=subject_id,
            modalities=modalities,
            mask=Mask(geometry=geo, data=mask),
            stage=stage,
            contrast_mode=mode,
        )

    return _make


@pytest.fixture(scope="session")
def small_phantom() -> PhantomResult:
    """Deterministic small phantom without planted misalignment."""
    return generate(SMALL_PHANTOM)


@pytest.fixture
def write_nifti(tmp_path: Path):
    """Write raw arrays as NIfTI with nibabel, bypassing the toolkit's writer."""
    import nibabel as nib

    def _write(name: str, data: np.ndarray, affine: np.ndarray | None = None) -> Path:
        path = tmp_path / name
        nib.save(nib.Nifti1Image(data, np.eye(4) if affine is None else affine), path)
        return path

    return _write
