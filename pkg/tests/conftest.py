import pytest
from sqlalchemy.orm import sessionmaker

from app.db import Base, make_engine
from app.harness.config_file import apply_overrides
from app.models import ExperimentRun, SweepRun  # noqa: F401
from app.schemas import SimConfig

# 8x8 arrays, 5 slots, coarse grids: a full proposed + baseline run takes well under a second
SMALL_OVERRIDES = {
    "scene.nt": 8,
    "scene.nr": 8,
    "timing.t_max": 0.1,
    "timing.frame_len": 64,
    "tpm.n_theta": 360,
    "signal.max_delay_index": 40,
    "ckm.n_x": 40,
    "ckm.n_y": 2,
    "mc.runs": 1,
}


@pytest.fixture
def small_config() -> SimConfig:
    return apply_overrides(SimConfig(), SMALL_OVERRIDES)


@pytest.fixture
def db_session(tmp_path):
    engine = make_engine(f"sqlite:///{tmp_path / 'catalog.db'}")
    Base.metadata.create_all(bind=engine)
    session = sessionmaker(autocommit=False, autoflush=False, bind=engine)()
    try:
        yield session
    finally:
        session.close()
        engine.dispose()
