import json

from app.db import Base, SessionLocal, engine, get_db
from app.models import ExperimentRun, SweepRun


def test_session_open_close():
    """Test that we can open and close a database session without errors"""
    db = SessionLocal()
    try:
        assert db is not None
    finally:
        db.close()


def test_engine_connection():
    connection = engine.connect()
    assert connection is not None
    connection.close()


def test_create_tables():
    Base.metadata.create_all(bind=engine)
    assert {"experiment_runs", "sweep_runs"} <= set(Base.metadata.tables)


def test_get_db_yields_session():
    gen = get_db()
    db = next(gen)
    assert db is not None
    gen.close()


def test_insert_and_query_experiment(db_session):
    """Insert an ExperimentRun, commit, and query it back"""
    run = ExperimentRun(
        scheme="both",
        config_json=json.dumps({"mc": {"runs": 1}}),
        summary_json=json.dumps({"n_runs": 1}),
        output_dir=None,
    )
    db_session.add(run)
    db_session.commit()
    db_session.refresh(run)

    assert run.id is not None
    queried = db_session.query(ExperimentRun).filter(ExperimentRun.id == run.id).first()
    assert queried.scheme == "both"
    assert json.loads(queried.summary_json) == {"n_runs": 1}
    assert queried.output_dir is None
    assert queried.created_at is not None


def test_insert_and_query_sweep(db_session):
    sweep = SweepRun(param="tpm.c_pi", values_json="[0.0, 1.0]", table_json="[]", output_dir="/tmp/sweep")
    db_session.add(sweep)
    db_session.commit()
    db_session.refresh(sweep)

    queried = db_session.query(SweepRun).filter(SweepRun.id == sweep.id).first()
    assert queried.param == "tpm.c_pi"
    assert json.loads(queried.values_json) == [0.0, 1.0]
