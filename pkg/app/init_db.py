import logging

from app.db import SQLALCHEMY_DATABASE_URL, Base, engine
from app.models import ExperimentRun, SweepRun  # noqa: F401  (registers the tables)
from app.settings import configure_logging

logger = logging.getLogger(__name__)


def init_db():
    """
    Initialize the database by creating all tables.
    This is idempotent - it won't recreate tables that already exist.
    """
    Base.metadata.create_all(bind=engine)
    logger.info("Database tables ready at %s: %s", SQLALCHEMY_DATABASE_URL, ", ".join(Base.metadata.tables))


if __name__ == "__main__":
    configure_logging()
    init_db()
