from sqlalchemy import Column, DateTime, Integer, String, Text
from sqlalchemy.sql import func

from app.db import Base


class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    scheme = Column(String, nullable=False)  # proposed, baseline or both
    config_json = Column(Text, nullable=False)
    summary_json = Column(Text, nullable=False)
    output_dir = Column(String, nullable=True)  # Null when outputs were not written
    created_at = Column(DateTime(timezone=True), server_default=func.now())


class SweepRun(Base):
    __tablename__ = "sweep_runs"

    id = Column(Integer, primary_key=True, index=True)
    param = Column(String, nullable=False)  # dotted config key, e.g. tpm.c_pi
    values_json = Column(Text, nullable=False)
    table_json = Column(Text, nullable=False)  # JSON array of SweepRow
    output_dir = Column(String, nullable=True)
    created_at = Column(DateTime(timezone=True), server_default=func.now())
