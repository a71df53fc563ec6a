import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.db import Base, engine
from app.models import ExperimentRun, SweepRun  # noqa: F401  (registers the tables)
from app.routers import experiments, sweeps
from app.settings import configure_logging

logger = logging.getLogger(__name__)

app = FastAPI(
    title="CKM Dual-Domain Tracker API",
    description="CKM-assisted coordinate and beam domain tracking with predictive beamforming",
    version="0.1.0"
)


# Create tables on startup
@app.on_event("startup")
async def startup_event():
    configure_logging()
    Base.metadata.create_all(bind=engine)
    logger.info("Database tables ready")


app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(experiments.router)
app.include_router(sweeps.router)


@app.get("/")
def read_root():
    return {
        "message": "Welcome to the CKM Dual-Domain Tracker API",
        "docs": "/docs",
        "health": "/health"
    }


@app.get("/health")
def health_check():
    return {"status": "ok"}
