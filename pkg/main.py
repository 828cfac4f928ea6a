import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

import settings
from errors import PolarError

logging.basicConfig(level=settings.LOG_LEVEL, format="%(asctime)s - %(levelname)s - %(message)s")
logger = logging.getLogger(__name__)

app = FastAPI(title="Polar FSL toolkit")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

from config_db import init_db
init_db()

import api_router

app.include_router(api_router.router)


@app.exception_handler(PolarError)
async def polar_error_handler(request: Request, exc: PolarError):
    logger.warning(f"[API] {request.url.path}: {exc}")
    return JSONResponse(status_code=400, content={"status": "error", "message": str(exc)})


@app.get("/")
def home():
    return {"status": "ok", "service": "polar-fsl"}
