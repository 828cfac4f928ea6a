import logging
from typing import List, Optional

from fastapi import APIRouter, BackgroundTasks, Depends, HTTPException
from pydantic import BaseModel, Field
from sqlalchemy.orm import Session

import database
from campaign import build_code, run_campaign
from code_construct import EXTENDED_FAMILIES, describe_construction, hybrid_outer_generator, weight_spectrum
from config_db import SessionLocal, get_db
from errors import PolarError
from schemas import CampaignConfig
from verify_suite import CHECK_NAMES, run_verify

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/v1")


class VerifyRequest(BaseModel):
    samples: int = Field(100, ge=1)
    ml_frames: int = Field(300, ge=1)
    seed: int = Field(0, ge=0)
    checks: Optional[List[str]] = None


def run_archived_campaign(campaign_id: int):
    """Background task: runs the stored configuration and writes its points back."""
    db = SessionLocal()
    try:
        campaign = database.get_campaign(db, campaign_id)
        if campaign is None:
            return
        database.mark_running(db, campaign)
        try:
            points = run_campaign(database.campaign_config(campaign))
        except Exception as e:
            database.mark_failed(db, campaign, str(e))
            return
        database.store_points(db, campaign, points)
    finally:
        db.close()


@router.post("/campaigns")
def create_campaign(config: CampaignConfig, background_tasks: BackgroundTasks, db: Session = Depends(get_db)):
    try:
        spec = build_code(config)
    except (PolarError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    campaign = database.create_campaign_record(db, config, describe_construction(spec))
    background_tasks.add_task(run_archived_campaign, campaign.id)
    return {"status": "success", "campaign_id": campaign.id, "label": campaign.label}


@router.get("/campaigns")
def list_campaigns(limit: int = 100, db: Session = Depends(get_db)):
    campaigns = database.list_campaigns(db, limit)
    return {"status": "success", "campaigns": [database.campaign_to_dict(c, with_points=False) for c in campaigns]}


@router.get("/campaigns/{campaign_id}")
def get_campaign(campaign_id: int, db: Session = Depends(get_db)):
    campaign = database.get_campaign(db, campaign_id)
    if campaign is None:
        raise HTTPException(status_code=404, detail="Campaign not found")
    return {"status": "success", "campaign": database.campaign_to_dict(campaign)}


@router.post("/verify")
def verify(request: VerifyRequest):
    unknown = [c for c in request.checks or [] if c not in CHECK_NAMES]
    if unknown:
        raise HTTPException(status_code=400, detail=f"Unknown check(s): {', '.join(unknown)}")
    report = run_verify(samples=request.samples, ml_frames=request.ml_frames, seed=request.seed,
                        only=request.checks)
    return {
        "status": "success" if report.passed else "failed",
        "passed": report.passed,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail, "seconds": c.seconds}
                   for c in report.checks],
    }


@router.get("/outer-codes/{k_local}")
def outer_code(k_local: int):
    try:
        code = hybrid_outer_generator(k_local, EXTENDED_FAMILIES)
        spectrum = weight_spectrum(code)
    except PolarError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {
        "status": "success",
        "k_local": k_local,
        "family": code.family.value,
        "generator": ["".join(str(int(b)) for b in row) for row in code.generator],
        "spectrum": {str(w): c for w, c in spectrum.as_dict().items()},
        "min_distance": spectrum.min_distance,
        "a_dmin": spectrum.a_dmin,
    }
