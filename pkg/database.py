import datetime
import json
import logging
import math

from sqlalchemy.orm import Session

from models import BlerPointRecord, Campaign, CampaignStatus
from schemas import BlerPoint, CampaignConfig

logger = logging.getLogger(__name__)


def create_campaign_record(db: Session, config: CampaignConfig, code_text: str) -> Campaign:
    campaign = Campaign(
        label=config.describe(),
        status=CampaignStatus.pending,
        decoder=config.decoder.kind.value,
        code=code_text,
        # python-mode dump keeps +inf SNR points; json writes them as Infinity
        config=json.dumps(config.model_dump()),
    )
    db.add(campaign)
    db.commit()
    db.refresh(campaign)
    logger.info(f"[ARCHIVE] campaign {campaign.id} created: {campaign.label}")
    return campaign


def mark_running(db: Session, campaign: Campaign) -> Campaign:
    campaign.status = CampaignStatus.running
    db.commit()
    return campaign


def store_points(db: Session, campaign: Campaign, points) -> Campaign:
    for p in points:
        campaign.points.append(BlerPointRecord(snr_db=p.snr_db, frames=p.frames, block_errors=p.block_errors,
                                               bler=p.bler, wall_time=p.wall_time))
    campaign.status = CampaignStatus.finished
    campaign.finished_at = datetime.datetime.utcnow()
    db.commit()
    db.refresh(campaign)
    logger.info(f"[ARCHIVE] campaign {campaign.id} finished with {len(campaign.points)} points")
    return campaign


def mark_failed(db: Session, campaign: Campaign, error: str) -> Campaign:
    campaign.status = CampaignStatus.failed
    campaign.error = error
    campaign.finished_at = datetime.datetime.utcnow()
    db.commit()
    logger.error(f"[ARCHIVE] campaign {campaign.id} failed: {error}")
    return campaign


def get_campaign(db: Session, campaign_id: int):
    return db.query(Campaign).filter(Campaign.id == campaign_id).first()


def list_campaigns(db: Session, limit: int = 100):
    return db.query(Campaign).order_by(Campaign.id.desc()).limit(limit).all()


def campaign_config(campaign: Campaign) -> CampaignConfig:
    return CampaignConfig(**json.loads(campaign.config))


def campaign_points(campaign: Campaign):
    return [BlerPoint(snr_db=r.snr_db, frames=r.frames, block_errors=r.block_errors, bler=r.bler,
                      wall_time=r.wall_time) for r in campaign.points]


def _json_safe(value):
    """Non-finite floats as strings; HTTP responses are strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def campaign_to_dict(campaign: Campaign, with_points: bool = True) -> dict:
    data = {
        "id": campaign.id,
        "label": campaign.label,
        "status": campaign.status.value,
        "decoder": campaign.decoder,
        "created_at": campaign.created_at.isoformat() if campaign.created_at else None,
        "finished_at": campaign.finished_at.isoformat() if campaign.finished_at else None,
        "error": campaign.error,
    }
    if with_points:
        data["code"] = campaign.code
        data["config"] = json.loads(campaign.config)
        data["points"] = [{"snr_db": r.snr_db, "frames": r.frames, "errors": r.block_errors,
                           "bler": r.bler, "wall_time": r.wall_time} for r in campaign.points]
    return _json_safe(data)
