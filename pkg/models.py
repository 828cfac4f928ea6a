from sqlalchemy import Column, Integer, String, Float, ForeignKey, DateTime, Text, Enum
from sqlalchemy.orm import relationship, declarative_base
import datetime
import enum

Base = declarative_base()

class CampaignStatus(str, enum.Enum):
    pending = "pending"
    running = "running"
    finished = "finished"
    failed = "failed"

class Campaign(Base):
    __tablename__ = "campaigns"

    id = Column(Integer, primary_key=True, index=True)
    label = Column(String, nullable=False)
    status = Column(Enum(CampaignStatus), default=CampaignStatus.pending, nullable=False)
    decoder = Column(String, nullable=False)
    code = Column(String, nullable=False)       # describe_construction() text
    config = Column(Text, nullable=False)       # CampaignConfig as JSON
    error = Column(Text, nullable=True)
    created_at = Column(DateTime, default=datetime.datetime.utcnow)
    finished_at = Column(DateTime, nullable=True)

    # Relationships
    points = relationship("BlerPointRecord", back_populates="campaign",
                          cascade="all, delete-orphan", order_by="BlerPointRecord.snr_db")

class BlerPointRecord(Base):
    __tablename__ = "bler_points"

    id = Column(Integer, primary_key=True, index=True)
    campaign_id = Column(Integer, ForeignKey("campaigns.id"), nullable=False)
    snr_db = Column(Float, nullable=False)
    frames = Column(Integer, nullable=False)
    block_errors = Column(Integer, nullable=False)
    bler = Column(Float, nullable=False)
    wall_time = Column(Float, default=0.0)

    # Relationships
    campaign = relationship("Campaign", back_populates="points")
