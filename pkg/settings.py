import os
from dotenv import load_dotenv

# Load overrides from .env (table cache location, archive database, worker count)
load_dotenv()

TABLE_CACHE_DIR = os.getenv("POLAR_TABLE_CACHE", ".polar_tables")
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./polar_campaigns.db")
DEFAULT_WORKERS = int(os.getenv("POLAR_WORKERS", "1"))
LOG_LEVEL = os.getenv("POLAR_LOG_LEVEL", "INFO")
