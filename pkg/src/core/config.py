import os
from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Analysis defaults
OUTPUT_DIR = os.getenv("GONET_OUTPUT_DIR", "./gonet_output")
DEFAULT_D = int(os.getenv("GONET_DEFAULT_D", "4"))
DEFAULT_ALPHA = float(os.getenv("GONET_DEFAULT_ALPHA", "1.0"))
WORKERS = int(os.getenv("GONET_WORKERS", "1"))

# Run ledger; an empty value disables recording
LEDGER_URL = os.getenv("GONET_LEDGER_URL", "sqlite:///gonet_runs.db")

# Query service
NETWORK_PATH = os.getenv("GONET_NETWORK_PATH", os.path.join(OUTPUT_DIR, "net.json"))
API_HOST = os.getenv("API_HOST", "127.0.0.1")
API_PORT = int(os.getenv("API_PORT", "8000"))
