import logging
from datetime import datetime
from typing import Any, Dict, Optional

from sqlalchemy import Column, DateTime, Float, Integer, MetaData, String, Table, Text, create_engine, select
from sqlalchemy.engine import Engine

from src.core.config import LEDGER_URL

logger = logging.getLogger(__name__)

metadata = MetaData()

analysis_runs = Table(
	"analysis_runs",
	metadata,
	Column("id", Integer, primary_key=True, autoincrement=True),
	Column("command", String(64), nullable=False),
	Column("started_at", DateTime),
	Column("ended_at", DateTime),
	Column("duration_seconds", Float),
	Column("n_games", Integer),
	Column("corpus_digest", String(64)),
	Column("status", String(16)),
	Column("error_message", Text),
)


class Database:
	"""SQLAlchemy-backed run ledger.

	Behavior:
	- Uses the URL passed to `initialize()` or `GONET_LEDGER_URL` (SQLite by default).
	- Provides `initialize()`, `record_run()`, `last_run()`, `check_connection()`
	  and `close()`.
	"""

	_engine: Optional[Engine] = None

	@classmethod
	def initialize(cls, url: Optional[str] = None):
		"""Create the engine and the analysis_runs table."""
		database_url = url or LEDGER_URL
		try:
			cls._engine = create_engine(database_url, pool_pre_ping=True)
			metadata.create_all(cls._engine)
			logger.info(f"Run ledger initialized: {database_url}")
		except Exception as e:
			logger.error(f"Failed to initialize run ledger: {e}")
			raise

	@classmethod
	def check_connection(cls) -> bool:
		try:
			if cls._engine is None:
				cls.initialize()
			conn = cls._engine.connect()
			conn.close()
			return True
		except Exception as e:
			logger.error(f"Ledger connection check failed: {e}")
			return False

	@classmethod
	def record_run(cls, command: str, started_at: datetime, ended_at: datetime, status: str,
				   n_games: Optional[int] = None, corpus_digest: Optional[str] = None,
				   error_message: Optional[str] = None) -> int:
		if cls._engine is None:
			cls.initialize()
		with cls._engine.begin() as conn:
			result = conn.execute(analysis_runs.insert().values(
				command=command,
				started_at=started_at,
				ended_at=ended_at,
				duration_seconds=(ended_at - started_at).total_seconds(),
				n_games=n_games,
				corpus_digest=corpus_digest,
				status=status,
				error_message=error_message,
			))
			return result.rowcount

	@classmethod
	def last_run(cls) -> Optional[Dict[str, Any]]:
		if cls._engine is None:
			cls.initialize()
		with cls._engine.connect() as conn:
			row = conn.execute(select(analysis_runs).order_by(analysis_runs.c.id.desc()).limit(1)).first()
			return dict(row._mapping) if row is not None else None

	@classmethod
	def close(cls):
		if cls._engine:
			cls._engine.dispose()
			cls._engine = None
