# Ingest module
