# Network module
