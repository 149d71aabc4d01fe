# gonet: go move networks
__version__ = "1.0.0"
TOOL_NAME = "gonet"
