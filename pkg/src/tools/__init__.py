"""MCP tools for FEM updating runs"""

from . import updating_tools

__all__ = ['updating_tools']
