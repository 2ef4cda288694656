"""
Routers package
"""
from app.routers import solver, baselines

__all__ = ["solver", "baselines"]
