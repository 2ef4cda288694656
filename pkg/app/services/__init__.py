"""
Services package
"""
from app.services.simulation_service import SimulationService, TreeNode, get_simulation_service
from app.services.audit_service import AuditService, get_audit_service
from app.services.report_service import ReportService, get_report_service

__all__ = [
    "SimulationService",
    "TreeNode",
    "get_simulation_service",
    "AuditService",
    "get_audit_service",
    "ReportService",
    "get_report_service",
]
