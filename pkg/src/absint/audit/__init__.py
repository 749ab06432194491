from absint.audit.parsing import ClaimedStep, ParsedResponse, parse_response, parse_state_text
from absint.audit.report import AuditReport, audit_response, check_fpes, report_json, report_table
from absint.audit.soundness import FuzzConfig, LocationVerdict, Witness, check_map_soundness
from absint.audit.steps import check_steps, classify_errors

__all__ = [
    "AuditReport",
    "ClaimedStep",
    "FuzzConfig",
    "LocationVerdict",
    "ParsedResponse",
    "Witness",
    "audit_response",
    "check_fpes",
    "check_map_soundness",
    "check_steps",
    "classify_errors",
    "parse_response",
    "parse_state_text",
    "report_json",
    "report_table",
]
