from .api import (
    create_app,
    fitresult_to_response,
    handle_compare,
    handle_diagnose,
    handle_fit,
    handle_simulate,
    response_to_fitresult,
)

__all__ = [
    "create_app",
    "fitresult_to_response",
    "handle_compare",
    "handle_diagnose",
    "handle_fit",
    "handle_simulate",
    "response_to_fitresult",
]
