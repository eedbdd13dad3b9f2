from .roles import BackendRole, PATHS_BY_ROLE, REQUIRED_ROLES
from .client import BackendClient, RoleHandle
from .grid import frame_grid
from .mock import MockBackend, MockCluster, Scenario
from .wire import decode_tensor_field, fingerprint, tensor_payload

__all__ = [
    "BackendRole",
    "PATHS_BY_ROLE",
    "REQUIRED_ROLES",
    "BackendClient",
    "RoleHandle",
    "frame_grid",
    "MockBackend",
    "MockCluster",
    "Scenario",
    "decode_tensor_field",
    "fingerprint",
    "tensor_payload",
]
