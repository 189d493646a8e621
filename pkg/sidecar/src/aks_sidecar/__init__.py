"""Reference scoring sidecar speaking the keyframe-sampler wire protocol."""

from .backends import AssetError, ModelScorer, SidecarConfig, ToyScorer, load_image
from .server import PROTOCOL_VERSION, SidecarServer, make_http_server, serve_stdio

__all__ = [
    "AssetError",
    "ModelScorer",
    "PROTOCOL_VERSION",
    "SidecarConfig",
    "SidecarServer",
    "ToyScorer",
    "load_image",
    "make_http_server",
    "serve_stdio",
]

__version__ = "0.1.0"
