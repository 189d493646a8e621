"""Entry point: aks-sidecar [--toy] [--model ID] [--device D]
[--transport stdio|http] [--port P] [--batch-size N]

Exit status: 0 on clean shutdown, 1 if the model fails to load.
"""

from __future__ import annotations

import argparse
import sys

from .backends import ModelScorer, SidecarConfig, ToyScorer
from .server import SidecarServer, make_http_server, serve_stdio


def build_backend(config: SidecarConfig):
    if config.toy:
        return ToyScorer()
    return ModelScorer(config.model_id, config.device, config.batch_size)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="aks-sidecar",
        description="image-text matching scorer speaking the keyframe-sampler wire protocol",
    )
    defaults = SidecarConfig()
    parser.add_argument("--model", default=defaults.model_id,
                        help="pretrained image-text matcher to load")
    parser.add_argument("--device", default=defaults.device)
    parser.add_argument("--transport", choices=("stdio", "http"),
                        default=defaults.transport)
    parser.add_argument("--port", type=int, default=defaults.port)
    parser.add_argument("--batch-size", type=int, default=defaults.batch_size)
    parser.add_argument("--toy", action="store_true",
                        help="deterministic hash-based pseudo-scores, no model download")
    args = parser.parse_args(argv)

    config = SidecarConfig(
        model_id=args.model,
        device=args.device,
        transport=args.transport,
        port=args.port,
        batch_size=args.batch_size,
        toy=args.toy,
    )
    try:
        backend = build_backend(config)
    except Exception as e:
        print(f"aks-sidecar: failed to load model {config.model_id!r}: {e}",
              file=sys.stderr)
        return 1

    server = SidecarServer(backend)
    if config.transport == "stdio":
        serve_stdio(server)
    else:
        httpd = make_http_server(server, config.port)
        print(f"aks-sidecar listening on {httpd.server_address[1]}", file=sys.stderr)
        try:
            httpd.serve_forever()
        except KeyboardInterrupt:
            pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
