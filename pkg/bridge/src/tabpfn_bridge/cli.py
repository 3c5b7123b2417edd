"""Command-line entry points for the bridge process."""

from __future__ import annotations

import argparse
import logging
import sys


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="tabpfn-bridge",
        description="Serve binned regression posteriors over the JSON-lines protocol.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="serve the real TabPFN v2 model")
    serve_p.add_argument("--model-path", default=None)
    serve_p.add_argument("--device", default="cpu")
    serve_p.add_argument("--max-context", type=int, default=1000)
    serve_p.add_argument("--num-bins", type=int, default=None,
                         help="override the per-request bin count")

    sub.add_parser("mock-serve", help="serve the fixed fixture posterior")

    args = parser.parse_args(argv)
    # Protocol frames own standard output; all logging goes to standard error.
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
    )

    if args.command == "mock-serve":
        from .mock import mock_serve

        mock_serve()
    else:
        from .model import BridgeConfig, serve

        serve(
            BridgeConfig(
                model_path=args.model_path,
                device=args.device,
                max_context=args.max_context,
                num_bins=args.num_bins,
            )
        )


if __name__ == "__main__":
    main()
