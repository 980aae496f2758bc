"""
Role-oriented command line for the linkable group signature scheme.

Files are the transport between roles. Results go to stdout, diagnostics
to stderr. Exit codes:

    0  success / accept / linked
    1  reject / unlinked
    2  invalid (link) or usage error
    3  encoding error
    4  protocol error (bad join proof, duplicate member, failed
       certificate check, invalid signature for trace, unknown signer)
    5  storage error
    6  unsupported security level
"""

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .bench import BenchConfig, run_bench, shape_check
from .exceptions import (
    EncodingError,
    LGSError,
    MalformedEncoding,
    RegistryError,
    SignatureInvalid,
    UnsupportedSecurityLevel,
)
from .groups import SECURITY_LEVEL, SeededScalarSource, from_hex, to_hex
from .lgs import (
    check_authority_keys,
    join_ra_issue,
    join_user_finish,
    join_user_start,
    link,
    LinkResult,
    setup,
    sign,
    trace,
    verify_bytes,
)
from .models import (
    OUTPUT_BINARY,
    OUTPUT_HEX,
    Cert,
    GroupParams,
    JoinRequest,
    MemberKey,
    PendingMember,
    RaSecret,
    SaSecret,
    Signature,
    decode_blob,
    parse_any,
    read_role_file,
    write_role_file,
)
from .registry import RegistrationList
from .sok import NONCE_DETERMINISTIC, NONCE_RANDOM

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_INVALID = 2
EXIT_USAGE = 2
EXIT_ENCODING = 3
EXIT_PROTOCOL = 4
EXIT_STORAGE = 5
EXIT_UNSUPPORTED = 6

LINK_EXIT_CODES = {
    LinkResult.LINKED: EXIT_OK,
    LinkResult.UNLINKED: EXIT_REJECT,
    LinkResult.INVALID: EXIT_INVALID,
}

GPK_FILE = "gpk.bin"
RA_FILE = "ra.sk"
SA_FILE = "sa.sk"

SEED_ENV = "LGS_SEED"
# options left out of the seeded stream
UNSEEDED_ARGS = frozenset({'handler', 'format', 'verbose', 'seed', 'command', 'out_dir'})


class PathCheckError(Exception):
    """A required input path is missing."""


@dataclass
class CliConfig:
    """Options shared by every subcommand."""
    output_format: str = OUTPUT_BINARY
    seed: Optional[bytes] = None
    verbose: bool = False
    command: str = ""
    inputs: Dict[str, Path] = field(default_factory=dict)
    call_args: Tuple[Tuple[str, str], ...] = ()

    @property
    def rng(self) -> Optional[SeededScalarSource]:
        """
        Seeded stream for this call.

        Derived from the seed, the subcommand, its arguments and the bytes of
        every file they name, so repeated calls on new inputs draw fresh values.
        """
        if not self.seed:
            return None
        return SeededScalarSource(self.seed + self._call_digest())

    def _call_digest(self) -> bytes:
        digest = hashlib.sha256(self.command.encode())
        for name, value in self.call_args:
            for part in (name, value):
                data = part.encode()
                digest.update(len(data).to_bytes(4, 'big') + data)
            path = Path(value)
            if value != '-' and path.is_file():
                digest.update(hashlib.sha256(path.read_bytes()).digest())
        return digest.digest()

    def validate(self) -> None:
        for name, path in self.inputs.items():
            if str(path) == '-':
                continue
            if not path.exists():
                raise PathCheckError(f"{name} not found: {path}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'CliConfig':
        seed_text = args.seed or os.environ.get(SEED_ENV)
        seed = None
        if seed_text:
            seed = from_hex(seed_text if seed_text.startswith('0x') else '0x' + seed_text)
        inputs = {}
        for name in ('gpk', 'ra_sk', 'sa_sk', 'request', 'member', 'cert', 'sig', 'message', 'file'):
            value = getattr(args, name, None)
            if value is not None:
                inputs[name] = Path(value)
        for side in ('a', 'b'):
            triple = getattr(args, side, None)
            if triple:
                inputs[f"{side}.message"] = Path(triple[0])
                inputs[f"{side}.sig"] = Path(triple[2])
        call_args = []
        for name, value in sorted(vars(args).items()):
            if name in UNSEEDED_ARGS or value is None or callable(value):
                continue
            for item in (value if isinstance(value, (list, tuple)) else [value]):
                call_args.append((name, str(item)))
        return cls(
            output_format=args.format,
            seed=seed,
            verbose=args.verbose,
            command=args.command,
            inputs=inputs,
            call_args=tuple(call_args),
        )


def setup_logging(verbose: bool = False):
    """Setup logging configuration (stderr only; stdout is for results)."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def read_message(source: str) -> bytes:
    """Message bytes from a file, or from stdin when source is '-'."""
    if source == '-':
        return sys.stdin.buffer.read()
    return Path(source).read_bytes()


def _amount(text: str) -> bytes:
    return text.encode('utf-8')


def parse_sizes(text: str) -> List[int]:
    """'3..10' (inclusive) or '3,5,7'."""
    if '..' in text:
        low, high = text.split('..', 1)
        sizes = list(range(int(low), int(high) + 1))
    else:
        sizes = [int(part) for part in text.split(',') if part.strip()]
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"invalid group sizes: {text!r}")
    return sizes


def _load_signature(path: Path) -> Optional[Signature]:
    try:
        return Signature.from_bytes(decode_blob(path.read_bytes()))
    except EncodingError as e:
        logger.debug(f"Undecodable signature {path}: {e}")
        return None


# =========================================================================
# Commands
# =========================================================================

def cmd_setup(args: argparse.Namespace, config: CliConfig) -> int:
    gpk, ra, sa = setup(args.security_level, config.rng)
    out_dir = Path(args.out_dir)
    for name, obj in ((GPK_FILE, gpk), (RA_FILE, ra), (SA_FILE, sa)):
        path = write_role_file(out_dir / name, obj, config.output_format)
        print(path)
    return EXIT_OK


def cmd_join_request(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    y, request = join_user_start(gpk, config.rng)
    write_role_file(args.out, request, config.output_format)
    write_role_file(args.member_out, PendingMember(y=y, Y=request.Y), config.output_format)
    print(to_hex(request.Y.to_bytes()))
    return EXIT_OK


def cmd_join_issue(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    ra = read_role_file(args.ra_sk, RaSecret)
    if not check_authority_keys(gpk, ra=ra):
        raise MalformedEncoding("RA secret does not match the group parameters")
    request = read_role_file(args.request, JoinRequest)
    registry = RegistrationList(args.registry)
    cert = join_ra_issue(gpk, ra, request, registry, config.rng)
    write_role_file(args.out, cert, config.output_format)
    print(f"index: {registry.lookup_by_A(cert.A).index}")
    return EXIT_OK


def cmd_join_finish(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    pending = read_role_file(args.member, PendingMember)
    cert = read_role_file(args.cert, Cert)
    member = join_user_finish(gpk, pending.y, cert)
    write_role_file(args.out, member, config.output_format)
    print(to_hex(member.cert.A.to_bytes()))
    return EXIT_OK


def cmd_sign(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    member = read_role_file(args.member, MemberKey)
    nonce_mode = NONCE_DETERMINISTIC if args.deterministic_nonces else NONCE_RANDOM
    sig = sign(gpk, member, read_message(args.message), _amount(args.amount), config.rng, nonce_mode=nonce_mode)
    write_role_file(args.out, sig, config.output_format)
    print(args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    try:
        blob = decode_blob(Path(args.sig).read_bytes())
    except EncodingError:
        blob = b""
    ok = verify_bytes(gpk, read_message(args.message), _amount(args.amount), blob)
    print("accept" if ok else "reject")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_link(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    items = []
    for message_path, amount, sig_path in (args.a, args.b):
        sig = _load_signature(Path(sig_path))
        if sig is None:
            print(LinkResult.INVALID.value)
            return EXIT_INVALID
        items.append((read_message(message_path), _amount(amount), sig))
    result = link(gpk, items[0], items[1])
    print(result.value)
    return LINK_EXIT_CODES[result]


def cmd_trace(args: argparse.Namespace, config: CliConfig) -> int:
    gpk = read_role_file(args.gpk, GroupParams)
    sa = read_role_file(args.sa_sk, SaSecret)
    if not check_authority_keys(gpk, sa=sa):
        raise MalformedEncoding("SA secret does not match the group parameters")
    registry = RegistrationList(args.registry)
    try:
        sig = read_role_file(args.sig, Signature)
    except EncodingError as e:
        logger.warning("Trace refused: signature file does not decode")
        raise SignatureInvalid(f"signature does not decode: {e}") from e
    entry = trace(gpk, sa, read_message(args.message), _amount(args.amount), sig, registry)
    print(f"index: {entry.index}")
    print(f"Y: {to_hex(entry.Y.to_bytes())}")
    print(f"A: {to_hex(entry.A.to_bytes())}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: CliConfig) -> int:
    bench_config = BenchConfig(
        sizes=args.group_sizes,
        iters=args.iters,
        warmup=args.warmup,
        parallel=args.parallel,
        seed=config.seed,
    )
    report = run_bench(bench_config)
    if args.csv:
        report.to_csv(args.csv)
    if args.json:
        report.to_json(args.json)

    print(f"{'algorithm':12s} {'size':>4s} {'mean_ms':>10s} {'stddev_ms':>10s} {'pairings':>8s} {'exps':>6s}")
    for row in report.rows:
        print(
            f"{row.algorithm:12s} {row.group_size:4d} {row.mean_micros / 1000:10.3f} "
            f"{row.stddev_micros / 1000:10.3f} {row.pairing_count:8d} {row.exp_count:6d}"
        )
    for algorithm, spread in shape_check(report).items():
        print(f"spread {algorithm}: {spread * 100:.1f}%")
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace, config: CliConfig) -> int:
    blob = decode_blob(Path(args.file).read_bytes())
    obj = parse_any(blob)
    shown = {'magic': blob[:4].decode('ascii'), 'type': type(obj).__name__, **obj.to_dict()}
    print(json.dumps(shown, indent=2))
    return EXIT_OK


# =========================================================================
# Parser
# =========================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='lgs',
        description='Linkable group signatures: setup, join, sign, verify, link, trace',
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    parser.add_argument('--format', choices=[OUTPUT_BINARY, OUTPUT_HEX], default=OUTPUT_BINARY,
                        help='Encoding of written files (reading detects either)')
    parser.add_argument('--seed', default=None,
                        help=f'Hex seed for reproducible randomness (or env {SEED_ENV}); never for real keys')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('setup', help='Generate GPK and both authority keys')
    p.add_argument('--out-dir', required=True)
    p.add_argument('--security-level', type=int, default=SECURITY_LEVEL)
    p.set_defaults(handler=cmd_setup)

    p = sub.add_parser('join-request', help='Member: start joining')
    p.add_argument('--gpk', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--member-out', required=True)
    p.set_defaults(handler=cmd_join_request)

    p = sub.add_parser('join-issue', help='RA: issue a certificate')
    p.add_argument('--gpk', required=True)
    p.add_argument('--ra-sk', required=True)
    p.add_argument('--request', required=True)
    p.add_argument('--registry', required=True)
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_join_issue)

    p = sub.add_parser('join-finish', help='Member: check the certificate and store the key')
    p.add_argument('--gpk', required=True)
    p.add_argument('--member', required=True)
    p.add_argument('--cert', required=True)
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_join_finish)

    p = sub.add_parser('sign', help='Member: sign a message for an amount')
    p.add_argument('--gpk', required=True)
    p.add_argument('--member', required=True)
    p.add_argument('--message', required=True, help="File path, or '-' for stdin")
    p.add_argument('--amount', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--deterministic-nonces', action='store_true')
    p.set_defaults(handler=cmd_sign)

    p = sub.add_parser('verify', help='Anyone: verify a signature')
    p.add_argument('--gpk', required=True)
    p.add_argument('--message', required=True)
    p.add_argument('--amount', required=True)
    p.add_argument('--sig', required=True)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('link', help='Anyone: link two signatures')
    p.add_argument('--gpk', required=True)
    p.add_argument('--a', nargs=3, metavar=('MSG', 'AMOUNT', 'SIG'), required=True)
    p.add_argument('--b', nargs=3, metavar=('MSG', 'AMOUNT', 'SIG'), required=True)
    p.set_defaults(handler=cmd_link)

    p = sub.add_parser('trace', help='SA: open a signature to its registration row')
    p.add_argument('--gpk', required=True)
    p.add_argument('--sa-sk', required=True)
    p.add_argument('--registry', required=True)
    p.add_argument('--message', required=True)
    p.add_argument('--amount', required=True)
    p.add_argument('--sig', required=True)
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser('bench', help='Time all algorithms across group sizes')
    p.add_argument('--group-sizes', type=parse_sizes, default=list(range(3, 11)))
    p.add_argument('--iters', type=int, default=20)
    p.add_argument('--warmup', type=int, default=1)
    p.add_argument('--csv', default=None)
    p.add_argument('--json', default=None)
    p.add_argument('--parallel', action='store_true')
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser('inspect', help='Show the public fields of any role file')
    p.add_argument('file')
    p.set_defaults(handler=cmd_inspect)

    return parser


def _exit_code_for(error: Exception) -> int:
    if isinstance(error, UnsupportedSecurityLevel):
        return EXIT_UNSUPPORTED
    if isinstance(error, EncodingError):
        return EXIT_ENCODING
    if isinstance(error, RegistryError):
        return EXIT_STORAGE
    if isinstance(error, LGSError):
        return EXIT_PROTOCOL
    if isinstance(error, PathCheckError):
        return EXIT_USAGE
    return EXIT_STORAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    handler: Callable[[argparse.Namespace, CliConfig], int] = args.handler
    try:
        config = CliConfig.from_args(args)
        config.validate()
        return handler(args, config)
    except (LGSError, PathCheckError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        if args.verbose:
            import traceback
            traceback.print_exc()
        return _exit_code_for(e)
