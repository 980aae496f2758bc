"""
Scripted run of the command line: every role talks to the next through
files, exactly as separate processes would.
"""

import json
import sys

import pytest

from src.cli import (
    EXIT_ENCODING,
    EXIT_OK,
    EXIT_PROTOCOL,
    EXIT_REJECT,
    EXIT_UNSUPPORTED,
    EXIT_USAGE,
    main,
    parse_sizes,
)
from src.models import GroupParams, JoinRequest, Signature, decode_blob, read_role_file

SEED = "0x6c67732d636c69"


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Setup, one member, one signature on b"pay 100" for amount "100"."""
    d = tmp_path_factory.mktemp("cli")
    steps = [
        ['setup', '--out-dir', str(d)],
        ['join-request', '--gpk', str(d / 'gpk.bin'), '--out', str(d / 'req.bin'),
         '--member-out', str(d / 'pending.bin')],
        ['join-issue', '--gpk', str(d / 'gpk.bin'), '--ra-sk', str(d / 'ra.sk'),
         '--request', str(d / 'req.bin'), '--registry', str(d / 'registry.lgs'),
         '--out', str(d / 'cert.bin')],
        ['join-finish', '--gpk', str(d / 'gpk.bin'), '--member', str(d / 'pending.bin'),
         '--cert', str(d / 'cert.bin'), '--out', str(d / 'member.bin')],
    ]
    for step in steps:
        assert main(['--seed', SEED] + step) == EXIT_OK, step

    (d / 'msg.txt').write_bytes(b"pay 100")
    assert main([
        '--seed', SEED, 'sign', '--gpk', str(d / 'gpk.bin'), '--member', str(d / 'member.bin'),
        '--message', str(d / 'msg.txt'), '--amount', '100', '--out', str(d / 'sig.bin'),
    ]) == EXIT_OK
    return d


def _verify(d, amount):
    return main([
        'verify', '--gpk', str(d / 'gpk.bin'), '--message', str(d / 'msg.txt'),
        '--amount', amount, '--sig', str(d / 'sig.bin'),
    ])


def test_verify_accepts(pipeline, capsys):
    capsys.readouterr()
    assert _verify(pipeline, '100') == EXIT_OK
    assert capsys.readouterr().out.strip() == "accept"


def test_verify_rejects_other_amount(pipeline, capsys):
    capsys.readouterr()
    assert _verify(pipeline, '101') == EXIT_REJECT
    assert capsys.readouterr().out.strip() == "reject"


def test_trace_prints_index(pipeline, capsys):
    d = pipeline
    capsys.readouterr()
    code = main([
        'trace', '--gpk', str(d / 'gpk.bin'), '--sa-sk', str(d / 'sa.sk'),
        '--registry', str(d / 'registry.lgs'), '--message', str(d / 'msg.txt'),
        '--amount', '100', '--sig', str(d / 'sig.bin'),
    ])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "index: 1" in out
    assert "Y: 0x" in out and "A: 0x" in out


def test_link_signature_with_itself(pipeline, capsys):
    d = pipeline
    capsys.readouterr()
    triple = [str(d / 'msg.txt'), '100', str(d / 'sig.bin')]
    assert main(['link', '--gpk', str(d / 'gpk.bin'), '--a', *triple, '--b', *triple]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "linked"


def test_inspect_signature(pipeline, capsys):
    capsys.readouterr()
    assert main(['inspect', str(pipeline / 'sig.bin')]) == EXIT_OK
    shown = json.loads(capsys.readouterr().out)
    assert shown['type'] == "Signature"
    assert shown['magic'] == "LGS1"
    assert shown['l4'].startswith("0x")


def test_hex_and_binary_files_hold_the_same_object(pipeline, tmp_path):
    assert main(['--format', 'hex', '--seed', SEED, 'setup', '--out-dir', str(tmp_path)]) == EXIT_OK
    hex_file = (tmp_path / 'gpk.bin').read_bytes()
    assert hex_file.startswith(b"0x")
    # same seed, same parameters
    binary_file = (pipeline / 'gpk.bin').read_bytes()
    assert decode_blob(hex_file) == binary_file
    assert read_role_file(tmp_path / 'gpk.bin', GroupParams) == read_role_file(pipeline / 'gpk.bin', GroupParams)


def test_unsupported_security_level(tmp_path, capsys):
    assert main(['setup', '--out-dir', str(tmp_path), '--security-level', '80']) == EXIT_UNSUPPORTED
    assert "error: UnsupportedSecurityLevel" in capsys.readouterr().err


def _cli_enroll(d, name):
    steps = [
        ['join-request', '--gpk', str(d / 'gpk.bin'), '--out', str(d / f'{name}.req'),
         '--member-out', str(d / f'{name}.pending')],
        ['join-issue', '--gpk', str(d / 'gpk.bin'), '--ra-sk', str(d / 'ra.sk'),
         '--request', str(d / f'{name}.req'), '--registry', str(d / 'registry.lgs'),
         '--out', str(d / f'{name}.cert')],
        ['join-finish', '--gpk', str(d / 'gpk.bin'), '--member', str(d / f'{name}.pending'),
         '--cert', str(d / f'{name}.cert'), '--out', str(d / f'{name}.key')],
    ]
    for step in steps:
        assert main(['--seed', SEED] + step) == EXIT_OK, step


def _cli_sign(d, name, message_file, out):
    return main([
        '--seed', SEED, 'sign', '--gpk', str(d / 'gpk.bin'), '--member', str(d / f'{name}.key'),
        '--message', str(d / message_file), '--amount', '100', '--out', str(d / out),
    ])


def test_seeded_runs_enroll_distinct_members(tmp_path, capsys):
    d = tmp_path
    assert main(['--seed', SEED, 'setup', '--out-dir', str(d)]) == EXIT_OK
    names = [f"member{i}" for i in range(1, 5)]
    for name in names:
        _cli_enroll(d, name)

    requests = {read_role_file(d / f'{name}.req', JoinRequest).Y for name in names}
    assert len(requests) == len(names)

    (d / 'msg.txt').write_bytes(b"pay 100")
    assert _cli_sign(d, 'member2', 'msg.txt', 'sig.bin') == EXIT_OK
    capsys.readouterr()
    code = main([
        'trace', '--gpk', str(d / 'gpk.bin'), '--sa-sk', str(d / 'sa.sk'),
        '--registry', str(d / 'registry.lgs'), '--message', str(d / 'msg.txt'),
        '--amount', '100', '--sig', str(d / 'sig.bin'),
    ])
    assert code == EXIT_OK
    assert "index: 2" in capsys.readouterr().out.splitlines()


def test_seeded_signatures_on_new_messages_use_fresh_randomness(pipeline, tmp_path):
    d = pipeline
    (d / 'msg2.txt').write_bytes(b"pay 100 again")
    assert main([
        '--seed', SEED, 'sign', '--gpk', str(d / 'gpk.bin'), '--member', str(d / 'member.bin'),
        '--message', str(d / 'msg2.txt'), '--amount', '100', '--out', str(tmp_path / 'sig2.bin'),
    ]) == EXIT_OK
    first = read_role_file(d / 'sig.bin', Signature)
    second = read_role_file(tmp_path / 'sig2.bin', Signature)
    assert first.l1 != second.l1
    assert first.l4 == second.l4


def test_trace_of_undecodable_signature_is_protocol_error(pipeline, tmp_path, capsys):
    d = pipeline
    (tmp_path / 'bad.sig').write_bytes(b"LGS1\x01" + bytes(416))
    capsys.readouterr()
    code = main([
        'trace', '--gpk', str(d / 'gpk.bin'), '--sa-sk', str(d / 'sa.sk'),
        '--registry', str(d / 'registry.lgs'), '--message', str(d / 'msg.txt'),
        '--amount', '100', '--sig', str(tmp_path / 'bad.sig'),
    ])
    assert code == EXIT_PROTOCOL
    assert "error: SignatureInvalid" in capsys.readouterr().err


def test_missing_input_is_usage_error(tmp_path):
    code = main([
        'verify', '--gpk', str(tmp_path / 'missing.bin'), '--message', str(tmp_path / 'm'),
        '--amount', '1', '--sig', str(tmp_path / 's'),
    ])
    assert code == EXIT_USAGE


def test_corrupt_parameters_are_encoding_error(tmp_path, capsys):
    (tmp_path / 'gpk.bin').write_bytes(b"LGSG\x01garbage")
    (tmp_path / 'm').write_bytes(b"m")
    (tmp_path / 's').write_bytes(b"s")
    code = main([
        'verify', '--gpk', str(tmp_path / 'gpk.bin'), '--message', str(tmp_path / 'm'),
        '--amount', '1', '--sig', str(tmp_path / 's'),
    ])
    assert code == EXIT_ENCODING
    assert "error: MalformedEncoding" in capsys.readouterr().err


def test_parse_sizes():
    assert parse_sizes("3..5") == [3, 4, 5]
    assert parse_sizes("3,7") == [3, 7]


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
