"""
Tests for the registration list: indexing, uniqueness, durability and
corruption handling.
"""

import sys
import threading

import pytest

import src.registry as registry_module
from src.exceptions import DuplicateA, DuplicateX, DuplicateY, StorageFailure
from src.groups import G1Elem, Scalar, hash_to_g1
from src.models import RegistryEntry
from src.registry import FILE_MAGIC, ROW_BYTES, RegistrationList, decode_row, encode_row


def _entry(i: int) -> RegistryEntry:
    return RegistryEntry.new(
        A=hash_to_g1(b"LGS-TEST-A", i.to_bytes(4, 'big')),
        x=Scalar(1000 + i),
        Y=hash_to_g1(b"LGS-TEST-Y", i.to_bytes(4, 'big')),
    )


def test_first_append_gets_index_one():
    registry = RegistrationList()
    assert registry.append(_entry(1)) == 1
    assert registry.append(_entry(2)) == 2
    assert [e.index for e in registry.entries()] == [1, 2]


def test_duplicates_are_refused():
    registry = RegistrationList()
    first = _entry(1)
    registry.append(first)
    same_Y = RegistryEntry.new(A=hash_to_g1(b"LGS-TEST-A", b"other"), x=Scalar(7), Y=first.Y)
    same_A = RegistryEntry.new(A=first.A, x=Scalar(8), Y=hash_to_g1(b"LGS-TEST-Y", b"other"))
    with pytest.raises(DuplicateY):
        registry.append(same_Y)
    with pytest.raises(DuplicateA):
        registry.append(same_A)
    assert len(registry) == 1

def test_repeated_x_is_refused(tmp_path):
    path = tmp_path / "registry.lgs"
    registry = RegistrationList(path)
    first = _entry(1)
    registry.append(first)
    size = path.stat().st_size
    same_x = RegistryEntry.new(
        A=hash_to_g1(b"LGS-TEST-A", b"other"), x=first.x, Y=hash_to_g1(b"LGS-TEST-Y", b"other"),
    )
    with pytest.raises(DuplicateX):
        registry.append(same_x)
    assert len(registry) == 1
    assert path.stat().st_size == size


def test_failed_write_leaves_no_partial_row(tmp_path, monkeypatch):
    path = tmp_path / "registry.lgs"
    registry = RegistrationList(path)
    size = path.stat().st_size

    def failing_fsync(fd):
        raise OSError("disk full")

    monkeypatch.setattr(registry_module.os, "fsync", failing_fsync)
    with pytest.raises(StorageFailure):
        registry.append(_entry(1))
    monkeypatch.undo()

    assert path.stat().st_size == size
    assert len(registry) == 0
    assert registry.lookup_by_Y(_entry(1).Y) is None

    # the same row can be appended once storage recovers
    assert registry.append(_entry(1)) == 1
    reopened = RegistrationList(path)
    assert len(reopened) == 1
    assert reopened.lookup_by_index(1).Y == _entry(1).Y


def test_readers_never_see_a_row_without_its_lookups():
    registry = RegistrationList()
    pending = [_entry(i) for i in range(20)]
    done = threading.Event()
    failures = []

    def read():
        while not done.is_set():
            for row in registry.entries():
                if registry.lookup_by_A(row.A) is None or registry.lookup_by_Y(row.Y) is None:
                    failures.append(row.index)
                if not registry.contains_x(row.x):
                    failures.append(row.index)

    readers = [threading.Thread(target=read) for _ in range(4)]
    for reader in readers:
        reader.start()
    try:
        for entry in pending:
            registry.append(entry)
    finally:
        done.set()
        for reader in readers:
            reader.join()

    assert failures == []
    assert [e.index for e in registry.entries()] == list(range(1, 21))



def test_lookups():
    registry = RegistrationList()
    entries = [_entry(i) for i in range(10)]
    for entry in entries:
        registry.append(entry)
    found = registry.lookup_by_A(entries[6].A)
    assert found.index == 7
    assert registry.lookup_by_Y(entries[6].Y).index == 7
    assert registry.lookup_by_index(7).A == entries[6].A
    assert registry.contains_x(entries[3].x)
    assert not registry.contains_x(Scalar(1))
    assert registry.lookup_by_A(G1Elem.generator()) is None
    assert registry.lookup_by_index(0) is None
    assert registry.lookup_by_index(11) is None
    assert registry.get_stats()['group_size'] == 10


def test_row_encoding():
    entry = _entry(3).with_index(4)
    row = encode_row(entry)
    assert len(row) == ROW_BYTES
    assert decode_row(row) == entry


def test_reopen_keeps_rows(tmp_path):
    path = tmp_path / "registry.lgs"
    registry = RegistrationList(path)
    for i in range(3):
        registry.append(_entry(i))
    before = path.read_bytes()

    reopened = RegistrationList(path)
    assert len(reopened) == 3
    assert reopened.entries() == registry.entries()
    assert reopened.lookup_by_Y(_entry(1).Y).index == 2
    assert path.read_bytes() == before
    assert reopened.append(_entry(3)) == 4


def test_new_file_holds_only_magic(tmp_path):
    path = tmp_path / "nested" / "registry.lgs"
    RegistrationList(path)
    assert path.read_bytes() == FILE_MAGIC


def test_corrupted_row_is_detected(tmp_path):
    path = tmp_path / "registry.lgs"
    registry = RegistrationList(path)
    registry.append(_entry(1))
    data = bytearray(path.read_bytes())
    data[len(FILE_MAGIC) + 4 + 20] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(StorageFailure):
        RegistrationList(path)


def test_truncated_file_is_detected(tmp_path):
    path = tmp_path / "registry.lgs"
    registry = RegistrationList(path)
    registry.append(_entry(1))
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(StorageFailure):
        RegistrationList(path)


def test_foreign_file_is_refused(tmp_path):
    path = tmp_path / "registry.lgs"
    path.write_bytes(b"not a registry")
    with pytest.raises(StorageFailure):
        RegistrationList(path)


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
