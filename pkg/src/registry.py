"""
Registration list kept by the RA and consulted by the SA during Trace.

Storage is an append-only log:

    "LGSREG1" || rows, each row = 4-byte length || row bytes || 4-byte CRC32

Row bytes: index (8, big-endian) || A (48) || x (32) || Y (48) ||
issued_at (8, big-endian microseconds since the epoch).

x is stored alongside the certificate because the RA knows it from
issuance anyway; separating RA-only and SA-visible columns is left to the
deployment.
"""

import logging
import os
import threading
import zlib
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from .exceptions import DuplicateA, DuplicateX, DuplicateY, EncodingError, StorageFailure
from .groups import G1_BYTES, SCALAR_BYTES, G1Elem, Scalar, split_fixed
from .models import RegistryEntry

logger = logging.getLogger(__name__)

FILE_MAGIC = b"LGSREG1"
ROW_BYTES = 8 + G1_BYTES + SCALAR_BYTES + G1_BYTES + 8

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_MICROSECOND = timedelta(microseconds=1)


def encode_row(entry: RegistryEntry) -> bytes:
    micros = (entry.issued_at - _EPOCH) // _MICROSECOND
    return (
        entry.index.to_bytes(8, 'big')
        + entry.A.to_bytes()
        + entry.x.to_bytes()
        + entry.Y.to_bytes()
        + micros.to_bytes(8, 'big')
    )


def decode_row(row: bytes) -> RegistryEntry:
    index, A, x, Y, micros = split_fixed(row, (8, G1_BYTES, SCALAR_BYTES, G1_BYTES, 8))
    return RegistryEntry(
        index=int.from_bytes(index, 'big'),
        A=G1Elem.from_bytes(A),
        x=Scalar.from_bytes(x),
        Y=G1Elem.from_bytes(Y),
        issued_at=_EPOCH + int.from_bytes(micros, 'big') * _MICROSECOND,
    )


class RegistrationList:
    """
    Durable registration list with lookup by A, Y, x and index.

    Single writer, many readers: appends are serialized by a lock and
    readers always see a consistent prefix of the rows.

    Usage:
        registry = RegistrationList("ra/registry.lgs")
        index = registry.append(RegistryEntry.new(A, x, Y))
        entry = registry.lookup_by_A(A)
    """

    def __init__(self, path: Optional[Union[str, Path]] = None):
        """
        Open (or create) the registration list.

        Args:
            path: Log file location. None keeps the list in memory only.
        """
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._rows: Tuple[RegistryEntry, ...] = ()
        self._by_A: Dict[bytes, RegistryEntry] = {}
        self._by_Y: Dict[bytes, RegistryEntry] = {}
        self._by_x: Dict[bytes, RegistryEntry] = {}

        if self.path is not None:
            self._open()

    # -- storage -----------------------------------------------------------

    def _open(self) -> None:
        try:
            if not self.path.exists():
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, 'wb') as f:
                    f.write(FILE_MAGIC)
                    f.flush()
                    os.fsync(f.fileno())
                logger.info(f"Created registration list {self.path}")
                return
            data = self.path.read_bytes()
        except OSError as e:
            raise StorageFailure(f"cannot open {self.path}: {e}") from e

        if data[:len(FILE_MAGIC)] != FILE_MAGIC:
            raise StorageFailure(f"{self.path} is not a registration list")

        offset = len(FILE_MAGIC)
        while offset < len(data):
            if offset + 4 > len(data):
                raise StorageFailure(f"truncated row header at byte {offset}")
            length = int.from_bytes(data[offset:offset + 4], 'big')
            if length != ROW_BYTES:
                raise StorageFailure(f"unexpected row length {length} at byte {offset}")
            end = offset + 4 + length + 4
            if end > len(data):
                raise StorageFailure(f"truncated row at byte {offset}")
            row = data[offset + 4:offset + 4 + length]
            crc = int.from_bytes(data[offset + 4 + length:end], 'big')
            if zlib.crc32(row) != crc:
                raise StorageFailure(f"CRC mismatch in row at byte {offset}")
            try:
                entry = decode_row(row)
            except EncodingError as e:
                raise StorageFailure(f"undecodable row at byte {offset}: {e}") from e
            if entry.index != len(self._rows) + 1:
                raise StorageFailure(f"row index {entry.index} breaks the dense sequence")
            try:
                self._index(entry)
            except (DuplicateA, DuplicateX, DuplicateY) as e:
                raise StorageFailure(f"duplicate row on disk: {e}") from e
            offset = end

        logger.info(f"Loaded {len(self._rows)} members from {self.path}")

    def _write(self, entry: RegistryEntry) -> None:
        """Append one record; on failure the file is cut back to its previous size."""
        row = encode_row(entry)
        record = len(row).to_bytes(4, 'big') + row + zlib.crc32(row).to_bytes(4, 'big')
        try:
            size = self.path.stat().st_size
            with open(self.path, 'ab', buffering=0) as f:
                try:
                    if f.write(record) != len(record):
                        raise OSError("short write")
                    os.fsync(f.fileno())
                except OSError:
                    os.ftruncate(f.fileno(), size)
                    raise
        except OSError as e:
            logger.warning(f"Append to {self.path} failed, row discarded")
            raise StorageFailure(f"cannot append to {self.path}: {e}") from e

    def _check_unique(self, entry: RegistryEntry) -> None:
        if entry.A.to_bytes() in self._by_A:
            raise DuplicateA("certificate element A already registered")
        if entry.Y.to_bytes() in self._by_Y:
            raise DuplicateY("Y already registered")
        if entry.x.to_bytes() in self._by_x:
            raise DuplicateX("x already assigned to another member")

    def _index(self, entry: RegistryEntry) -> None:
        self._check_unique(entry)
        by_A = dict(self._by_A)
        by_Y = dict(self._by_Y)
        by_x = dict(self._by_x)
        by_A[entry.A.to_bytes()] = entry
        by_Y[entry.Y.to_bytes()] = entry
        by_x[entry.x.to_bytes()] = entry
        # maps first, then rows: a visible row always has its lookups
        self._by_A, self._by_Y, self._by_x = by_A, by_Y, by_x
        self._rows = self._rows + (entry,)

    # -- operations --------------------------------------------------------

    def append(self, entry: RegistryEntry) -> int:
        """
        Append a row and return its index (previous max + 1).

        The entry's own index is ignored; the row is durable before return.

        Raises:
            DuplicateA, DuplicateY, DuplicateX: uniqueness would be broken
            StorageFailure: the log could not be written
        """
        with self._lock:
            numbered = entry.with_index(len(self._rows) + 1)
            self._check_unique(numbered)
            if self.path is not None:
                self._write(numbered)
            self._index(numbered)
        logger.info(f"Registered member #{numbered.index}")
        return numbered.index

    def lookup_by_A(self, A: G1Elem) -> Optional[RegistryEntry]:
        return self._by_A.get(A.to_bytes())

    def lookup_by_Y(self, Y: G1Elem) -> Optional[RegistryEntry]:
        return self._by_Y.get(Y.to_bytes())

    def lookup_by_index(self, index: int) -> Optional[RegistryEntry]:
        rows = self._rows
        if 1 <= index <= len(rows):
            return rows[index - 1]
        return None

    def contains_x(self, x: Scalar) -> bool:
        return x.to_bytes() in self._by_x

    def entries(self) -> Tuple[RegistryEntry, ...]:
        """All rows ordered by index."""
        return self._rows

    def __len__(self) -> int:
        return len(self._rows)

    def get_stats(self) -> Dict:
        rows = self._rows
        return {
            'group_size': len(rows),
            'path': str(self.path) if self.path is not None else None,
            'last_issued_at': rows[-1].issued_at.isoformat() if rows else None,
        }
