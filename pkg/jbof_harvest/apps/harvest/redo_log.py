"""
Redo log pages for offsite mapping updates.

A page is 4096 bytes: a 32-byte header followed by up to 254 records of 16
bytes. A record holds the entry offset within its segment (24 bits), the new
mapping value (32 bits), a sequence number (64 bits) and a checksum byte (the
low byte of the CRC-32 of the other 15 bytes). Replay returns the longest
prefix of records whose checksums hold.
"""
import struct
import zlib

import attr

from .constants import LOG_HEADER_SIZE, LOG_MAGIC, LOG_PAGE_SIZE, LOG_RECORD_SIZE, LOG_RECORDS_PER_PAGE
from .exceptions import LogClosedError

_HEADER = struct.Struct('<4sIQH14x')
_BODY = struct.Struct('<IQ')

MAX_OFFSET = (1 << 24) - 1
MAX_VALUE = (1 << 32) - 1


def _checksum(body):
    return zlib.crc32(body) & 0xFF


@attr.s(frozen=True, slots=True)
class RedoRecord:
    offset = attr.ib(type=int)
    value = attr.ib(type=int)
    sequence = attr.ib(type=int)

    def encode(self):
        body = self.offset.to_bytes(3, 'little') + _BODY.pack(self.value, self.sequence)
        return body + bytes([_checksum(body)])

    @classmethod
    def decode(cls, raw):
        """
        Decode 16 bytes, or return None when the checksum does not match.
        """
        body, checksum = raw[:LOG_RECORD_SIZE - 1], raw[LOG_RECORD_SIZE - 1]
        if _checksum(body) != checksum:
            return None
        value, sequence = _BODY.unpack(body[3:])
        return cls(int.from_bytes(body[:3], 'little'), value, sequence)


class RedoLogPage:
    """
    One log page bound to a harvested segment.
    """
    capacity = LOG_RECORDS_PER_PAGE

    def __init__(self, segment_id=0):
        self.segment_id = segment_id
        self.records = []
        self.closed = False
        self.commits = 0

    def __len__(self):
        return len(self.records)

    @property
    def full(self):
        return len(self.records) >= self.capacity

    def append(self, offset, value, sequence):
        """
        Add a record; returns False when the page is full.
        """
        if self.closed:
            raise LogClosedError(f'log page of segment {self.segment_id} belongs to a closed session')
        if not 0 <= offset <= MAX_OFFSET or not 0 <= value <= MAX_VALUE:
            raise ValueError(f'record ({offset}, {value}) does not fit the record layout')
        if self.records and sequence <= self.records[-1].sequence:
            raise ValueError(f'sequence {sequence} is not after {self.records[-1].sequence}')
        if self.full:
            return False
        self.records.append(RedoRecord(offset, value, sequence))
        self.commits += 1
        return True

    def clear(self):
        self.records = []

    def close(self):
        self.closed = True

    def encode(self):
        base = self.records[0].sequence if self.records else 0
        raw = bytearray(_HEADER.pack(LOG_MAGIC, self.segment_id, base, len(self.records)))
        for record in self.records:
            raw += record.encode()
        raw += bytes(LOG_PAGE_SIZE - len(raw))
        return bytes(raw)

    @staticmethod
    def replay(raw):
        """
        Records of an encoded page, up to the first damaged one.
        """
        magic, _, _, count = _HEADER.unpack_from(raw)
        if magic != LOG_MAGIC:
            return []
        records = []
        for i in range(min(count, LOG_RECORDS_PER_PAGE)):
            start = LOG_HEADER_SIZE + i * LOG_RECORD_SIZE
            record = RedoRecord.decode(raw[start:start + LOG_RECORD_SIZE])
            if record is None:
                break
            records.append(record)
        return records
