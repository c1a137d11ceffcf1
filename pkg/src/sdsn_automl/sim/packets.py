from __future__ import annotations

from dataclasses import dataclass


class PacketKind:
    UDP_DATA = "udp-data"
    PING_REQUEST = "ping-request"
    PING_REPLY = "ping-reply"
    CONTROL = "control"


@dataclass(slots=True)
class Packet:
    src_mac: int
    dst_mac: int
    src_ip: str
    dst_ip: str
    payload_size: int
    kind: str
    flow_id: str
    created_at: int
    seq: int = 0

    def __post_init__(self):
        if self.payload_size < 0:
            raise ValueError("payload_size must be >= 0")


def format_mac(mac: int) -> str:
    return ":".join(f"{(mac >> s) & 0xFF:02x}" for s in range(40, -8, -8))


def parse_mac(text: str) -> int:
    parts = text.split(":")
    if len(parts) != 6:
        raise ValueError(f"bad MAC address {text!r}")
    return int("".join(parts), 16)
