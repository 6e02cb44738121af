"""Versioned binary file formats: dataset files and index snapshots.

Both formats are little-endian with fixed-width integers and are written
deterministically: building the same dataset twice produces byte-identical
files.

Dataset file (magic ``LCPD``, version 1)::

    magic[4] version:u16 symbol_width:u8 reserved:u8
    n:u64 length:u32 sigma:u32
    symbols: n * length * u16, row-major

Index snapshot (magic ``LCPI``, version 1)::

    magic[4] version:u16
    widths: symbol:u8 item_index:u8 node_id:u8 depth:u8 posting_len:u8 child_count:u8
    n:u64 length:u32 sigma:u32 node_count:u64
    then one record per node, in node-id order:
      depth:u16
      posting_len:u32, item indices u32 * posting_len
      child_count:u16, (symbol:u16 child_id:u32) * child_count

Node ids are assigned level by level, so records appear depth 0, then all
depth-1 nodes in prefix order, and so on; posting lists are non-empty only
at full depth.  Text ingestion maps whitespace-separated tokens to integer
ids in first-occurrence order and emits the vocabulary alongside, one token
per line (line number = id).
"""

from __future__ import annotations

import struct

import numpy as np

from .core import Alphabet, Dataset, InvalidInputError
from .trie import TrieIndex

DATASET_MAGIC = b"LCPD"
INDEX_MAGIC = b"LCPI"
FORMAT_VERSION = 1

_DATASET_HEADER = struct.Struct("<4sHBBQII")
_INDEX_HEADER = struct.Struct("<4sH6BQIIQ")
_INDEX_WIDTHS = (2, 4, 4, 2, 4, 2)  # symbol, item index, node id, depth, posting len, child count


# ---------------------------------------------------------------------------
# Dataset files
# ---------------------------------------------------------------------------

def write_dataset(path: str, dataset: Dataset) -> int:
    """Write a dataset file; returns the number of bytes written."""
    header = _DATASET_HEADER.pack(
        DATASET_MAGIC, FORMAT_VERSION, 2, 0, dataset.n, dataset.length, dataset.alphabet.size
    )
    payload = np.ascontiguousarray(dataset.items, dtype="<u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    return len(header) + len(payload)


def read_dataset(path: str) -> Dataset:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _DATASET_HEADER.size:
        raise InvalidInputError(f"{path}: truncated dataset header")
    magic, version, sym_w, _, n, length, sigma = _DATASET_HEADER.unpack_from(raw, 0)
    if magic != DATASET_MAGIC:
        raise InvalidInputError(f"{path}: not a dataset file (bad magic {magic!r})")
    if version != FORMAT_VERSION:
        raise InvalidInputError(f"{path}: unsupported dataset version {version}")
    if sym_w != 2:
        raise InvalidInputError(f"{path}: unsupported symbol width {sym_w}")
    expected = _DATASET_HEADER.size + n * length * 2
    if len(raw) != expected:
        raise InvalidInputError(
            f"{path}: payload size mismatch (expected {expected} bytes, found {len(raw)})"
        )
    rows = np.frombuffer(raw, dtype="<u2", offset=_DATASET_HEADER.size).reshape(n, length)
    return Dataset.from_rows(rows.astype(np.uint16), Alphabet(sigma))


# ---------------------------------------------------------------------------
# Text ingestion
# ---------------------------------------------------------------------------

def ingest_text(path: str) -> tuple[Dataset, list[str]]:
    """Read one whitespace-separated token sequence per line.

    Tokens are mapped to integer symbols in first-occurrence order; the
    vocabulary list index is the symbol id.  All lines must have the same
    token count; a mismatch names the offending line.  An empty file yields
    an empty dataset of length 1.
    """
    vocab: dict[str, int] = {}
    rows: list[list[int]] = []
    length: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            if length is None:
                length = len(tokens)
            elif len(tokens) != length:
                raise InvalidInputError(
                    f"{path}:{lineno}: expected {length} tokens per line, found {len(tokens)}"
                )
            row = [vocab.setdefault(tok, len(vocab)) for tok in tokens]
            rows.append(row)
    ordered = sorted(vocab, key=vocab.get)
    if length is None:
        return (
            Dataset.from_rows(np.zeros((0, 1), dtype=np.uint16), Alphabet(2)),
            ordered,
        )
    sigma = max(2, len(vocab))
    if sigma > 65536:
        raise InvalidInputError(f"{path}: vocabulary of {len(vocab)} tokens exceeds 65536")
    return Dataset.from_rows(np.asarray(rows, dtype=np.uint16), Alphabet(sigma)), ordered


def write_vocab(path: str, vocab: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in vocab:
            fh.write(token + "\n")


def read_vocab(path: str) -> dict[str, int]:
    mapping: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            mapping[line.rstrip("\n")] = i
    return mapping


# ---------------------------------------------------------------------------
# Index snapshots
# ---------------------------------------------------------------------------

def _scatter_u16(buf: np.ndarray, pos: np.ndarray, values: np.ndarray) -> None:
    v = values.astype(np.int64)
    buf[pos] = (v & 0xFF).astype(np.uint8)
    buf[pos + 1] = ((v >> 8) & 0xFF).astype(np.uint8)


def _scatter_u32(buf: np.ndarray, pos: np.ndarray, values: np.ndarray) -> None:
    v = values.astype(np.int64)
    for byte in range(4):
        buf[pos + byte] = ((v >> (8 * byte)) & 0xFF).astype(np.uint8)


def index_snapshot_bytes(index: TrieIndex) -> bytes:
    """Serialize a built index; byte-identical for identical datasets."""
    header = _INDEX_HEADER.pack(
        INDEX_MAGIC,
        FORMAT_VERSION,
        *_INDEX_WIDTHS,
        index.n,
        index.length,
        index.sigma,
        index.node_count,
    )
    chunks = [header]
    n = index.n
    offs = index.level_offset
    for d in range(index.length + 1):
        base, end = int(offs[d]), int(offs[d + 1])
        m = end - base
        if m == 0:
            continue
        lvl_lo = index.row_lo[base:end].astype(np.int64)
        sizes = np.append(lvl_lo[1:], n) - lvl_lo
        is_leaf_level = d == index.length
        if is_leaf_level or n == 0:
            plen = sizes if (is_leaf_level and n > 0) else np.zeros(m, dtype=np.int64)
            rec_sizes = 8 + 4 * plen
            starts = np.concatenate(([0], np.cumsum(rec_sizes)))
            buf = np.zeros(int(starts[-1]), dtype=np.uint8)
            _scatter_u16(buf, starts[:-1], np.full(m, d))
            _scatter_u32(buf, starts[:-1] + 2, plen)
            if plen.sum() > 0:
                # posting stream in id order is exactly the sort permutation
                leaf_of = np.searchsorted(lvl_lo, np.arange(n), side="right") - 1
                rank = np.arange(n) - lvl_lo[leaf_of]
                pos = starts[leaf_of] + 6 + 4 * rank
                _scatter_u32(buf, pos, index.order.astype(np.int64))
            _scatter_u16(buf, starts[:-1] + 6 + 4 * plen, np.zeros(m, dtype=np.int64))
            chunks.append(buf.tobytes())
        else:
            nb, ne = int(offs[d + 1]), int(offs[d + 2])
            child_lo = index.row_lo[nb:ne].astype(np.int64)
            first_child = np.searchsorted(child_lo, lvl_lo, side="left")
            cc = np.append(first_child[1:], ne - nb) - first_child
            rec_sizes = 8 + 6 * cc
            starts = np.concatenate(([0], np.cumsum(rec_sizes)))
            buf = np.zeros(int(starts[-1]), dtype=np.uint8)
            _scatter_u16(buf, starts[:-1], np.full(m, d))
            _scatter_u16(buf, starts[:-1] + 6, cc)
            n_children = ne - nb
            if n_children:
                parent = np.searchsorted(first_child, np.arange(n_children), side="right") - 1
                rank = np.arange(n_children) - first_child[parent]
                pos = starts[parent] + 8 + 6 * rank
                _scatter_u16(buf, pos, index.edge_symbol[nb:ne])
                _scatter_u32(buf, pos + 2, np.arange(nb, ne, dtype=np.int64))
            chunks.append(buf.tobytes())
    return b"".join(chunks)


def write_index(path: str, index: TrieIndex) -> int:
    data = index_snapshot_bytes(index)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def read_index(path: str) -> TrieIndex:
    with open(path, "rb") as fh:
        raw = fh.read()
    return index_from_snapshot_bytes(raw, name=path)


def index_from_snapshot_bytes(raw: bytes, name: str = "<bytes>") -> TrieIndex:
    if len(raw) < _INDEX_HEADER.size:
        raise InvalidInputError(f"{name}: truncated index header")
    fields = _INDEX_HEADER.unpack_from(raw, 0)
    magic, version = fields[0], fields[1]
    widths = fields[2:8]
    n, length, sigma, node_count = fields[8:]
    if magic != INDEX_MAGIC:
        raise InvalidInputError(f"{name}: not an index snapshot (bad magic {magic!r})")
    if version != FORMAT_VERSION:
        raise InvalidInputError(f"{name}: unsupported snapshot version {version}")
    if tuple(widths) != _INDEX_WIDTHS:
        raise InvalidInputError(f"{name}: unsupported field widths {widths}")

    buf = np.frombuffer(raw, dtype=np.uint8)
    view = memoryview(raw)
    pos = _INDEX_HEADER.size
    parsed = 0
    level_counts: list[int] = []
    level_meta: list[dict] = []
    expected_level = 1

    while parsed < node_count:
        count = expected_level
        starts = np.empty(count, dtype=np.int64)
        plens = np.empty(count, dtype=np.int64)
        ccs = np.empty(count, dtype=np.int64)
        depth_seen = None
        for i in range(count):
            if pos + 8 > len(raw):
                raise InvalidInputError(f"{name}: truncated node record at byte {pos}")
            starts[i] = pos
            depth = int.from_bytes(view[pos : pos + 2], "little")
            plen = int.from_bytes(view[pos + 2 : pos + 6], "little")
            cc_at = pos + 6 + 4 * plen
            if cc_at + 2 > len(raw):
                raise InvalidInputError(f"{name}: truncated posting list at byte {pos}")
            cc = int.from_bytes(view[cc_at : cc_at + 2], "little")
            if depth_seen is None:
                depth_seen = depth
            elif depth != depth_seen:
                raise InvalidInputError(
                    f"{name}: node {parsed + i} depth {depth} breaks level order"
                )
            plens[i] = plen
            ccs[i] = cc
            pos = cc_at + 2 + 6 * cc
        d = len(level_counts)
        if depth_seen != d:
            raise InvalidInputError(f"{name}: expected depth {d}, found {depth_seen}")
        level_counts.append(count)
        level_meta.append({"starts": starts, "plens": plens, "ccs": ccs})
        parsed += count
        expected_level = int(ccs.sum())
        if expected_level == 0:
            break
    if parsed != node_count:
        raise InvalidInputError(
            f"{name}: header claims {node_count} nodes, file holds {parsed}"
        )
    if pos != len(raw):
        raise InvalidInputError(f"{name}: {len(raw) - pos} trailing bytes")

    depth_levels = len(level_counts) - 1
    if depth_levels > length:
        raise InvalidInputError(f"{name}: node depth exceeds declared length {length}")

    level_offset = np.zeros(length + 2, dtype=np.int64)
    total = 0
    for d in range(length + 2):
        level_offset[d] = total
        if d < len(level_counts):
            total += level_counts[d]
    level_offset[len(level_counts) :] = total

    edge_symbol = np.zeros(node_count, dtype=np.uint16)
    order_parts: list[np.ndarray] = []
    sizes_by_level: list[np.ndarray] = [np.zeros(0, dtype=np.int64)] * len(level_counts)

    # Children must be the next level's ids in order; recover edge symbols.
    next_id = 1
    for d, meta in enumerate(level_meta):
        total_children = int(meta["ccs"].sum())
        if total_children == 0:
            continue
        syms = np.empty(total_children, dtype=np.uint16)
        cids = np.empty(total_children, dtype=np.int64)
        j = 0
        for s, plen, cc in zip(meta["starts"], meta["plens"], meta["ccs"]):
            base = int(s) + 6 + 4 * int(plen) + 2
            if cc:
                pairs = buf[base : base + 6 * int(cc)].reshape(int(cc), 6)
                syms[j : j + int(cc)] = pairs[:, 0].astype(np.uint16) | (
                    pairs[:, 1].astype(np.uint16) << 8
                )
                cid = (
                    pairs[:, 2].astype(np.int64)
                    | (pairs[:, 3].astype(np.int64) << 8)
                    | (pairs[:, 4].astype(np.int64) << 16)
                    | (pairs[:, 5].astype(np.int64) << 24)
                )
                cids[j : j + int(cc)] = cid
                j += int(cc)
        expected_ids = np.arange(next_id, next_id + total_children, dtype=np.int64)
        if not np.array_equal(np.sort(cids), expected_ids):
            raise InvalidInputError(f"{name}: child ids at depth {d} are not the next level")
        edge_symbol[cids] = syms
        next_id += total_children

    # Postings (leaf level) concatenated in id order form the sort permutation.
    leaf_meta = level_meta[-1]
    plens = leaf_meta["plens"]
    if int(plens.sum()) != n:
        raise InvalidInputError(
            f"{name}: posting lists hold {int(plens.sum())} items, header claims {n}"
        )
    for s, plen in zip(leaf_meta["starts"], plens):
        if plen:
            start = int(s) + 6
            chunk = buf[start : start + 4 * int(plen)].reshape(int(plen), 4)
            order_parts.append(
                chunk[:, 0].astype(np.int64)
                | (chunk[:, 1].astype(np.int64) << 8)
                | (chunk[:, 2].astype(np.int64) << 16)
                | (chunk[:, 3].astype(np.int64) << 24)
            )
    order = (
        np.concatenate(order_parts) if order_parts else np.zeros(0, dtype=np.int64)
    )

    # Subtree sizes bottom-up, then row offsets as per-level exclusive cumsums.
    sizes_by_level[-1] = plens.copy()
    for d in range(len(level_counts) - 2, -1, -1):
        ccs = level_meta[d]["ccs"]
        if n > 0 and (ccs < 1).any():
            raise InvalidInputError(f"{name}: childless interior node at depth {d}")
        child_sizes = sizes_by_level[d + 1]
        firsts = np.concatenate(([0], np.cumsum(ccs)))[:-1]
        if child_sizes.size:
            sizes = np.add.reduceat(child_sizes, firsts)
        else:
            sizes = level_meta[d]["plens"].copy()
        sizes_by_level[d] = sizes

    row_parts = []
    for sizes in sizes_by_level:
        row_parts.append(np.concatenate(([0], np.cumsum(sizes)))[:-1])
    row_lo = (
        np.concatenate(row_parts).astype(np.int32)
        if row_parts
        else np.zeros(1, dtype=np.int32)
    )

    index = TrieIndex(
        n=int(n),
        length=int(length),
        sigma=int(sigma),
        order=order.astype(np.int32),
        row_lo=row_lo,
        edge_symbol=edge_symbol,
        level_offset=level_offset,
    )
    index.check_invariants()
    return index
