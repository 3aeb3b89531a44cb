"""Reading and writing PGM (P2 ASCII / P5 binary) gray images."""

import re

import numpy as np


class ImageFormatError(ValueError):
    pass


_MAGICS = {
    b"P1": "PBM (ASCII)", b"P3": "PPM (ASCII)", b"P4": "PBM (binary)",
    b"P6": "PPM (binary)", b"P7": "PAM",
    b"\x89P": "PNG", b"\xff\xd8": "JPEG", b"BM": "BMP", b"GI": "GIF",
    b"II": "TIFF", b"MM": "TIFF",
}


def _describe_magic(magic):
    name = _MAGICS.get(magic)
    shown = magic.decode("latin-1").encode("unicode_escape").decode("ascii")
    return f"{shown!r}" + (f" ({name})" if name else "")


def _tokens(data, pos, count):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    n = len(data)
    while len(out) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        out.append(data[start:pos])
    return out, pos


def decode_pgm(data):
    """Decode PGM bytes to a uint8 array scaled to maxval 255."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(f"unsupported image format: magic bytes {_describe_magic(magic)}, expected P2 or P5 PGM")
    (w, h, maxval), pos = _tokens(data, 2, 3)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise ImageFormatError(f"malformed PGM header: {exc}") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid PGM size {width}x{height}")
    if not 1 <= maxval <= 255:
        raise ImageFormatError(f"unsupported PGM maxval {maxval} (must be 1..255)")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raw = data[pos:pos + width * height]
        if len(raw) != width * height:
            raise ImageFormatError(f"truncated PGM raster: expected {width * height} bytes, got {len(raw)}")
        pixels = np.frombuffer(raw, dtype=np.uint8).astype(np.int64)
    else:
        body = re.sub(rb"#[^\r\n]*", b" ", data[pos:])
        pixels = np.array(body.split(), dtype=np.int64)
        if pixels.size != width * height:
            raise ImageFormatError(f"PGM raster has {pixels.size} samples, expected {width * height}")
    if pixels.size and pixels.max() > maxval:
        raise ImageFormatError("PGM sample exceeds maxval")
    if maxval != 255:
        pixels = (pixels * 255 + maxval // 2) // maxval
    return pixels.astype(np.uint8).reshape(height, width)


def read_pgm(path):
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def encode_pgm(img, binary=True):
    img = np.asarray(img, dtype=np.uint8)
    h, w = img.shape
    if binary:
        return b"P5\n%d %d\n255\n" % (w, h) + img.tobytes()
    lines = [b"P2", b"%d %d" % (w, h), b"255"]
    lines += [b" ".join(b"%d" % v for v in row) for row in img]
    return b"\n".join(lines) + b"\n"


def write_pgm(path, img, binary=True):
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img, binary))


def binary_to_gray(img):
    """Render a {0, 1} raster as black ink (0) on white (255)."""
    return np.where(np.asarray(img) > 0, 0, 255).astype(np.uint8)
