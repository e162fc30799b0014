"""Exception hierarchy. Every error carries a stable machine-readable code
so the CLI can emit structured errors on stderr."""


class Pano3DError(Exception):
    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InvalidArgumentError(Pano3DError):
    code = "invalid-argument"


class BehindCameraError(Pano3DError):
    code = "behind-camera"


class InvalidDepthError(Pano3DError):
    code = "invalid-depth"


class NearZeroError(Pano3DError):
    code = "near-zero"


class EmptyMaskError(Pano3DError):
    code = "empty-mask"


class EmptySupportError(Pano3DError):
    code = "empty-support"


class DegenerateShapeError(Pano3DError):
    code = "degenerate-shape"


class DegenerateLayoutError(Pano3DError):
    code = "degenerate-layout"


class InvalidLedgerError(Pano3DError):
    code = "invalid-ledger"


class EncodingError(Pano3DError):
    code = "encoding-error"


class DecodingError(Pano3DError):
    code = "decoding-error"


class InputIOError(Pano3DError):
    code = "io-error"
