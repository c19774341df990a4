"""Exception hierarchy shared by all stages."""


class VqError(Exception):
    """Base class for every error raised by this package."""


class DataError(VqError):
    """Problem with input data (CLI exit status 2)."""


class ResolutionInvalid(DataError):
    pass


class FileUnreadable(DataError):
    pass


class TruncatedFrame(DataError):
    pass


class HeaderMalformed(DataError):
    pass


class UnsupportedColorspace(DataError):
    pass


class ResolutionMismatch(DataError):
    pass


class WordOverrun(DataError):
    """More payload words arrived than the frame geometry allows."""


class FrameIncomplete(DataError):
    """Frame finalized before all payload words were consumed."""


class TooFewBlocks(DataError):
    pass
