class DavioError(Exception):
    """Base class for errors raised by this package."""
