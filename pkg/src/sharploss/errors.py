"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Array shapes are incompatible or too small for the operation."""


class ImageFormatError(ValueError):
    """A raster file is readable but not in a supported format or bit depth."""


class EmptyDomainError(ValueError):
    """The image does not contain a single full patch."""


class ConfigError(ValueError):
    """A configuration value is out of its valid range."""
