"""Version information"""

VERSION = "0.1.0"
VERSION_TUPLE = (0, 1, 0)

# Version components
MAJOR = 0
MINOR = 1
PATCH = 0
