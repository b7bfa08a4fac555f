"""Version of kkkpsim package."""

from version_query import predict_version_str

try:
    VERSION = predict_version_str()
except ValueError:
    VERSION = '0.1.0.dev0'
