import logging

_log = logging.getLogger(__name__)
