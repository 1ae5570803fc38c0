"""
utils.py
----------------------------------------

This module provides general utility functions
used across Beltree: the base error class, logging
setup for the command line, and helpers for the
integer bit-masks that encode sets of configurations.

"""

import logging

import numpy as np


class BeltreeError(Exception):
    """
    Base class of every error raised by Beltree. `exit_code`
    is the process status the command line reports for it.
    """
    exit_code = 2


def configure_logging(verbosity=0):
    """
    Configure the root logger for command line use. Library
    modules only ever call `logging.getLogger(__name__)`.
    """
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')


def popcount(mask):
    """
    Number of members in the set encoded by `mask`.
    """
    return bin(mask).count('1')


def iter_bits(mask):
    """
    Yield the positions of the set bits of `mask`, lowest first.
    """
    pos = 0
    while mask:
        if mask & 1:
            yield pos
        mask >>= 1
        pos += 1


def full_mask(size):
    """
    The mask with the lowest `size` bits set.
    """
    return (1 << size) - 1


def mask_to_array(mask, size):
    """
    Unpack a mask into a boolean membership vector of length `size`.
    """
    raw = mask.to_bytes((size + 7) // 8 or 1, 'little')
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder='little')
    return bits[:size].astype(bool)


def array_to_mask(members):
    """
    Pack a boolean membership vector back into a mask.
    """
    packed = np.packbits(np.asarray(members, dtype=bool), bitorder='little')
    return int.from_bytes(packed.tobytes(), 'little')
