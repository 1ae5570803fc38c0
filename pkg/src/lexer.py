"""
lexer.py
----------------------------------------

A simple lexer based upon the "maximal munch" rule,
for evidence expressions such as ``A=a0`` or
``B=b0|b1@0.8, C=c1``.

"""

from collections import namedtuple

ADDITIONAL_IDENTIFIER_CHARS = {'_', '.', '+', '-'}
GARBAGE_CHARS = {' ', '\n', '\t', '\r'}

# Returned to the parser, in place of a token, when the
# current character is not part of the language.
Error = namedtuple('Error', 'pos')


def is_identifier(char):
    """
    Test if `char` may appear in a variable name, a value label
    or a mass.
    """
    return char.isalnum() or char in ADDITIONAL_IDENTIFIER_CHARS


class Token:
    """
    A simple Token structure.
    Contains the token type, value,
    and the position of the token.
    """

    def __init__(self, token_type, val, pos):
        self.token_type = token_type
        self.val = val
        self.pos = pos

    def __str__(self):
        return "{}({}) at {}".format(self.token_type, self.val, self.pos)


class TokenTypes:
    """
    A Structure for each possible type
    of token.
    """
    IDENTIFIER = 'IDENTIFIER'
    EQUALS = 'EQUALS'
    BAR = 'BAR'
    AT = 'AT'
    COMMA = 'COMMA'


PUNCTUATION = {
    '=': TokenTypes.EQUALS,
    '|': TokenTypes.BAR,
    '@': TokenTypes.AT,
    ',': TokenTypes.COMMA,
}


class Lexer:
    """
    A simple lexer based upon the "maximal munch" rule.
    """

    def __init__(self, buffer):
        self.buffer = buffer
        self.pos = 0

    def next_token(self):
        """
        Return the next token found in the input buffer. None is
        returned at the end of the buffer, an Error for a character
        that is not part of the language.
        """
        self._skip_whitespace()
        char = self._get_char()
        if char is None:
            return None
        elif is_identifier(char):
            return self._process_identifier()
        elif char in PUNCTUATION:
            return self._process_punctuation(char)
        else:
            return Error(self.pos)

    def _skip_whitespace(self):
        while self._get_char() is not None and self._get_char() in GARBAGE_CHARS:
            self.pos += 1

    def _process_identifier(self):
        """
        Construct an identifier Token.
        """
        endpos = self.pos + 1
        while self._get_char(endpos) is not None and is_identifier(self._get_char(endpos)):
            endpos += 1
        retval = Token(TokenTypes.IDENTIFIER, self.buffer[self.pos:endpos], self.pos)
        self.pos = endpos
        return retval

    def _process_punctuation(self, char):
        retval = Token(PUNCTUATION[char], char, self.pos)
        self.pos += 1
        return retval

    def _get_char(self, pos=None):
        """
        Try and get the character at `pos` (default: the current
        position). Return None past the end of the buffer.
        """
        offset = self.pos if pos is None else pos
        try:
            return self.buffer[offset]
        except IndexError:
            return None
