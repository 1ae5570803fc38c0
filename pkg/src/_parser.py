"""
parser.py
----------------------------------------

Parser for evidence expressions. The grammar:

    evidence    := observation (',' observation)*
    observation := IDENTIFIER '=' values ('@' IDENTIFIER)?
    values      := IDENTIFIER ('|' IDENTIFIER)*

``A=a0`` is hard evidence that A takes a0. ``B=b0|b1@0.8``
puts mass 0.8 on B being b0 or b1 and the rest on B's frame.

"""

from .lexer import Error, Lexer, TokenTypes
from .utils import BeltreeError
from .valuation import EvidencePotential


class ParserError(BeltreeError):
    exit_code = 1


class Observation:
    """
    One parsed observation, before it is checked against a model.
    """

    def __init__(self, name, values, mass=1.0, pos=0):
        self.name = name
        self.values = values
        self.mass = mass
        self.pos = pos

    def __repr__(self):
        return '{}={}@{}'.format(self.name, '|'.join(self.values), self.mass)


class Parser:
    """
    A recursive descent evidence parser. Given a model, variable
    names and labels are checked and reported at their position.
    """
    def __init__(self, text, model=None):
        self.lexer = Lexer(text)
        self.text = text
        self.model = model
        self.token = None

    def parse(self):
        """
        The top-level function of this class: a list of
        Observations, or EvidencePotentials when a model is given.
        """
        self._get_token()
        observations = self._evidence()
        if self.model is None:
            return observations
        return [self._potential(observation) for observation in observations]

    def _error(self, msg, pos=None):
        """
        Raise an error pointing at the column in the source.
        """
        if pos is None:
            pos = self.token.pos if self.token else len(self.text)
        raise ParserError('\n' + self.text + '\n' + ' ' * pos + '^\n\n' + msg)

    def _get_token(self):
        """
        Get the next token from the lexer. If the lexer returned an Error
        object, raise an error at the index the Error object holds.
        """
        self.token = self.lexer.next_token()
        if isinstance(self.token, Error):
            self._error('syntax error', self.token.pos)

    def _consume(self, token_type):
        """
        Check that the current token has type `token_type`, return
        it and move to the next one.
        """
        if self.token is None:
            self._error('Expected {}. Found end of input'.format(token_type))
        if self.token.token_type != token_type:
            self._error('Expected {}. Found {}'.format(token_type, self.token.token_type))
        token = self.token
        self._get_token()
        return token

    def _evidence(self):
        if self.token is None:
            self._error('Expected an observation such as A=a0')
        observations = [self._observation()]
        while self.token is not None:
            self._consume(TokenTypes.COMMA)
            observations.append(self._observation())
        return observations

    def _observation(self):
        name = self._consume(TokenTypes.IDENTIFIER)
        self._consume(TokenTypes.EQUALS)
        values = [self._consume(TokenTypes.IDENTIFIER)]
        while self.token is not None and self.token.token_type == TokenTypes.BAR:
            self._consume(TokenTypes.BAR)
            values.append(self._consume(TokenTypes.IDENTIFIER))
        mass = 1.0
        if self.token is not None and self.token.token_type == TokenTypes.AT:
            self._consume(TokenTypes.AT)
            mass = self._mass(self._consume(TokenTypes.IDENTIFIER))
        return Observation(name.val, [token.val for token in values], mass, name.pos)

    def _mass(self, token):
        try:
            mass = float(token.val)
        except ValueError:
            self._error('"{}" is not a number'.format(token.val), token.pos)
        if not 0.0 < mass <= 1.0:
            self._error('evidence mass must lie in (0, 1], got {}'.format(mass), token.pos)
        return mass

    def _potential(self, observation):
        if observation.name not in self.model:
            self._error('unknown variable "{}"'.format(observation.name), observation.pos)
        domain = self.model[observation.name].domain
        for value in observation.values:
            if value not in domain:
                pos = self.text.find(value, observation.pos + len(observation.name))
                self._error('"{}" is not a value of {}; expected one of {}'.format(
                    value, observation.name, ', '.join(domain)), pos)
        return EvidencePotential.observe(self.model, observation.name, observation.values, observation.mass)


def parse_evidence(text, model=None):
    return Parser(text, model).parse()
