# Routes package
from clocknet.cli.routes import born, freq, linearity, simulate, spectrum, verify

ROUTES = [freq, simulate, spectrum, born, linearity, verify]
