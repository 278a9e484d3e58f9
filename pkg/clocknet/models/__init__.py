from clocknet.models.register import QUBIT_LABELS, QUTRIT_LABELS, Register, SectorUnitary, SiteSpec

__all__ = ["QUBIT_LABELS", "QUTRIT_LABELS", "Register", "SectorUnitary", "SiteSpec"]
