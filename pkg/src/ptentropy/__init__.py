"""Shannon information entropies of Poschl-Teller eigenstates and coherent states."""
__version__ = "0.1.0"
