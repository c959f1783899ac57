from .braided import BraidedVectorSpace, braid_check, make_block
from .lifting import LiftingPresentation, SmashElement, build_lifting
from .nichols import nichols_dims
from .scalar import Scalar
from .ydcat import YDTriple, standard_triple

__all__ = [
    'BraidedVectorSpace',
    'LiftingPresentation',
    'Scalar',
    'SmashElement',
    'YDTriple',
    'braid_check',
    'build_lifting',
    'make_block',
    'nichols_dims',
    'standard_triple',
]
