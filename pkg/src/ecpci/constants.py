"""Physical constants and unit conversions (atomic units throughout)."""

HARTREE_TO_CM = 219474.63137054
BOHR_TO_NM = 0.052917720859
AU_TO_DEBYE = 2.54174
# electron masses per unified atomic mass unit (CODATA 2018)
AMU_TO_ME = 1822.888486209

MASS_MG24 = 23.985042
MASS_H1 = 1.007825

L_LETTERS = "spdfghi"
