"""Physical constants used throughout the package.

All constants live here so that every module draws from a single, sourced
table. Values follow the 2019 revision of the SI, in which c and h are
exact by definition (CODATA).
"""

# Speed of light in vacuum, m/s (exact).
C_VACUUM = 299_792_458.0

# Same constant expressed in nm * THz, convenient for wavelength/frequency
# arithmetic quoted in nanometers and terahertz.
C_NM_THZ = 299_792.458

# Planck constant, J*s (exact).
PLANCK = 6.626_070_15e-34

# Standard reference conditions used by gas refractivity datasets.
STANDARD_PRESSURE_BAR = 1.013_25
STANDARD_TEMPERATURE_K = 273.15
