"""Named experiment presets: default configuration texts.

A user config passed together with ``--preset`` overrides preset keys.
"""
from __future__ import annotations

PRESETS = {
    "structure": (
        "two-time structure function and OU autocorrelation of synthesized fields",
        """
[params]
alpha = 1.2
beta = 0.45
u0_velocity = 1.0
c0_dimensionless = 1.0
ell0_length = 1.0
ell1_length = 0.01
dim = 2

[run]
experiment = structure
seed = 1

[experiment]
n_realizations = 10000
n_modes = 256
ou_steps = 100000
""",
    ),
    "richardson": (
        "mean square separation t^p law of the white-noise limit diffusion",
        """
[params]
alpha = 1.2
beta = 0.45
u0_velocity = 1.0
c0_dimensionless = 1.0
ell0_length = 1.0
ell1_length = 0.001
dim = 2

[run]
experiment = richardson
seed = 1

[experiment]
model = kraichnan
kappa0_diffusivity = 0.0
x0_length = 1.0
t_first_time = 0.1
t_end_time = 1000.0
n_times = 80
n_pairs = 10000
fit_window_time = 100.0, 1000.0
tolerance = 0.10
""",
    ),
    "four-thirds": (
        "separation-conditioned relative diffusivity |x|^(2 eta) law with a flat control",
        """
[params]
alpha = 1.2
beta = 0.45
u0_velocity = 1.0
c0_dimensionless = 1.0
ell0_length = 1.0
ell1_length = 0.001
dim = 2

[run]
experiment = four-thirds
seed = 1

[experiment]
kappa0_diffusivity = 0.0
x0_length = 1.0
t_first_time = 0.1
t_end_time = 1000.0
n_times = 80
n_pairs = 10000
bin_min_length = 2.0
bin_max_length = 2000.0
n_bins = 12
tolerance = 0.10
control_kappa_diffusivity = 0.5
control_n_pairs = 2000
""",
    ),
    "kraichnan-limit": (
        "eps-sweep of rescaled colored ensembles against the limit diffusion (regime v)",
        """
[params]
alpha = 1.2
beta = 0.45
u0_velocity = 1.0
c0_dimensionless = 1.0
ell0_length = 1.0
ell1_length = 0.001
dim = 2

[run]
experiment = kraichnan-limit
seed = 1

[schedule]
epsilons = 0.4, 0.2, 0.1
k_prefactor_wavenumber = 0.3
k_exponent = -0.5
l_prefactor_length = 100.0
l_exponent = 0.0
kappa_prefactor_diffusivity = 0.02
kappa_exponent = 0.0
threshold = 0.1
infinite_outer_scale = false

[experiment]
x0_length = 1.0
t_end_time = 50.0
n_times = 100
n_pairs = 2000
oracle_n_pairs = 10000
n_modes = 128
""",
    ),
    "dissipation": (
        "passive scalar: maximum principle, measure preservation, energy residual",
        """
[params]
alpha = 1.2
beta = 0.45
u0_velocity = 1.0
c0_dimensionless = 1.0
ell0_length = 1.0
ell1_length = 0.001
dim = 2

[run]
experiment = dissipation
seed = 1

[experiment]
band_lo_wavenumber = 0.1
band_hi_wavenumber = 2.0
n_modes = 128
dt_time = 0.025
box_half_length = 6.0
bump_width_length = 1.0
conservative_points = 121
conservative_t_time = 2.0
kappa_tilde_diffusivity = 0.05
diffusive_points = 49
n_paths = 16
n_batches = 8
times_time = 0.5, 1.0, 2.0, 4.0
""",
    ),
    "boundary": (
        "boundary and frozen scalings: q = 1 - alpha/2 and the slowed field clock",
        """
[params]
alpha = 1.5
beta = 0.25
u0_velocity = 1.0
c0_dimensionless = 1.0
ell0_length = 1.0
ell1_length = 0.001
dim = 2

[run]
experiment = boundary
seed = 1

[experiment]
frozen_beta = 0.15
epsilons = 0.4, 0.2
k_wavenumber = 10.0
l_length = 10.0
lag_time = 0.5
separation_length = 0.5
n_realizations = 4000
""",
    ),
}


def preset_text(name: str) -> str:
    try:
        return PRESETS[name][1]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
