"""Time-domain direct sampling for point-like scatterers.

Synthesizes Born scattered data on a damped frequency contour, images it
with the damped sampling indicator (time or frequency path), and ships
quantitative verification suites for the bounds behind the method.
"""

from .forward import (Spectrum, TimeSeries, add_noise, load_timeseries,
                      save_timeseries, spectrum_from_timeseries,
                      synthesize_timeseries)
from .imaging import (ImagingConfig, ImagingGrid, indicator_freq,
                      indicator_freq_grid, indicator_grid, indicator_point,
                      normalize)
from .scene import (MeasurementSetup, PointScatterer, SamplingGrid, Scene,
                    arc_receivers, circle_receivers, load_scene,
                    square_receivers)
from .signals import (SignalSpec, TimeGrid, eval_signal, forward_laplace,
                      inverse_laplace)
from .specfun import (ComplexFrequency, fundamental_solution, hankel0_first,
                      mod_bessel_I0, mod_sph_bessel_i0, sph_bessel_j0)

__version__ = "0.1.0"
