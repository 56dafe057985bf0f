#pragma once

#include "fermi/contour.hpp"
#include "fermi/ellipse.hpp"
#include "fermi/errors.hpp"
#include "fermi/fermi_curve.hpp"
#include "fermi/fft.hpp"
#include "fermi/gaussian_dynamics.hpp"
#include "fermi/grid.hpp"
#include "fermi/io.hpp"
#include "fermi/measurement.hpp"
#include "fermi/scenario.hpp"
#include "fermi/schrodinger.hpp"
#include "fermi/verification.hpp"
#include "fermi/wavefunction.hpp"
#include "fermi/wigner.hpp"
