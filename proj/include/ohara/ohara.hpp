#pragma once

// Everything except io.hpp, which additionally needs nlohmann/json.
#include "errors.hpp"
#include "spectral.hpp"
#include "curve.hpp"
#include "kernels.hpp"
#include "variations.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "norms.hpp"
#include "verify.hpp"
#include "flow.hpp"
#include "synthetic.hpp"
