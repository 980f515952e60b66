#ifndef KUZLAB_KUZLAB_HPP_
#define KUZLAB_KUZLAB_HPP_

#include "kuzlab/asymptotics.hpp"
#include "kuzlab/digit_law.hpp"
#include "kuzlab/distdist.hpp"
#include "kuzlab/error.hpp"
#include "kuzlab/io.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/parallel.hpp"
#include "kuzlab/quadrature.hpp"
#include "kuzlab/rng.hpp"
#include "kuzlab/sharpness.hpp"
#include "kuzlab/spectral.hpp"
#include "kuzlab/specfun.hpp"
#include "kuzlab/torus.hpp"

#endif  // KUZLAB_KUZLAB_HPP_
