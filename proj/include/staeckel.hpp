#pragma once

#include "staeckel/core.hpp"
#include "staeckel/diff.hpp"
#include "staeckel/dual.hpp"
#include "staeckel/dynamics.hpp"
#include "staeckel/geometry.hpp"
#include "staeckel/kstransform.hpp"
#include "staeckel/observables.hpp"
#include "staeckel/staeckel.hpp"
#include "staeckel/symbolic.hpp"
#include "staeckel/verify.hpp"
#include "staeckel/weyl.hpp"
