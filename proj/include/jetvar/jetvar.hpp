#pragma once

#include "jetvar/core/calculus.hpp"
#include "jetvar/core/equivalence.hpp"
#include "jetvar/core/evaluate.hpp"
#include "jetvar/core/expr.hpp"
#include "jetvar/core/normalize.hpp"
#include "jetvar/core/print.hpp"
#include "jetvar/jet/bundle.hpp"
#include "jetvar/jet/derivatives.hpp"
#include "jetvar/variational/variational.hpp"
#include "jetvar/hamiltonian/hamiltonian.hpp"
#include "jetvar/numeric/ode.hpp"
#include "jetvar/numeric/jacobi.hpp"
#include "jetvar/frontend/parser.hpp"
#include "jetvar/frontend/render.hpp"
#include "jetvar/frontend/cli.hpp"
