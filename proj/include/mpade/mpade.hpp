#pragma once

// Multipoint Pade approximation through tridiagonal linear pencils zB - A:
// recurrence solutions, resolvent / m-function evaluation, Markov-function
// pencil construction, LU / UL factorizations with Christoffel / Geronimus
// transforms, and convergence / spectral diagnostics.

#include "mpade/errors.hpp"
#include "mpade/experiment.hpp"
#include "mpade/factorization.hpp"
#include "mpade/linear_poly.hpp"
#include "mpade/markov.hpp"
#include "mpade/pencil.hpp"
#include "mpade/recurrence.hpp"
#include "mpade/resolvent.hpp"
#include "mpade/scaled.hpp"
