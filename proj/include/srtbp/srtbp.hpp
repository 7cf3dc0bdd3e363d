#ifndef SRTBP_SRTBP_HPP
#define SRTBP_SRTBP_HPP

#include <srtbp/certifier.hpp>
#include <srtbp/charts.hpp>
#include <srtbp/core.hpp>
#include <srtbp/dynamics.hpp>
#include <srtbp/golden.hpp>
#include <srtbp/hamiltonian.hpp>
#include <srtbp/hill.hpp>
#include <srtbp/io.hpp>
#include <srtbp/neck.hpp>
#include <srtbp/regularizer.hpp>

#endif  // SRTBP_SRTBP_HPP
