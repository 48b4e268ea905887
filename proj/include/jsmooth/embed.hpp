#pragma once

#include "jsmooth/dataset.hpp"
#include "jsmooth/spectral.hpp"

namespace jsmooth {

struct DiffusionEmbedding {
    Matrix coordinates;  // N x m, phi_i = lambda_i psi_i
    Vector eigenvalues;  // m non-trivial Markov eigenvalues, non-increasing
    double bandwidth = 0.0;
};

/// Row-normalized (random-walk) Markov matrix D^-1 K.
Matrix markov_matrix(const Matrix& kernel);

/// Diffusion-maps coordinates of the rows of `features`.
///
/// Gaussian kernel on the rows (bandwidth <= 0 selects 0.3 x median pairwise
/// distance), random-walk normalization with alpha = 0, eigenpairs from the
/// symmetric conjugate D^-1/2 K D^-1/2. The constant mode is dropped.
DiffusionEmbedding diffusion_maps(const Matrix& features, Index m, double bandwidth = 0.0,
                                  const EigenOptions& options = {});

}  // namespace jsmooth
